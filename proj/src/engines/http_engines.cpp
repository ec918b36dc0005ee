#include "verbatim/http_engines.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <thread>

#include <httplib.h>

#include "verbatim/audio/wav.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"
#include "verbatim/text.hpp"

namespace verbatim::engines {

using Json = nlohmann::json;

TokenBucket::TokenBucket(double rate_per_s, double burst)
    : rate_(rate_per_s), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(Clock::now()) {}

void TokenBucket::acquire() {
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    tokens_ = std::min(capacity_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait_s = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParseError("", "base64 length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ParseError("", "invalid base64");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

Json http_engine_call(const HttpEndpoint& endpoint, const std::string& path, const Json& request,
                      TokenBucket* limiter) {
  const std::string body = request.dump();
  auto delay = endpoint.backoff;
  const int attempts = std::max(1, endpoint.max_attempts);
  EngineErrorKind last_kind = EngineErrorKind::unavailable;
  std::string last_message;

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (limiter) limiter->acquire();
    httplib::Client client(endpoint.base_url);
    client.set_connection_timeout(endpoint.timeout);
    client.set_read_timeout(endpoint.timeout);
    client.set_write_timeout(endpoint.timeout);

    auto result = client.Post(path, body, "application/json");
    if (!result) {
      const auto err = result.error();
      last_kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                      ? EngineErrorKind::timeout
                      : EngineErrorKind::unavailable;
      last_message = endpoint.base_url + path + ": " + httplib::to_string(err);
    } else if (result->status >= 500) {
      last_kind = EngineErrorKind::unavailable;
      last_message = endpoint.base_url + path + ": HTTP " + std::to_string(result->status);
    } else if (result->status < 200 || result->status >= 300) {
      throw EngineError(EngineErrorKind::rejected,
                        endpoint.base_url + path + ": HTTP " + std::to_string(result->status));
    } else {
      Json response = Json::parse(result->body, nullptr, false);
      if (response.is_discarded() || !response.is_object()) {
        throw EngineError(EngineErrorKind::schema_violation, endpoint.base_url + path + ": response is not a JSON object");
      }
      return response;
    }

    log::debug("engine call attempt " + std::to_string(attempt) + " failed: " + last_message);
    if (attempt < attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  throw EngineError(last_kind, last_message + " after " + std::to_string(attempts) + " attempts");
}

namespace {

std::unique_ptr<TokenBucket> make_limiter(const HttpEndpoint& endpoint) {
  if (endpoint.rate_per_s <= 0) return nullptr;
  return std::make_unique<TokenBucket>(endpoint.rate_per_s, endpoint.burst);
}

std::string require_text(const Json& response) {
  if (!response.contains("text") || !response["text"].is_string()) {
    throw EngineError(EngineErrorKind::schema_violation, "schema violation: response missing \"text\"");
  }
  return response["text"].get<std::string>();
}

}  // namespace

HttpTranscriber::HttpTranscriber(std::string id, HttpEndpoint endpoint)
    : id_(std::move(id)), endpoint_(std::move(endpoint)), limiter_(make_limiter(endpoint_)) {}

Hypothesis HttpTranscriber::transcribe(const Segment& segment, const AudioClip& audio, SourceLanguage hint) const {
  const Json request{{"segment_id", segment.segment_id},
                     {"audio_b64", base64_encode(audio::encode_wav(audio))},
                     {"lang", to_string(hint)}};
  const Json response = http_engine_call(endpoint_, "/transcribe", request, limiter_.get());

  Hypothesis hyp;
  hyp.engine_id = id_;
  hyp.tokens = text::split_tagged(require_text(response));
  if (response.contains("words") && !response["words"].is_null()) {
    const auto& words = response["words"];
    if (!words.is_array()) throw EngineError(EngineErrorKind::schema_violation, "schema violation: \"words\" not an array");
    std::vector<WordTiming> timings;
    for (const auto& w : words) {
      if (!w.is_object() || !w.contains("w") || !w["w"].is_string() || !w.contains("start_s") ||
          !w["start_s"].is_number() || !w.contains("end_s") || !w["end_s"].is_number()) {
        throw EngineError(EngineErrorKind::schema_violation, "schema violation: malformed word entry");
      }
      timings.push_back({w["w"].get<std::string>(), w["start_s"].get<double>(), w["end_s"].get<double>(), std::nullopt});
    }
    hyp.words = std::move(timings);
  }
  return hyp;
}

HttpTranslator::HttpTranslator(std::string id, HttpEndpoint endpoint)
    : id_(std::move(id)), endpoint_(std::move(endpoint)), limiter_(make_limiter(endpoint_)) {}

std::string HttpTranslator::translate(std::string_view text, Language src, Language tgt) const {
  if (src == tgt) return std::string(text);
  const Json request{{"text", text}, {"src", to_string(src)}, {"tgt", to_string(tgt)}};
  return require_text(http_engine_call(endpoint_, "/translate", request, limiter_.get()));
}

}  // namespace verbatim::engines
