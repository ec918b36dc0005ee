#pragma once

// HTTP adapters for external recognition/translation providers.
//
// Wire format:
//   POST /transcribe {"segment_id", "audio_b64" (base64 PCM WAV), "lang": code | "MULTI"}
//     -> {"text": tagged text, "words": [{"w", "start_s", "end_s"}]?}
//   POST /translate  {"text", "src", "tgt"} -> {"text"}

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "verbatim/engines.hpp"

namespace verbatim::engines {

struct HttpEndpoint {
  std::string base_url;  // "http://host:port"
  std::chrono::milliseconds timeout{10000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{100};  // doubled after every failed attempt
  double rate_per_s = 0.0;                 // token-bucket refill rate; 0 disables limiting
  double burst = 1.0;
};

/// Thread-safe token bucket; acquire() blocks until a token is available.
class TokenBucket {
 public:
  TokenBucket(double rate_per_s, double burst);
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mutex_;
  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
};

/// POST `request` as JSON to `path`. Connection failures, timeouts and 5xx responses are
/// retried with exponential backoff up to max_attempts; 4xx is not retried. Failures surface
/// as EngineError (unavailable | timeout | rejected | schema_violation), never as crashes.
nlohmann::json http_engine_call(const HttpEndpoint& endpoint, const std::string& path,
                                const nlohmann::json& request, TokenBucket* limiter = nullptr);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

class HttpTranscriber final : public SpeechToText {
 public:
  HttpTranscriber(std::string id, HttpEndpoint endpoint);
  const std::string& id() const override { return id_; }
  Hypothesis transcribe(const Segment& segment, const AudioClip& audio, SourceLanguage hint) const override;

 private:
  std::string id_;
  HttpEndpoint endpoint_;
  std::unique_ptr<TokenBucket> limiter_;
};

class HttpTranslator final : public Translator {
 public:
  HttpTranslator(std::string id, HttpEndpoint endpoint);
  const std::string& id() const override { return id_; }
  std::string translate(std::string_view text, Language src, Language tgt) const override;

 private:
  std::string id_;
  HttpEndpoint endpoint_;
  std::unique_ptr<TokenBucket> limiter_;
};

}  // namespace verbatim::engines
