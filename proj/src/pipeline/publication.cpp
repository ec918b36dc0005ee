#include <openssl/evp.h>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <thread>

#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"
#include "verbatim/pipeline.hpp"

namespace verbatim::pipeline {

using Json = nlohmann::json;

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Json to_json(const PublicationRecord& r) {
  return {{"seq", r.seq},   {"timestamp", r.timestamp}, {"meeting_id", r.meeting_id}, {"kind", r.kind},
          {"key", r.key},   {"digest", r.digest},       {"file", r.file}};
}

namespace {

PublicationRecord record_from_json(const Json& j) {
  return {j.at("seq").get<std::uint64_t>(), j.at("timestamp").get<std::string>(), j.at("meeting_id").get<std::string>(),
          j.at("kind").get<std::string>(),  j.at("key").get<std::string>(),       j.at("digest").get<std::string>(),
          j.at("file").get<std::string>()};
}

std::string format_utc(std::chrono::system_clock::time_point t) {
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(us / 1000000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<long long>(us % 1000000));
  return buf;
}

}  // namespace

PublicationSink::PublicationSink(std::filesystem::path dir, int max_attempts)
    : dir_(std::move(dir)), max_attempts_(std::max(1, max_attempts)) {
  std::filesystem::create_directories(dir_);
  std::ifstream in(dir_ / "publication.log");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      log::warn("publication log: skipping torn record");
      continue;
    }
    records_.push_back(record_from_json(j));
  }
}

PublicationRecord PublicationSink::publish(const std::string& meeting_id, const std::string& kind,
                                           const std::string& key, std::span<const std::uint8_t> bytes,
                                           const std::string& file_name) {
  const std::string digest = sha256_hex(bytes);
  std::lock_guard lock(mutex_);
  for (const auto& r : records_) {
    if (r.meeting_id == meeting_id && r.key == key && r.digest == digest) return r;
  }

  const std::filesystem::path relative = std::filesystem::path(meeting_dir_name(meeting_id)) / file_name;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
    try {
      std::filesystem::create_directories((dir_ / relative).parent_path());
      std::ofstream out(dir_ / relative, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      out.close();
      if (!out) throw Error("write failed");
      last_error.clear();
      break;
    } catch (const std::exception& e) {
      last_error = e.what();
      std::this_thread::sleep_for(std::chrono::milliseconds(10 * attempt));
    }
  }
  if (!last_error.empty()) throw Error("publication of " + key + " failed: " + last_error);

  auto now = std::chrono::time_point_cast<std::chrono::microseconds>(std::chrono::system_clock::now());
  if (now <= last_stamp_) {
    now = std::chrono::time_point_cast<std::chrono::microseconds>(last_stamp_) + std::chrono::microseconds(1);
  }
  last_stamp_ = now;

  PublicationRecord record{records_.empty() ? 1 : records_.back().seq + 1,
                           format_utc(now),
                           meeting_id,
                           kind,
                           key,
                           digest,
                           relative.generic_string()};
  std::ofstream log_out(dir_ / "publication.log", std::ios::app | std::ios::binary);
  log_out << to_json(record).dump() << '\n';
  if (!log_out) throw Error("cannot append to publication log");
  records_.push_back(record);
  return record;
}

std::vector<PublicationRecord> PublicationSink::records(const std::optional<std::string>& meeting_id) const {
  std::lock_guard lock(mutex_);
  if (!meeting_id) return records_;
  std::vector<PublicationRecord> out;
  for (const auto& r : records_) {
    if (r.meeting_id == *meeting_id) out.push_back(r);
  }
  return out;
}

PublicationGate::PublicationGate(bool closed) : open_(!closed) {}

void PublicationGate::open() {
  {
    std::lock_guard lock(mutex_);
    open_ = true;
  }
  cv_.notify_all();
}

void PublicationGate::wait() const {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [this] { return open_; });
}

bool PublicationGate::is_open() const {
  std::lock_guard lock(mutex_);
  return open_;
}

}  // namespace verbatim::pipeline
