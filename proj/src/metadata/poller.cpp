#include <condition_variable>
#include <thread>

#include <httplib.h>

#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"
#include "verbatim/metadata.hpp"
#include "verbatim/serialize.hpp"

namespace verbatim::metadata {

HttpManifestSource::HttpManifestSource(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

RemoteManifest HttpManifestSource::fetch(const std::string& meeting_id) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const std::string path = "/meetings/" + httplib::detail::encode_url(meeting_id);
  auto res = client.Get(path);
  if (!res) throw Error(base_url_ + path + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(base_url_ + path + ": HTTP " + std::to_string(res->status));

  Json doc = Json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw ParseError("", "malformed JSON from manifest source");
  RemoteManifest remote;
  remote.manifest = manifest_from_json(doc);
  remote.closed = doc.value("closed", false);
  return remote;
}

std::string_view to_string(PollStatus status) {
  switch (status) {
    case PollStatus::unchanged: return "unchanged";
    case PollStatus::applied: return "applied";
    case PollStatus::no_op: return "no_op";
    case PollStatus::stale_rejected: return "stale_rejected";
    case PollStatus::source_error: return "source_error";
  }
  return "?";
}

MetadataPoller::MetadataPoller(std::shared_ptr<ManifestSource> source, std::shared_ptr<ManifestStore> store,
                               std::string meeting_id, std::chrono::milliseconds interval)
    : source_(std::move(source)),
      store_(std::move(store)),
      meeting_id_(std::move(meeting_id)),
      interval_(interval),
      last_remote_version_(store_->current()->version) {}

PollResult MetadataPoller::poll_once() {
  PollResult result;
  RemoteManifest remote;
  try {
    remote = source_->fetch(meeting_id_);
  } catch (const std::exception& e) {
    result.status = PollStatus::source_error;
    result.message = e.what();
    log::warn("metadata poll for " + meeting_id_ + " failed: " + result.message);
    if (listener_) listener_(result);
    return result;
  }

  result.remote_version = remote.manifest.version;
  result.closed = remote.closed;
  if (remote.manifest.version < last_remote_version_) {
    result.status = PollStatus::stale_rejected;
    result.message = "remote version " + std::to_string(remote.manifest.version) + " is behind " +
                     std::to_string(last_remote_version_);
    log::warn("metadata poll for " + meeting_id_ + ": " + result.message);
  } else if (remote.manifest.version == last_remote_version_) {
    result.status = PollStatus::unchanged;
  } else {
    const auto local = store_->current();
    auto delta = diff_manifests(*local, remote.manifest);
    if (delta.empty()) {
      result.status = PollStatus::no_op;
      last_remote_version_ = remote.manifest.version;
    } else {
      try {
        store_->apply(delta);
        result.status = PollStatus::applied;
        result.delta = std::move(delta);
        last_remote_version_ = remote.manifest.version;
      } catch (const std::exception& e) {
        // Left at the old remote version so a corrected manifest is picked up later.
        result.status = PollStatus::source_error;
        result.message = e.what();
        log::warn("metadata delta for " + meeting_id_ + " rejected: " + result.message);
      }
    }
  }
  if (listener_) listener_(result);
  return result;
}

void MetadataPoller::run(std::stop_token stop) {
  std::mutex mutex;
  std::condition_variable_any wake;
  while (!stop.stop_requested()) {
    if (poll_once().closed) return;
    std::unique_lock lock(mutex);
    wake.wait_for(lock, stop, interval_, [] { return false; });
  }
}

}  // namespace verbatim::metadata
