#pragma once

// Meeting manifests from the conference system: parsing, naming convention, versioned
// deltas and the polling loop that keeps a local copy current.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "verbatim/core.hpp"

namespace verbatim::metadata {

/// Parses and validates; any structural or invariant failure is a ParseError naming the field.
MeetingManifest parse_manifest(std::string_view json_text);
std::string serialize_manifest(const MeetingManifest& manifest);

/// Default shape "{ORG}/{BODY}/{YYYY-MM-DD}/Session-{n}", ORG and BODY upper-case alphanumerics.
struct TitleConvention {
  std::string pattern = R"(^[A-Z0-9]+/[A-Z0-9]+/(\d{4})-(\d{2})-(\d{2})/Session-[1-9][0-9]*$)";
  bool check_calendar_date = true;  // applies when the pattern captures year, month, day
};

struct TitleCheck {
  std::optional<std::string> violation;  // "empty title" | "title does not match convention" | "invalid date"
  std::string duplicate_key;

  bool ok() const { return !violation.has_value(); }
};

/// Collision key: diacritics folded, lower-cased, whitespace runs collapsed to one space and
/// trimmed. Idempotent.
std::string duplicate_key(std::string_view title);

TitleCheck validate_meeting_title(std::string_view title, const TitleConvention& convention = {});

/// Replacement values for the fields that changed; absent means "leave as is".
struct MetadataDelta {
  std::uint64_t base_version = 0;
  std::optional<std::string> title;
  std::optional<std::string> category;
  std::optional<std::vector<AgendaItem>> agenda;
  std::optional<std::vector<SpeakerTurn>> speakers;
  std::optional<std::vector<DocumentRef>> documents;

  bool empty() const { return !title && !category && !agenda && !speakers && !documents; }
  friend bool operator==(const MetadataDelta&, const MetadataDelta&) = default;
};

nlohmann::json to_json(const MetadataDelta& delta);

/// Throws ConflictError("conflict") when base_version differs from manifest.version. A delta
/// that changes nothing returns the manifest as is; otherwise the version advances by one.
/// A delta whose result fails validation throws ParseError.
MeetingManifest apply_delta(const MeetingManifest& manifest, const MetadataDelta& delta);

/// Fields of `remote` that differ from `local`, based on local.version.
MetadataDelta diff_manifests(const MeetingManifest& local, const MeetingManifest& remote);

/// Per-meeting manifest holder. Readers get immutable snapshots; updates are serialized and
/// every accepted version is kept.
class ManifestStore {
 public:
  explicit ManifestStore(MeetingManifest initial);

  std::shared_ptr<const MeetingManifest> current() const;
  /// apply_delta under the store lock; returns the new snapshot.
  std::shared_ptr<const MeetingManifest> apply(const MetadataDelta& delta);
  std::vector<MeetingManifest> history() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const MeetingManifest> current_;
  std::vector<std::shared_ptr<const MeetingManifest>> history_;
};

struct RemoteManifest {
  MeetingManifest manifest;  // manifest.version is the source's version counter
  bool closed = false;
};

class ManifestSource {
 public:
  virtual ~ManifestSource() = default;
  /// Throws on transport or format failure.
  virtual RemoteManifest fetch(const std::string& meeting_id) = 0;
};

/// GET {base_url}/meetings/{id} returning the canonical manifest JSON plus optional "closed".
class HttpManifestSource final : public ManifestSource {
 public:
  explicit HttpManifestSource(std::string base_url, std::chrono::milliseconds timeout = std::chrono::seconds(10));
  RemoteManifest fetch(const std::string& meeting_id) override;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

enum class PollStatus { unchanged, applied, no_op, stale_rejected, source_error };
std::string_view to_string(PollStatus status);

struct PollResult {
  PollStatus status = PollStatus::unchanged;
  std::optional<MetadataDelta> delta;  // set when applied
  std::uint64_t remote_version = 0;
  bool closed = false;
  std::string message;
};

/// Polls one meeting. The remote version is compared with the last remote version seen
/// (initially the store's version): equal means unchanged, lower is rejected as stale, higher
/// is diffed against the local manifest and applied when anything differs.
class MetadataPoller {
 public:
  using Listener = std::function<void(const PollResult&)>;

  MetadataPoller(std::shared_ptr<ManifestSource> source, std::shared_ptr<ManifestStore> store,
                 std::string meeting_id, std::chrono::milliseconds interval = std::chrono::seconds(30));

  void on_result(Listener listener) { listener_ = std::move(listener); }

  PollResult poll_once();
  /// Polls until the source reports the meeting closed or `stop` is requested. Source errors
  /// are logged and retried on the next tick.
  void run(std::stop_token stop);

  std::uint64_t last_remote_version() const { return last_remote_version_; }

 private:
  std::shared_ptr<ManifestSource> source_;
  std::shared_ptr<ManifestStore> store_;
  std::string meeting_id_;
  std::chrono::milliseconds interval_;
  std::uint64_t last_remote_version_;
  Listener listener_;
};

}  // namespace verbatim::metadata
