#pragma once

// Meeting job runner: ingest, per-channel processing, translation fan-out, indexing, exports
// and ordered publication, with an on-disk journal so an interrupted run can resume.
//
// State directory layout, per meeting ({id} with '/' replaced by '_'):
//   {state_dir}/meetings/{id}/job.json          job record (state, channels, errors, timings)
//   {state_dir}/meetings/{id}/manifest.json     current manifest
//   {state_dir}/meetings/{id}/journal.log       append-only stage events
//   {state_dir}/meetings/{id}/transcripts/{channel}.json
//   {state_dir}/meetings/{id}/translations/{channel}>{lang}.json
//   {state_dir}/meetings/{id}/exports/{meeting}.{lang}.{format}

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "verbatim/alignment.hpp"
#include "verbatim/audio/segmentation.hpp"
#include "verbatim/core.hpp"
#include "verbatim/exporters.hpp"
#include "verbatim/registry.hpp"
#include "verbatim/routing.hpp"
#include "verbatim/search.hpp"
#include "verbatim/text.hpp"

namespace verbatim::pipeline {

// ---------------------------------------------------------------------------
// Configuration

struct PipelineConfig {
  std::vector<engines::EngineSpec> engines;
  std::string s2t_floor;                       // engine id for the floor channel
  std::string s2t_booth;                       // default engine id for booths
  std::map<Language, std::string> s2t_booths;  // per-language overrides
  std::string mt;
  std::string lid;
  audio::VadConfig vad;
  audio::SegmentationPolicy segmentation;
  text::NormalizePolicy normalize;
  std::chrono::milliseconds poll_interval{30000};
  std::filesystem::path index_root;
  std::filesystem::path sink_dir;
  std::filesystem::path state_dir;
  std::filesystem::path base_dir;  // relative engine fixture paths resolve here

  const std::string& s2t_for(const ChannelId& channel) const;
};

/// Relative paths in the document resolve against `base_dir`. Throws ParseError.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Jobs

enum class JobState { pending, running, partially_published, published, failed };
std::string_view to_string(JobState state);
std::optional<JobState> parse_job_state(std::string_view text);

/// Per-channel progress, in workflow order.
enum class Stage { segmented, transcribed, normalized, aligned, translated, indexed, exported };
std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

struct ChannelStatus {
  ChannelId channel;
  std::optional<Stage> stage;  // last completed
  std::optional<std::string> error;
};

struct JobError {
  std::string scope;  // channel name, translation job key, or "meeting"
  std::string message;
};

struct MeetingJob {
  std::string meeting_id;
  JobState state = JobState::pending;
  std::vector<ChannelStatus> channels;
  std::vector<JobError> errors;
  std::map<std::string, double> stage_seconds;  // observability only
  std::filesystem::path audio_dir;
  std::string input_digest;
};

nlohmann::json to_json(const MeetingJob& job);
MeetingJob job_from_json(const nlohmann::json& doc);

/// Moves the job along pending → running → {partially_published →} published | failed.
/// Throws verbatim::Error for any other transition.
void transition(MeetingJob& job, JobState next);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// ---------------------------------------------------------------------------
// Publication

struct PublicationRecord {
  std::uint64_t seq = 0;
  std::string timestamp;  // UTC, microsecond resolution, strictly increasing within a sink
  std::string meeting_id;
  std::string kind;  // "transcript" | "translation" | "export"
  std::string key;
  std::string digest;
  std::string file;  // relative to the sink directory
};

nlohmann::json to_json(const PublicationRecord& record);

/// Files go to {dir}/{meeting}/{file}; records append to {dir}/publication.log. Publishing
/// the same key with the same digest again returns the existing record.
class PublicationSink {
 public:
  explicit PublicationSink(std::filesystem::path dir, int max_attempts = 3);

  PublicationRecord publish(const std::string& meeting_id, const std::string& kind, const std::string& key,
                            std::span<const std::uint8_t> bytes, const std::string& file_name);
  std::vector<PublicationRecord> records(const std::optional<std::string>& meeting_id = std::nullopt) const;

 private:
  std::filesystem::path dir_;
  int max_attempts_;
  mutable std::mutex mutex_;
  std::vector<PublicationRecord> records_;
  std::chrono::system_clock::time_point last_stamp_{};
};

/// Holds translation publications back until the EN booth transcript is out. Without an EN
/// booth the gate starts open; a failed EN booth opens it as well.
class PublicationGate {
 public:
  explicit PublicationGate(bool closed);
  void open();
  void wait() const;
  bool is_open() const;

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  bool open_;
};

// ---------------------------------------------------------------------------
// Pipeline

struct RunResult {
  MeetingJob job;
  std::vector<Transcript> transcripts;
  std::vector<TranslationArtifact> translations;
  std::vector<routing::JobFailure> failures;
  std::vector<std::filesystem::path> exports;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);
  /// Alternative wiring for tests and embedders with ready-made engines.
  Pipeline(PipelineConfig config, engines::EngineRegistry registry);

  const PipelineConfig& config() const { return config_; }

  /// Registers a meeting. The audio directory holds floor.wav (required) and booth-XX.wav per
  /// booth. Identical re-ingest returns the existing job; different inputs for a known
  /// meeting throw ConflictError.
  MeetingJob ingest(const std::filesystem::path& manifest_path, const std::filesystem::path& audio_dir);
  MeetingJob ingest(const MeetingManifest& manifest, const std::filesystem::path& audio_dir);

  /// Runs (or resumes) a pending/running job to a terminal state. Terminal jobs are returned
  /// as stored, together with their persisted artifacts.
  RunResult run(const std::string& meeting_id);

  std::optional<MeetingJob> status(const std::string& meeting_id) const;
  std::vector<MeetingJob> list() const;
  MeetingManifest manifest(const std::string& meeting_id) const;
  /// Persists a newer manifest (e.g. from the poller) and refreshes index facets.
  void update_manifest(const MeetingManifest& manifest);

  std::vector<Transcript> transcripts(const std::string& meeting_id) const;
  std::vector<TranslationArtifact> translations(const std::string& meeting_id) const;
  std::vector<routing::LanguageView> views(const std::string& meeting_id) const;
  std::vector<std::uint8_t> export_bytes(const std::string& meeting_id, Language lang,
                                         exporters::ExportFormat format) const;

  search::SearchIndex& index() { return *index_; }
  const search::SearchIndex& index() const { return *index_; }
  PublicationSink& sink() { return *sink_; }

  std::filesystem::path meeting_dir(const std::string& meeting_id) const;

 private:
  struct ChannelOutcome;
  Transcript process_channel(const MeetingManifest& manifest, const ChannelId& channel, const AudioClip& audio,
                             MeetingJob& job, std::mutex& job_mutex);
  void journal(const std::string& meeting_id, const nlohmann::json& event);
  std::vector<nlohmann::json> read_journal(const std::string& meeting_id) const;
  void save_job(const MeetingJob& job);
  std::optional<MeetingJob> load_job(const std::string& meeting_id) const;

  PipelineConfig config_;
  engines::EngineRegistry registry_;
  std::unique_ptr<search::SearchIndex> index_;
  std::unique_ptr<PublicationSink> sink_;
  alignment::ProportionalAligner aligner_;

  mutable std::mutex mutex_;  // job files and journals
  std::set<std::string> running_;
};

/// Safe directory name for a meeting id.
std::string meeting_dir_name(std::string_view meeting_id);

}  // namespace verbatim::pipeline
