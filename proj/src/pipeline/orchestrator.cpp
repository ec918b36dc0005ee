#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "verbatim/audio/wav.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"
#include "verbatim/metadata.hpp"
#include "verbatim/pipeline.hpp"
#include "verbatim/serialize.hpp"

namespace verbatim::pipeline {

using Json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Job model

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::pending: return "pending";
    case JobState::running: return "running";
    case JobState::partially_published: return "partially_published";
    case JobState::published: return "published";
    case JobState::failed: return "failed";
  }
  return "?";
}

std::optional<JobState> parse_job_state(std::string_view t) {
  for (auto s : {JobState::pending, JobState::running, JobState::partially_published, JobState::published,
                 JobState::failed}) {
    if (to_string(s) == t) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::segmented: return "segmented";
    case Stage::transcribed: return "transcribed";
    case Stage::normalized: return "normalized";
    case Stage::aligned: return "aligned";
    case Stage::translated: return "translated";
    case Stage::indexed: return "indexed";
    case Stage::exported: return "exported";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view t) {
  for (auto s : {Stage::segmented, Stage::transcribed, Stage::normalized, Stage::aligned, Stage::translated,
                 Stage::indexed, Stage::exported}) {
    if (to_string(s) == t) return s;
  }
  return std::nullopt;
}

void transition(MeetingJob& job, JobState next) {
  const JobState from = job.state;
  const bool ok = (from == JobState::pending && next == JobState::running) ||
                  (from == JobState::running &&
                   (next == JobState::partially_published || next == JobState::published || next == JobState::failed)) ||
                  (from == JobState::partially_published && (next == JobState::published || next == JobState::failed));
  if (!ok) {
    throw Error("illegal job transition " + std::string(to_string(from)) + " → " + std::string(to_string(next)));
  }
  job.state = next;
}

Json to_json(const MeetingJob& job) {
  Json channels = Json::array();
  for (const auto& c : job.channels) {
    Json j{{"channel", to_string(c.channel)}};
    if (c.stage) j["stage"] = to_string(*c.stage);
    if (c.error) j["error"] = *c.error;
    channels.push_back(std::move(j));
  }
  Json errors = Json::array();
  for (const auto& e : job.errors) errors.push_back({{"scope", e.scope}, {"message", e.message}});
  return {{"meeting_id", job.meeting_id},
          {"state", to_string(job.state)},
          {"channels", channels},
          {"errors", errors},
          {"stage_seconds", job.stage_seconds},
          {"audio_dir", job.audio_dir.string()},
          {"input_digest", job.input_digest}};
}

MeetingJob job_from_json(const Json& doc) {
  MeetingJob job;
  job.meeting_id = doc.at("meeting_id").get<std::string>();
  auto state = parse_job_state(doc.at("state").get<std::string>());
  if (!state) throw ParseError("/state", "unknown job state");
  job.state = *state;
  for (const auto& c : doc.at("channels")) {
    ChannelStatus s;
    auto ch = parse_channel(c.at("channel").get<std::string>());
    if (!ch) throw ParseError("/channels", "invalid channel");
    s.channel = *ch;
    if (c.contains("stage")) s.stage = parse_stage(c["stage"].get<std::string>());
    if (c.contains("error")) s.error = c["error"].get<std::string>();
    job.channels.push_back(std::move(s));
  }
  for (const auto& e : doc.at("errors")) job.errors.push_back({e.at("scope"), e.at("message")});
  if (doc.contains("stage_seconds")) job.stage_seconds = doc["stage_seconds"].get<std::map<std::string, double>>();
  job.audio_dir = doc.value("audio_dir", "");
  job.input_digest = doc.value("input_digest", "");
  return job;
}

std::string meeting_dir_name(std::string_view meeting_id) {
  std::string out;
  for (char c : meeting_id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(safe ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

// ---------------------------------------------------------------------------
// File helpers

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string as_string(std::span<const std::uint8_t> bytes) { return {bytes.begin(), bytes.end()}; }
std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Round-trip through the canonical JSON form so in-memory values equal what a resumed run
// reads back from disk.
Transcript canonical(const Transcript& t) { return transcript_from_json(to_json(t)); }
TranslationArtifact canonical(const TranslationArtifact& a) { return artifact_from_json(to_json(a)); }

std::string transcript_file(const ChannelId& c) { return to_string(c) + ".json"; }
std::string translation_file(const routing::TranslationJob& j) { return routing::job_key(j) + ".json"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline(PipelineConfig config)
    : Pipeline(config, engines::EngineRegistry::build(config.engines, config.base_dir)) {}

Pipeline::Pipeline(PipelineConfig config, engines::EngineRegistry registry)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      index_(std::make_unique<search::SearchIndex>(config_.index_root)),
      sink_(std::make_unique<PublicationSink>(config_.sink_dir)) {
  fs::create_directories(config_.state_dir / "meetings");
}

fs::path Pipeline::meeting_dir(const std::string& meeting_id) const {
  return config_.state_dir / "meetings" / meeting_dir_name(meeting_id);
}

void Pipeline::save_job(const MeetingJob& job) {
  write_file(meeting_dir(job.meeting_id) / "job.json", canonical_dump(to_json(job)));
}

std::optional<MeetingJob> Pipeline::load_job(const std::string& meeting_id) const {
  const fs::path path = meeting_dir(meeting_id) / "job.json";
  if (!fs::exists(path)) return std::nullopt;
  return job_from_json(Json::parse(read_file(path)));
}

void Pipeline::journal(const std::string& meeting_id, const Json& event) {
  std::lock_guard lock(mutex_);
  std::ofstream out(meeting_dir(meeting_id) / "journal.log", std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
}

std::vector<Json> Pipeline::read_journal(const std::string& meeting_id) const {
  std::vector<Json> events;
  std::ifstream in(meeting_dir(meeting_id) / "journal.log", std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    Json j = Json::parse(line, nullptr, false);
    if (!j.is_discarded()) events.push_back(std::move(j));  // a torn tail line is ignored
  }
  return events;
}

MeetingJob Pipeline::ingest(const fs::path& manifest_path, const fs::path& audio_dir) {
  return ingest(metadata::parse_manifest(read_file(manifest_path)), audio_dir);
}

MeetingJob Pipeline::ingest(const MeetingManifest& manifest, const fs::path& audio_dir_in) {
  const auto report = validate_manifest(manifest);
  if (!report.ok()) throw ParseError(report.violations.front().path, report.violations.front().message);

  const fs::path audio_dir = fs::absolute(audio_dir_in);
  if (!fs::is_directory(audio_dir)) throw Error("audio directory not found: " + audio_dir.string());
  if (!fs::exists(audio_dir / "floor.wav")) throw Error("missing floor audio: " + (audio_dir / "floor.wav").string());

  std::vector<ChannelId> channels{ChannelId::floor()};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(audio_dir)) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    if (p.extension() != ".wav" || p.filename() == "floor.wav") continue;
    const auto ch = parse_channel(p.stem().string());
    if (!ch || ch->is_floor()) {
      log::warn("ignoring unrecognized audio file " + p.string());
      continue;
    }
    if (!is_booth_language(*ch->language)) throw Error("no booth exists for " + p.filename().string());
    channels.push_back(*ch);
  }
  std::sort(channels.begin(), channels.end());

  std::string digest_input = metadata::serialize_manifest(manifest);
  for (const auto& ch : channels) {
    digest_input += to_string(ch) + ":" + sha256_hex(read_file(audio_dir / (to_string(ch) + ".wav"))) + "\n";
  }
  const std::string digest = sha256_hex(digest_input);

  std::lock_guard lock(mutex_);
  if (auto existing = load_job(manifest.meeting_id)) {
    if (existing->input_digest == digest) return *existing;
    throw ConflictError("meeting " + manifest.meeting_id + " already ingested with different inputs");
  }
  MeetingJob job;
  job.meeting_id = manifest.meeting_id;
  job.audio_dir = audio_dir;
  job.input_digest = digest;
  for (const auto& ch : channels) job.channels.push_back({ch, std::nullopt, std::nullopt});
  fs::create_directories(meeting_dir(job.meeting_id));
  write_file(meeting_dir(job.meeting_id) / "manifest.json", metadata::serialize_manifest(manifest));
  save_job(job);
  std::ofstream(meeting_dir(job.meeting_id) / "journal.log", std::ios::app | std::ios::binary)
      << Json{{"event", "ingested"}, {"digest", digest}}.dump() << '\n';
  return job;
}

std::optional<MeetingJob> Pipeline::status(const std::string& meeting_id) const {
  std::lock_guard lock(mutex_);
  return load_job(meeting_id);
}

std::vector<MeetingJob> Pipeline::list() const {
  std::lock_guard lock(mutex_);
  std::vector<MeetingJob> jobs;
  const fs::path root = config_.state_dir / "meetings";
  if (!fs::exists(root)) return jobs;
  for (const auto& entry : fs::directory_iterator(root)) {
    const fs::path path = entry.path() / "job.json";
    if (fs::exists(path)) jobs.push_back(job_from_json(Json::parse(read_file(path))));
  }
  std::sort(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) { return a.meeting_id < b.meeting_id; });
  return jobs;
}

MeetingManifest Pipeline::manifest(const std::string& meeting_id) const {
  const fs::path path = meeting_dir(meeting_id) / "manifest.json";
  if (!fs::exists(path)) throw NotFoundError("unknown meeting " + meeting_id);
  return metadata::parse_manifest(read_file(path));
}

void Pipeline::update_manifest(const MeetingManifest& updated) {
  const auto current = manifest(updated.meeting_id);
  if (updated.version < current.version) throw ConflictError("conflict: manifest version went backwards");
  {
    std::lock_guard lock(mutex_);
    write_file(meeting_dir(updated.meeting_id) / "manifest.json", metadata::serialize_manifest(updated));
  }
  journal(updated.meeting_id, {{"event", "manifest"}, {"version", updated.version}});
  for (const auto& t : transcripts(updated.meeting_id)) index_->index_document(t, updated);
  for (const auto& a : translations(updated.meeting_id)) index_->index_document(a, updated);
}

std::vector<Transcript> Pipeline::transcripts(const std::string& meeting_id) const {
  std::vector<Transcript> out;
  const fs::path dir = meeting_dir(meeting_id) / "transcripts";
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") out.push_back(transcript_from_json(Json::parse(read_file(entry.path()))));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.channel < b.channel; });
  return out;
}

std::vector<TranslationArtifact> Pipeline::translations(const std::string& meeting_id) const {
  std::vector<TranslationArtifact> out;
  const fs::path dir = meeting_dir(meeting_id) / "translations";
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") out.push_back(artifact_from_json(Json::parse(read_file(entry.path()))));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source_channel, a.target_lang) < std::tie(b.source_channel, b.target_lang);
  });
  return out;
}

namespace {

std::vector<routing::JobFailure> failures_of(const MeetingJob& job) {
  std::vector<ChannelId> channels;
  for (const auto& c : job.channels) channels.push_back(c.channel);
  std::vector<routing::JobFailure> out;
  for (const auto& planned : routing::plan_translation_jobs(channels)) {
    for (const auto& e : job.errors) {
      if (e.scope == routing::job_key(planned)) out.push_back({planned, e.message});
    }
  }
  return out;
}

}  // namespace

std::vector<routing::LanguageView> Pipeline::views(const std::string& meeting_id) const {
  const auto job = status(meeting_id);
  if (!job) throw NotFoundError("unknown meeting " + meeting_id);
  const auto ts = transcripts(meeting_id);
  const auto as = translations(meeting_id);
  const auto fails = failures_of(*job);
  return routing::assemble_language_views(ts, as, fails);
}

std::vector<std::uint8_t> Pipeline::export_bytes(const std::string& meeting_id, Language lang,
                                                 exporters::ExportFormat format) const {
  const auto all = views(meeting_id);
  const auto& view = all[static_cast<std::size_t>(lang)];
  routing::ViewDocument empty;
  empty.language = lang;
  const routing::ViewDocument* doc = routing::primary_document(view);
  return exporters::export_document(doc ? *doc : empty, manifest(meeting_id), format);
}

// ---------------------------------------------------------------------------
// Channel workflow

Transcript Pipeline::process_channel(const MeetingManifest& manifest, const ChannelId& channel, const AudioClip& audio,
                                     MeetingJob& job, std::mutex& job_mutex) {
  auto mark = [&](Stage stage) {
    std::lock_guard lock(job_mutex);
    for (auto& c : job.channels) {
      if (c.channel == channel) c.stage = std::max(c.stage.value_or(stage), stage);
    }
  };

  const auto regions = audio::detect_speech_regions(audio, config_.vad);
  const auto segments = audio::split_segments(regions, audio, config_.segmentation, {manifest.meeting_id, channel});
  mark(Stage::segmented);

  const auto s2t = registry_.s2t(config_.s2t_for(channel));
  const SourceLanguage hint = channel.is_floor() ? SourceLanguage::multilingual() : SourceLanguage(*channel.language);
  std::vector<engines::Hypothesis> hyps;
  hyps.reserve(segments.size());
  for (const auto& seg : segments) {
    hyps.push_back(s2t->transcribe(seg, audio::slice(audio, seg.start_s, seg.end_s), hint));
    if (hyps.back().no_reference) log::info("no transcript for segment " + seg.segment_id);
  }
  mark(Stage::transcribed);

  const auto lid = channel.is_floor() ? registry_.identifier(config_.lid) : nullptr;
  Transcript transcript;
  transcript.channel = channel;
  transcript.language = hint;
  transcript.engine_id = s2t->id();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    const auto tokens = text::normalize_tokens(hyps[i].tokens, config_.normalize);
    if (tokens.empty()) continue;

    Utterance u;
    u.segment_id = seg.segment_id;
    u.segment_start_s = seg.start_s;
    u.segment_end_s = seg.end_s;
    u.timed = false;
    for (const auto& tok : tokens) u.words.push_back({tok, 0.0, 0.0, std::nullopt});

    // Engine timings are kept when they line up one-to-one with the normalized tokens and
    // honour the aligner contract; anything else is left to the aligner.
    if (hyps[i].words && hyps[i].words->size() == tokens.size()) {
      std::vector<WordTiming> timed = *hyps[i].words;
      for (std::size_t k = 0; k < timed.size(); ++k) timed[k].token = tokens[k];
      if (alignment::check_alignment_contract(seg, tokens, timed).ok()) {
        u.words = std::move(timed);
        u.timed = true;
      }
    }
    u.language = channel.is_floor() ? lid->identify(u.text()) : channel.language;
    const double t = u.timed ? u.words.front().start_s : seg.start_s;
    u.speaker = speaker_at(manifest, t);
    transcript.utterances.push_back(std::move(u));
  }
  mark(Stage::normalized);

  transcript = alignment::align_transcript(transcript, segments, audio, aligner_);
  // Speakers for aligner-timed utterances follow the first word.
  for (auto& u : transcript.utterances) {
    if (!u.words.empty()) u.speaker = speaker_at(manifest, u.words.front().start_s);
  }
  const auto report = validate_transcript(transcript);
  if (!report.ok()) throw Error("transcript invalid: " + report.summary());
  mark(Stage::aligned);
  return transcript;
}

// ---------------------------------------------------------------------------
// Run

RunResult Pipeline::run(const std::string& meeting_id) {
  MeetingJob job;
  {
    std::lock_guard lock(mutex_);
    auto loaded = load_job(meeting_id);
    if (!loaded) throw NotFoundError("unknown meeting " + meeting_id);
    job = *loaded;
    if (job.state == JobState::published || job.state == JobState::partially_published ||
        job.state == JobState::failed) {
      RunResult stored;
      stored.job = job;
      stored.transcripts = transcripts(meeting_id);
      stored.translations = translations(meeting_id);
      stored.failures = failures_of(job);
      const fs::path exports = meeting_dir(meeting_id) / "exports";
      if (fs::exists(exports)) {
        for (const auto& e : fs::directory_iterator(exports)) stored.exports.push_back(e.path());
        std::sort(stored.exports.begin(), stored.exports.end());
      }
      return stored;
    }
    if (!running_.insert(meeting_id).second) throw ConflictError("meeting " + meeting_id + " is already running");
  }
  struct Release {
    Pipeline* self;
    std::string id;
    ~Release() {
      std::lock_guard lock(self->mutex_);
      self->running_.erase(id);
    }
  } release{this, meeting_id};

  if (job.state == JobState::pending) {
    transition(job, JobState::running);
    save_job(job);
    journal(meeting_id, {{"event", "state"}, {"state", "running"}});
  }
  job.errors.clear();
  for (auto& c : job.channels) c.error.reset();

  const MeetingManifest manifest = this->manifest(meeting_id);
  const fs::path dir = meeting_dir(meeting_id);

  // Completed work recorded by an earlier, interrupted run.
  std::set<std::string> done_channels;
  std::set<std::string> done_jobs;
  for (const auto& e : read_journal(meeting_id)) {
    if (e.value("event", "") != "done") continue;
    if (e.contains("channel")) done_channels.insert(e["channel"].get<std::string>());
    if (e.contains("job")) done_jobs.insert(e["job"].get<std::string>());
  }

  RunResult result;
  std::mutex job_mutex;
  const std::size_t n = job.channels.size();

  // Phase 1: channels in parallel.
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::optional<Transcript>> produced(n);
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < n; ++i) {
      workers.emplace_back([&, i] {
        const ChannelId ch = job.channels[i].channel;
        const fs::path stored = dir / "transcripts" / transcript_file(ch);
        try {
          if (done_channels.count(to_string(ch)) && fs::exists(stored)) {
            produced[i] = transcript_from_json(Json::parse(read_file(stored)));
            return;
          }
          const AudioClip audio = audio::to_canonical(audio::read_wav(job.audio_dir / (to_string(ch) + ".wav")));
          produced[i] = process_channel(manifest, ch, audio, job, job_mutex);
        } catch (const std::exception& e) {
          std::lock_guard lock(job_mutex);
          job.channels[i].error = e.what();
          job.errors.push_back({to_string(ch), e.what()});
          log::error("channel " + to_string(ch) + " of " + meeting_id + " failed: " + e.what());
        }
      });
    }
  }
  job.stage_seconds["channels"] = seconds_since(t0);

  // The booth matching the floor's dominant language carries the same speech twice.
  std::optional<Language> floor_language;
  for (std::size_t i = 0; i < n; ++i) {
    if (produced[i] && produced[i]->channel.is_floor()) {
      std::vector<std::optional<Language>> detected;
      for (const auto& u : produced[i]->utterances) detected.push_back(u.language);
      if (std::any_of(detected.begin(), detected.end(), [](const auto& d) { return d.has_value(); })) {
        floor_language = routing::floor_majority_language(detected);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!produced[i]) continue;
    auto& t = *produced[i];
    t.duplicate_of_floor = !t.channel.is_floor() && floor_language && t.channel.language == floor_language;
    t = canonical(t);
    const std::string name = to_string(t.channel);
    write_file(dir / "transcripts" / transcript_file(t.channel), canonical_dump(to_json(t)));
    if (!done_channels.count(name)) journal(meeting_id, {{"event", "done"}, {"channel", name}, {"stage", "aligned"}});
    job.channels[i].stage = std::max(job.channels[i].stage.value_or(Stage::aligned), Stage::aligned);
    result.transcripts.push_back(t);
  }
  save_job(job);

  // Publication: EN booth transcript first; translations wait on the gate.
  const ChannelId en_booth = ChannelId::booth(Language::EN);
  const bool has_en_booth = std::any_of(job.channels.begin(), job.channels.end(),
                                        [&](const ChannelStatus& c) { return c.channel == en_booth; });
  PublicationGate gate(has_en_booth);
  auto publish_transcript = [&](const Transcript& t) {
    const std::string bytes = canonical_dump(to_json(t));
    try {
      sink_->publish(meeting_id, "transcript", "transcript:" + to_string(t.channel), as_bytes(bytes),
                     "transcripts/" + transcript_file(t.channel));
    } catch (const std::exception& e) {
      job.errors.push_back({to_string(t.channel), e.what()});
    }
  };
  for (const auto& t : result.transcripts) {
    if (t.channel == en_booth) publish_transcript(t);
  }
  gate.open();  // the EN transcript is out, failed, or absent
  for (const auto& t : result.transcripts) {
    if (t.channel != en_booth) publish_transcript(t);
  }

  // Phase 2: translation jobs in parallel, each isolated.
  t0 = std::chrono::steady_clock::now();
  std::vector<ChannelId> channel_ids;
  for (const auto& c : job.channels) channel_ids.push_back(c.channel);
  const auto plan = routing::plan_translation_jobs(channel_ids);
  std::vector<std::optional<TranslationArtifact>> artifacts(plan.size());
  {
    const auto lid = registry_.identifier(config_.lid);
    const auto mt = registry_.translator(config_.mt);
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < plan.size(); ++k) {
      workers.emplace_back([&, k] {
        const auto& pj = plan[k];
        const std::string key = routing::job_key(pj);
        const fs::path stored = dir / "translations" / translation_file(pj);
        try {
          auto source = std::find_if(result.transcripts.begin(), result.transcripts.end(),
                                     [&](const Transcript& t) { return t.channel == pj.source_channel; });
          if (source == result.transcripts.end()) throw Error("source channel " + to_string(pj.source_channel) + " failed");
          TranslationArtifact artifact;
          if (done_jobs.count(key) && fs::exists(stored)) {
            artifact = artifact_from_json(Json::parse(read_file(stored)));
          } else {
            artifact = canonical(routing::run_job(pj, *source, *lid, *mt));
            write_file(stored, canonical_dump(to_json(artifact)));
            journal(meeting_id, {{"event", "done"}, {"job", key}, {"stage", "translated"}});
          }
          gate.wait();
          const std::string bytes = canonical_dump(to_json(artifact));
          sink_->publish(meeting_id, "translation", "translation:" + key, as_bytes(bytes), "translations/" + translation_file(pj));
          artifacts[k] = std::move(artifact);
        } catch (const std::exception& e) {
          std::lock_guard lock(job_mutex);
          job.errors.push_back({key, e.what()});
          result.failures.push_back({pj, e.what()});
          log::error("translation " + key + " of " + meeting_id + " failed: " + e.what());
        }
      });
    }
  }
  for (auto& a : artifacts) {
    if (a) result.translations.push_back(std::move(*a));
  }
  std::sort(result.failures.begin(), result.failures.end(),
            [](const auto& a, const auto& b) { return a.job < b.job; });
  for (auto& c : job.channels) {
    if (c.stage && *c.stage >= Stage::aligned) c.stage = std::max(*c.stage, Stage::translated);
  }
  job.stage_seconds["translations"] = seconds_since(t0);

  // Index.
  t0 = std::chrono::steady_clock::now();
  try {
    for (const auto& t : result.transcripts) index_->index_document(t, manifest);
    for (const auto& a : result.translations) index_->index_document(a, manifest);
    for (auto& c : job.channels) {
      if (c.stage && *c.stage >= Stage::translated) c.stage = std::max(*c.stage, Stage::indexed);
    }
  } catch (const std::exception& e) {
    job.errors.push_back({"index", e.what()});
  }
  job.stage_seconds["index"] = seconds_since(t0);

  // Exports, one primary document per language view.
  t0 = std::chrono::steady_clock::now();
  bool exports_ok = true;
  const auto views = routing::assemble_language_views(result.transcripts, result.translations, result.failures);
  for (const auto& view : views) {
    const auto* doc = routing::primary_document(view);
    if (!doc) continue;
    for (auto format : {exporters::ExportFormat::json, exporters::ExportFormat::html, exporters::ExportFormat::docx}) {
      const std::string name = exporters::export_file_name(meeting_id, view.language, format);
      try {
        const auto bytes = exporters::export_document(*doc, manifest, format);
        write_file(dir / "exports" / name, as_string(bytes));
        sink_->publish(meeting_id, "export", "export:" + name, bytes, "exports/" + name);
        result.exports.push_back(dir / "exports" / name);
      } catch (const std::exception& e) {
        exports_ok = false;
        job.errors.push_back({"export:" + name, e.what()});
      }
    }
  }
  if (exports_ok) {
    for (auto& c : job.channels) {
      if (c.stage && *c.stage >= Stage::indexed) c.stage = Stage::exported;
    }
  }
  job.stage_seconds["exports"] = seconds_since(t0);

  const JobState final_state = job.errors.empty()           ? JobState::published
                               : result.transcripts.empty() ? JobState::failed
                                                            : JobState::partially_published;
  transition(job, final_state);
  save_job(job);
  journal(meeting_id, {{"event", "state"}, {"state", to_string(final_state)}});
  result.job = job;
  return result;
}

}  // namespace verbatim::pipeline
