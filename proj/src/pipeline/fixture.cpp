#include "verbatim/fixture.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "verbatim/audio/segmentation.hpp"
#include "verbatim/audio/wav.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/serialize.hpp"

namespace verbatim::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::json;

std::vector<std::pair<double, double>> fixture_bursts(const ChannelId& channel) {
  static const std::vector<std::pair<double, double>> kFloor{{1.0, 8.0}, {10.0, 16.5}, {19.0, 42.0}, {45.0, 52.0},
                                                             {54.0, 59.0}};
  if (channel.is_floor()) return kFloor;
  // Interpreters trail the floor by a fraction of a second.
  const double lag = channel.language == Language::EN ? 0.4 : 0.6;
  std::vector<std::pair<double, double>> out;
  for (const auto& [s, e] : kFloor) out.emplace_back(s + lag, std::min(e + lag, kFixtureDurationS - 0.3));
  return out;
}

AudioClip synth_meeting_audio(const std::vector<std::pair<double, double>>& bursts, double duration_s,
                              std::uint64_t seed) {
  AudioClip clip;
  clip.sample_rate_hz = kCanonicalSampleRate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * clip.sample_rate_hz));
  clip.samples.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(-24, 24);
  for (auto& s : clip.samples) s = static_cast<std::int16_t>(noise(rng));

  std::size_t k = 0;
  for (const auto& [start, end] : bursts) {
    const double f0 = 180.0 + 40.0 * static_cast<double>(k++ % 4);
    const auto a = static_cast<std::size_t>(std::llround(start * clip.sample_rate_hz));
    const auto b = std::min(n, static_cast<std::size_t>(std::llround(end * clip.sample_rate_hz)));
    for (std::size_t i = a; i < b; ++i) {
      const double t = static_cast<double>(i) / clip.sample_rate_hz;
      const double v = 6000.0 * std::sin(2.0 * std::numbers::pi * f0 * t) +
                       2500.0 * std::sin(2.0 * std::numbers::pi * 2.0 * f0 * t + 0.3);
      clip.samples[i] = static_cast<std::int16_t>(std::clamp(v + clip.samples[i], -32768.0, 32767.0));
    }
  }
  return clip;
}

MeetingManifest fixture_manifest() {
  MeetingManifest m;
  m.meeting_id = "WIPO/GA/2023-07-06/Session-1";
  m.title = "WIPO/GA/2023-07-06/Session-1";
  m.category = "General Assembly";
  m.version = 1;
  m.agenda = {{"Opening of the session", 0.0, 30.0}, {"Program and budget", 30.0, std::nullopt}};
  m.speakers = {{"Chair", "Secretariat", 0.0, 18.5, std::nullopt, std::nullopt},
                {"Delegate of Turkey", "Turkey", 18.5, 43.5, std::nullopt, "flags/tr.png"},
                {"Delegate of France", "France", 43.5, 60.0, std::nullopt, "flags/fr.png"}};
  m.documents = {{"WO/GA/56/1", "Draft Agenda"}};
  return m;
}

const std::vector<std::pair<std::string, std::string>>& fixture_sentences() {
  static const std::vector<std::pair<std::string, std::string>> kSentences{
      {"⟨cap⟩ the chair opened the session and welcomed the delegations to this meeting of the assembly",
       "⟨cap⟩ le président a ouvert la session et a souhaité la bienvenue aux délégations à cette réunion"},
      {"⟨cap⟩ the delegation of ⟨cap⟩ france thanked the secretariat for the documents and the report",
       "⟨cap⟩ la délégation de la ⟨cap⟩ france a remercié le secrétariat pour les documents et le rapport"},
      {"⟨cap⟩ the assembly adopted the agenda as it was proposed in the draft document",
       "⟨cap⟩ les membres ont adopté le programme tel que proposé dans le projet de document"},
      {"⟨cap⟩ the delegate of ⟨cap⟩ turkey said that the work of the committee is very important for all of us",
       "⟨cap⟩ le délégué de la ⟨cap⟩ turquie a dit que le travail du comité est très important pour nous"},
      {"⟨cap⟩ we support the program and the budget of ⟨allcaps⟩ wipo for the next two years",
       "⟨cap⟩ nous soutenons le programme et le budget de la ⟨allcaps⟩ ompi pour les deux prochaines années"},
      {"⟨cap⟩ the chair thanked the delegations and closed the session",
       "⟨cap⟩ le président a remercié les délégations et a clos la session"},
  };
  return kSentences;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

FixturePaths make_fixture(const fs::path& dir, const FixtureOptions& options) {
  FixturePaths paths;
  paths.root = fs::absolute(dir);
  paths.manifest = paths.root / "manifest.json";
  paths.audio_dir = paths.root / "audio";
  paths.sidecar = paths.root / "sidecar.tsv";
  paths.config = paths.root / "config.json";
  fs::create_directories(paths.audio_dir);

  const MeetingManifest manifest = fixture_manifest();
  paths.meeting_id = manifest.meeting_id;
  write_text(paths.manifest, canonical_dump(to_json(manifest)) + "\n");

  std::vector<ChannelId> channels{ChannelId::floor()};
  for (const auto& code : options.booths) {
    const auto lang = parse_language(code);
    if (!lang || !is_booth_language(*lang)) throw Error("fixture: no booth for '" + code + "'");
    channels.push_back(ChannelId::booth(*lang));
  }

  const auto& sentences = fixture_sentences();
  std::string sidecar = "# segment_id\ttagged reference text\n";
  std::uint64_t seed = 20230706;
  for (const auto& ch : channels) {
    std::vector<std::pair<double, double>> bursts;
    if (!(ch.is_floor() && options.silent_floor)) bursts = fixture_bursts(ch);
    const AudioClip clip = synth_meeting_audio(bursts, kFixtureDurationS, seed++);
    audio::write_wav(paths.audio_dir / (to_string(ch) + ".wav"), clip);

    // Keys come from the same segmentation the pipeline runs with its default settings.
    const auto regions = audio::detect_speech_regions(clip);
    const auto segments = audio::split_segments(regions, clip, {}, {manifest.meeting_id, ch});
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& [en, fr] = sentences[i % sentences.size()];
      std::string text;
      if (ch.is_floor()) {
        text = i % 2 == 0 ? en : fr;  // speakers alternate between English and French
      } else if (ch.language == Language::EN) {
        text = en;
      } else if (ch.language == Language::FR) {
        text = fr;
      } else {
        text = en;  // other booths reuse the English wording; only routing matters there
      }
      sidecar += segments[i].segment_id + "\t" + text + "\n";
    }
  }
  write_text(paths.sidecar, sidecar);

  Json fault_opts{{"inner", "marker"}, {"fail_pairs", options.fail_pairs}};
  Json config{
      {"engines",
       {{{"engine_id", "sidecar"}, {"kind", "sidecar"}, {"fixture_path", "sidecar.tsv"}, {"options", {{"timings", false}}}},
        {{"engine_id", "marker"}, {"kind", "marker"}},
        {{"engine_id", "heuristic-lid"}, {"kind", "heuristic-lid"}},
        {{"engine_id", "fault-mt"}, {"kind", "fault-mt"}, {"options", fault_opts}}}},
      {"s2t", {{"floor", "sidecar"}, {"booth", "sidecar"}}},
      {"mt", options.fail_pairs.empty() ? "marker" : "fault-mt"},
      {"lid", "heuristic-lid"},
      {"state_dir", "state"},
      {"poll_interval_s", 1.0}};
  write_text(paths.config, config.dump(2) + "\n");
  return paths;
}

}  // namespace verbatim::pipeline
