#include <doctest.h>

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "support.hpp"
#include "verbatim/audio/wav.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/exporters.hpp"
#include "verbatim/fixture.hpp"
#include "verbatim/metadata.hpp"
#include "verbatim/pipeline.hpp"
#include "verbatim/serialize.hpp"
#include "verbatim/service.hpp"

using namespace verbatim;
using namespace verbatim::pipeline;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  support::TempDir dir;
  FixturePaths paths;
  std::unique_ptr<Pipeline> pipeline;

  explicit Fixture(const std::string& tag, FixtureOptions options = {})
      : dir(tag), paths(make_fixture(dir.path(), options)),
        pipeline(std::make_unique<Pipeline>(load_config(paths.config))) {}

  RunResult ingest_and_run() {
    pipeline->ingest(paths.manifest, paths.audio_dir);
    return pipeline->run(paths.meeting_id);
  }
};

std::string encode_id(const std::string& id) {
  std::string out;
  for (char c : id) out += c == '/' ? std::string("%2F") : std::string(1, c);
  return out;
}

}  // namespace

TEST_CASE("fixture generation is deterministic") {
  support::TempDir a("fxa"), b("fxb");
  const auto pa = make_fixture(a.path()), pb = make_fixture(b.path());
  for (const auto* name : {"floor.wav", "booth-EN.wav", "booth-FR.wav"}) {
    CHECK(support::read_file(pa.audio_dir / name) == support::read_file(pb.audio_dir / name));
  }
  CHECK(support::read_file(pa.sidecar) == support::read_file(pb.sidecar));
  CHECK(support::read_file(pa.manifest) == support::read_file(pb.manifest));
  const auto clip = audio::read_wav(pa.audio_dir / "floor.wav");
  CHECK(clip.sample_rate_hz == kCanonicalSampleRate);
  CHECK(clip.duration_s() == doctest::Approx(kFixtureDurationS));
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(Json::parse(R"({"mt":"m","vad":{"frame_ms":20},"state_dir":"st"})"), "/base");
  CHECK(cfg.mt == "m");
  CHECK(cfg.vad.frame_ms == 20);
  CHECK(cfg.state_dir == fs::path("/base/st"));
  CHECK(cfg.index_root == fs::path("/base/st/index"));
  CHECK(cfg.s2t_for(ChannelId::booth(Language::FR)) == "sidecar");
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"vad":{"frame_ms":25}})"), "/"), ParseError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"segmentation":{"min_s":5,"max_s":6}})"), "/"), ParseError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"normalize":{"foreign":"hide"}})"), "/"), ParseError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"([])"), "/"), ParseError);
}

TEST_CASE("job state machine") {
  MeetingJob job;
  CHECK_THROWS_AS(transition(job, JobState::published), Error);
  transition(job, JobState::running);
  transition(job, JobState::partially_published);
  transition(job, JobState::published);
  CHECK_THROWS_AS(transition(job, JobState::running), Error);
  job.errors.push_back({"x", "y"});
  job.channels.push_back({ChannelId::booth(Language::AR), Stage::indexed, std::string("e")});
  job.stage_seconds["channels"] = 0.5;
  const auto back = job_from_json(to_json(job));
  CHECK(back.state == JobState::published);
  CHECK(back.channels[0].stage == Stage::indexed);
  CHECK(back.errors.size() == 1);
  CHECK(meeting_dir_name("WIPO/GA 1") == "WIPO_GA_1");
}

TEST_CASE("ingest: idempotent, conflicting, incomplete") {
  Fixture fx("ingest");
  const auto job = fx.pipeline->ingest(fx.paths.manifest, fx.paths.audio_dir);
  CHECK(job.state == JobState::pending);
  CHECK(job.channels.size() == 3);
  const auto again = fx.pipeline->ingest(fx.paths.manifest, fx.paths.audio_dir);
  CHECK(again.input_digest == job.input_digest);
  CHECK(fx.pipeline->list().size() == 1);

  auto changed = metadata::parse_manifest(support::read_file(fx.paths.manifest));
  changed.category = "Other";
  CHECK_THROWS_AS(fx.pipeline->ingest(changed, fx.paths.audio_dir), ConflictError);

  const fs::path no_floor = fx.dir.path() / "no-floor";
  fs::create_directories(no_floor);
  fs::copy_file(fx.paths.audio_dir / "booth-EN.wav", no_floor / "booth-EN.wav");
  changed.meeting_id = "OTHER/M/2023-07-06/Session-1";
  try {
    fx.pipeline->ingest(changed, no_floor);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing floor audio") != std::string::npos);
  }

  auto bad = changed;
  bad.speakers[1].start_s = 1.0;  // overlaps the first turn
  CHECK_THROWS_AS(fx.pipeline->ingest(bad, fx.paths.audio_dir), ParseError);
  CHECK_THROWS_AS(fx.pipeline->run("nope"), NotFoundError);
  CHECK_FALSE(fx.pipeline->status("nope").has_value());
}

TEST_CASE("end-to-end run on the fixture meeting") {
  Fixture fx("run");
  const auto r = fx.ingest_and_run();
  CHECK(r.job.state == JobState::published);
  REQUIRE(r.transcripts.size() == 3);
  REQUIRE(r.translations.size() == 8);
  CHECK(r.failures.empty());
  CHECK(r.exports.size() == 21);
  for (const auto& t : r.transcripts) CHECK(validate_transcript(t).ok());
  for (const auto& c : r.job.channels) CHECK(c.stage == Stage::exported);
  for (const auto* stage : {"channels", "translations", "index", "exports"}) CHECK(r.job.stage_seconds.count(stage));

  // EN booth duplicates the floor's dominant language.
  for (const auto& t : r.transcripts) CHECK(t.duplicate_of_floor == (t.channel == ChannelId::booth(Language::EN)));

  // Floor sentences: EN copied verbatim, FR through MT.
  const auto floor_en = std::find_if(r.translations.begin(), r.translations.end(),
                                     [](const auto& a) { return a.source_channel.is_floor(); });
  REQUIRE(floor_en != r.translations.end());
  const auto& floor_t = *std::find_if(r.transcripts.begin(), r.transcripts.end(),
                                      [](const auto& t) { return t.channel.is_floor(); });
  REQUIRE(floor_en->sentences.size() == floor_t.utterances.size());
  for (std::size_t i = 0; i < floor_en->sentences.size(); ++i) {
    const auto& s = floor_en->sentences[i];
    if (s.mode == TranslationMode::copied) CHECK(s.text == floor_t.utterances[i].text());
    else CHECK(s.text == "⟪" + std::string(to_string(s.source_language.value_or(Language::FR))) + "→EN⟫ " +
                             floor_t.utterances[i].text());
  }
  CHECK(std::count_if(floor_en->sentences.begin(), floor_en->sentences.end(),
                      [](const auto& s) { return s.mode == TranslationMode::copied; }) > 0);
  CHECK(std::count_if(floor_en->sentences.begin(), floor_en->sentences.end(),
                      [](const auto& s) { return s.mode == TranslationMode::translated; }) > 0);

  // Publication order: the EN booth transcript precedes every translation.
  const auto records = fx.pipeline->sink().records(fx.paths.meeting_id);
  REQUIRE(!records.empty());
  CHECK(records.front().key == "transcript:booth-EN");
  for (std::size_t i = 1; i < records.size(); ++i) CHECK(records[i - 1].timestamp < records[i].timestamp);

  // Exports validate.
  for (const auto& p : r.exports) {
    if (p.extension() == ".docx") {
      const auto s = support::read_file(p);
      CHECK(exporters::validate_docx(std::vector<std::uint8_t>(s.begin(), s.end())).ok());
    }
  }

  // Search over the indexed meeting.
  search::Query q{search::query_terms("turkey"), fx.paths.meeting_id, Language::EN, {}, {}, {}, 50};
  const auto hits = fx.pipeline->index().search(q);
  REQUIRE_FALSE(hits.empty());
  for (const auto& h : hits) CHECK(h.language == Language::EN);

  // Views expose every language, the EN primary being the native booth.
  const auto views = fx.pipeline->views(fx.paths.meeting_id);
  CHECK(views.size() == 7);
  const auto& en = views[static_cast<std::size_t>(Language::EN)];
  CHECK(routing::primary_document(en)->provenance.kind == routing::DocumentKind::native);

  // A terminal job is returned as stored.
  const auto stored = fx.pipeline->run(fx.paths.meeting_id);
  CHECK(stored.transcripts == r.transcripts);
  CHECK(stored.translations.size() == r.translations.size());
  CHECK(stored.job.state == JobState::published);
}

TEST_CASE("two runs from scratch produce identical artifacts") {
  Fixture a("det-a"), b("det-b");
  a.ingest_and_run();
  b.ingest_and_run();
  const fs::path da = a.pipeline->meeting_dir(a.paths.meeting_id), db = b.pipeline->meeting_dir(b.paths.meeting_id);
  std::size_t compared = 0;
  for (const auto* sub : {"transcripts", "translations", "exports"}) {
    for (const auto& e : fs::directory_iterator(da / sub)) {
      CHECK(support::read_file(e.path()) == support::read_file(db / sub / e.path().filename()));
      ++compared;
    }
  }
  CHECK(compared == 3 + 8 + 21);
}

TEST_CASE("an interrupted run resumes from the journal") {
  Fixture fx("resume");
  fx.pipeline->ingest(fx.paths.manifest, fx.paths.audio_dir);
  const fs::path dir = fx.pipeline->meeting_dir(fx.paths.meeting_id);

  // A previous attempt finished the FR booth and then died mid-write of the journal.
  Fixture ref("resume-ref");
  const auto full = ref.ingest_and_run();
  const auto fr = *std::find_if(full.transcripts.begin(), full.transcripts.end(),
                                [](const auto& t) { return t.channel == ChannelId::booth(Language::FR); });
  auto marked = fr;
  marked.engine_id = "from-earlier-attempt";
  fs::create_directories(dir / "transcripts");
  support::write_file(dir / "transcripts" / "booth-FR.json", canonical_dump(to_json(marked)));
  {
    std::ofstream j(dir / "journal.log", std::ios::app);
    j << R"({"event":"state","state":"running"})" << '\n';
    j << R"({"event":"done","channel":"booth-FR","stage":"aligned"})" << '\n';
    j << R"({"event":"done","chan)";  // torn record
  }
  const auto r = fx.pipeline->run(fx.paths.meeting_id);
  CHECK(r.job.state == JobState::published);
  const auto resumed = *std::find_if(r.transcripts.begin(), r.transcripts.end(),
                                     [](const auto& t) { return t.channel == ChannelId::booth(Language::FR); });
  CHECK(resumed.engine_id == "from-earlier-attempt");
  CHECK(resumed.utterances == fr.utterances);
  CHECK(r.translations.size() == 8);
}

TEST_CASE("a silent floor yields an empty floor transcript and still publishes") {
  Fixture fx("silent", FixtureOptions{true, {}, {"EN", "FR"}});
  const auto r = fx.ingest_and_run();
  const auto& floor = *std::find_if(r.transcripts.begin(), r.transcripts.end(),
                                    [](const auto& t) { return t.channel.is_floor(); });
  CHECK(floor.utterances.empty());
  CHECK(r.job.state == JobState::published);
  for (const auto& t : r.transcripts) CHECK_FALSE(t.duplicate_of_floor);
}

TEST_CASE("a failing translation pair is isolated") {
  Fixture clean("iso-clean"), faulty("iso-fault", FixtureOptions{false, {"EN->RU"}, {"EN", "FR"}});
  const auto ok = clean.ingest_and_run();
  const auto r = faulty.ingest_and_run();
  CHECK(r.job.state == JobState::partially_published);
  REQUIRE(r.failures.size() == 1);
  CHECK(routing::job_key(r.failures[0].job) == "booth-EN>RU");
  REQUIRE(r.translations.size() == 7);
  for (const auto& a : r.translations) {
    const auto twin = std::find_if(ok.translations.begin(), ok.translations.end(), [&](const auto& b) {
      return b.source_channel == a.source_channel && b.target_lang == a.target_lang;
    });
    REQUIRE(twin != ok.translations.end());
    CHECK(twin->sentences == a.sentences);
  }
  CHECK(r.transcripts == ok.transcripts);
  const auto views = faulty.pipeline->views(faulty.paths.meeting_id);
  CHECK(views[static_cast<std::size_t>(Language::RU)].gaps.size() == 1);
  CHECK(views[static_cast<std::size_t>(Language::RU)].documents.empty());
  CHECK(r.exports.size() == 18);
}

TEST_CASE("manifest updates re-index facets and reject going backwards") {
  Fixture fx("update");
  fx.ingest_and_run();
  auto m = fx.pipeline->manifest(fx.paths.meeting_id);
  m.speakers[1].affiliation = "Türkiye";
  m.speakers[1].name = "Delegate of Türkiye";
  m.version += 1;
  fx.pipeline->update_manifest(m);
  CHECK(fx.pipeline->manifest(fx.paths.meeting_id).version == m.version);
  search::Query q{search::query_terms("turkey"), fx.paths.meeting_id, {}, {}, std::string("Delegate of Türkiye"), {}, 50};
  CHECK_FALSE(fx.pipeline->index().search(q).empty());
  m.version -= 2;
  CHECK_THROWS_AS(fx.pipeline->update_manifest(m), ConflictError);
}

TEST_CASE("HTTP service") {
  Fixture fx("svc");
  Service service(*fx.pipeline);
  const int port = service.start();
  httplib::Client client("127.0.0.1", port);
  const std::string id = encode_id(fx.paths.meeting_id);

  Json body{{"manifest_path", fx.paths.manifest.string()}, {"audio_dir", fx.paths.audio_dir.string()}};
  auto res = client.Post("/meetings", body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(client.Post("/meetings", "not json", "application/json")->status == 400);

  res = client.Post("/meetings/" + id + "/run", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 202);
  service.wait_for_runs();

  res = client.Get("/meetings/" + id + "/status");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(Json::parse(res->body)["state"] == "published");
  CHECK(client.Get("/meetings/" + encode_id("no/such") + "/status")->status == 404);

  res = client.Get("/meetings");
  CHECK(Json::parse(res->body).size() == 1);

  res = client.Get("/meetings/" + id + "/transcripts/EN");
  REQUIRE(res->status == 200);
  const auto view = Json::parse(res->body);
  CHECK(view["language"] == "EN");
  CHECK(view["documents"][0]["provenance"]["kind"] == "native");
  res = client.Get("/meetings/" + id + "/transcripts/floor");
  CHECK(Json::parse(res->body)["channel"] == "floor");
  CHECK(client.Get("/meetings/" + id + "/transcripts/XX")->status == 400);

  res = client.Get("/meetings/" + id + "/export/FR/docx");
  REQUIRE(res->status == 200);
  CHECK(exporters::validate_docx(std::vector<std::uint8_t>(res->body.begin(), res->body.end())).ok());
  CHECK(client.Get("/meetings/" + id + "/export/FR/pdf")->status == 400);

  res = client.Get("/search?q=turkey&lang=EN&limit=3");
  REQUIRE(res->status == 200);
  const auto hits = Json::parse(res->body)["hits"];
  CHECK(hits.size() >= 1);
  CHECK(hits.size() <= 3);
  CHECK(hits[0]["language"] == "EN");
  CHECK(client.Get("/search")->status == 400);

  auto conflicting = Json::parse(support::read_file(fx.paths.manifest));
  conflicting["category"] = "Other";
  body = {{"manifest", conflicting}, {"audio_dir", fx.paths.audio_dir.string()}};
  CHECK(client.Post("/meetings", body.dump(), "application/json")->status == 409);
  service.stop();
}

#ifdef VERBATIM_CLI
TEST_CASE("command line interface") {
  support::TempDir dir("cli");
  const std::string cli = VERBATIM_CLI;
  const std::string root = dir.path().string();
  auto sh = [&](const std::string& args) {
    const std::string cmd = "cd '" + root + "' && '" + cli + "' " + args + " > out.txt 2> err.txt";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  auto out = [&] { return support::read_file(dir.path() / "out.txt"); };

  REQUIRE(sh("make-fixture fx") == 0);
  const std::string id = "WIPO/GA/2023-07-06/Session-1";
  const std::string cfg = "-c fx/config.json ";
  REQUIRE(sh(cfg + "ingest fx/manifest.json fx/audio") == 0);
  REQUIRE(sh(cfg + "run " + id) == 0);
  REQUIRE(sh(cfg + "status " + id) == 0);
  CHECK(out().find("published") != std::string::npos);
  REQUIRE(sh(cfg + "search turkey --lang EN --limit 2") == 0);
  CHECK(out().find("\"speaker\":\"Delegate of Turkey\"") != std::string::npos);
  REQUIRE(sh(cfg + "export " + id + " FR docx -o fr.docx") == 0);
  const auto docx = support::read_file(dir.path() / "fr.docx");
  CHECK(exporters::validate_docx(std::vector<std::uint8_t>(docx.begin(), docx.end())).ok());
  CHECK(sh(cfg + "status NO/SUCH") == 3);
  CHECK(sh(cfg + "export " + id + " FR pdf") != 0);

  REQUIRE(sh("plan --channels floor,booth-EN,booth-FR") == 0);
  CHECK(Json::parse(out()).size() == 8);
  REQUIRE(sh(std::string("eval report '") + VERBATIM_TEST_DATA + "/benchmark_wer.tsv'") == 0);
  CHECK(out() == support::read_file(fs::path(VERBATIM_TEST_DATA) / "benchmark_report.golden"));
  support::write_file(dir.path() / "items.tsv", "s1\tthe patent was filed\tthe patent is filed today\n");
  REQUIRE(sh("eval wer items.tsv") == 0);
  CHECK(out().find("0.5") != std::string::npos);
}
#endif
