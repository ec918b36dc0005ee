#include <doctest.h>

#include "support.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/serialize.hpp"

using namespace verbatim;

namespace {

MeetingManifest sample_manifest() {
  MeetingManifest m;
  m.meeting_id = "WIPO/PCT/2024-02-01/Session-2";
  m.title = "WIPO/PCT/2024-02-01/Session-2";
  m.category = "Working Group";
  m.version = 3;
  m.agenda = {{"Opening", 0.0, 10.0}, {"Reports", 10.0, std::nullopt}};
  m.speakers = {{"Chair", "Secretariat", 0.0, 12.5, "Career diplomat.", std::nullopt},
                {"Delegate", "Türkiye", 12.5, 30.0, std::nullopt, "flags/tr.png"}};
  m.documents = {{"PCT/WG/1", "Agenda"}};
  return m;
}

Transcript sample_transcript() {
  Transcript t;
  t.channel = ChannelId::booth(Language::FR);
  t.language = Language::FR;
  t.engine_id = "sidecar";
  Utterance u;
  u.segment_id = "m/booth-FR/1000-3000";
  u.segment_start_s = 1.0;
  u.segment_end_s = 3.0;
  u.words = {{"Bonjour", 1.0, 1.8, 0.9}, {"à", 1.8, 2.1, std::nullopt}, {"tous", 2.1, 3.0, std::nullopt}};
  u.language = Language::FR;
  u.speaker = 0;
  t.utterances.push_back(u);
  return t;
}

}  // namespace

TEST_CASE("language codes round-trip in canonical order") {
  for (std::size_t i = 0; i < kAllLanguages.size(); ++i) {
    const auto code = to_string(kAllLanguages[i]);
    CHECK(parse_language(code) == kAllLanguages[i]);
    if (i > 0) CHECK(kAllLanguages[i - 1] < kAllLanguages[i]);
  }
  CHECK_FALSE(parse_language("DE").has_value());
  CHECK_FALSE(parse_language("en").has_value());
  CHECK(to_string(SourceLanguage::multilingual()) == "MULTI");
  CHECK(parse_source_language("MULTI")->is_multilingual());
  CHECK_FALSE(is_booth_language(Language::PT));
}

TEST_CASE("channel names") {
  CHECK(to_string(ChannelId::floor()) == "floor");
  CHECK(to_string(ChannelId::booth(Language::ZH)) == "booth-ZH");
  CHECK(parse_channel("booth-AR") == ChannelId::booth(Language::AR));
  CHECK_FALSE(parse_channel("booth-XX").has_value());
  CHECK_FALSE(parse_channel("Floor").has_value());
  CHECK(ChannelId::floor() < ChannelId::booth(Language::AR));
}

TEST_CASE("segment ids use whole milliseconds") {
  CHECK(make_segment_id("m1", ChannelId::floor(), 1.2344, 3.0006) == "m1/floor/1234-3001");
  CHECK(make_segment_id("a/b", ChannelId::booth(Language::EN), 0.0, 20.0) == "a/b/booth-EN/0-20000");
  CHECK(round_ms(1.0004) == doctest::Approx(1.0));
  CHECK(round_ms(2.0005) == doctest::Approx(2.001));
}

TEST_CASE("speaker and agenda lookup") {
  const auto m = sample_manifest();
  CHECK(speaker_at(m, 0.0) == 0u);
  CHECK(speaker_at(m, 12.5) == 1u);  // half-open turns
  CHECK_FALSE(speaker_at(m, 30.0).has_value());
  CHECK(agenda_at(m, 9.99) == 0u);
  CHECK(agenda_at(m, 500.0) == 1u);  // open-ended last item
  CHECK_FALSE(agenda_at(m, -1.0).has_value());
}

TEST_CASE("manifest validation") {
  auto m = sample_manifest();
  CHECK(validate_manifest(m).ok());

  auto bad = m;
  bad.meeting_id.clear();
  CHECK(validate_manifest(bad).contains("missing meeting_id"));

  bad = m;
  bad.speakers[1].start_s = 10.0;
  CHECK(validate_manifest(bad).contains("overlapping speaker turns"));

  bad = m;
  bad.speakers[0].end_s = 0.0;
  CHECK(validate_manifest(bad).contains("speaker turn start ≥ end"));

  bad = m;
  std::swap(bad.agenda[0], bad.agenda[1]);
  CHECK(validate_manifest(bad).contains("agenda not ordered"));
}

TEST_CASE("transcript validation") {
  auto t = sample_transcript();
  CHECK(validate_transcript(t).ok());

  auto bad = t;
  bad.utterances[0].words[1].start_s = 1.5;  // overlaps the previous word
  CHECK(validate_transcript(bad).contains("words not monotonic"));

  bad = t;
  bad.utterances[0].words[2].end_s = 3.5;
  CHECK(validate_transcript(bad).contains("word outside segment bounds"));

  bad = t;
  bad.utterances[0].timed = false;
  CHECK(validate_transcript(bad).contains("utterance missing word timings"));

  bad = t;
  bad.language = Language::EN;
  CHECK(validate_transcript(bad).contains("language mismatch"));

  bad = t;
  bad.utterances[0].words[0].confidence = 1.5;
  CHECK(validate_transcript(bad).contains("confidence out of range"));
}

TEST_CASE("channel set validation") {
  std::vector<ChannelId> ok{ChannelId::floor(), ChannelId::booth(Language::EN), ChannelId::booth(Language::FR)};
  CHECK(validate_channels(ok).ok());
  auto dup = ok;
  dup.push_back(ChannelId::booth(Language::EN));
  CHECK(validate_channels(dup).contains("duplicate booth language"));
  CHECK(validate_channels({ChannelId::booth(Language::PT)}).contains("booth language not a booth language"));
  CHECK(validate_channels({ChannelId::floor(), ChannelId::floor()}).contains("duplicate floor channel"));
}

TEST_CASE("canonical JSON round trips") {
  const auto m = sample_manifest();
  CHECK(manifest_from_json(to_json(m)) == m);

  const auto t = sample_transcript();
  CHECK(transcript_from_json(to_json(t)) == t);

  TranslationArtifact a;
  a.source_channel = ChannelId::floor();
  a.source_lang = SourceLanguage::multilingual();
  a.target_lang = Language::EN;
  a.engine_id = "marker";
  a.sentences = {{0, "Hello", TranslationMode::copied, Language::EN, 0.5, 1.25},
                 {1, "⟪FR→EN⟫ Bonjour", TranslationMode::translated, Language::FR, 1.25, 2.0}};
  CHECK(artifact_from_json(to_json(a)) == a);

  // Equal values give identical bytes.
  CHECK(canonical_dump(to_json(t)) == canonical_dump(to_json(transcript_from_json(to_json(t)))));
}

TEST_CASE("serialized times are rounded to milliseconds") {
  auto t = sample_transcript();
  t.utterances[0].words[0].end_s = 1.80004;
  const auto back = transcript_from_json(to_json(t));
  CHECK(back.utterances[0].words[0].end_s == 1.8);
}

TEST_CASE("structural parse errors name the field") {
  auto doc = to_json(sample_manifest());
  doc["speakers"][1]["start_s"] = "late";
  try {
    manifest_from_json(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.path().find("/speakers/1") == 0);
  }
}
