#include <doctest.h>

#include <set>

#include "support.hpp"
#include "verbatim/engines.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/routing.hpp"

using namespace verbatim;
using namespace verbatim::routing;

namespace {

// Brute-force statement of the fan-out rules, written without reference to the planner.
std::set<std::string> expected_jobs(const std::vector<ChannelId>& channels) {
  std::set<std::string> out;
  for (const auto& c : channels) {
    if (c.is_floor()) {
      out.insert("floor>EN/per_sentence/MULTI");
    } else if (c.language == Language::EN) {
      for (auto t : {"AR", "ZH", "FR", "RU", "ES", "PT"}) out.insert("booth-EN>" + std::string(t) + "/full/EN");
    } else {
      const std::string code(to_string(*c.language));
      out.insert("booth-" + code + ">EN/full/" + code);
    }
  }
  return out;
}

std::string describe(const TranslationJob& j) {
  return job_key(j) + "/" + std::string(to_string(j.mode)) + "/" + to_string(j.src);
}

class TableIdentifier final : public engines::LanguageIdentifier {
 public:
  explicit TableIdentifier(std::map<std::string, std::optional<Language>> table) : table_(std::move(table)) {}
  const std::string& id() const override { return id_; }
  std::optional<Language> identify(std::string_view s) const override {
    auto it = table_.find(std::string(s));
    return it == table_.end() ? std::nullopt : it->second;
  }

 private:
  std::string id_ = "table";
  std::map<std::string, std::optional<Language>> table_;
};

class FailingTranslator final : public engines::Translator {
 public:
  const std::string& id() const override { return id_; }
  std::string translate(std::string_view text, Language, Language) const override {
    if (text == "boom") throw EngineError(EngineErrorKind::unavailable, "down");
    return "ok";
  }

 private:
  std::string id_ = "failing";
};

Utterance utt(const std::string& text, double a, double b, bool timed = true) {
  Utterance u;
  u.segment_id = "seg";
  u.segment_start_s = a;
  u.segment_end_s = b;
  u.timed = timed;
  std::size_t start = 0;
  std::vector<std::string> words;
  while (start <= text.size() && !text.empty()) {
    auto sp = text.find(' ', start);
    words.push_back(text.substr(start, sp == std::string::npos ? std::string::npos : sp - start));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  const double step = words.empty() ? 0 : (b - a) / static_cast<double>(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    u.words.push_back({words[i], timed ? a + step * static_cast<double>(i) : 0.0,
                       timed ? a + step * static_cast<double>(i + 1) : 0.0, std::nullopt});
  }
  return u;
}

}  // namespace

TEST_CASE("fan-out matches the rules for every channel subset") {
  std::vector<ChannelId> all{ChannelId::floor()};
  for (auto l : kBoothLanguages) all.push_back(ChannelId::booth(l));
  REQUIRE(all.size() == 7);
  for (unsigned mask = 0; mask < 128; ++mask) {
    std::vector<ChannelId> subset;
    for (unsigned i = 0; i < 7; ++i) {
      if (mask & (1u << i)) subset.push_back(all[i]);
    }
    const auto jobs = plan_translation_jobs(subset);
    std::set<std::string> got;
    for (const auto& j : jobs) got.insert(describe(j));
    REQUIRE(got.size() == jobs.size());
    REQUIRE(got == expected_jobs(subset));
    REQUIRE(std::is_sorted(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) {
      return std::tie(a.source_channel, a.tgt) < std::tie(b.source_channel, b.tgt);
    }));
  }
  CHECK(plan_translation_jobs(all).size() == 12);
}

TEST_CASE("fan-out rejects invalid channel sets") {
  const std::vector<ChannelId> dup{ChannelId::booth(Language::FR), ChannelId::booth(Language::FR)};
  CHECK_THROWS_AS(plan_translation_jobs(dup), Error);
  const std::vector<ChannelId> pt{ChannelId::booth(Language::PT)};
  CHECK_THROWS_AS(plan_translation_jobs(pt), Error);
}

TEST_CASE("job keys and JSON plan") {
  const std::vector<ChannelId> ch{ChannelId::floor(), ChannelId::booth(Language::ZH)};
  const auto jobs = plan_translation_jobs(ch);
  REQUIRE(jobs.size() == 2);
  CHECK(job_key(jobs[0]) == "floor>EN");
  CHECK(job_key(jobs[1]) == "booth-ZH>EN");
  const auto doc = to_json(jobs);
  CHECK(doc.size() == 2);
}

TEST_CASE("floor majority language") {
  using D = std::vector<std::optional<Language>>;
  CHECK(floor_majority_language(D{}) == Language::EN);
  CHECK(floor_majority_language(D{std::nullopt}) == Language::EN);
  CHECK(floor_majority_language(D{Language::FR, Language::FR, Language::EN}) == Language::FR);
  CHECK(floor_majority_language(D{Language::FR, Language::ZH}) == Language::ZH);  // ZH precedes FR
}

TEST_CASE("floor sentences are copied or translated") {
  Transcript floor;
  floor.channel = ChannelId::floor();
  floor.language = SourceLanguage::multilingual();
  floor.utterances = {utt("good morning", 0, 1), utt("bonjour a tous", 1, 2), utt("hmm", 2, 3),
                      utt("merci", 3, 4), utt("", 4, 5, false)};
  TableIdentifier lid({{"good morning", Language::EN},
                       {"bonjour a tous", Language::FR},
                       {"hmm", std::nullopt},
                       {"merci", Language::FR}});
  engines::MarkerTranslator mt;
  const auto a = resolve_floor_sentences(floor, lid, mt);
  REQUIRE(a.sentences.size() == 5);
  CHECK(a.target_lang == Language::EN);
  CHECK(a.source_lang.is_multilingual());
  CHECK(a.sentences[0].text == "good morning");
  CHECK(a.sentences[0].mode == TranslationMode::copied);
  CHECK(a.sentences[1].text == "⟪FR→EN⟫ bonjour a tous");
  CHECK(a.sentences[2].text == "⟪FR→EN⟫ hmm");  // undetermined: majority language
  CHECK_FALSE(a.sentences[2].source_language.has_value());
  CHECK(a.sentences[4].text.empty());
  CHECK(a.sentences[4].start_s == 4.0);
  CHECK(a.sentences[1].start_s == 1.0);
  CHECK(a.sentences[1].end_s == 2.0);
  CHECK(validate_translation(a).ok());
}

TEST_CASE("MT failures carry the utterance index") {
  Transcript booth;
  booth.channel = ChannelId::booth(Language::FR);
  booth.language = Language::FR;
  booth.utterances = {utt("fine", 0, 1), utt("boom", 1, 2)};
  FailingTranslator mt;
  try {
    translate_transcript(booth, Language::EN, mt);
    FAIL("expected TranslationError");
  } catch (const TranslationError& e) {
    CHECK(e.utterance() == 1);
  }
}

TEST_CASE("language views") {
  Transcript en, fr, floor;
  en.channel = ChannelId::booth(Language::EN);
  en.language = Language::EN;
  en.utterances = {utt("hello", 0, 1)};
  fr.channel = ChannelId::booth(Language::FR);
  fr.language = Language::FR;
  fr.utterances = {utt("bonjour", 0.0004, 1)};
  floor.channel = ChannelId::floor();
  floor.language = SourceLanguage::multilingual();
  floor.utterances = {utt("hello", 0, 1)};

  engines::MarkerTranslator mt;
  engines::HeuristicIdentifier lid;
  std::vector<TranslationArtifact> artifacts;
  const std::vector<ChannelId> channels{ChannelId::floor(), en.channel, fr.channel};
  const std::vector<Transcript> transcripts{floor, en, fr};
  std::vector<JobFailure> failures;
  for (const auto& job : plan_translation_jobs(channels)) {
    const auto& src = job.source_channel.is_floor() ? floor : job.source_channel == en.channel ? en : fr;
    if (job.tgt == Language::RU) {
      failures.push_back({job, "down"});
      continue;
    }
    artifacts.push_back(run_job(job, src, lid, mt));
  }
  const auto views = assemble_language_views(transcripts, artifacts, failures);
  REQUIRE(views.size() == 7);
  const auto& en_view = views[static_cast<std::size_t>(Language::EN)];
  REQUIRE(en_view.documents.size() == 3);
  CHECK(en_view.documents[0].provenance.kind == DocumentKind::native);
  CHECK(en_view.documents[1].provenance.channel.is_floor());
  CHECK(primary_document(en_view) == &en_view.documents[0]);

  const auto& fr_view = views[static_cast<std::size_t>(Language::FR)];
  CHECK(fr_view.documents.size() == 2);
  CHECK(fr_view.documents[0].entries[0].start_s == 0.0);  // rounded to ms
  CHECK(primary_document(fr_view)->provenance.kind == DocumentKind::native);

  const auto& ru_view = views[static_cast<std::size_t>(Language::RU)];
  CHECK(ru_view.documents.empty());
  REQUIRE(ru_view.gaps.size() == 1);
  CHECK(primary_document(ru_view) == nullptr);

  const auto& zh_view = views[static_cast<std::size_t>(Language::ZH)];
  REQUIRE(zh_view.documents.size() == 1);
  CHECK(zh_view.documents[0].entries[0].text == "⟪EN→ZH⟫ hello");
  CHECK(to_json(zh_view)["documents"][0]["provenance"]["channel"] == "booth-EN");
}
