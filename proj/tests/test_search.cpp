#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "support.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/fixture.hpp"
#include "verbatim/search.hpp"

using namespace verbatim;
using namespace verbatim::search;

namespace {

const std::vector<std::string> kVocab{"patent", "madrid", "budget", "treaty", "the", "of", "assembly", "delegate"};

MeetingManifest manifest_named(const std::string& id) {
  auto m = pipeline::fixture_manifest();
  m.meeting_id = id;
  return m;
}

Transcript random_transcript(support::Gen& g, ChannelId channel, Language lang) {
  Transcript t;
  t.channel = channel;
  t.language = lang;
  t.engine_id = "gen";
  double clock = g.real(0.0, 2.0);
  const int utterances = g.integer(0, 6);
  for (int u = 0; u < utterances; ++u) {
    Utterance utt;
    utt.segment_start_s = clock;
    utt.segment_id = "m/" + to_string(channel) + "/" + std::to_string(u);
    double w = clock;
    const int words = g.integer(0, 9);
    for (int i = 0; i < words; ++i) {
      const double len = g.real(0.05, 0.6);
      utt.words.push_back({g.pick(kVocab), w, w + len, std::nullopt});
      w += len;
    }
    utt.segment_end_s = w + 0.1;
    clock = utt.segment_end_s + g.real(0.0, 1.0);
    t.utterances.push_back(std::move(utt));
  }
  return t;
}

struct ExpectedHit {
  std::string key;
  std::size_t utterance;
  double timestamp;
  double score;
  std::string meeting;
  ChannelId channel;
};

// Straight from the documented formula: loop over every utterance of every document.
std::vector<ExpectedHit> oracle(const std::vector<std::pair<std::string, IndexedDocument>>& docs,
                                const std::vector<std::string>& terms, const Query& q) {
  std::size_t n = 0;
  for (const auto& [_, d] : docs) n += d.utterances.size();
  std::vector<double> idf;
  for (const auto& t : terms) {
    std::size_t df = 0;
    for (const auto& [_, d] : docs) {
      for (const auto& u : d.utterances) {
        if (std::any_of(u.begin(), u.end(), [&](const IndexedWord& w) { return w.term == t; })) ++df;
      }
    }
    if (df == 0) return {};
    idf.push_back(std::log(1.0 + double(n) / double(df)));
  }
  std::vector<ExpectedHit> out;
  for (const auto& [key, d] : docs) {
    if (q.meeting_id && d.meeting_id != *q.meeting_id) continue;
    for (std::size_t u = 0; u < d.utterances.size(); ++u) {
      const auto& words = d.utterances[u];
      auto ok = [&](const IndexedWord& w) {
        return (!q.speaker || w.speaker == q.speaker) && (!q.agenda || w.agenda == q.agenda);
      };
      double score = 0;
      bool all = true;
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto tf = std::count_if(words.begin(), words.end(),
                                      [&](const IndexedWord& w) { return w.term == terms[t] && ok(w); });
        if (tf == 0) all = false;
        else score += (1.0 + std::log(double(tf))) * idf[t];
      }
      if (!all) continue;
      for (const auto& w : words) {
        if (w.term == terms[0] && ok(w)) out.push_back({key, u, w.timestamp_s, score, d.meeting_id, d.channel});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("one posting per word, idempotent upsert, empty transcript") {
  SearchIndex index;
  const auto m = manifest_named("M1");
  Transcript t;
  t.channel = ChannelId::booth(Language::FR);
  t.language = Language::FR;
  Utterance u;
  u.segment_id = "M1/booth-FR/0-10000";
  u.segment_end_s = 10.0;
  for (int i = 0; i < 10; ++i) u.words.push_back({"mot" + std::to_string(i), i * 0.9, i * 0.9 + 0.5, std::nullopt});
  u.words[3].token = "Madrid";
  u.words[3].start_s = 2.7;
  t.utterances.push_back(u);
  CHECK(index.index_document(t, m) == 10);
  CHECK(index.index_document(t, m) == 10);
  CHECK(index.posting_count() == 10);

  const auto hits = index.search({query_terms("madrid"), {}, {}, {}, {}, {}, 20});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].timestamp_s == 2.7);
  CHECK(hits[0].channel == t.channel);
  CHECK(hits[0].language == Language::FR);
  CHECK(hits[0].snippet == "mot0 mot1 mot2 Madrid mot4 mot5 mot6 mot7 mot8");
  CHECK(hits[0].score > 0);
  CHECK(index.search({{"absent"}, {}, {}, {}, {}, {}, 20}).empty());

  Transcript empty;
  empty.channel = ChannelId::booth(Language::EN);
  CHECK(index.index_document(empty, m) == 0);
  CHECK(index.snapshot()->document_count() == 2);
}

TEST_CASE("unvalidated transcripts are rejected") {
  SearchIndex index;
  Transcript t;
  t.channel = ChannelId::booth(Language::EN);
  Utterance u;
  u.segment_id = "x";
  u.segment_end_s = 1;
  u.timed = false;
  u.words.push_back({"hello", 0, 0, std::nullopt});
  t.utterances.push_back(u);
  CHECK_THROWS_AS(index.index_document(t, manifest_named("M")), Error);
}

TEST_CASE("postings carry speaker and agenda facets") {
  SearchIndex index;
  const auto m = manifest_named("M1");
  Transcript t;
  t.channel = ChannelId::booth(Language::EN);
  Utterance u;
  u.segment_id = "s";
  u.segment_start_s = 17.0;
  u.segment_end_s = 32.0;
  u.words = {{"chair", 18.0, 18.4, std::nullopt}, {"turkey", 18.5, 19.0, std::nullopt},
             {"budget", 30.0, 31.0, std::nullopt}};
  t.utterances.push_back(u);
  index.index_document(t, m);
  const auto postings = index.snapshot()->postings(document_key("M1", t.channel));
  REQUIRE(postings.size() == 3);
  CHECK(postings[0].speaker == "Chair");
  CHECK(postings[0].agenda == "Opening of the session");
  CHECK(postings[1].speaker == "Delegate of Turkey");  // half-open turn boundary
  CHECK(postings[2].agenda == "Program and budget");
  CHECK(postings[2].utterance == 0);
}

TEST_CASE("meeting filter and confidential meetings") {
  SearchIndex index;
  support::Gen g(5);
  Transcript t;
  t.channel = ChannelId::booth(Language::EN);
  Utterance u;
  u.segment_id = "s";
  u.segment_end_s = 2;
  u.words = {{"patent", 0.5, 1.0, std::nullopt}};
  t.utterances.push_back(u);
  index.index_document(t, manifest_named("M1"));
  index.index_document(t, manifest_named("M2"));
  Query q{{"patent"}, std::string("M1"), {}, {}, {}, {}, 20};
  const auto hits = index.search(q);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].meeting_id == "M1");
  q.meeting_id.reset();
  CHECK(index.search(q).size() == 2);

  auto secret = manifest_named("M2");
  secret.confidential = true;
  CHECK(index.index_document(t, secret) == 0);
  CHECK(index.search(q).size() == 1);
  CHECK(index.remove_meeting("M1") == 1);
  CHECK(index.search(q).empty());
}

TEST_CASE("ranking and completeness against the brute-force oracle") {
  support::Gen g(2024);
  for (int trial = 0; trial < 40; ++trial) {
    SearchIndex index;
    std::vector<std::pair<std::string, IndexedDocument>> docs;
    for (const std::string meeting : {"A", "B"}) {
      auto m = manifest_named(meeting);
      for (auto lang : {Language::EN, Language::FR, Language::ES}) {
        const auto t = random_transcript(g, ChannelId::booth(lang), lang);
        index.index_document(t, m);
        auto d = build_document(t, m);
        docs.emplace_back(d.key, d);
      }
    }
    std::sort(docs.begin(), docs.end(), [](auto& a, auto& b) { return a.first < b.first; });

    // Completeness: every posting is reachable by its own term at its own timestamp.
    for (const auto& [key, d] : docs) {
      for (std::size_t u = 0; u < d.utterances.size(); ++u) {
        for (const auto& w : d.utterances[u]) {
          const auto hits = index.search({{w.term}, d.meeting_id, {}, d.channel, {}, {}, 100000});
          REQUIRE(std::any_of(hits.begin(), hits.end(), [&](const Hit& h) {
            return h.document_key == key && h.utterance == u && h.timestamp_s == w.timestamp_s;
          }));
        }
      }
    }

    for (int qn = 0; qn < 10; ++qn) {
      std::vector<std::string> terms{g.pick(kVocab)};
      if (g.chance(0.5)) terms.push_back(g.pick(kVocab));
      Query q{terms, {}, {}, {}, {}, {}, 100000};
      if (g.chance(0.3)) q.meeting_id = g.chance(0.5) ? "A" : "B";
      if (g.chance(0.3)) q.speaker = "Chair";
      auto expected = oracle(docs, terms, q);
      std::sort(expected.begin(), expected.end(), [](const ExpectedHit& a, const ExpectedHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.meeting, a.timestamp, a.channel, a.key, a.utterance) <
               std::tie(b.meeting, b.timestamp, b.channel, b.key, b.utterance);
      });
      const auto got = index.search(q);
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        REQUIRE(got[i].document_key == expected[i].key);
        REQUIRE(got[i].utterance == expected[i].utterance);
        REQUIRE(got[i].timestamp_s == expected[i].timestamp);
        REQUIRE(got[i].score == doctest::Approx(expected[i].score).epsilon(1e-12));
      }
      q.limit = 3;
      CHECK(index.search(q).size() == std::min<std::size_t>(3, expected.size()));
    }
  }
}

TEST_CASE("filter soundness") {
  support::Gen g(99);
  SearchIndex index;
  auto m = manifest_named("F");
  for (auto lang : {Language::EN, Language::FR, Language::RU}) {
    auto t = random_transcript(g, ChannelId::booth(lang), lang);
    for (auto& u : t.utterances) {
      for (auto& w : u.words) {
        w.start_s += 15.0;
        w.end_s += 15.0;
      }
      u.segment_start_s += 15.0;
      u.segment_end_s += 15.0;
    }
    index.index_document(t, m);
  }
  const auto snap = index.snapshot();
  for (int i = 0; i < 300; ++i) {
    Query q{{g.pick(kVocab)}, {}, {}, {}, {}, {}, 1000};
    if (g.chance(0.5)) q.language = g.pick(std::vector<Language>{Language::EN, Language::FR, Language::ZH});
    if (g.chance(0.5)) q.channel = ChannelId::booth(g.pick(std::vector<Language>{Language::EN, Language::RU}));
    if (g.chance(0.5)) q.speaker = g.pick(std::vector<std::string>{"Chair", "Delegate of Turkey"});
    if (g.chance(0.5)) q.agenda = g.pick(std::vector<std::string>{"Opening of the session", "Program and budget"});
    for (const auto& h : snap->search(q)) {
      if (q.language) REQUIRE(h.language == q.language);
      if (q.channel) REQUIRE(h.channel == *q.channel);
      if (q.speaker) REQUIRE(h.speaker == q.speaker);
      if (q.agenda) REQUIRE(h.agenda == q.agenda);
      const auto& word = snap->document(h.document_key)->utterances[h.utterance];
      REQUIRE(std::any_of(word.begin(), word.end(), [&](const IndexedWord& w) {
        return w.term == q.terms[0] && w.timestamp_s == h.timestamp_s;
      }));
    }
  }
}

TEST_CASE("translations are indexed under their own key") {
  SearchIndex index;
  TranslationArtifact a;
  a.source_channel = ChannelId::booth(Language::EN);
  a.target_lang = Language::ZH;
  a.sentences.push_back({0, "会议开始", TranslationMode::translated, std::nullopt, 3.0, 5.0});
  CHECK(index.index_document(a, manifest_named("Z")) == 4);
  const auto hits = index.search({query_terms("会议", Language::ZH), {}, Language::ZH, {}, {}, {}, 10});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].document_key == "Z/booth-EN/translation-ZH");
  CHECK(hits[0].timestamp_s == 3.0);
}

TEST_CASE("persistence: log replay and compaction") {
  support::TempDir dir("index");
  support::Gen g(8);
  std::vector<IndexedDocument> docs;
  {
    SearchIndex index(dir.path(), 4);
    for (int i = 0; i < 7; ++i) {
      auto m = manifest_named("P" + std::to_string(i % 3));
      const auto lang = kBoothLanguages[static_cast<std::size_t>(i % 6)];
      index.index_document(random_transcript(g, ChannelId::booth(lang), lang), m);
    }
    index.remove_document(index.snapshot()->document_keys().front());
    for (const auto& k : index.snapshot()->document_keys()) docs.push_back(*index.snapshot()->document(k));
  }
  bool has_snapshot = false;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    if (e.path().filename().string().starts_with("snapshot-")) has_snapshot = true;
  }
  CHECK(has_snapshot);

  SearchIndex reopened(dir.path(), 4);
  const auto snap = reopened.snapshot();
  REQUIRE(snap->document_count() == docs.size());
  for (const auto& d : docs) CHECK(*snap->document(d.key) == d);

  reopened.compact();
  SearchIndex again(dir.path());
  CHECK(again.posting_count() == snap->posting_count());
}

TEST_CASE("readers see whole documents while one writer re-indexes") {
  SearchIndex index;
  const auto m = manifest_named("C");
  auto make = [](int words) {
    Transcript t;
    t.channel = ChannelId::booth(Language::EN);
    Utterance u;
    u.segment_id = "s";
    u.segment_end_s = 100;
    for (int i = 0; i < words; ++i) u.words.push_back({"shared", i * 0.5, i * 0.5 + 0.4, std::nullopt});
    t.utterances.push_back(u);
    return t;
  };
  const auto small = make(10), large = make(20);
  index.index_document(small, m);
  std::atomic<bool> done = false;
  std::atomic<int> bad = 0, reads = 0;
  std::vector<std::jthread> readers;
  for (int r = 0; r < 8; ++r) {
    readers.emplace_back([&] {
      while (!done) {
        const auto n = index.search({{"shared"}, {}, {}, {}, {}, {}, 1000}).size();
        if (n != 10 && n != 20) ++bad;
        ++reads;
      }
    });
  }
  for (int i = 0; i < 400; ++i) index.index_document(i % 2 ? small : large, m);
  while (reads < 100) std::this_thread::yield();
  done = true;
  readers.clear();
  CHECK(bad == 0);
}

TEST_CASE("hit JSON") {
  Hit h{"M", ChannelId::floor(), std::nullopt, 1.23449, "x", 1.5, "k", 2, std::string("Chair"), std::nullopt};
  const auto j = to_json(h);
  CHECK(j["timestamp_s"] == 1.234);
  CHECK(j["language"].is_null());
  CHECK(j["channel"] == "floor");
  CHECK(j["speaker"] == "Chair");
  CHECK_FALSE(j.contains("agenda"));
}
