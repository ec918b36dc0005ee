#include <doctest.h>

#include <functional>

#include "support.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/evaluation.hpp"

using namespace verbatim;
using namespace verbatim::evaluation;

namespace {

using Words = std::vector<std::string>;

// Levenshtein distance straight from its recursive definition, memoized on suffix lengths.
std::size_t oracle_distance(const Words& a, const Words& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto& m = memo[i][j];
    if (m >= 0) return static_cast<std::size_t>(m);
    const std::size_t best = std::min({d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1), d(i + 1, j) + 1, d(i, j + 1) + 1});
    m = static_cast<long>(best);
    return best;
  };
  return d(0, 0);
}

// Replays an edit script on the reference; it must produce the hypothesis.
bool script_transforms(const Words& ref, const Words& hyp, const std::vector<EditOp>& ops) {
  std::size_t i = 0, j = 0;
  for (auto op : ops) {
    switch (op) {
      case EditOp::match:
        if (i >= ref.size() || j >= hyp.size() || ref[i] != hyp[j]) return false;
        ++i, ++j;
        break;
      case EditOp::substitute:
        if (i >= ref.size() || j >= hyp.size() || ref[i] == hyp[j]) return false;
        ++i, ++j;
        break;
      case EditOp::remove:
        if (i >= ref.size()) return false;
        ++i;
        break;
      case EditOp::insert:
        if (j >= hyp.size()) return false;
        ++j;
        break;
    }
  }
  return i == ref.size() && j == hyp.size();
}

Words random_words(support::Gen& g, int max_len, const Words& alphabet) {
  Words w;
  for (int n = g.integer(0, max_len); n > 0; --n) w.push_back(g.pick(alphabet));
  return w;
}

void check_against_oracle(const Words& ref, const Words& hyp) {
  const auto c = word_error_rate(ref, hyp);
  const auto ops = align_edits(ref, hyp);
  const auto dist = oracle_distance(ref, hyp);
  REQUIRE(c.errors() == dist);
  REQUIRE(edit_distance(ref, hyp) == dist);
  REQUIRE(c.ref_len == ref.size());
  REQUIRE(ref.size() - c.deletions + c.insertions == hyp.size());
  REQUIRE(script_transforms(ref, hyp, ops));
  REQUIRE(static_cast<std::size_t>(std::count(ops.begin(), ops.end(), EditOp::substitute)) == c.substitutions);
  REQUIRE((c.rate() == 0.0) == (ref == hyp));
}

std::string slurp(const std::string& name) {
  return support::read_file(std::string(VERBATIM_TEST_DATA) + "/" + name);
}

}  // namespace

TEST_CASE("WER examples") {
  auto c = word_error_rate("the patent was filed", "the patent was filed");
  CHECK(c.rate() == 0.0);
  c = word_error_rate("the patent was filed", "the patent is filed today");
  CHECK(c.substitutions == 1);
  CHECK(c.insertions == 1);
  CHECK(c.deletions == 0);
  CHECK(c.rate() == 0.5);
  c = word_error_rate("a b c", "");
  CHECK(c.deletions == 3);
  CHECK(c.rate() == 1.0);
  c = word_error_rate("", "");
  CHECK(c.rate() == 0.0);
  c = word_error_rate("", "x y");
  CHECK(c.empty_reference);
  CHECK(c.rate() == 2.0);
  c = word_error_rate("a", "b c d e");
  CHECK(c.rate() == 4.0);  // rates above 1 are allowed
  // A substitution wins over a delete plus insert of equal cost.
  c = word_error_rate("a b", "a c");
  CHECK(c.substitutions == 1);
  CHECK(c.errors() == 1);
}

TEST_CASE("WER matches the oracle exhaustively on short sequences") {
  const Words alphabet{"a", "b", "c"};
  std::vector<Words> all{{}};
  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<Words> next;
    for (const auto& w : all) {
      if (w.size() != len - 1) continue;
      for (const auto& s : alphabet) {
        auto x = w;
        x.push_back(s);
        next.push_back(x);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
  }
  REQUIRE(all.size() == 1 + 3 + 9 + 27 + 81);
  for (const auto& ref : all) {
    for (const auto& hyp : all) check_against_oracle(ref, hyp);
  }
}

TEST_CASE("WER matches the oracle on random longer pairs") {
  support::Gen g(1234);
  const Words alphabet{"the", "patent", "treaty", "of", "a", "madrid", "x"};
  for (int i = 0; i < 1000; ++i) check_against_oracle(random_words(g, 25, alphabet), random_words(g, 25, alphabet));
}

TEST_CASE("CER") {
  auto c = char_error_rate("专利合作条约", "专利合作条约");
  CHECK(c.rate() == 0.0);
  c = char_error_rate("专利合作条约", "专利合做条约");
  CHECK(c.substitutions == 1);
  CHECK(c.ref_len == 6);
  CHECK(c.rate() == doctest::Approx(1.0 / 6.0));
  c = char_error_rate("abc", "abcd");
  CHECK(c.insertions == 1);
  CHECK(c.rate() == doctest::Approx(1.0 / 3.0));
  CHECK(char_error_rate("a b", "ab").rate() == 0.0);
  CHECK(char_error_rate("a b", "ab", true).deletions == 1);
  CHECK(split_chars("é 会") == Words{"é", "会"});
}

TEST_CASE("terminology error rate") {
  const std::vector<Words> pct{{"PCT"}};
  auto t = terminology_error_rate(split_words("the PCT system"), split_words("the PCT system"), pct);
  REQUIRE(t.rate().has_value());
  CHECK(*t.rate() == 0.0);
  t = terminology_error_rate(split_words("the PCT system"), split_words("the picket system"), pct);
  CHECK(t.counts.errors() == 1);
  CHECK(*t.rate() == 1.0);
  t = terminology_error_rate(split_words("no terms here"), split_words("no terms here"), pct);
  CHECK(t.no_terms);
  CHECK_FALSE(t.rate().has_value());

  const std::vector<Words> multi{{"madrid", "protocol"}};
  t = terminology_error_rate(split_words("the madrid protocol applies"), split_words("the madrid big protocol applies"),
                             multi);
  CHECK(t.counts.ref_len == 2);
  CHECK(t.counts.insertions == 1);  // inserted between two tokens of one occurrence
  t = terminology_error_rate(split_words("the madrid protocol"), split_words("big the madrid protocol"), multi);
  CHECK(t.counts.errors() == 0);
}

TEST_CASE("terminology errors never exceed total errors") {
  support::Gen g(55);
  const Words alphabet{"pct", "madrid", "protocol", "the", "of"};
  const std::vector<Words> terms{{"pct"}, {"madrid", "protocol"}};
  for (int i = 0; i < 2000; ++i) {
    const auto ref = random_words(g, 10, alphabet), hyp = random_words(g, 10, alphabet);
    const auto t = terminology_error_rate(ref, hyp, terms);
    REQUIRE(t.counts.errors() <= word_error_rate(ref, hyp).errors());
    REQUIRE(t.counts.ref_len <= ref.size());
  }
}

TEST_CASE("annotations") {
  CHECK(aggregate_annotations({}).total == 0);
  CHECK(aggregate_annotations({}).disruptive_ratio == 0.0);
  const std::vector<HumanAnnotation> two{{"u1", 0, 1, Severity::minor, "preposition"},
                                         {"u1", 2, 3, Severity::disruptive, "number"}};
  CHECK(aggregate_annotations(two).disruptive_ratio == 0.5);
  const std::vector<HumanAnnotation> three{{"u", 0, 1, Severity::disruptive, "proper name"},
                                           {"u", 1, 2, Severity::disruptive, "proper name"},
                                           {"u", 2, 3, Severity::disruptive, "number"}};
  const auto s = aggregate_annotations(three);
  CHECK(s.by_category == std::map<std::string, std::size_t>{{"proper name", 2}, {"number", 1}});
  CHECK(s.disruptive == 3);

  CHECK(validate_annotation({"u", 0, 1, Severity::disruptive, "Numbers"}).ok());
  CHECK(validate_annotation({"u", 0, 1, Severity::disruptive, "adverb"}).contains("disruptive category not allowed"));
  CHECK(validate_annotation({"u", 0, 1, Severity::minor, "adverb"}).ok());
  CHECK(validate_annotation({"u", 2, 2, Severity::minor, "x"}).contains("empty span"));
  CHECK(parse_severity("disruptive") == Severity::disruptive);
  CHECK_FALSE(parse_severity("major"));
}

TEST_CASE("benchmark report matches the golden rendering") {
  const auto rows = parse_benchmark_tsv(slurp("benchmark_wer.tsv"));
  REQUIRE(rows.size() == 6);
  const auto report = render_benchmark_report(rows);
  CHECK(report == slurp("benchmark_report.golden"));
  CHECK(report == render_benchmark_report(rows));

  auto row = [&](Language l) { return *std::find_if(rows.begin(), rows.end(), [&](auto& r) { return r.language == l; }); };
  const std::vector<double> en{0.148, 0.123, 0.118, 0.109, 0.102, 0.107};
  const std::vector<double> ar{0.191, 0.473, 0.264, 0.487, 0.340, 0.508};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(row(Language::EN).rates[i].second == en[i]);
    CHECK(row(Language::AR).rates[i].second == ar[i]);
  }
  CHECK(row(Language::EN).rates[3].first == "Whisper Small");
}

TEST_CASE("report edge cases") {
  CHECK(render_benchmark_report({}) == "Language\n--------\n");
  std::vector<BenchmarkRow> rows{{Language::FR, {{"A", 0.5}}, 252}, {Language::EN, {{"B", 0.25}}, 3051}};
  const auto text = render_benchmark_report(rows);
  CHECK(text ==
        "Language  A      B      Examples\n"
        "--------------------------------\n"
        "EN        -      0.250  3051\n"
        "FR        0.500  -      252\n");
  CHECK_THROWS_AS(parse_benchmark_tsv("Lang\tA\nEN\t0.1\n"), ParseError);
  CHECK_THROWS_AS(parse_benchmark_tsv("Language\tA\nEN\tabc\n"), ParseError);
  CHECK_THROWS_AS(parse_benchmark_tsv("Language\tA\nXX\t0.1\n"), ParseError);
  CHECK_THROWS_AS(parse_benchmark_tsv("Language\tA\nEN\n"), ParseError);
}

TEST_CASE("corpus evaluation") {
  const auto items = parse_eval_tsv("# header comment\ns1\tthe patent was filed\tthe patent is filed today\n\n"
                                    "s2\ta b c\t\n");
  REQUIRE(items.size() == 2);
  CHECK(items[1].hyp.empty());
  const auto r = evaluate_corpus(items, false);
  CHECK(r.total.ref_len == 7);
  CHECK(r.total.errors() == 5);
  CHECK(r.items[0].first == "s1");
  const auto zh = evaluate_corpus(std::vector<EvalItem>{{"z", "专利合作条约", "专利合做条约"}}, true);
  CHECK(zh.total.rate() == doctest::Approx(1.0 / 6.0));
  const auto terms = parse_term_list("PCT\nMadrid  Protocol\n\n");
  CHECK(terms == std::vector<Words>{{"PCT"}, {"Madrid", "Protocol"}});
}
