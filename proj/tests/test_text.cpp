#include <doctest.h>

#include "support.hpp"
#include "verbatim/engines.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/text.hpp"

using namespace verbatim;
using namespace verbatim::text;
using Tokens = std::vector<std::string>;
using support::random_cased_token;
using support::random_tagged_stream;

TEST_CASE("tokenize splits punctuation and keeps tags") {
  CHECK(tokenize("Hello, world!", Language::EN) == Tokens{"Hello", ",", "world", "!"});
  CHECK(tokenize("⟨cap⟩ the ⟨lang:FR⟩ oui ⟨/lang⟩", Language::EN) ==
        Tokens{"⟨cap⟩", "the", "⟨lang:FR⟩", "oui", "⟨/lang⟩"});
  CHECK(tokenize("会议开始", Language::ZH) == Tokens{"会", "议", "开", "始"});
  CHECK(tokenize("WIPO 会议 ok", Language::EN) == Tokens{"WIPO", "会", "议", "ok"});
  CHECK(tokenize("   ", Language::EN).empty());
}

TEST_CASE("detokenize restores conventional spacing") {
  CHECK(detokenize(Tokens{"Hello", ",", "world", "!"}, Language::EN) == "Hello, world!");
  CHECK(detokenize(Tokens{"(", "see", "annex", ")"}, Language::EN) == "(see annex)");
  CHECK(detokenize(Tokens{"会", "议"}, Language::ZH) == "会议");
}

TEST_CASE("tag predicates") {
  CHECK(is_casing_tag("⟨cap⟩"));
  CHECK(is_casing_tag("⟨allcaps⟩"));
  CHECK(is_foreign_open("⟨lang:AR⟩"));
  CHECK(is_foreign_open("⟨lang:UNK⟩"));
  CHECK_FALSE(is_foreign_open("⟨lang:DE⟩"));
  CHECK(is_reserved_tag("⟨/lang⟩"));
  CHECK_FALSE(is_reserved_tag("cap"));
  CHECK(foreign_open_tag(std::nullopt) == "⟨lang:UNK⟩");
  CHECK(foreign_open_tag(Language::RU) == "⟨lang:RU⟩");
}

TEST_CASE("casing encoding") {
  CHECK(encode_casing(Tokens{"The", "WIPO", "assembly", "iPhone", "A"}) ==
        Tokens{"⟨cap⟩", "the", "⟨allcaps⟩", "wipo", "assembly", "iPhone", "⟨cap⟩", "a"});
  CHECK(decode_casing(Tokens{"⟨cap⟩", "the", "⟨allcaps⟩", "wipo"}) == Tokens{"The", "WIPO"});
  CHECK_THROWS_AS(encode_casing(Tokens{"⟨cap⟩"}), TagError);
  CHECK_THROWS_AS(decode_casing(Tokens{"word", "⟨cap⟩"}), TagError);
  CHECK_THROWS_AS(decode_casing(Tokens{"⟨cap⟩", "⟨allcaps⟩", "x"}), TagError);
}

TEST_CASE("casing round trip property") {
  support::Gen g(101);
  for (int trial = 0; trial < 3000; ++trial) {
    Tokens tokens;
    const int n = g.integer(0, 12);
    for (int i = 0; i < n; ++i) tokens.push_back(random_cased_token(g));
    const auto encoded = encode_casing(tokens);
    REQUIRE(decode_casing(encoded) == tokens);
    for (const auto& t : encoded) {
      if (!is_casing_tag(t)) REQUIRE_FALSE(t.empty());
    }
  }
}

TEST_CASE("normalization") {
  CHECK(normalize_hypothesis("⟨cap⟩ the ⟨allcaps⟩ wipo report") == "The WIPO report");
  CHECK(normalize_hypothesis("we ⟨lang:FR⟩ merci ⟨/lang⟩ agree") == "we merci agree");
  NormalizePolicy drop;
  drop.foreign = ForeignSpanPolicy::drop;
  CHECK(normalize_hypothesis("we ⟨lang:FR⟩ merci beaucoup ⟨/lang⟩ agree", drop) == "we agree");
  CHECK(normalize_hypothesis("") == "");
}

TEST_CASE("normalize_hypothesis is idempotent") {
  support::Gen g(202);
  NormalizePolicy drop;
  drop.foreign = ForeignSpanPolicy::drop;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto raw = random_tagged_stream(g);
    for (const auto& policy : {NormalizePolicy{}, drop}) {
      const auto once = normalize_hypothesis(raw, policy);
      REQUIRE(normalize_hypothesis(once, policy) == once);
    }
  }
}

TEST_CASE("normalize_term folds case and diacritics") {
  CHECK(normalize_term("Türkiye") == "turkiye");
  CHECK(normalize_term("ÉLAN") == "elan");
  CHECK(normalize_term("Москва") == "москва");
}

TEST_CASE("foreign span tagging uses the identifier") {
  engines::HeuristicIdentifier lid;
  const std::vector<Tokens> utterances{
      {"the", "delegation", "of", "the", "republic", "is", "here"},
      {"la", "délégation", "de", "la", "france", "est", "ici"},
      {}};
  const auto tagged = tag_foreign(utterances, Language::EN, lid);
  CHECK(tagged[0] == utterances[0]);
  REQUIRE(tagged[1].size() == utterances[1].size() + 2);
  CHECK(tagged[1].front() == "⟨lang:FR⟩");
  CHECK(tagged[1].back() == "⟨/lang⟩");
  CHECK(tagged[2].empty());
}
