#include <array>

#include "verbatim/engines.hpp"
#include "verbatim/text.hpp"
#include "verbatim/unicode.hpp"

namespace verbatim::engines {

namespace {

using WordList = std::set<std::string, std::less<>>;

// Function words plus the formulaic vocabulary of meeting interventions.
const WordList kEnglish{
    "the", "of", "and", "to", "in", "a", "an", "is", "are", "was", "were", "be", "been", "that",
    "this", "these", "those", "for", "on", "with", "as", "by", "at", "from", "it", "its", "we",
    "our", "i", "you", "your", "he", "she", "they", "their", "have", "has", "had", "will",
    "would", "should", "can", "not", "or", "but", "which", "who", "what", "there", "thank",
    "thanks", "good", "morning", "afternoon", "chair", "madam", "mr", "delegation", "distinguished"};

const WordList kFrench{
    "le", "la", "les", "de", "des", "du", "et", "est", "sont", "un", "une", "que", "qui",
    "pour", "dans", "nous", "notre", "je", "vous", "votre", "il", "elle", "ils", "sur", "pas",
    "au", "aux", "ce", "cette", "ces", "avec", "par", "mais", "ou", "se", "merci", "bonjour",
    "monsieur", "madame", "président", "présidente", "délégation", "très"};

const WordList kSpanish{
    "el", "la", "los", "las", "de", "del", "y", "es", "son", "un", "una", "que", "en", "por",
    "para", "con", "nosotros", "nuestra", "nuestro", "yo", "usted", "se", "su", "sus", "al",
    "lo", "como", "pero", "muy", "gracias", "buenos", "días", "señor", "señora", "presidente",
    "delegación", "está", "este", "esta"};

const WordList kPortuguese{
    "o", "os", "as", "do", "da", "dos", "das", "e", "é", "um", "uma", "que", "em", "no", "na",
    "nos", "por", "para", "com", "nós", "nosso", "nossa", "eu", "você", "seu", "sua", "ao",
    "mas", "muito", "não", "obrigado", "obrigada", "bom", "dia", "senhor", "senhora",
    "presidente", "delegação", "está", "este", "esta"};

const WordList kEmpty{};

constexpr std::array<Language, 4> kLatinOrder{Language::EN, Language::FR, Language::ES, Language::PT};

}  // namespace

const std::set<std::string, std::less<>>& HeuristicIdentifier::word_list(Language lang) {
  switch (lang) {
    case Language::EN: return kEnglish;
    case Language::FR: return kFrench;
    case Language::ES: return kSpanish;
    case Language::PT: return kPortuguese;
    default: return kEmpty;
  }
}

std::optional<Language> HeuristicIdentifier::identify(std::string_view sentence) const {
  std::size_t latin = 0, han = 0, arabic = 0, cyrillic = 0;
  for (char32_t cp : unicode::decode(sentence)) {
    if (!unicode::is_letter(cp)) continue;
    switch (unicode::script_of(cp)) {
      case unicode::Script::latin: ++latin; break;
      case unicode::Script::han: ++han; break;
      case unicode::Script::arabic: ++arabic; break;
      case unicode::Script::cyrillic: ++cyrillic; break;
      case unicode::Script::other: break;
    }
  }
  const std::size_t top = std::max({latin, han, arabic, cyrillic});
  if (top == 0) return std::nullopt;
  if (han == top) return Language::ZH;
  if (arabic == top) return Language::AR;
  if (cyrillic == top) return Language::RU;

  std::vector<std::string> words;
  for (auto& token : text::tokenize(sentence, Language::EN)) {
    auto cps = unicode::decode(token);
    if (std::any_of(cps.begin(), cps.end(), unicode::is_letter)) words.push_back(unicode::lower(token));
  }
  if (words.empty()) return std::nullopt;

  std::optional<Language> best;
  std::size_t best_hits = 0;
  for (Language lang : kLatinOrder) {
    const auto& list = word_list(lang);
    std::size_t hits = 0;
    for (const auto& w : words) hits += list.contains(w);
    if (hits > best_hits) {
      best = lang;
      best_hits = hits;
    }
  }
  const double ratio = static_cast<double>(best_hits) / static_cast<double>(words.size());
  if (!best || ratio < min_ratio_) return std::nullopt;
  return best;
}

}  // namespace verbatim::engines
