#include "verbatim/engines.hpp"
#include "verbatim/text.hpp"

namespace verbatim::text {

std::vector<std::vector<std::string>> tag_foreign(std::span<const std::vector<std::string>> utterances,
                                                  Language channel_lang,
                                                  const engines::LanguageIdentifier& lid) {
  std::vector<std::vector<std::string>> out;
  out.reserve(utterances.size());
  for (const auto& tokens : utterances) {
    if (tokens.empty()) {
      out.push_back(tokens);
      continue;
    }
    const auto detected = lid.identify(join_tokens(tokens));
    if (detected == channel_lang) {
      out.push_back(tokens);
      continue;
    }
    std::vector<std::string> wrapped;
    wrapped.reserve(tokens.size() + 2);
    wrapped.push_back(foreign_open_tag(detected));
    wrapped.insert(wrapped.end(), tokens.begin(), tokens.end());
    wrapped.emplace_back(kForeignClose);
    out.push_back(std::move(wrapped));
  }
  return out;
}

std::vector<std::string> normalize_tokens(std::span<const std::string> tagged, const NormalizePolicy& policy) {
  std::vector<std::string> kept;
  kept.reserve(tagged.size());
  int foreign_depth = 0;
  for (const auto& token : tagged) {
    if (is_foreign_open(token)) {
      ++foreign_depth;
      continue;
    }
    if (token == kForeignClose) {
      if (foreign_depth > 0) --foreign_depth;
      continue;
    }
    if (token.empty()) continue;
    if (foreign_depth > 0 && policy.foreign == ForeignSpanPolicy::drop) continue;
    kept.push_back(token);
  }
  return decode_casing(kept);
}

std::string normalize_hypothesis(std::string_view raw, const NormalizePolicy& policy) {
  return join_tokens(normalize_tokens(split_tagged(raw), policy));
}

}  // namespace verbatim::text
