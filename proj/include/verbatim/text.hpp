#pragma once

// Tokenization and the tagged-token stream conventions shared by engines, the
// normalizer and corpus tooling.
//
// A tagged stream is space-joined text whose tokens may include reserved tags:
//   ⟨cap⟩ next token is title case        ⟨allcaps⟩ next token is upper case
//   ⟨lang:XX⟩ … ⟨/lang⟩ span spoken in language XX (UNK when undetected)

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::engines {
class LanguageIdentifier;
}

namespace verbatim::text {

inline constexpr std::string_view kCapTag = "⟨cap⟩";
inline constexpr std::string_view kAllCapsTag = "⟨allcaps⟩";
inline constexpr std::string_view kForeignClose = "⟨/lang⟩";

std::string foreign_open_tag(std::optional<Language> lang);
bool is_foreign_open(std::string_view token);
bool is_casing_tag(std::string_view token);
bool is_reserved_tag(std::string_view token);

/// Whitespace-delimited words with punctuation and symbols split into their own tokens; Han
/// characters are always single tokens and for ZH every character is. Reserved tags embedded
/// in the text survive as single tokens.
std::vector<std::string> tokenize(std::string_view text, Language lang);

/// Inverse of tokenize up to spacing: closing punctuation attaches left, opening punctuation
/// attaches right, apostrophes and hyphens join both sides, CJK text is written unspaced.
std::string detokenize(std::span<const std::string> tokens, Language lang);

std::vector<std::string> split_tagged(std::string_view stream);
std::string join_tokens(std::span<const std::string> tokens);

/// Title-case tokens become [⟨cap⟩, lower]; all-caps tokens with at least two letters become
/// [⟨allcaps⟩, lower]; lowercase, caseless and mixed-case tokens pass through. Tokens whose
/// case mapping does not invert cleanly are treated as mixed. Throws TagError when the input
/// already contains a reserved tag.
std::vector<std::string> encode_casing(std::span<const std::string> tokens);

/// Inverse of encode_casing. Foreign markers pass through. Throws TagError
/// ("malformed tag stream") on a casing tag with no token to apply to.
std::vector<std::string> decode_casing(std::span<const std::string> tagged);

/// Wraps every utterance whose detected language differs from the channel language in
/// ⟨lang:XX⟩ … ⟨/lang⟩. Empty utterances are left alone.
std::vector<std::vector<std::string>> tag_foreign(std::span<const std::vector<std::string>> utterances,
                                                  Language channel_lang,
                                                  const engines::LanguageIdentifier& lid);

enum class ForeignSpanPolicy { keep, drop };

struct NormalizePolicy {
  ForeignSpanPolicy foreign = ForeignSpanPolicy::keep;
};

/// Strips foreign markers (and, under the drop policy, the text they enclose), removes empty
/// tokens and decodes casing tags.
std::vector<std::string> normalize_tokens(std::span<const std::string> tagged,
                                          const NormalizePolicy& policy = {});

/// normalize_tokens over a tagged stream, rejoined with single spaces.
std::string normalize_hypothesis(std::string_view raw, const NormalizePolicy& policy = {});

/// Search/index form of a single token: lowercase with diacritics folded.
std::string normalize_term(std::string_view token);

}  // namespace verbatim::text
