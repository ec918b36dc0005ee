#pragma once

// Thin UTF-8 layer over ICU character properties.

#include <string>
#include <string_view>
#include <vector>

namespace verbatim::unicode {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);
std::size_t length(std::string_view utf8);

bool is_space(char32_t cp);
/// Punctuation and symbols: anything a tokenizer splits off as its own token.
bool is_punct(char32_t cp);
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);
bool is_han(char32_t cp);

char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);
std::string lower(std::string_view utf8);

/// Canonical decomposition with combining marks removed, then recomposed ("Türkiye" → "Turkiye").
std::string fold_diacritics(std::string_view utf8);

enum class Script { latin, han, arabic, cyrillic, other };
Script script_of(char32_t cp);

}  // namespace verbatim::unicode
