#include <algorithm>

#include "verbatim/text.hpp"
#include "verbatim/unicode.hpp"

namespace verbatim::text {

namespace {

constexpr std::string_view kForeignOpenPrefix = "⟨lang:";
constexpr std::string_view kTagEnd = "⟩";

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Length in bytes of a reserved tag starting at the front of `s`, or 0.
std::size_t tag_at(std::string_view s) {
  for (auto tag : {kCapTag, kAllCapsTag, kForeignClose}) {
    if (starts_with(s, tag)) return tag.size();
  }
  if (starts_with(s, kForeignOpenPrefix)) {
    auto end = s.find(kTagEnd, kForeignOpenPrefix.size());
    if (end == std::string_view::npos) return 0;
    const auto code = s.substr(kForeignOpenPrefix.size(), end - kForeignOpenPrefix.size());
    if (code == "UNK" || parse_language(code)) return end + kTagEnd.size();
  }
  return 0;
}

bool is_cjk_punct(char32_t cp) { return (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFF65); }

bool attaches_left(std::u32string_view tok) {
  if (tok.size() != 1) return false;
  switch (tok[0]) {
    case U',': case U'.': case U';': case U':': case U'!': case U'?': case U')': case U']':
    case U'}': case U'%': case U'”': case U'»': case U'’': case U'\'': case U'-':
    case U'、': case U'。': case U'，': case U'！': case U'？': case U'：': case U'；': case U'）':
      return true;
    default:
      return false;
  }
}

bool attaches_right(std::u32string_view tok) {
  if (tok.size() != 1) return false;
  switch (tok[0]) {
    case U'(': case U'[': case U'{': case U'“': case U'«': case U'‘': case U'\'': case U'-':
    case U'（':
      return true;
    default:
      return false;
  }
}

bool is_cjk_token(std::u32string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char32_t c) {
    return unicode::is_han(c) || is_cjk_punct(c);
  });
}

}  // namespace

std::string foreign_open_tag(std::optional<Language> lang) {
  std::string tag(kForeignOpenPrefix);
  tag += lang ? to_string(*lang) : "UNK";
  tag += kTagEnd;
  return tag;
}

bool is_foreign_open(std::string_view token) {
  return tag_at(token) == token.size() && starts_with(token, kForeignOpenPrefix);
}

bool is_casing_tag(std::string_view token) { return token == kCapTag || token == kAllCapsTag; }

bool is_reserved_tag(std::string_view token) { return !token.empty() && tag_at(token) == token.size(); }

std::vector<std::string> tokenize(std::string_view text, Language lang) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    if (auto len = tag_at(text.substr(pos))) {
      flush();
      tokens.emplace_back(text.substr(pos, len));
      pos += len;
      continue;
    }
    // Decode one code point.
    std::size_t len = 1;
    const auto lead = static_cast<unsigned char>(text[pos]);
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, text.size() - pos);
    const std::string_view unit = text.substr(pos, len);
    const auto cps = unicode::decode(unit);
    const char32_t cp = cps.empty() ? U'�' : cps.front();
    pos += len;

    if (unicode::is_space(cp)) {
      flush();
    } else if (lang == Language::ZH || unicode::is_punct(cp) || unicode::is_han(cp)) {
      flush();
      tokens.emplace_back(unit);
    } else {
      current.append(unit);
    }
  }
  flush();
  return tokens;
}

std::string detokenize(std::span<const std::string> tokens, Language lang) {
  std::string out;
  std::u32string prev;
  for (const auto& token : tokens) {
    auto cur = unicode::decode(token);
    if (!out.empty()) {
      bool space = !(attaches_left(cur) || attaches_right(prev));
      if (lang == Language::ZH && (is_cjk_token(cur) || is_cjk_token(prev))) space = false;
      if (space) out += ' ';
    }
    out += token;
    prev = std::move(cur);
  }
  return out;
}

std::vector<std::string> split_tagged(std::string_view stream) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : unicode::decode(stream)) {
    if (unicode::is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      unicode::append(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string normalize_term(std::string_view token) {
  return unicode::fold_diacritics(unicode::lower(token));
}

}  // namespace verbatim::text
