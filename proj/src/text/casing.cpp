#include "verbatim/errors.hpp"
#include "verbatim/text.hpp"
#include "verbatim/unicode.hpp"

namespace verbatim::text {

namespace {

enum class Casing { plain, title, all_caps };

Casing classify(std::string_view token) {
  const auto cps = unicode::decode(token);
  std::size_t letters = 0;
  std::size_t upper = 0;
  bool first_upper = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (!unicode::is_letter(c)) {
      if (unicode::to_lower(c) != c || unicode::to_upper(c) != c) return Casing::plain;
      continue;
    }
    ++letters;
    if (unicode::is_upper(c)) {
      // Only letters whose case mapping round-trips may be folded into a tag.
      if (unicode::to_lower(c) == c || unicode::to_upper(unicode::to_lower(c)) != c) return Casing::plain;
      ++upper;
      if (i == 0) first_upper = true;
    } else if (unicode::to_lower(c) != c) {
      return Casing::plain;
    }
  }
  if (upper == 0) return Casing::plain;
  if (first_upper && upper == 1) return Casing::title;
  if (upper == letters && letters >= 2) return Casing::all_caps;
  return Casing::plain;
}

std::string upper_first(std::string_view token) {
  auto cps = unicode::decode(token);
  if (!cps.empty()) cps[0] = unicode::to_upper(cps[0]);
  return unicode::encode(cps);
}

std::string upper_all(std::string_view token) {
  auto cps = unicode::decode(token);
  for (auto& c : cps) c = unicode::to_upper(c);
  return unicode::encode(cps);
}

}  // namespace

std::vector<std::string> encode_casing(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (is_reserved_tag(token)) throw TagError("reserved tag '" + token + "' in untagged input");
    switch (classify(token)) {
      case Casing::title:
        out.emplace_back(kCapTag);
        out.push_back(unicode::lower(token));
        break;
      case Casing::all_caps:
        out.emplace_back(kAllCapsTag);
        out.push_back(unicode::lower(token));
        break;
      case Casing::plain:
        out.push_back(token);
        break;
    }
  }
  return out;
}

std::vector<std::string> decode_casing(std::span<const std::string> tagged) {
  std::vector<std::string> out;
  out.reserve(tagged.size());
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    const auto& token = tagged[i];
    if (!is_casing_tag(token)) {
      out.push_back(token);
      continue;
    }
    if (i + 1 >= tagged.size() || is_reserved_tag(tagged[i + 1])) {
      throw TagError("malformed tag stream");
    }
    const auto& next = tagged[++i];
    out.push_back(token == kCapTag ? upper_first(next) : upper_all(next));
  }
  return out;
}

}  // namespace verbatim::text
