#include <set>
#include <vector>

#include "verbatim/exporters.hpp"

namespace verbatim::exporters {

namespace {

// Recursive-descent well-formedness check over the XML 1.0 grammar subset that matters for
// generated packages. No DTD processing: only the five predefined entities are accepted.
class XmlChecker {
 public:
  explicit XmlChecker(std::string_view s) : s_(s) {}

  std::optional<std::string> run() {
    if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    if (starts("<?xml") && pos_ + 5 < s_.size() && is_space(s_[pos_ + 5])) {
      if (!pi()) return error_;
    }
    if (!misc()) return error_;
    if (starts("<!DOCTYPE")) return fail("DOCTYPE not supported");
    if (!starts("<")) return fail("missing root element");
    if (!element()) return error_;
    if (!misc()) return error_;
    if (pos_ != s_.size()) return fail("content after root element");
    return std::nullopt;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
  static bool name_start(unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
  }
  static bool name_char(unsigned char c) {
    return name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  }

  bool starts(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }
  std::optional<std::string> fail(std::string msg) {
    error_ = std::move(msg) + " at offset " + std::to_string(pos_);
    return error_;
  }
  bool bad(std::string msg) {
    fail(std::move(msg));
    return false;
  }
  void skip_space() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  bool name(std::string& out) {
    if (pos_ >= s_.size() || !name_start(static_cast<unsigned char>(s_[pos_]))) return bad("expected name");
    const auto begin = pos_;
    while (pos_ < s_.size() && name_char(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    out = std::string(s_.substr(begin, pos_ - begin));
    return true;
  }

  bool reference() {
    // at '&'
    const auto end = s_.find(';', pos_);
    if (end == std::string_view::npos) return bad("unterminated reference");
    const auto body = s_.substr(pos_ + 1, end - pos_ - 1);
    static const std::set<std::string_view> predefined{"lt", "gt", "amp", "apos", "quot"};
    bool ok = predefined.count(body) > 0;
    if (!ok && body.size() > 1 && body[0] == '#') {
      const bool hex = body[1] == 'x';
      const auto digits = body.substr(hex ? 2 : 1);
      ok = !digits.empty();
      unsigned long value = 0;
      for (char c : digits) {
        const bool digit = (c >= '0' && c <= '9') || (hex && ((c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F')));
        if (!digit || value > 0x10FFFF) {
          ok = false;
          break;
        }
        value = value * (hex ? 16 : 10) + static_cast<unsigned long>(std::stoul(std::string(1, c), nullptr, 16));
      }
      ok = ok && value <= 0x10FFFF && (value == 0x9 || value == 0xA || value == 0xD || value >= 0x20) &&
           !(value >= 0xD800 && value <= 0xDFFF);
    }
    if (!ok) return bad("invalid reference &" + std::string(body) + ";");
    pos_ = end + 1;
    return true;
  }

  bool comment() {
    pos_ += 4;  // "<!--"
    const auto end = s_.find("--", pos_);
    if (end == std::string_view::npos) return bad("unterminated comment");
    if (end + 2 >= s_.size() || s_[end + 2] != '>') return bad("'--' inside comment");
    pos_ = end + 3;
    return true;
  }

  bool pi() {
    pos_ += 2;  // "<?"
    std::string target;
    if (!name(target)) return false;
    const auto end = s_.find("?>", pos_);
    if (end == std::string_view::npos) return bad("unterminated processing instruction");
    pos_ = end + 2;
    return true;
  }

  bool cdata() {
    pos_ += 9;  // "<![CDATA["
    const auto end = s_.find("]]>", pos_);
    if (end == std::string_view::npos) return bad("unterminated CDATA section");
    pos_ = end + 3;
    return true;
  }

  bool misc() {
    for (;;) {
      skip_space();
      if (starts("<!--")) {
        if (!comment()) return false;
      } else if (starts("<?")) {
        if (starts("<?xml") && pos_ + 5 < s_.size() && (is_space(s_[pos_ + 5]) || s_[pos_ + 5] == '?')) {
          return bad("misplaced XML declaration");
        }
        if (!pi()) return false;
      } else {
        return true;
      }
    }
  }

  bool attribute_value() {
    if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) return bad("attribute value must be quoted");
    const char quote = s_[pos_++];
    while (pos_ < s_.size() && s_[pos_] != quote) {
      if (s_[pos_] == '<') return bad("'<' in attribute value");
      if (s_[pos_] == '&') {
        if (!reference()) return false;
      } else {
        ++pos_;
      }
    }
    if (pos_ >= s_.size()) return bad("unterminated attribute value");
    ++pos_;
    return true;
  }

  bool element() {
    // Iterative over nesting so deep documents cannot exhaust the stack.
    std::vector<std::string> open;
    do {
      if (starts("</")) {
        pos_ += 2;
        std::string n;
        if (!name(n)) return false;
        skip_space();
        if (!starts(">")) return bad("malformed end tag");
        ++pos_;
        if (open.empty() || open.back() != n) return bad("mismatched end tag </" + n + ">");
        open.pop_back();
        if (open.empty()) return true;
      } else if (starts("<!--")) {
        if (!comment()) return false;
      } else if (starts("<![CDATA[")) {
        if (open.empty()) return bad("CDATA outside root");
        if (!cdata()) return false;
      } else if (starts("<?")) {
        if (!pi()) return false;
      } else if (starts("<")) {
        ++pos_;
        std::string n;
        if (!name(n)) return false;
        std::set<std::string> attrs;
        for (;;) {
          const bool spaced = pos_ < s_.size() && is_space(s_[pos_]);
          skip_space();
          if (starts("/>")) {
            pos_ += 2;
            if (open.empty()) return true;
            break;
          }
          if (starts(">")) {
            ++pos_;
            open.push_back(n);
            break;
          }
          if (!spaced) return bad("expected whitespace before attribute");
          std::string a;
          if (!name(a)) return false;
          if (!attrs.insert(a).second) return bad("duplicate attribute " + a);
          skip_space();
          if (!starts("=")) return bad("expected '=' after attribute " + a);
          ++pos_;
          skip_space();
          if (!attribute_value()) return false;
        }
      } else {
        if (pos_ >= s_.size()) return bad("unexpected end of document");
        if (starts("]]>")) return bad("']]>' in content");
        if (s_[pos_] == '&') {
          if (!reference()) return false;
        } else {
          ++pos_;
        }
      }
    } while (!open.empty() || pos_ < s_.size());
    return bad("unclosed element");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::string error_;
};

}  // namespace

std::optional<std::string> xml_wellformedness_error(std::string_view xml) { return XmlChecker(xml).run(); }

}  // namespace verbatim::exporters
