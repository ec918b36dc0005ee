#include <algorithm>

#include "verbatim/evaluation.hpp"
#include "verbatim/unicode.hpp"

namespace verbatim::evaluation {

double ErrorCounts::rate() const {
  if (ref_len == 0) return static_cast<double>(errors());
  return static_cast<double>(errors()) / static_cast<double>(ref_len);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_len += o.ref_len;
  empty_reference = ref_len == 0 && (empty_reference || o.empty_reference);
  return *this;
}

std::size_t edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp) {
  std::vector<std::size_t> row(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({diag + (ref[i - 1] == hyp[j - 1] ? 0u : 1u), up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[hyp.size()];
}

std::vector<EditOp> align_edits(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0u : 1u), at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  std::vector<EditOp> ops;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0u : 1u)) {
        ops.push_back(same ? EditOp::match : EditOp::substitute);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ops.push_back(EditOp::remove);
      --i;
    } else {
      ops.push_back(EditOp::insert);
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

namespace {

ErrorCounts count_ops(std::span<const EditOp> ops, std::size_t ref_len) {
  ErrorCounts c;
  c.ref_len = ref_len;
  c.empty_reference = ref_len == 0 && !ops.empty();
  for (auto op : ops) {
    switch (op) {
      case EditOp::match: break;
      case EditOp::substitute: ++c.substitutions; break;
      case EditOp::insert: ++c.insertions; break;
      case EditOp::remove: ++c.deletions; break;
    }
  }
  return c;
}

}  // namespace

ErrorCounts word_error_rate(std::span<const std::string> ref, std::span<const std::string> hyp) {
  return count_ops(align_edits(ref, hyp), ref.size());
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char32_t cp : unicode::decode(text)) {
    if (unicode::is_space(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      unicode::append(current, cp);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> split_chars(std::string_view text, bool keep_whitespace) {
  std::vector<std::string> out;
  for (char32_t cp : unicode::decode(text)) {
    if (!keep_whitespace && unicode::is_space(cp)) continue;
    std::string s;
    unicode::append(s, cp);
    out.push_back(std::move(s));
  }
  return out;
}

ErrorCounts word_error_rate(std::string_view ref, std::string_view hyp) {
  return word_error_rate(split_words(ref), split_words(hyp));
}

ErrorCounts char_error_rate(std::string_view ref, std::string_view hyp, bool keep_whitespace) {
  return word_error_rate(split_chars(ref, keep_whitespace), split_chars(hyp, keep_whitespace));
}

TermErrorCounts terminology_error_rate(std::span<const std::string> ref, std::span<const std::string> hyp,
                                       std::span<const std::vector<std::string>> terms) {
  // occurrence[i] = id of the merged term occurrence covering ref token i, or 0.
  std::vector<std::size_t> occurrence(ref.size(), 0);
  std::size_t next_id = 0;
  for (const auto& term : terms) {
    if (term.empty() || term.size() > ref.size()) continue;
    for (std::size_t start = 0; start + term.size() <= ref.size(); ++start) {
      if (!std::equal(term.begin(), term.end(), ref.begin() + static_cast<std::ptrdiff_t>(start))) continue;
      std::size_t id = 0;
      for (std::size_t k = start; k < start + term.size(); ++k) id = std::max(id, occurrence[k]);
      if (id == 0) id = ++next_id;
      for (std::size_t k = start; k < start + term.size(); ++k) occurrence[k] = id;
    }
  }
  // Merging can leave one run with different ids; renumber contiguous runs.
  std::size_t run = 0;
  for (std::size_t k = 0; k < occurrence.size(); ++k) {
    if (occurrence[k] == 0) continue;
    if (k == 0 || occurrence[k - 1] == 0) ++run;
    occurrence[k] = run;
  }

  TermErrorCounts result;
  result.counts.ref_len = static_cast<std::size_t>(std::count_if(occurrence.begin(), occurrence.end(), [](std::size_t o) { return o != 0; }));
  if (result.counts.ref_len == 0) {
    result.no_terms = true;
    return result;
  }

  std::size_t i = 0;  // next reference position
  for (auto op : align_edits(ref, hyp)) {
    switch (op) {
      case EditOp::match: ++i; break;
      case EditOp::substitute:
        if (occurrence[i]) ++result.counts.substitutions;
        ++i;
        break;
      case EditOp::remove:
        if (occurrence[i]) ++result.counts.deletions;
        ++i;
        break;
      case EditOp::insert:
        if (i > 0 && i < ref.size() && occurrence[i] && occurrence[i] == occurrence[i - 1]) ++result.counts.insertions;
        break;
    }
  }
  return result;
}

std::vector<std::vector<std::string>> parse_term_list(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto words = split_words(text.substr(start, end - start));
    if (!words.empty() && words.front().rfind("#", 0) != 0) out.push_back(std::move(words));
    start = end + 1;
  }
  return out;
}

}  // namespace verbatim::evaluation
