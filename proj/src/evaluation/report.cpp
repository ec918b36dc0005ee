#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "verbatim/errors.hpp"
#include "verbatim/evaluation.hpp"

namespace verbatim::evaluation {

std::string_view to_string(Severity severity) { return severity == Severity::minor ? "minor" : "disruptive"; }

std::optional<Severity> parse_severity(std::string_view text) {
  if (text == "minor") return Severity::minor;
  if (text == "disruptive") return Severity::disruptive;
  return std::nullopt;
}

namespace {

std::string canonical_category(std::string_view category) {
  std::string c;
  for (char ch : category) c.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (std::find(kDisruptiveCategories.begin(), kDisruptiveCategories.end(), c) != kDisruptiveCategories.end()) return c;
  if (!c.empty() && c.back() == 's') {
    std::string singular = c.substr(0, c.size() - 1);
    if (std::find(kDisruptiveCategories.begin(), kDisruptiveCategories.end(), singular) != kDisruptiveCategories.end()) {
      return singular;
    }
  }
  return c;
}

}  // namespace

ValidationReport validate_annotation(const HumanAnnotation& a) {
  ValidationReport report;
  if (a.span_end <= a.span_begin) report.add("/span", "empty span");
  if (a.severity == Severity::disruptive) {
    const auto c = canonical_category(a.category);
    if (std::find(kDisruptiveCategories.begin(), kDisruptiveCategories.end(), c) == kDisruptiveCategories.end()) {
      report.add("/category", "disruptive category not allowed");
    }
  }
  return report;
}

AnnotationSummary aggregate_annotations(std::span<const HumanAnnotation> annotations) {
  AnnotationSummary s;
  for (const auto& a : annotations) {
    ++s.total;
    (a.severity == Severity::minor ? s.minor : s.disruptive) += 1;
    ++s.by_category[a.category];
  }
  s.disruptive_ratio = s.total ? static_cast<double>(s.disruptive) / static_cast<double>(s.total) : 0.0;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<Language, 7> kReportOrder{Language::EN, Language::FR, Language::ES, Language::ZH,
                                               Language::RU, Language::AR, Language::PT};

std::size_t report_rank(Language lang) {
  return static_cast<std::size_t>(std::find(kReportOrder.begin(), kReportOrder.end(), lang) - kReportOrder.begin());
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string rstrip(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

std::string render_benchmark_report(std::span<const BenchmarkRow> rows) {
  std::vector<std::string> systems;
  bool with_examples = false;
  for (const auto& r : rows) {
    for (const auto& [name, _] : r.rates) {
      if (std::find(systems.begin(), systems.end(), name) == systems.end()) systems.push_back(name);
    }
    with_examples = with_examples || r.examples.has_value();
  }

  constexpr std::size_t kFirst = 10;
  std::vector<std::size_t> widths;
  for (const auto& s : systems) widths.push_back(std::max<std::size_t>(s.size(), 5) + 2);
  const std::size_t examples_width = 10;

  std::string header = pad("Language", kFirst);
  for (std::size_t i = 0; i < systems.size(); ++i) header += pad(systems[i], widths[i]);
  if (with_examples) header += pad("Examples", examples_width);
  header = rstrip(header);

  std::ostringstream out;
  out << header << '\n' << std::string(header.size(), '-') << '\n';

  std::vector<const BenchmarkRow*> ordered;
  for (const auto& r : rows) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](auto* a, auto* b) { return report_rank(a->language) < report_rank(b->language); });

  for (const auto* r : ordered) {
    std::string line = pad(std::string(to_string(r->language)), kFirst);
    for (std::size_t i = 0; i < systems.size(); ++i) {
      auto it = std::find_if(r->rates.begin(), r->rates.end(), [&](const auto& p) { return p.first == systems[i]; });
      std::string cell = "-";
      if (it != r->rates.end()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", it->second);
        cell = buf;
      }
      line += pad(cell, widths[i]);
    }
    if (with_examples) line += pad(r->examples ? std::to_string(*r->examples) : "-", examples_width);
    out << rstrip(line) << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0;
  std::size_t number = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++number;
    if (!line.empty() && line.front() != '#') out.emplace_back(number, line);
    start = end + 1;
  }
  return out;
}

}  // namespace

std::vector<BenchmarkRow> parse_benchmark_tsv(std::string_view text) {
  const auto lines = content_lines(text);
  std::vector<BenchmarkRow> rows;
  if (lines.empty()) return rows;
  const auto header = split_tabs(lines.front().second);
  if (header.empty() || header.front() != "Language") throw ParseError("line 1", "header must start with Language");
  const bool with_examples = header.back() == "Examples";
  const std::size_t n_systems = header.size() - 1 - (with_examples ? 1 : 0);

  for (std::size_t l = 1; l < lines.size(); ++l) {
    const std::string where = "line " + std::to_string(lines[l].first);
    const auto cells = split_tabs(lines[l].second);
    if (cells.size() != header.size()) throw ParseError(where, "expected " + std::to_string(header.size()) + " columns");
    BenchmarkRow row;
    const auto lang = parse_language(cells[0]);
    if (!lang) throw ParseError(where, "unknown language '" + cells[0] + "'");
    row.language = *lang;
    for (std::size_t i = 0; i < n_systems; ++i) {
      const auto& cell = cells[i + 1];
      if (cell == "-" || cell.empty()) continue;
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.rates.emplace_back(header[i + 1], v);
      } catch (const std::exception&) {
        throw ParseError(where, "bad rate '" + cell + "'");
      }
    }
    if (with_examples && cells.back() != "-" && !cells.back().empty()) {
      try {
        row.examples = static_cast<std::size_t>(std::stoull(cells.back()));
      } catch (const std::exception&) {
        throw ParseError(where, "bad example count '" + cells.back() + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<EvalItem> parse_eval_tsv(std::string_view text) {
  std::vector<EvalItem> items;
  for (const auto& [number, line] : content_lines(text)) {
    auto cells = split_tabs(line);
    if (cells.size() == 2) cells.emplace_back();  // empty hypothesis
    if (cells.size() != 3) throw ParseError("line " + std::to_string(number), "expected segment_id, ref, hyp");
    items.push_back({cells[0], cells[1], cells[2]});
  }
  return items;
}

CorpusResult evaluate_corpus(std::span<const EvalItem> items, bool character_level) {
  CorpusResult result;
  for (const auto& item : items) {
    const auto counts = character_level ? char_error_rate(item.ref, item.hyp) : word_error_rate(item.ref, item.hyp);
    result.total += counts;
    result.items.emplace_back(item.segment_id, counts);
  }
  return result;
}

}  // namespace verbatim::evaluation
