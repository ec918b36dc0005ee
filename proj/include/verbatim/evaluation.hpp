#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::evaluation {

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_len = 0;
  bool empty_reference = false;  // ref was empty; rate is |hyp| / 1

  std::size_t errors() const { return substitutions + deletions + insertions; }
  /// (S + D + I) / ref_len; 0 for empty-vs-empty, |hyp| for empty reference.
  double rate() const;
  ErrorCounts& operator+=(const ErrorCounts& other);
  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

enum class EditOp : std::uint8_t { match, substitute, insert, remove };

/// One minimum-cost alignment under unit costs. The backtrace walks from the end and prefers
/// the diagonal (match or substitution), then deletion, then insertion.
std::vector<EditOp> align_edits(std::span<const std::string> ref, std::span<const std::string> hyp);

/// Minimum edit distance only (no backtrace); used as the cheap cross-check.
std::size_t edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp);

ErrorCounts word_error_rate(std::span<const std::string> ref, std::span<const std::string> hyp);
/// Whitespace-delimited convenience form.
ErrorCounts word_error_rate(std::string_view ref, std::string_view hyp);

/// Edit distance over code points. Whitespace is dropped unless `keep_whitespace`.
ErrorCounts char_error_rate(std::string_view ref, std::string_view hyp, bool keep_whitespace = false);

std::vector<std::string> split_words(std::string_view text);
std::vector<std::string> split_chars(std::string_view text, bool keep_whitespace = false);

struct TermErrorCounts {
  ErrorCounts counts;  // ref_len = term tokens in ref
  bool no_terms = false;

  std::optional<double> rate() const {
    return no_terms ? std::nullopt : std::optional<double>(counts.rate());
  }
};

/// Errors of the WER alignment whose reference position falls inside a term occurrence.
/// Substitutions and deletions count at their reference token; an insertion counts when both
/// neighbouring reference tokens belong to the same occurrence. Terms are token sequences
/// matched exactly; overlapping occurrences are merged.
TermErrorCounts terminology_error_rate(std::span<const std::string> ref, std::span<const std::string> hyp,
                                       std::span<const std::vector<std::string>> terms);

// ---------------------------------------------------------------------------
// Human annotation

enum class Severity : std::uint8_t { minor, disruptive };
std::string_view to_string(Severity severity);
std::optional<Severity> parse_severity(std::string_view text);

struct HumanAnnotation {
  std::string utterance;  // reference to the annotated utterance (e.g. segment id)
  std::size_t span_begin = 0;
  std::size_t span_end = 0;  // token span [begin, end) in the hypothesis
  Severity severity = Severity::minor;
  std::string category;
};

/// Categories a disruptive error may carry (singular; plural spellings are accepted).
inline constexpr std::array<std::string_view, 7> kDisruptiveCategories{"noun",  "verb",   "proper name", "time",
                                                                      "place", "number", "other"};

/// Violation "disruptive category not allowed" or "empty span".
ValidationReport validate_annotation(const HumanAnnotation& annotation);

struct AnnotationSummary {
  std::size_t total = 0;
  std::size_t minor = 0;
  std::size_t disruptive = 0;
  std::map<std::string, std::size_t> by_category;
  double disruptive_ratio = 0.0;
};

AnnotationSummary aggregate_annotations(std::span<const HumanAnnotation> annotations);

// ---------------------------------------------------------------------------
// Benchmark report

struct BenchmarkRow {
  Language language = Language::EN;
  std::vector<std::pair<std::string, double>> rates;  // system → rate, in column order
  std::optional<std::size_t> examples;
};

/// Fixed-width table: a header, a rule, then one row per language ordered EN, FR, ES, ZH, RU,
/// AR (PT last). Rates print with three decimals; "-" marks a missing system. An "Examples"
/// column appears when any row carries a count.
std::string render_benchmark_report(std::span<const BenchmarkRow> rows);

/// TSV with header "Language<TAB>system...[<TAB>Examples]"; '#' lines are comments.
std::vector<BenchmarkRow> parse_benchmark_tsv(std::string_view text);

// ---------------------------------------------------------------------------
// Corpus evaluation

struct EvalItem {
  std::string segment_id;
  std::string ref;
  std::string hyp;
};

/// Lines "segment_id<TAB>ref<TAB>hyp"; blank and '#' lines skipped.
std::vector<EvalItem> parse_eval_tsv(std::string_view text);

struct CorpusResult {
  ErrorCounts total;
  std::vector<std::pair<std::string, ErrorCounts>> items;
};

/// Per-item and pooled counts; CER when `character_level` (the ZH convention), WER otherwise.
CorpusResult evaluate_corpus(std::span<const EvalItem> items, bool character_level);

/// One term per line; terms are whitespace-tokenized.
std::vector<std::vector<std::string>> parse_term_list(std::string_view text);

}  // namespace verbatim::evaluation
