#pragma once

// Translation fan-out: which channel is translated into which language, how the floor's
// mixed-language sentences are handled, and how the results group into per-language views.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "verbatim/core.hpp"
#include "verbatim/engines.hpp"

namespace verbatim::routing {

enum class JobMode : std::uint8_t { full, per_sentence };
std::string_view to_string(JobMode mode);

struct TranslationJob {
  ChannelId source_channel;
  SourceLanguage src = Language::EN;
  Language tgt = Language::EN;
  JobMode mode = JobMode::full;

  friend auto operator<=>(const TranslationJob&, const TranslationJob&) = default;
};

/// Stable key such as "booth-EN>FR" or "floor>EN".
std::string job_key(const TranslationJob& job);

/// EN booth: one job to each other UN language and PT. Other booths: one job to EN. Floor:
/// one per-sentence job to EN. Sorted by (channel, target). Throws verbatim::Error when the
/// channel set violates the channel invariants (e.g. two booths for one language).
std::vector<TranslationJob> plan_translation_jobs(std::span<const ChannelId> channels);

nlohmann::json to_json(const std::vector<TranslationJob>& jobs);

/// Source language for floor sentences the identifier could not place: the most frequent
/// detected language (ties to the earlier language in canonical order), EN when none detected.
Language floor_majority_language(std::span<const std::optional<Language>> detected);

/// Per utterance: detected EN is copied byte-for-byte; anything else is sent to `mt` with the
/// detected language as source (UNK uses floor_majority_language). Throws TranslationError
/// carrying the utterance index when the engine fails.
TranslationArtifact resolve_floor_sentences(const Transcript& floor, const engines::LanguageIdentifier& lid,
                                            const engines::Translator& mt);

/// Whole-transcript translation of a monolingual booth.
TranslationArtifact translate_transcript(const Transcript& booth, Language target, const engines::Translator& mt);

/// Runs one planned job against its source transcript.
TranslationArtifact run_job(const TranslationJob& job, const Transcript& source, const engines::LanguageIdentifier& lid,
                            const engines::Translator& mt);

// ---------------------------------------------------------------------------
// Language views

struct ViewEntry {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<TranslationMode> mode;  // absent for native transcripts
  std::optional<Language> source_language;

  friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};

enum class DocumentKind : std::uint8_t { native, translation };
std::string_view to_string(DocumentKind kind);

struct Provenance {
  DocumentKind kind = DocumentKind::native;
  ChannelId channel;
  SourceLanguage source_lang = Language::EN;
  std::string engine_id;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// One single-language document; entry times are rounded to milliseconds.
struct ViewDocument {
  Language language = Language::EN;
  Provenance provenance;
  std::vector<ViewEntry> entries;

  friend bool operator==(const ViewDocument&, const ViewDocument&) = default;
};

struct ViewGap {
  TranslationJob job;
  std::string error;
};

struct LanguageView {
  Language language = Language::EN;
  std::vector<ViewDocument> documents;
  std::vector<ViewGap> gaps;
};

struct JobFailure {
  TranslationJob job;
  std::string error;
};

ViewDocument document_from(const Transcript& transcript);
ViewDocument document_from(const TranslationArtifact& artifact);

/// One view per language in canonical order. Booth transcripts land in their own language;
/// the multilingual floor transcript is represented only through its EN artifact. Within a
/// view, native documents come first, then translations by source channel.
std::vector<LanguageView> assemble_language_views(std::span<const Transcript> transcripts,
                                                  std::span<const TranslationArtifact> artifacts,
                                                  std::span<const JobFailure> failures = {});

/// The document exported for a view: its native booth transcript, else the translation of the
/// EN booth, else the floor artifact, else the first document; nullptr for an empty view.
const ViewDocument* primary_document(const LanguageView& view);

nlohmann::json to_json(const ViewDocument& document);
nlohmann::json to_json(const LanguageView& view);

}  // namespace verbatim::routing
