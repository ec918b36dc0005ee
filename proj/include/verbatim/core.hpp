#pragma once

// Shared domain types for the meeting pipeline plus their structural validators.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verbatim {

inline constexpr int kCanonicalSampleRate = 16000;

// Declaration order is the canonical sort order used by plans and reports.
enum class Language : std::uint8_t { AR, ZH, EN, FR, RU, ES, PT };

inline constexpr std::array<Language, 7> kAllLanguages{Language::AR, Language::ZH, Language::EN,
                                                       Language::FR, Language::RU, Language::ES,
                                                       Language::PT};
inline constexpr std::array<Language, 6> kBoothLanguages{Language::AR, Language::ZH, Language::EN,
                                                         Language::FR, Language::RU, Language::ES};

std::string_view to_string(Language lang);
std::optional<Language> parse_language(std::string_view code);
constexpr bool is_booth_language(Language lang) { return lang != Language::PT; }

/// A concrete language or the floor channel's multilingual marker.
class SourceLanguage {
 public:
  constexpr SourceLanguage(Language lang) : lang_(lang) {}  // NOLINT: implicit by design
  static constexpr SourceLanguage multilingual() { return SourceLanguage(); }

  constexpr bool is_multilingual() const { return !lang_.has_value(); }
  constexpr std::optional<Language> language() const { return lang_; }

  friend constexpr auto operator<=>(const SourceLanguage&, const SourceLanguage&) = default;

 private:
  constexpr SourceLanguage() = default;
  std::optional<Language> lang_;
};

std::string to_string(SourceLanguage lang);  // "MULTI" for the marker
std::optional<SourceLanguage> parse_source_language(std::string_view code);

struct ChannelId {
  enum class Kind : std::uint8_t { floor, booth };

  Kind kind = Kind::floor;
  std::optional<Language> language;  // booths only

  static ChannelId floor() { return {}; }
  static ChannelId booth(Language lang) { return {Kind::booth, lang}; }

  bool is_floor() const { return kind == Kind::floor; }

  friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

std::string to_string(const ChannelId& channel);  // "floor" | "booth-EN"
std::optional<ChannelId> parse_channel(std::string_view text);

// ---------------------------------------------------------------------------
// Meeting metadata

struct AgendaItem {
  std::string label;
  double start_s = 0.0;
  std::optional<double> end_s;

  friend bool operator==(const AgendaItem&, const AgendaItem&) = default;
};

struct SpeakerTurn {
  std::string name;
  std::string affiliation;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::string> biography;
  std::optional<std::string> flag_ref;

  friend bool operator==(const SpeakerTurn&, const SpeakerTurn&) = default;
};

struct DocumentRef {
  std::string code;
  std::string title;

  friend bool operator==(const DocumentRef&, const DocumentRef&) = default;
};

struct MeetingManifest {
  std::string meeting_id;
  std::string title;
  std::string category;
  std::vector<AgendaItem> agenda;
  std::vector<SpeakerTurn> speakers;
  std::vector<DocumentRef> documents;
  std::uint64_t version = 0;
  bool confidential = false;  // excluded from the search index

  friend bool operator==(const MeetingManifest&, const MeetingManifest&) = default;
};

/// Speaker turn containing `t` under half-open [start, end).
std::optional<std::size_t> speaker_at(const MeetingManifest& manifest, double t);
/// Agenda item containing `t`; an open-ended item runs until the next item starts.
std::optional<std::size_t> agenda_at(const MeetingManifest& manifest, double t);

// ---------------------------------------------------------------------------
// Audio and segments

struct AudioClip {
  int sample_rate_hz = kCanonicalSampleRate;
  std::vector<std::int16_t> samples;

  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

struct SpeechRegion {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }
  friend bool operator==(const SpeechRegion&, const SpeechRegion&) = default;
};

struct Segment {
  ChannelId channel;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string segment_id;

  double length() const { return end_s - start_s; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// "{meeting_id}/{channel}/{start_ms}-{end_ms}"
std::string make_segment_id(std::string_view meeting_id, const ChannelId& channel, double start_s,
                            double end_s);

/// Seconds rounded to whole milliseconds, the precision of every serialized timestamp.
double round_ms(double seconds);

// ---------------------------------------------------------------------------
// Transcripts and translations

struct WordTiming {
  std::string token;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<double> confidence;

  friend bool operator==(const WordTiming&, const WordTiming&) = default;
};

struct Utterance {
  std::string segment_id;
  double segment_start_s = 0.0;
  double segment_end_s = 0.0;
  std::vector<WordTiming> words;
  bool timed = true;  // false until an aligner has filled word times
  std::optional<Language> language;
  std::optional<std::size_t> speaker;  // index into MeetingManifest::speakers

  std::string text() const;  // tokens joined by single spaces
  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Transcript {
  ChannelId channel;
  SourceLanguage language = Language::EN;
  std::vector<Utterance> utterances;
  std::string engine_id;
  bool duplicate_of_floor = false;

  std::size_t word_count() const;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

enum class TranslationMode : std::uint8_t { translated, copied };
std::string_view to_string(TranslationMode mode);

struct TranslatedSentence {
  std::size_t source_index = 0;
  std::string text;
  TranslationMode mode = TranslationMode::translated;
  std::optional<Language> source_language;  // per-sentence detection; floor only
  double start_s = 0.0;                     // media span of the source utterance
  double end_s = 0.0;

  friend bool operator==(const TranslatedSentence&, const TranslatedSentence&) = default;
};

struct TranslationArtifact {
  ChannelId source_channel;
  SourceLanguage source_lang = Language::EN;
  Language target_lang = Language::EN;
  std::vector<TranslatedSentence> sentences;
  std::string engine_id;

  friend bool operator==(const TranslationArtifact&, const TranslationArtifact&) = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string path;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool contains(std::string_view message) const;
  std::string summary() const;
  void add(std::string path, std::string message) {
    violations.push_back({std::move(path), std::move(message)});
  }
};

ValidationReport validate_manifest(const MeetingManifest& manifest);
ValidationReport validate_transcript(const Transcript& transcript);
ValidationReport validate_translation(const TranslationArtifact& artifact);
/// Channel-set invariants: at most one floor, at most one booth per language, booth languages
/// drawn from the six booth languages.
ValidationReport validate_channels(const std::vector<ChannelId>& channels);

}  // namespace verbatim
