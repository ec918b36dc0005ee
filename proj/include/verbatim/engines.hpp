#pragma once

// Provider-agnostic engine seams. Implementations must be safe to call concurrently
// and deterministic for identical inputs and configuration.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::engines {

struct Hypothesis {
  std::vector<std::string> tokens;  // tagged token stream
  /// Timings for the non-tag tokens, in order; absent when the engine does not time words.
  std::optional<std::vector<WordTiming>> words;
  std::string engine_id;
  bool no_reference = false;  // sidecar miss
};

class SpeechToText {
 public:
  virtual ~SpeechToText() = default;
  virtual const std::string& id() const = 0;
  /// `audio` is the segment's own slice of channel audio.
  virtual Hypothesis transcribe(const Segment& segment, const AudioClip& audio,
                                SourceLanguage hint) const = 0;
};

class Translator {
 public:
  virtual ~Translator() = default;
  virtual const std::string& id() const = 0;
  /// Must return `text` unchanged when src == tgt.
  virtual std::string translate(std::string_view text, Language src, Language tgt) const = 0;
};

class LanguageIdentifier {
 public:
  virtual ~LanguageIdentifier() = default;
  virtual const std::string& id() const = 0;
  /// nullopt means undetermined (UNK).
  virtual std::optional<Language> identify(std::string_view sentence) const = 0;
};

/// Test double for the S2T seam: replays reference tagged text keyed by segment id.
class SidecarTranscriber final : public SpeechToText {
 public:
  SidecarTranscriber(std::string id, std::map<std::string, std::string> fixtures, bool emit_timings = true);

  /// TSV lines "segment_id<TAB>tagged text"; blank lines and lines starting with '#' are
  /// skipped. Throws EngineError(fixture) when the file cannot be read or a line is malformed.
  static std::map<std::string, std::string> load_fixture(const std::filesystem::path& path);

  const std::string& id() const override { return id_; }
  /// Known id: fixture tokens, with words spread uniformly over the segment when timings are
  /// enabled. Unknown id: empty hypothesis flagged no_reference.
  Hypothesis transcribe(const Segment& segment, const AudioClip& audio, SourceLanguage hint) const override;

 private:
  std::string id_;
  std::map<std::string, std::string> fixtures_;
  bool emit_timings_;
};

/// Test double for the MT seam: prefixes "⟪SRC→TGT⟫ " so routing provenance is visible.
class MarkerTranslator final : public Translator {
 public:
  explicit MarkerTranslator(std::string id = "marker") : id_(std::move(id)) {}
  const std::string& id() const override { return id_; }
  std::string translate(std::string_view text, Language src, Language tgt) const override;

  static std::string marker(Language src, Language tgt);

 private:
  std::string id_;
};

/// Wraps another translator and fails every call for the configured (src, tgt) pairs.
class FaultInjectingTranslator final : public Translator {
 public:
  FaultInjectingTranslator(std::string id, std::shared_ptr<const Translator> inner,
                           std::set<std::pair<Language, Language>> failing_pairs);
  const std::string& id() const override { return id_; }
  std::string translate(std::string_view text, Language src, Language tgt) const override;

 private:
  std::string id_;
  std::shared_ptr<const Translator> inner_;
  std::set<std::pair<Language, Language>> failing_;
};

/// Script rules first (Han → ZH, Arabic → AR, Cyrillic → RU by dominant letter script); Latin
/// text is scored by the share of its words found in each of the EN/FR/ES/PT word lists. The
/// best share wins, ties resolved EN < FR < ES < PT; a best share below `min_ratio` is UNK.
class HeuristicIdentifier final : public LanguageIdentifier {
 public:
  explicit HeuristicIdentifier(std::string id = "heuristic-lid", double min_ratio = 0.2)
      : id_(std::move(id)), min_ratio_(min_ratio) {}
  const std::string& id() const override { return id_; }
  std::optional<Language> identify(std::string_view sentence) const override;

  /// The shipped word list for a Latin-script language (empty for others).
  static const std::set<std::string, std::less<>>& word_list(Language lang);

 private:
  std::string id_;
  double min_ratio_;
};

}  // namespace verbatim::engines
