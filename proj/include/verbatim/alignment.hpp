#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::alignment {

/// Seam for word-level aligners. Implementations return one timing per token; timings are
/// monotonic, non-overlapping and inside [segment.start_s, segment.end_s].
class Aligner {
 public:
  virtual ~Aligner() = default;
  virtual const std::string& id() const = 0;
  virtual std::vector<WordTiming> align(const Segment& segment, const AudioClip& clip,
                                        std::span<const std::string> tokens) const = 0;
};

/// Default weight of a token: its code-point count, at least 1.
double default_weight(std::string_view token);

/// Partitions the segment proportionally to `weights` (default_weight per token when absent).
/// Boundary k sits at start + duration * (w_0 + ... + w_{k-1}) / W; the final end is the
/// segment end. Throws std::invalid_argument("nothing to align") for an empty token list and
/// for a weight list that is the wrong length or holds a non-positive weight.
std::vector<WordTiming> proportional_align(const Segment& segment, std::span<const std::string> tokens,
                                           std::optional<std::span<const double>> weights = std::nullopt);

class ProportionalAligner final : public Aligner {
 public:
  explicit ProportionalAligner(std::string id = "proportional") : id_(std::move(id)) {}
  const std::string& id() const override { return id_; }
  std::vector<WordTiming> align(const Segment& segment, const AudioClip& clip,
                                std::span<const std::string> tokens) const override;

 private:
  std::string id_;
};

/// Empty report when `timings` honours the Aligner contract for these tokens.
ValidationReport check_alignment_contract(const Segment& segment, std::span<const std::string> tokens,
                                          std::span<const WordTiming> timings);

/// Fills word times for utterances not yet timed by their S2T engine; timed utterances are
/// kept verbatim. `channel_audio` is the whole channel; each aligner call sees only its
/// segment's slice. Throws AlignerContractError ("aligner contract violation: ...") when the
/// aligner misbehaves and verbatim::Error when an utterance maps to no segment.
Transcript align_transcript(const Transcript& transcript, std::span<const Segment> segments,
                            const AudioClip& channel_audio, const Aligner& aligner);

}  // namespace verbatim::alignment
