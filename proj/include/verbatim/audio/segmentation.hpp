#pragma once

// Voice-activity detection and the segmenters that turn channel audio (or aligned
// corpus text) into decoding/training segments.

#include <span>
#include <string>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::audio {

struct VadConfig {
  int frame_ms = 30;                     // one of 10, 20, 30
  double energy_threshold_dbfs = -45.0;  // frame speech iff mean-square level >= threshold
  int hangover_frames = 5;               // quiet gaps this short stay inside a region
  double min_region_s = 0.25;
};

/// Throws std::invalid_argument on out-of-range fields.
void validate(const VadConfig& cfg);

/// Per-frame mean-square level of a clip; the final frame may be partial.
struct FrameEnergies {
  int frame_samples = 0;
  int sample_rate_hz = kCanonicalSampleRate;
  std::vector<double> mean_square;

  double frame_s() const { return static_cast<double>(frame_samples) / sample_rate_hz; }
  std::size_t size() const { return mean_square.size(); }
};

FrameEnergies frame_energies(const AudioClip& clip, int frame_ms);

/// Level relative to a full-scale square wave; -inf for digital silence.
double to_dbfs(double mean_square);

std::vector<SpeechRegion> detect_speech_regions(const AudioClip& clip, const VadConfig& cfg = {});

struct SegmentationPolicy {
  double min_s = 1.0;
  double max_s = 20.0;
  double merge_gap_s = 0.5;
  int frame_ms = 30;  // resolution of the energy scan used to place split points
};

/// Identity stamped into segment ids.
struct SegmentKey {
  std::string meeting_id;
  ChannelId channel;
};

/// Turns speech regions into decoding segments of length [min_s, max_s]:
///  - a region shorter than min_s is merged into its nearer neighbour when the gap is at most
///    merge_gap_s (earlier neighbour on equal gaps), otherwise dropped;
///  - a region longer than max_s is cut at its lowest-energy frame, choosing among equally
///    quiet frames the one nearest the region midpoint and cutting at the point of that frame
///    closest to the midpoint; both sides keep at least min_s; applied recursively.
std::vector<Segment> split_segments(std::span<const SpeechRegion> regions, const AudioClip& clip,
                                    const SegmentationPolicy& policy = {},
                                    const SegmentKey& key = {});

enum class CorpusStrategyKind { linguistic, length, hybrid };

struct CorpusStrategy {
  CorpusStrategyKind kind = CorpusStrategyKind::linguistic;
  double target_len_s = 10.0;
  double max_s = 20.0;
};

struct CorpusSegment {
  Segment segment;
  std::size_t word_begin = 0;  // [word_begin, word_end) into the input word list
  std::size_t word_end = 0;
};

/// Training-corpus segmentation over force-aligned words. `sentence_ends` holds the index of
/// the last word of each sentence. All cuts fall on word boundaries; the concatenated word
/// ranges reproduce the input exactly.
///
/// The length rule walks left to right and ends each segment at the word boundary whose
/// duration is nearest the target (shorter on ties), never exceeding max_s unless a single
/// word does; a remaining tail shorter than half the target is absorbed when that stays
/// within max_s. Hybrid keeps sentence spans and re-cuts only spans longer than max_s, using
/// the length rule with target span/ceil(span/max_s) so the pieces come out balanced.
std::vector<CorpusSegment> corpus_segment(std::span<const WordTiming> words,
                                          std::span<const std::size_t> sentence_ends,
                                          const CorpusStrategy& strategy,
                                          const SegmentKey& key = {});

}  // namespace verbatim::audio
