#include "verbatim/audio/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace verbatim::audio {

namespace {

Segment make_segment(const SegmentKey& key, double start, double end) {
  return Segment{key.channel, start, end, make_segment_id(key.meeting_id, key.channel, start, end)};
}

// Repeatedly folds sub-minimum regions into the nearer neighbour within merge_gap_s.
std::vector<SpeechRegion> merge_short_regions(std::vector<SpeechRegion> regions,
                                              const SegmentationPolicy& policy) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (regions[i].length() >= policy.min_s) continue;
      double prev_gap = i > 0 ? regions[i].start_s - regions[i - 1].end_s : INFINITY;
      double next_gap = i + 1 < regions.size() ? regions[i + 1].start_s - regions[i].end_s : INFINITY;
      if (prev_gap > policy.merge_gap_s && next_gap > policy.merge_gap_s) continue;
      if (prev_gap <= next_gap) {
        regions[i - 1].end_s = std::max(regions[i - 1].end_s, regions[i].end_s);
        regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        regions[i + 1].start_s = std::min(regions[i + 1].start_s, regions[i].start_s);
        regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(i));
      }
      changed = true;
      break;
    }
  }
  std::erase_if(regions, [&](const SpeechRegion& r) { return r.length() < policy.min_s; });
  return regions;
}

double choose_cut(const SpeechRegion& region, const FrameEnergies& energies,
                  const SegmentationPolicy& policy) {
  const double lo = region.start_s + policy.min_s;
  const double hi = region.end_s - policy.min_s;
  const double mid = 0.5 * (region.start_s + region.end_s);
  if (energies.size() == 0) return mid;

  const double frame_s = energies.frame_s();
  const auto frame_start = [&](std::size_t f) {
    return static_cast<double>(f * static_cast<std::size_t>(energies.frame_samples)) / energies.sample_rate_hz;
  };
  const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(lo / frame_s)));
  const auto last = std::min(energies.size() - 1, static_cast<std::size_t>(std::max(0.0, std::floor(hi / frame_s))));

  bool found = false;
  double best_energy = 0.0;
  double best_cut = mid;
  double best_distance = 0.0;
  for (std::size_t f = first; f <= last && f < energies.size(); ++f) {
    const double a = std::max(frame_start(f), lo);
    const double b = std::min(frame_start(f + 1), hi);
    if (a > b) continue;
    const double cut = std::clamp(mid, a, b);
    const double distance = std::abs(cut - mid);
    const double energy = energies.mean_square[f];
    if (!found || energy < best_energy || (energy == best_energy && distance < best_distance)) {
      found = true;
      best_energy = energy;
      best_cut = cut;
      best_distance = distance;
    }
  }
  return found ? best_cut : std::clamp(mid, lo, hi);
}

void split_recursive(const SpeechRegion& region, const FrameEnergies& energies,
                     const SegmentationPolicy& policy, std::vector<SpeechRegion>& out) {
  if (region.length() <= policy.max_s) {
    out.push_back(region);
    return;
  }
  const double cut = choose_cut(region, energies, policy);
  split_recursive({region.start_s, cut}, energies, policy, out);
  split_recursive({cut, region.end_s}, energies, policy, out);
}

}  // namespace

std::vector<Segment> split_segments(std::span<const SpeechRegion> regions, const AudioClip& clip,
                                    const SegmentationPolicy& policy, const SegmentKey& key) {
  if (!(policy.min_s > 0) || !(policy.max_s >= 2 * policy.min_s)) {
    throw std::invalid_argument("segmentation policy needs 0 < min_s and max_s >= 2 * min_s");
  }
  std::vector<SpeechRegion> sorted(regions.begin(), regions.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const SpeechRegion& a, const SpeechRegion& b) { return a.start_s < b.start_s; });
  // Overlapping input regions are coalesced first so outputs stay disjoint.
  std::vector<SpeechRegion> disjoint;
  for (const auto& r : sorted) {
    if (!(r.start_s < r.end_s)) continue;
    if (!disjoint.empty() && r.start_s <= disjoint.back().end_s) {
      disjoint.back().end_s = std::max(disjoint.back().end_s, r.end_s);
    } else {
      disjoint.push_back(r);
    }
  }

  const auto merged = merge_short_regions(std::move(disjoint), policy);
  const FrameEnergies energies = frame_energies(clip, policy.frame_ms);

  std::vector<SpeechRegion> pieces;
  for (const auto& r : merged) split_recursive(r, energies, policy, pieces);

  std::vector<Segment> out;
  out.reserve(pieces.size());
  for (const auto& p : pieces) out.push_back(make_segment(key, p.start_s, p.end_s));
  return out;
}

namespace {

double span_duration(std::span<const WordTiming> words, std::size_t begin, std::size_t last) {
  return words[last].end_s - words[begin].start_s;
}

// Length rule over words[begin, end); appends inclusive [first, last] word ranges.
void length_cuts(std::span<const WordTiming> words, std::size_t begin, std::size_t end,
                 double target, double cap,
                 std::vector<std::pair<std::size_t, std::size_t>>& out) {
  std::size_t i = begin;
  while (i < end) {
    std::size_t best = i;
    double best_delta = std::abs(span_duration(words, i, i) - target);
    for (std::size_t j = i + 1; j < end; ++j) {
      const double duration = span_duration(words, i, j);
      if (duration > cap) break;
      const double delta = std::abs(duration - target);
      if (delta < best_delta) {
        best = j;
        best_delta = delta;
      }
    }
    if (best + 1 < end) {
      const double tail = span_duration(words, best + 1, end - 1);
      if (tail < target / 2 && span_duration(words, i, end - 1) <= cap) best = end - 1;
    }
    out.emplace_back(i, best);
    i = best + 1;
  }
}

}  // namespace

std::vector<CorpusSegment> corpus_segment(std::span<const WordTiming> words,
                                          std::span<const std::size_t> sentence_ends,
                                          const CorpusStrategy& strategy, const SegmentKey& key) {
  std::vector<CorpusSegment> out;
  if (words.empty()) return out;
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i].start_s < words[i - 1].end_s) throw std::invalid_argument("words not monotonic");
  }
  if (!(strategy.target_len_s > 0) || !(strategy.max_s > 0)) {
    throw std::invalid_argument("corpus strategy lengths must be positive");
  }

  std::vector<std::pair<std::size_t, std::size_t>> sentences;
  if (strategy.kind != CorpusStrategyKind::length) {
    if (sentence_ends.empty() || sentence_ends.back() != words.size() - 1) {
      throw std::invalid_argument("last sentence must end at the last word");
    }
    std::size_t begin = 0;
    for (std::size_t k = 0; k < sentence_ends.size(); ++k) {
      if (k > 0 && sentence_ends[k] <= sentence_ends[k - 1]) {
        throw std::invalid_argument("sentence ends must be strictly increasing");
      }
      sentences.emplace_back(begin, sentence_ends[k]);
      begin = sentence_ends[k] + 1;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  switch (strategy.kind) {
    case CorpusStrategyKind::linguistic:
      ranges = sentences;
      break;
    case CorpusStrategyKind::length:
      length_cuts(words, 0, words.size(), strategy.target_len_s,
                  std::max(strategy.max_s, strategy.target_len_s), ranges);
      break;
    case CorpusStrategyKind::hybrid:
      for (const auto& [first, last] : sentences) {
        const double duration = span_duration(words, first, last);
        if (duration <= strategy.max_s) {
          ranges.emplace_back(first, last);
          continue;
        }
        const double pieces = std::ceil(duration / strategy.max_s);
        length_cuts(words, first, last + 1, duration / pieces, strategy.max_s, ranges);
      }
      break;
  }

  out.reserve(ranges.size());
  for (const auto& [first, last] : ranges) {
    out.push_back({make_segment(key, words[first].start_s, words[last].end_s), first, last + 1});
  }
  return out;
}

}  // namespace verbatim::audio
