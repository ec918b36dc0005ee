#include <cmath>
#include <stdexcept>

#include "verbatim/audio/kernels.hpp"
#include "verbatim/audio/segmentation.hpp"

namespace verbatim::audio {

namespace {
constexpr double kFullScaleSquare = 32768.0 * 32768.0;
}

void validate(const VadConfig& cfg) {
  if (cfg.frame_ms != 10 && cfg.frame_ms != 20 && cfg.frame_ms != 30) {
    throw std::invalid_argument("frame_ms must be 10, 20 or 30");
  }
  if (!std::isfinite(cfg.energy_threshold_dbfs)) throw std::invalid_argument("threshold must be finite");
  if (cfg.hangover_frames < 0) throw std::invalid_argument("hangover_frames must be >= 0");
  if (!std::isfinite(cfg.min_region_s) || cfg.min_region_s < 0) {
    throw std::invalid_argument("min_region_s must be >= 0");
  }
}

double to_dbfs(double mean_square) {
  if (mean_square <= 0.0) return -INFINITY;
  return 10.0 * std::log10(mean_square / kFullScaleSquare);
}

FrameEnergies frame_energies(const AudioClip& clip, int frame_ms) {
  FrameEnergies out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.frame_samples = std::max(1, clip.sample_rate_hz * frame_ms / 1000);
  const std::size_t frame = static_cast<std::size_t>(out.frame_samples);
  const std::size_t n = clip.samples.size();
  out.mean_square.reserve((n + frame - 1) / frame);
  const auto& kernel = kernels::active();
  for (std::size_t pos = 0; pos < n; pos += frame) {
    const std::size_t len = std::min(frame, n - pos);
    const std::int64_t energy = kernel.sum_squares_i16(clip.samples.data() + pos, len);
    out.mean_square.push_back(static_cast<double>(energy) / static_cast<double>(len));
  }
  return out;
}

std::vector<SpeechRegion> detect_speech_regions(const AudioClip& clip, const VadConfig& cfg) {
  validate(cfg);
  std::vector<SpeechRegion> regions;
  if (clip.samples.empty()) return regions;

  const FrameEnergies energies = frame_energies(clip, cfg.frame_ms);
  const auto frame_start = [&](std::size_t f) {
    return static_cast<double>(f * static_cast<std::size_t>(energies.frame_samples)) / clip.sample_rate_hz;
  };
  const double duration = clip.duration_s();
  const std::size_t frames = energies.size();
  const auto speech = [&](std::size_t i) {
    return to_dbfs(energies.mean_square[i]) >= cfg.energy_threshold_dbfs;
  };

  // Runs of speech frames; quiet gaps of at most hangover_frames are bridged. The hangover
  // never extends a region past its last speech frame.
  std::size_t i = 0;
  while (i < frames) {
    if (!speech(i)) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    std::size_t last = i;
    std::size_t j = i + 1;
    while (j < frames) {
      if (speech(j)) {
        last = j++;
        continue;
      }
      std::size_t k = j;
      while (k < frames && !speech(k)) ++k;
      if (k < frames && k - j <= static_cast<std::size_t>(cfg.hangover_frames)) {
        j = k;
        continue;
      }
      break;
    }
    SpeechRegion region{frame_start(first), std::min(frame_start(last + 1), duration)};
    if (region.length() >= cfg.min_region_s) regions.push_back(region);
    i = last + 1;
  }
  return regions;
}

}  // namespace verbatim::audio
