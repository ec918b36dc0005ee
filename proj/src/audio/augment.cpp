#include "verbatim/audio/augment.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "verbatim/audio/kernels.hpp"

namespace verbatim::audio {

AudioClip speed_perturb(const AudioClip& clip, double factor) {
  if (!(factor >= 0.8 && factor <= 1.2)) {
    throw std::invalid_argument("speed factor must be within [0.8, 1.2]");
  }
  if (factor == 1.0) return clip;
  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.resize(static_cast<std::size_t>(std::llround(static_cast<double>(clip.samples.size()) / factor)));
  kernels::lerp_resample(clip.samples, factor, out.samples);
  return out;
}

NonSpeechExample synth_nonspeech_example(NonSpeechKind kind, double duration_s, std::uint64_t seed) {
  if (!(duration_s >= 1.0 && duration_s <= 20.0)) {
    throw std::invalid_argument("non-speech example duration must be within [1, 20] s");
  }
  NonSpeechExample example;
  example.clip.sample_rate_hz = kCanonicalSampleRate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * kCanonicalSampleRate));
  example.clip.samples.assign(n, 0);
  if (kind == NonSpeechKind::silence) return example;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(110.0, 1760.0);
  std::uniform_real_distribution<double> amp(0.05, 0.25);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  struct Partial {
    double freq, amp, phase;
  };
  Partial partials[3];
  for (auto& p : partials) p = {freq(rng), amp(rng), phase(rng)};

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kCanonicalSampleRate;
    double v = 0.0;
    for (const auto& p : partials) v += p.amp * std::sin(2.0 * std::numbers::pi * p.freq * t + p.phase);
    example.clip.samples[i] = static_cast<std::int16_t>(std::lround(std::clamp(v, -1.0, 1.0) * 32767.0));
  }
  return example;
}

}  // namespace verbatim::audio
