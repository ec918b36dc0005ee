#pragma once

#include <cstdint>
#include <string>

#include "verbatim/core.hpp"

namespace verbatim::audio {

/// Tempo change by linear-interpolation resampling at an unchanged sample rate: the output has
/// round(N / factor) samples. factor must lie in [0.8, 1.2] (std::invalid_argument otherwise).
AudioClip speed_perturb(const AudioClip& clip, double factor);

enum class NonSpeechKind { silence, tone_music };

struct NonSpeechExample {
  AudioClip clip;
  std::string reference;  // always empty: nothing should be transcribed
};

/// Deterministic non-speech training example at the canonical rate. tone_music is a sum of
/// three sinusoids whose frequencies, amplitudes and phases are drawn from `seed`.
/// duration_s must lie in [1, 20].
NonSpeechExample synth_nonspeech_example(NonSpeechKind kind, double duration_s, std::uint64_t seed);

}  // namespace verbatim::audio
