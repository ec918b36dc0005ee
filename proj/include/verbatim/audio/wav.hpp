#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::audio {

/// RIFF/WAVE with 16-bit PCM (plain or extensible), any channel count. Multi-channel input is
/// downmixed to mono by averaging; the sample rate is kept as found.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);
AudioClip read_wav(const std::filesystem::path& path);

/// Mono 16-bit PCM little-endian, canonical 44-byte header.
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

/// Linear-interpolation resampling to `target_rate`; identity when rates match.
AudioClip resample(const AudioClip& clip, int target_rate);

/// Pipeline ingestion: mono, 16 kHz.
inline AudioClip to_canonical(const AudioClip& clip) { return resample(clip, kCanonicalSampleRate); }

/// Samples covering [start_s, end_s), clamped to the clip; sample indices round to nearest.
AudioClip slice(const AudioClip& clip, double start_s, double end_s);

}  // namespace verbatim::audio
