#pragma once

// Synthetic three-channel meeting (floor + EN and FR booths, 60 s each) used by the demo CLI
// and the end-to-end tests. Everything is derived from fixed seeds, so two calls produce
// identical files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "verbatim/core.hpp"

namespace verbatim::pipeline {

struct FixtureOptions {
  bool silent_floor = false;                 // floor audio is noise only
  std::vector<std::string> fail_pairs;       // e.g. {"EN->RU"}; non-empty selects the fault-injecting MT
  std::vector<std::string> booths{"EN", "FR"};
};

struct FixturePaths {
  std::filesystem::path root;
  std::filesystem::path manifest;   // manifest.json
  std::filesystem::path audio_dir;  // floor.wav, booth-XX.wav
  std::filesystem::path sidecar;    // sidecar.tsv
  std::filesystem::path config;     // config.json (state under root/state)
  std::string meeting_id;
};

inline constexpr double kFixtureDurationS = 60.0;

/// Speech bursts of the floor channel; booths lag slightly behind.
std::vector<std::pair<double, double>> fixture_bursts(const ChannelId& channel);

/// Tone bursts over low seeded noise at the canonical rate.
AudioClip synth_meeting_audio(const std::vector<std::pair<double, double>>& bursts, double duration_s,
                              std::uint64_t seed);

MeetingManifest fixture_manifest();

/// Sentence pool shared by floor and booths: {EN tagged text, FR tagged text}.
const std::vector<std::pair<std::string, std::string>>& fixture_sentences();

/// Writes the fixture under `dir` (created if needed) and returns its paths.
FixturePaths make_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

}  // namespace verbatim::pipeline
