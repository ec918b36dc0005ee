#pragma once

// Shared helpers for the test binaries: a seeded generator with the handful of draws the
// property tests need, scratch directories, and small audio builders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "verbatim/core.hpp"
#include "verbatim/text.hpp"

namespace support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::uint64_t bits() { return rng_(); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

  std::string lower_word(int min_len = 1, int max_len = 8) {
    static const std::string kLetters = "abcdefghijklmnopqrstuvwxyz";
    std::string w;
    const int n = integer(min_len, max_len);
    for (int i = 0; i < n; ++i) w.push_back(kLetters[index(kLetters.size())]);
    return w;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("verbatim-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

/// Sine bursts of the given amplitude over uniform noise of +-noise_amp.
inline verbatim::AudioClip burst_clip(const std::vector<std::pair<double, double>>& bursts, double duration_s,
                                      double amplitude, int noise_amp, std::uint64_t seed,
                                      int rate = verbatim::kCanonicalSampleRate) {
  verbatim::AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.resize(static_cast<std::size_t>(std::llround(duration_s * rate)));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(-noise_amp, noise_amp);
  for (auto& s : clip.samples) s = static_cast<std::int16_t>(noise_amp ? noise(rng) : 0);
  for (const auto& [a, b] : bursts) {
    const auto i0 = static_cast<std::size_t>(std::llround(a * rate));
    const auto i1 = std::min(clip.samples.size(), static_cast<std::size_t>(std::llround(b * rate)));
    for (std::size_t i = i0; i < i1; ++i) {
      const double v = amplitude * std::sin(2.0 * std::numbers::pi * 220.0 * static_cast<double>(i) / rate);
      clip.samples[i] = static_cast<std::int16_t>(std::clamp(v + clip.samples[i], -32768.0, 32767.0));
    }
  }
  return clip;
}

inline verbatim::Segment segment(double start, double end, const std::string& id = "m/floor/seg") {
  verbatim::Segment s;
  s.start_s = start;
  s.end_s = end;
  s.segment_id = id;
  return s;
}

// Cased token generator: lower, title, all-caps, mixed, digits, accented and non-Latin forms.
inline std::string random_cased_token(support::Gen& g) {
  static const std::vector<std::string> kExtra{"élan", "Élan", "ÉLAN", "straße", "Москва", "МОСКВА", "москва",
                                               "日本", "مرحبا", "ǅemal", "iPhone", "McDonald", "42", "3.14",
                                               "x2", "Ωmega", "ΣΊΣΥΦΟΣ", "-", ",", "Ꭰ", "ﬁne", "İstanbul"};
  switch (g.integer(0, 5)) {
    case 0: return g.lower_word();
    case 1: {
      auto w = g.lower_word();
      w[0] = static_cast<char>(std::toupper(w[0]));
      return w;
    }
    case 2: {
      auto w = g.lower_word(2, 6);
      for (auto& c : w) c = static_cast<char>(std::toupper(c));
      return w;
    }
    case 3: {
      auto w = g.lower_word(2, 6);
      for (auto& c : w) {
        if (g.chance(0.5)) c = static_cast<char>(std::toupper(c));
      }
      return w;
    }
    default: return g.pick(kExtra);
  }
}

inline std::string random_tagged_stream(support::Gen& g) {
  static const std::vector<std::string> kOpen{"⟨lang:FR⟩", "⟨lang:EN⟩", "⟨lang:UNK⟩", "⟨lang:ZH⟩"};
  std::string s;
  const int n = g.integer(0, 14);
  bool open = false;
  for (int i = 0; i < n; ++i) {
    std::string tok;
    const int kind = g.integer(0, 9);
    if (kind == 0) tok = std::string(verbatim::text::kCapTag) + " " + g.lower_word();
    else if (kind == 1) tok = std::string(verbatim::text::kAllCapsTag) + " " + g.lower_word(2, 5);
    else if (kind == 2 && !open) {
      tok = g.pick(kOpen);
      open = true;
    } else if (kind == 3 && open) {
      tok = std::string(verbatim::text::kForeignClose);
      open = false;
    } else tok = g.lower_word();
    if (!s.empty()) s += g.chance(0.1) ? "  " : " ";
    s += tok;
  }
  if (open) s += " " + std::string(verbatim::text::kForeignClose);
  return s;
}

}  // namespace support
