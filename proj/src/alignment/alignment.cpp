#include "verbatim/alignment.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "verbatim/audio/wav.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/unicode.hpp"

namespace verbatim::alignment {

double default_weight(std::string_view token) {
  return static_cast<double>(std::max<std::size_t>(1, unicode::length(token)));
}

std::vector<WordTiming> proportional_align(const Segment& segment, std::span<const std::string> tokens,
                                           std::optional<std::span<const double>> weights) {
  if (tokens.empty()) throw std::invalid_argument("nothing to align");
  std::vector<double> w;
  if (weights) {
    if (weights->size() != tokens.size()) throw std::invalid_argument("weights and tokens differ in length");
    w.assign(weights->begin(), weights->end());
    if (std::any_of(w.begin(), w.end(), [](double x) { return !(x > 0.0); })) {
      throw std::invalid_argument("weights must be positive");
    }
  } else {
    w.reserve(tokens.size());
    for (const auto& t : tokens) w.push_back(default_weight(t));
  }

  double total = 0.0;
  for (double x : w) total += x;
  const double duration = segment.end_s - segment.start_s;

  std::vector<WordTiming> out;
  out.reserve(tokens.size());
  double cumulative = 0.0;
  double boundary = segment.start_s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    cumulative += w[i];
    const double next = i + 1 == tokens.size() ? segment.end_s : segment.start_s + duration * (cumulative / total);
    out.push_back({tokens[i], boundary, next, std::nullopt});
    boundary = next;
  }
  return out;
}

std::vector<WordTiming> ProportionalAligner::align(const Segment& segment, const AudioClip&,
                                                   std::span<const std::string> tokens) const {
  return proportional_align(segment, tokens);
}

ValidationReport check_alignment_contract(const Segment& segment, std::span<const std::string> tokens,
                                          std::span<const WordTiming> timings) {
  ValidationReport report;
  if (timings.size() != tokens.size()) {
    report.add("", "expected " + std::to_string(tokens.size()) + " timings, got " + std::to_string(timings.size()));
    return report;
  }
  double previous_end = segment.start_s;
  for (std::size_t i = 0; i < timings.size(); ++i) {
    const auto& t = timings[i];
    const std::string path = "/" + std::to_string(i);
    if (t.token != tokens[i]) report.add(path, "token changed");
    if (!(t.start_s < t.end_s)) report.add(path, "start ≥ end");
    if (t.start_s < previous_end) report.add(path, i == 0 ? "starts before segment" : "overlaps previous word");
    if (t.end_s > segment.end_s) report.add(path, "ends after segment");
    previous_end = t.end_s;
  }
  return report;
}

Transcript align_transcript(const Transcript& transcript, std::span<const Segment> segments,
                            const AudioClip& channel_audio, const Aligner& aligner) {
  std::map<std::string_view, const Segment*> by_id;
  for (const auto& s : segments) by_id.emplace(s.segment_id, &s);

  Transcript out = transcript;
  for (auto& utt : out.utterances) {
    if (utt.timed) continue;
    auto it = by_id.find(utt.segment_id);
    if (it == by_id.end()) throw Error("utterance maps to no segment: " + utt.segment_id);
    const Segment& segment = *it->second;
    if (utt.words.empty()) {
      utt.timed = true;
      continue;
    }
    std::vector<std::string> tokens;
    tokens.reserve(utt.words.size());
    for (const auto& w : utt.words) tokens.push_back(w.token);

    const AudioClip clip = audio::slice(channel_audio, segment.start_s, segment.end_s);
    auto timings = aligner.align(segment, clip, tokens);
    const auto report = check_alignment_contract(segment, tokens, timings);
    if (!report.ok()) {
      throw AlignerContractError("aligner contract violation: " + aligner.id() + " on " + segment.segment_id + ": " +
                                 report.summary());
    }
    for (std::size_t i = 0; i < timings.size(); ++i) {
      timings[i].confidence = utt.words[i].confidence;
    }
    utt.words = std::move(timings);
    utt.timed = true;
  }
  return out;
}

}  // namespace verbatim::alignment
