#include "verbatim/engines.hpp"

#include <fstream>

#include "verbatim/errors.hpp"
#include "verbatim/text.hpp"

namespace verbatim::engines {

SidecarTranscriber::SidecarTranscriber(std::string id, std::map<std::string, std::string> fixtures,
                                       bool emit_timings)
    : id_(std::move(id)), fixtures_(std::move(fixtures)), emit_timings_(emit_timings) {}

std::map<std::string, std::string> SidecarTranscriber::load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EngineError(EngineErrorKind::fixture, "cannot read sidecar fixture " + path.string());
  std::map<std::string, std::string> fixtures;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw EngineError(EngineErrorKind::fixture,
                        path.string() + ":" + std::to_string(line_no) + ": expected segment_id<TAB>text");
    }
    fixtures[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return fixtures;
}

Hypothesis SidecarTranscriber::transcribe(const Segment& segment, const AudioClip&, SourceLanguage) const {
  Hypothesis hyp;
  hyp.engine_id = id_;
  const auto it = fixtures_.find(segment.segment_id);
  if (it == fixtures_.end()) {
    hyp.no_reference = true;
    return hyp;
  }
  hyp.tokens = text::split_tagged(it->second);
  if (!emit_timings_) return hyp;

  std::vector<std::string> words;
  for (const auto& t : hyp.tokens) {
    if (!text::is_reserved_tag(t)) words.push_back(t);
  }
  std::vector<WordTiming> timings;
  const double step = words.empty() ? 0.0 : segment.length() / static_cast<double>(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double start = segment.start_s + step * static_cast<double>(i);
    const double end = i + 1 == words.size() ? segment.end_s : segment.start_s + step * static_cast<double>(i + 1);
    timings.push_back({words[i], start, end, std::nullopt});
  }
  hyp.words = std::move(timings);
  return hyp;
}

std::string MarkerTranslator::marker(Language src, Language tgt) {
  return "⟪" + std::string(to_string(src)) + "→" + std::string(to_string(tgt)) + "⟫";
}

std::string MarkerTranslator::translate(std::string_view text, Language src, Language tgt) const {
  if (src == tgt) return std::string(text);
  return marker(src, tgt) + " " + std::string(text);
}

FaultInjectingTranslator::FaultInjectingTranslator(std::string id, std::shared_ptr<const Translator> inner,
                                                   std::set<std::pair<Language, Language>> failing_pairs)
    : id_(std::move(id)), inner_(std::move(inner)), failing_(std::move(failing_pairs)) {}

std::string FaultInjectingTranslator::translate(std::string_view text, Language src, Language tgt) const {
  if (src == tgt) return std::string(text);
  if (failing_.contains({src, tgt})) {
    throw EngineError(EngineErrorKind::unavailable, "injected fault for " + std::string(to_string(src)) +
                                                        "->" + std::string(to_string(tgt)));
  }
  return inner_->translate(text, src, tgt);
}

}  // namespace verbatim::engines
