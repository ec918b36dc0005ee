#include "verbatim/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace verbatim {

namespace {

constexpr std::array<std::string_view, 7> kLanguageCodes{"AR", "ZH", "EN", "FR", "RU", "ES", "PT"};

std::string index_path(std::string_view base, std::size_t i) {
  return std::string(base) + "/" + std::to_string(i);
}

}  // namespace

std::string_view to_string(Language lang) { return kLanguageCodes[static_cast<std::size_t>(lang)]; }

std::optional<Language> parse_language(std::string_view code) {
  for (std::size_t i = 0; i < kLanguageCodes.size(); ++i) {
    if (kLanguageCodes[i] == code) return static_cast<Language>(i);
  }
  return std::nullopt;
}

std::string to_string(SourceLanguage lang) {
  if (lang.is_multilingual()) return "MULTI";
  return std::string(to_string(*lang.language()));
}

std::optional<SourceLanguage> parse_source_language(std::string_view code) {
  if (code == "MULTI") return SourceLanguage::multilingual();
  if (auto lang = parse_language(code)) return SourceLanguage(*lang);
  return std::nullopt;
}

std::string to_string(const ChannelId& channel) {
  if (channel.is_floor()) return "floor";
  return "booth-" + std::string(channel.language ? to_string(*channel.language) : "??");
}

std::optional<ChannelId> parse_channel(std::string_view text) {
  if (text == "floor") return ChannelId::floor();
  constexpr std::string_view prefix = "booth-";
  if (text.substr(0, prefix.size()) == prefix) {
    if (auto lang = parse_language(text.substr(prefix.size()))) return ChannelId::booth(*lang);
  }
  return std::nullopt;
}

std::optional<std::size_t> speaker_at(const MeetingManifest& manifest, double t) {
  for (std::size_t i = 0; i < manifest.speakers.size(); ++i) {
    const auto& turn = manifest.speakers[i];
    if (turn.start_s <= t && t < turn.end_s) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> agenda_at(const MeetingManifest& manifest, double t) {
  const auto& agenda = manifest.agenda;
  for (std::size_t i = 0; i < agenda.size(); ++i) {
    double end = agenda[i].end_s ? *agenda[i].end_s
                                 : (i + 1 < agenda.size() ? agenda[i + 1].start_s : INFINITY);
    if (agenda[i].start_s <= t && t < end) return i;
  }
  return std::nullopt;
}

double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

std::string make_segment_id(std::string_view meeting_id, const ChannelId& channel, double start_s,
                            double end_s) {
  std::string id(meeting_id);
  id += '/';
  id += to_string(channel);
  id += '/';
  id += std::to_string(std::llround(start_s * 1000.0));
  id += '-';
  id += std::to_string(std::llround(end_s * 1000.0));
  return id;
}

std::string Utterance::text() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w.token;
  }
  return out;
}

std::size_t Transcript::word_count() const {
  std::size_t n = 0;
  for (const auto& u : utterances) n += u.words.size();
  return n;
}

std::string_view to_string(TranslationMode mode) {
  return mode == TranslationMode::copied ? "copied" : "translated";
}

bool ValidationReport::contains(std::string_view message) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.message == message; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    if (!violations[i].path.empty()) out << violations[i].path << ": ";
    out << violations[i].message;
  }
  return out.str();
}

ValidationReport validate_manifest(const MeetingManifest& m) {
  ValidationReport report;
  if (m.meeting_id.empty()) report.add("/meeting_id", "missing meeting_id");
  if (m.title.empty()) report.add("/title", "missing title");

  for (std::size_t i = 0; i < m.agenda.size(); ++i) {
    const auto& item = m.agenda[i];
    auto path = index_path("/agenda", i);
    if (item.label.empty()) report.add(path + "/label", "missing label");
    if (!std::isfinite(item.start_s) || item.start_s < 0) report.add(path + "/start_s", "negative start");
    if (item.end_s && !(*item.end_s > item.start_s)) report.add(path + "/end_s", "agenda end not after start");
    if (i > 0 && item.start_s < m.agenda[i - 1].start_s) report.add(path, "agenda not ordered");
  }

  for (std::size_t i = 0; i < m.speakers.size(); ++i) {
    const auto& turn = m.speakers[i];
    auto path = index_path("/speakers", i);
    if (turn.name.empty()) report.add(path + "/name", "missing speaker name");
    if (!(turn.start_s < turn.end_s)) report.add(path, "speaker turn start ≥ end");
    if (i > 0) {
      const auto& prev = m.speakers[i - 1];
      if (turn.start_s < prev.start_s) report.add(path, "speaker turns not ordered");
      else if (turn.start_s < prev.end_s) report.add(path, "overlapping speaker turns");
    }
  }

  for (std::size_t i = 0; i < m.documents.size(); ++i) {
    if (m.documents[i].code.empty()) report.add(index_path("/documents", i) + "/code", "missing document code");
  }
  return report;
}

ValidationReport validate_transcript(const Transcript& t) {
  ValidationReport report;
  if (!t.channel.is_floor()) {
    if (!t.channel.language) {
      report.add("/channel", "booth without language");
    } else if (t.language != SourceLanguage(*t.channel.language)) {
      report.add("/language", "language mismatch");
    }
  }

  constexpr double kEps = 1e-9;
  std::optional<double> last_end;
  for (std::size_t u = 0; u < t.utterances.size(); ++u) {
    const auto& utt = t.utterances[u];
    auto upath = index_path("/utterances", u);
    if (!utt.timed) {
      if (!utt.words.empty()) report.add(upath, "utterance missing word timings");
      continue;
    }
    if (!t.channel.is_floor() && utt.language && t.channel.language &&
        *utt.language != *t.channel.language) {
      report.add(upath + "/language", "language mismatch");
    }
    for (std::size_t w = 0; w < utt.words.size(); ++w) {
      const auto& word = utt.words[w];
      auto wpath = index_path(upath + "/words", w);
      if (!(word.start_s < word.end_s)) report.add(wpath, "start ≥ end");
      if (last_end && word.start_s < *last_end - kEps) report.add(wpath, "words not monotonic");
      if (!utt.segment_id.empty() &&
          (word.start_s < utt.segment_start_s - kEps || word.end_s > utt.segment_end_s + kEps)) {
        report.add(wpath, "word outside segment bounds");
      }
      if (word.confidence && (*word.confidence < 0.0 || *word.confidence > 1.0)) {
        report.add(wpath + "/confidence", "confidence out of range");
      }
      last_end = std::max(last_end.value_or(word.end_s), word.end_s);
    }
  }
  return report;
}

ValidationReport validate_translation(const TranslationArtifact& a) {
  ValidationReport report;
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    const auto& s = a.sentences[i];
    auto path = index_path("/sentences", i);
    if (s.source_index != i) report.add(path + "/source_index", "sentence index out of order");
    if (s.mode == TranslationMode::copied) {
      std::optional<Language> src = s.source_language ? s.source_language : a.source_lang.language();
      if (!src || *src != a.target_lang) report.add(path + "/mode", "copied sentence language differs from target");
    }
  }
  return report;
}

ValidationReport validate_channels(const std::vector<ChannelId>& channels) {
  ValidationReport report;
  int floors = 0;
  std::set<Language> booths;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& c = channels[i];
    auto path = index_path("/channels", i);
    if (c.is_floor()) {
      if (c.language) report.add(path, "floor channel carries a language");
      if (++floors > 1) report.add(path, "duplicate floor channel");
      continue;
    }
    if (!c.language) {
      report.add(path, "booth without language");
    } else if (!is_booth_language(*c.language)) {
      report.add(path, "booth language not a booth language");
    } else if (!booths.insert(*c.language).second) {
      report.add(path, "duplicate booth language");
    }
  }
  return report;
}

}  // namespace verbatim
