#include "verbatim/serialize.hpp"

#include "verbatim/errors.hpp"

namespace verbatim {

namespace {

// Path-tracking accessors so every parse failure names the field it came from.
class Field {
 public:
  Field(const Json& doc, std::string path) : doc_(doc), path_(std::move(path)) {}

  const Json& object() const {
    if (!doc_.is_object()) throw ParseError(path_, "expected object");
    return doc_;
  }

  bool has(const char* key) const { return object().contains(key) && !doc_.at(key).is_null(); }

  std::string child_path(const char* key) const { return path_ + "/" + key; }

  std::string text(const char* key) const {
    if (!has(key)) throw ParseError(child_path(key), std::string("missing ") + key);
    const auto& v = doc_.at(key);
    if (!v.is_string()) throw ParseError(child_path(key), "expected string");
    return v.get<std::string>();
  }

  std::string text_or(const char* key, std::string fallback) const {
    return has(key) ? text(key) : fallback;
  }

  std::optional<std::string> optional_text(const char* key) const {
    if (!has(key)) return std::nullopt;
    return text(key);
  }

  double number(const char* key) const {
    if (!has(key)) throw ParseError(child_path(key), std::string("missing ") + key);
    const auto& v = doc_.at(key);
    if (!v.is_number()) throw ParseError(child_path(key), "expected number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  bool boolean_or(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_boolean()) throw ParseError(child_path(key), "expected boolean");
    return v.get<bool>();
  }

  std::uint64_t count_or(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ParseError(child_path(key), "expected non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  template <typename F>
  void each(const char* key, F&& fn) const {
    if (!has(key)) return;
    const auto& v = doc_.at(key);
    if (!v.is_array()) throw ParseError(child_path(key), "expected array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      fn(Field(v[i], child_path(key) + "/" + std::to_string(i)));
    }
  }

  Language language(const char* key) const {
    auto code = text(key);
    auto lang = parse_language(code);
    if (!lang) throw ParseError(child_path(key), "unknown language '" + code + "'");
    return *lang;
  }

  SourceLanguage source_language(const char* key) const {
    auto code = text(key);
    auto lang = parse_source_language(code);
    if (!lang) throw ParseError(child_path(key), "unknown language '" + code + "'");
    return *lang;
  }

  ChannelId channel(const char* key) const {
    auto name = text(key);
    auto ch = parse_channel(name);
    if (!ch) throw ParseError(child_path(key), "unknown channel '" + name + "'");
    return *ch;
  }

 private:
  const Json& doc_;
  std::string path_;
};

}  // namespace

Json to_json(const MeetingManifest& m) {
  Json agenda = Json::array();
  for (const auto& a : m.agenda) {
    Json item{{"label", a.label}, {"start_s", round_ms(a.start_s)}};
    if (a.end_s) item["end_s"] = round_ms(*a.end_s);
    agenda.push_back(std::move(item));
  }
  Json speakers = Json::array();
  for (const auto& s : m.speakers) {
    Json turn{{"name", s.name},
              {"affiliation", s.affiliation},
              {"start_s", round_ms(s.start_s)},
              {"end_s", round_ms(s.end_s)}};
    if (s.biography) turn["biography"] = *s.biography;
    if (s.flag_ref) turn["flag_ref"] = *s.flag_ref;
    speakers.push_back(std::move(turn));
  }
  Json documents = Json::array();
  for (const auto& d : m.documents) documents.push_back({{"code", d.code}, {"title", d.title}});

  Json doc{{"meeting_id", m.meeting_id},
           {"title", m.title},
           {"category", m.category},
           {"version", m.version},
           {"agenda", std::move(agenda)},
           {"speakers", std::move(speakers)},
           {"documents", std::move(documents)}};
  if (m.confidential) doc["confidential"] = true;
  return doc;
}

MeetingManifest manifest_from_json(const Json& doc) {
  Field root(doc, "");
  root.object();
  MeetingManifest m;
  m.meeting_id = root.text("meeting_id");
  m.title = root.text("title");
  m.category = root.text_or("category", "");
  m.version = root.count_or("version", 0);
  m.confidential = root.boolean_or("confidential", false);
  root.each("agenda", [&](const Field& f) {
    m.agenda.push_back({f.text("label"), f.number("start_s"), f.optional_number("end_s")});
  });
  root.each("speakers", [&](const Field& f) {
    m.speakers.push_back({f.text("name"), f.text_or("affiliation", ""), f.number("start_s"),
                          f.number("end_s"), f.optional_text("biography"),
                          f.optional_text("flag_ref")});
  });
  root.each("documents", [&](const Field& f) {
    m.documents.push_back({f.text("code"), f.text_or("title", "")});
  });
  return m;
}

Json to_json(const Transcript& t) {
  Json utterances = Json::array();
  for (const auto& u : t.utterances) {
    Json words = Json::array();
    for (const auto& w : u.words) {
      Json word{{"w", w.token}};
      if (u.timed) {
        word["start_s"] = round_ms(w.start_s);
        word["end_s"] = round_ms(w.end_s);
      }
      if (w.confidence) word["confidence"] = *w.confidence;
      words.push_back(std::move(word));
    }
    Json utt{{"segment_id", u.segment_id},
             {"segment_start_s", round_ms(u.segment_start_s)},
             {"segment_end_s", round_ms(u.segment_end_s)},
             {"timed", u.timed},
             {"words", std::move(words)}};
    if (u.language) utt["language"] = to_string(*u.language);
    if (u.speaker) utt["speaker"] = *u.speaker;
    utterances.push_back(std::move(utt));
  }
  return Json{{"channel", to_string(t.channel)},
              {"language", to_string(t.language)},
              {"engine_id", t.engine_id},
              {"duplicate_of_floor", t.duplicate_of_floor},
              {"utterances", std::move(utterances)}};
}

Transcript transcript_from_json(const Json& doc) {
  Field root(doc, "");
  Transcript t;
  t.channel = root.channel("channel");
  t.language = root.source_language("language");
  t.engine_id = root.text_or("engine_id", "");
  t.duplicate_of_floor = root.boolean_or("duplicate_of_floor", false);
  root.each("utterances", [&](const Field& f) {
    Utterance u;
    u.segment_id = f.text_or("segment_id", "");
    u.segment_start_s = f.optional_number("segment_start_s").value_or(0.0);
    u.segment_end_s = f.optional_number("segment_end_s").value_or(0.0);
    u.timed = f.boolean_or("timed", true);
    if (f.has("language")) u.language = f.language("language");
    if (f.has("speaker")) u.speaker = f.count_or("speaker", 0);
    f.each("words", [&](const Field& wf) {
      WordTiming w;
      w.token = wf.text("w");
      if (u.timed) {
        w.start_s = wf.number("start_s");
        w.end_s = wf.number("end_s");
      }
      w.confidence = wf.optional_number("confidence");
      u.words.push_back(std::move(w));
    });
    t.utterances.push_back(std::move(u));
  });
  return t;
}

Json to_json(const TranslationArtifact& a) {
  Json sentences = Json::array();
  for (const auto& s : a.sentences) {
    Json entry{{"index", s.source_index},
               {"text", s.text},
               {"mode", to_string(s.mode)},
               {"start_s", round_ms(s.start_s)},
               {"end_s", round_ms(s.end_s)}};
    if (s.source_language) entry["source_language"] = to_string(*s.source_language);
    sentences.push_back(std::move(entry));
  }
  return Json{{"source_channel", to_string(a.source_channel)},
              {"source_lang", to_string(a.source_lang)},
              {"target_lang", to_string(a.target_lang)},
              {"engine_id", a.engine_id},
              {"sentences", std::move(sentences)}};
}

TranslationArtifact artifact_from_json(const Json& doc) {
  Field root(doc, "");
  TranslationArtifact a;
  a.source_channel = root.channel("source_channel");
  a.source_lang = root.source_language("source_lang");
  a.target_lang = root.language("target_lang");
  a.engine_id = root.text_or("engine_id", "");
  root.each("sentences", [&](const Field& f) {
    TranslatedSentence s;
    s.source_index = f.count_or("index", 0);
    s.text = f.text("text");
    auto mode = f.text("mode");
    if (mode == "copied") s.mode = TranslationMode::copied;
    else if (mode == "translated") s.mode = TranslationMode::translated;
    else throw ParseError(f.child_path("mode"), "unknown mode '" + mode + "'");
    s.start_s = f.optional_number("start_s").value_or(0.0);
    s.end_s = f.optional_number("end_s").value_or(0.0);
    if (f.has("source_language")) s.source_language = f.language("source_language");
    a.sentences.push_back(std::move(s));
  });
  return a;
}

Json to_json(const std::vector<Segment>& segments) {
  Json out = Json::array();
  for (const auto& s : segments) {
    out.push_back({{"segment_id", s.segment_id},
                   {"start_s", round_ms(s.start_s)},
                   {"end_s", round_ms(s.end_s)}});
  }
  return out;
}

std::string canonical_dump(const Json& doc) {
  return doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace verbatim
