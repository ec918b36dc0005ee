#include "verbatim/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"
#include "verbatim/text.hpp"

namespace verbatim::search {

using Json = nlohmann::json;

std::size_t IndexedDocument::posting_count() const {
  std::size_t n = 0;
  for (const auto& u : utterances) n += u.size();
  return n;
}

std::vector<std::string> query_terms(std::string_view text, Language lang) {
  std::vector<std::string> out;
  for (const auto& tok : text::tokenize(text, lang)) {
    if (text::is_reserved_tag(tok)) continue;
    auto term = text::normalize_term(tok);
    if (!term.empty()) out.push_back(std::move(term));
  }
  return out;
}

std::string document_key(std::string_view meeting_id, const ChannelId& channel) {
  return std::string(meeting_id) + "/" + to_string(channel) + "/transcript";
}

std::string document_key(std::string_view meeting_id, const ChannelId& channel, Language target) {
  return std::string(meeting_id) + "/" + to_string(channel) + "/translation-" + std::string(to_string(target));
}

Json to_json(const Hit& hit) {
  Json j{{"meeting_id", hit.meeting_id},
         {"channel", to_string(hit.channel)},
         {"timestamp_s", round_ms(hit.timestamp_s)},
         {"snippet", hit.snippet},
         {"score", hit.score},
         {"document_key", hit.document_key},
         {"utterance", hit.utterance}};
  j["language"] = hit.language ? Json(to_string(*hit.language)) : Json(nullptr);
  if (hit.speaker) j["speaker"] = *hit.speaker;
  if (hit.agenda) j["agenda"] = *hit.agenda;
  return j;
}

namespace {

IndexedWord make_word(const std::string& token, double t, std::optional<Language> lang, const MeetingManifest& m) {
  IndexedWord w;
  w.display = token;
  w.term = text::normalize_term(token);
  w.timestamp_s = t;
  w.language = lang;
  if (auto s = speaker_at(m, t)) w.speaker = m.speakers[*s].name;
  if (auto a = agenda_at(m, t)) w.agenda = m.agenda[*a].label;
  return w;
}

}  // namespace

IndexedDocument build_document(const Transcript& transcript, const MeetingManifest& manifest) {
  IndexedDocument doc;
  doc.key = document_key(manifest.meeting_id, transcript.channel);
  doc.meeting_id = manifest.meeting_id;
  doc.channel = transcript.channel;
  for (const auto& u : transcript.utterances) {
    const auto lang = transcript.language.language() ? transcript.language.language() : u.language;
    std::vector<IndexedWord> words;
    for (const auto& w : u.words) {
      if (text::is_reserved_tag(w.token)) continue;
      words.push_back(make_word(w.token, w.start_s, lang, manifest));
    }
    doc.utterances.push_back(std::move(words));
  }
  return doc;
}

IndexedDocument build_document(const TranslationArtifact& artifact, const MeetingManifest& manifest) {
  IndexedDocument doc;
  doc.key = document_key(manifest.meeting_id, artifact.source_channel, artifact.target_lang);
  doc.meeting_id = manifest.meeting_id;
  doc.channel = artifact.source_channel;
  for (const auto& s : artifact.sentences) {
    std::vector<IndexedWord> words;
    for (const auto& tok : text::tokenize(s.text, artifact.target_lang)) {
      if (text::is_reserved_tag(tok)) continue;
      words.push_back(make_word(tok, s.start_s, artifact.target_lang, manifest));
    }
    doc.utterances.push_back(std::move(words));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Snapshot

std::shared_ptr<const IndexSnapshot::Entry> IndexSnapshot::make_entry(IndexedDocument doc) {
  auto entry = std::make_shared<Entry>();
  for (std::uint32_t u = 0; u < doc.utterances.size(); ++u) {
    for (std::uint32_t p = 0; p < doc.utterances[u].size(); ++p) {
      entry->terms[doc.utterances[u][p].term].emplace_back(u, p);
    }
  }
  entry->doc = std::move(doc);
  return entry;
}

const IndexedDocument* IndexSnapshot::document(const std::string& key) const {
  auto it = docs_.find(key);
  return it == docs_.end() ? nullptr : &it->second->doc;
}

std::vector<std::string> IndexSnapshot::document_keys() const {
  std::vector<std::string> keys;
  for (const auto& [k, _] : docs_) keys.push_back(k);
  return keys;
}

std::vector<SearchPosting> IndexSnapshot::postings(const std::string& key) const {
  std::vector<SearchPosting> out;
  const auto* doc = document(key);
  if (!doc) return out;
  for (std::size_t u = 0; u < doc->utterances.size(); ++u) {
    for (const auto& w : doc->utterances[u]) {
      out.push_back({w.term, doc->meeting_id, doc->channel, w.language, w.timestamp_s, u, w.speaker, w.agenda});
    }
  }
  return out;
}

namespace {

bool word_passes(const IndexedWord& w, const Query& q) {
  if (q.language && w.language != q.language) return false;
  if (q.speaker && w.speaker != q.speaker) return false;
  if (q.agenda && w.agenda != q.agenda) return false;
  return true;
}

std::string snippet_around(const std::vector<IndexedWord>& words, std::size_t pos) {
  const std::size_t from = pos >= 5 ? pos - 5 : 0;
  const std::size_t to = std::min(words.size(), pos + 6);
  std::vector<std::string> tokens;
  for (std::size_t i = from; i < to; ++i) tokens.push_back(words[i].display);
  return text::detokenize(tokens, words[pos].language.value_or(Language::EN));
}

}  // namespace

std::vector<Hit> IndexSnapshot::search(const Query& query) const {
  std::vector<Hit> hits;
  if (query.terms.empty() || query.limit == 0) return hits;

  // Document frequency over utterances, across the whole snapshot.
  std::vector<double> idf;
  for (const auto& term : query.terms) {
    std::size_t df = 0;
    for (const auto& [_, entry] : docs_) {
      auto it = entry->terms.find(term);
      if (it == entry->terms.end()) continue;
      std::uint32_t last = UINT32_MAX;
      for (const auto& [u, p] : it->second) {
        if (u != last) ++df;
        last = u;
      }
    }
    if (df == 0) return hits;
    idf.push_back(std::log(1.0 + static_cast<double>(utterances_) / static_cast<double>(df)));
  }

  for (const auto& [key, entry] : docs_) {
    const auto& doc = entry->doc;
    if (query.meeting_id && doc.meeting_id != *query.meeting_id) continue;
    if (query.channel && doc.channel != *query.channel) continue;

    // Per utterance term frequencies over the occurrences that satisfy word-level filters.
    std::map<std::uint32_t, std::vector<std::uint32_t>> tf;  // utterance → count per query term
    std::map<std::uint32_t, std::vector<std::uint32_t>> first_positions;
    bool missing = false;
    for (std::size_t t = 0; t < query.terms.size() && !missing; ++t) {
      auto it = entry->terms.find(query.terms[t]);
      if (it == entry->terms.end()) {
        missing = true;
        break;
      }
      for (const auto& [u, p] : it->second) {
        if (!word_passes(doc.utterances[u][p], query)) continue;
        auto& counts = tf[u];
        counts.resize(query.terms.size());
        ++counts[t];
        if (t == 0) first_positions[u].push_back(p);
      }
    }
    if (missing) continue;

    for (const auto& [u, counts] : tf) {
      if (std::any_of(counts.begin(), counts.end(), [](std::uint32_t c) { return c == 0; })) continue;
      double score = 0.0;
      for (std::size_t t = 0; t < counts.size(); ++t) score += (1.0 + std::log(static_cast<double>(counts[t]))) * idf[t];
      for (std::uint32_t p : first_positions[u]) {
        const auto& w = doc.utterances[u][p];
        hits.push_back({doc.meeting_id, doc.channel, w.language, w.timestamp_s, snippet_around(doc.utterances[u], p),
                        score, key, u, w.speaker, w.agenda});
      }
    }
  }

  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.meeting_id, a.timestamp_s, a.channel, a.document_key, a.utterance) <
           std::tie(b.meeting_id, b.timestamp_s, b.channel, b.document_key, b.utterance);
  });
  if (hits.size() > query.limit) hits.resize(query.limit);
  return hits;
}

// ---------------------------------------------------------------------------
// Persistence encoding

namespace {

Json encode(const IndexedDocument& doc) {
  Json utterances = Json::array();
  for (const auto& u : doc.utterances) {
    Json words = Json::array();
    for (const auto& w : u) {
      Json j{{"d", w.display}, {"t", w.term}, {"ts", w.timestamp_s}};
      if (w.language) j["lang"] = to_string(*w.language);
      if (w.speaker) j["spk"] = *w.speaker;
      if (w.agenda) j["agd"] = *w.agenda;
      words.push_back(std::move(j));
    }
    utterances.push_back(std::move(words));
  }
  return {{"key", doc.key}, {"meeting_id", doc.meeting_id}, {"channel", to_string(doc.channel)},
          {"utterances", std::move(utterances)}};
}

IndexedDocument decode(const Json& j) {
  IndexedDocument doc;
  doc.key = j.at("key").get<std::string>();
  doc.meeting_id = j.at("meeting_id").get<std::string>();
  auto ch = parse_channel(j.at("channel").get<std::string>());
  if (!ch) throw ParseError("/channel", "invalid channel");
  doc.channel = *ch;
  for (const auto& u : j.at("utterances")) {
    std::vector<IndexedWord> words;
    for (const auto& w : u) {
      IndexedWord word;
      word.display = w.at("d").get<std::string>();
      word.term = w.at("t").get<std::string>();
      word.timestamp_s = w.at("ts").get<double>();
      if (w.contains("lang")) word.language = parse_language(w["lang"].get<std::string>());
      if (w.contains("spk")) word.speaker = w["spk"].get<std::string>();
      if (w.contains("agd")) word.agenda = w["agd"].get<std::string>();
      words.push_back(std::move(word));
    }
    doc.utterances.push_back(std::move(words));
  }
  return doc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Writer

SearchIndex::SearchIndex() : current_(std::make_shared<IndexSnapshot>()) {}

SearchIndex::SearchIndex(std::filesystem::path root, std::size_t compact_after)
    : root_(std::move(root)), compact_after_(compact_after), current_(std::make_shared<IndexSnapshot>()) {
  std::filesystem::create_directories(*root_);
  load();
}

std::shared_ptr<const IndexSnapshot> SearchIndex::snapshot() const {
  std::lock_guard lock(current_mutex_);
  return current_;
}

void SearchIndex::publish(std::shared_ptr<IndexSnapshot> next) {
  next->postings_ = 0;
  next->utterances_ = 0;
  for (const auto& [_, e] : next->docs_) {
    next->postings_ += e->doc.posting_count();
    next->utterances_ += e->doc.utterances.size();
  }
  std::lock_guard lock(current_mutex_);
  next->generation_ = current_->generation_ + 1;
  current_ = std::move(next);
}

std::size_t SearchIndex::index_document(const Transcript& transcript, const MeetingManifest& manifest) {
  const auto report = validate_transcript(transcript);
  if (!report.ok()) throw Error("transcript rejected: " + report.summary());
  if (manifest.confidential) {
    remove_document(document_key(manifest.meeting_id, transcript.channel));
    return 0;
  }
  return upsert(build_document(transcript, manifest));
}

std::size_t SearchIndex::index_document(const TranslationArtifact& artifact, const MeetingManifest& manifest) {
  if (manifest.confidential) {
    remove_document(document_key(manifest.meeting_id, artifact.source_channel, artifact.target_lang));
    return 0;
  }
  return upsert(build_document(artifact, manifest));
}

std::size_t SearchIndex::upsert(IndexedDocument doc) {
  std::lock_guard writer(writer_);
  const std::size_t count = doc.posting_count();
  const std::string key = doc.key;
  if (root_) append_log(Json{{"op", "upsert"}, {"doc", encode(doc)}}.dump());
  auto next = std::make_shared<IndexSnapshot>(*snapshot());
  next->docs_[key] = IndexSnapshot::make_entry(std::move(doc));
  publish(std::move(next));
  if (pending_compaction_) compact_locked();
  return count;
}

bool SearchIndex::remove_document(const std::string& key) {
  std::lock_guard writer(writer_);
  auto current = snapshot();
  if (!current->docs_.count(key)) return false;
  if (root_) append_log(Json{{"op", "remove"}, {"key", key}}.dump());
  auto next = std::make_shared<IndexSnapshot>(*current);
  next->docs_.erase(key);
  publish(std::move(next));
  if (pending_compaction_) compact_locked();
  return true;
}

std::size_t SearchIndex::remove_meeting(const std::string& meeting_id) {
  std::size_t removed = 0;
  for (const auto& key : snapshot()->document_keys()) {
    const auto* doc = snapshot()->document(key);
    if (doc && doc->meeting_id == meeting_id && remove_document(key)) ++removed;
  }
  return removed;
}

void SearchIndex::append_log(const std::string& line) {
  std::ofstream out(*root_ / "postings.log", std::ios::app | std::ios::binary);
  out << line << '\n';
  if (!out) throw Error("cannot append to " + (*root_ / "postings.log").string());
  // Compaction must see the change being logged, so it runs after the caller publishes.
  if (++log_records_ >= compact_after_) pending_compaction_ = true;
}

void SearchIndex::compact() {
  if (!root_) return;
  std::lock_guard writer(writer_);
  compact_locked();
}

void SearchIndex::compact_locked() {
  pending_compaction_ = false;
  const auto snap = snapshot();
  Json docs = Json::array();
  for (const auto& [_, e] : snap->docs_) docs.push_back(encode(e->doc));
  const auto number = snapshot_number_ + 1;
  const auto target = *root_ / ("snapshot-" + std::to_string(number));
  const auto tmp = *root_ / ("snapshot-" + std::to_string(number) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << Json{{"documents", std::move(docs)}}.dump() << '\n';
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
  std::ofstream(*root_ / "postings.log", std::ios::binary | std::ios::trunc);
  if (snapshot_number_ > 0) {
    std::error_code ec;
    std::filesystem::remove(*root_ / ("snapshot-" + std::to_string(snapshot_number_)), ec);
  }
  snapshot_number_ = number;
  log_records_ = 0;
}

void SearchIndex::load() {
  auto next = std::make_shared<IndexSnapshot>();
  for (const auto& entry : std::filesystem::directory_iterator(*root_)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("snapshot-", 0) != 0 || name.find('.') != std::string::npos) continue;
    try {
      snapshot_number_ = std::max<std::uint64_t>(snapshot_number_, std::stoull(name.substr(9)));
    } catch (const std::exception&) {
    }
  }
  if (snapshot_number_ > 0) {
    std::ifstream in(*root_ / ("snapshot-" + std::to_string(snapshot_number_)), std::ios::binary);
    const Json doc = Json::parse(in);
    for (const auto& d : doc.at("documents")) {
      auto decoded = decode(d);
      auto key = decoded.key;
      next->docs_[key] = IndexSnapshot::make_entry(std::move(decoded));
    }
  }
  std::ifstream log_in(*root_ / "postings.log", std::ios::binary);
  std::string line;
  while (std::getline(log_in, line)) {
    if (line.empty()) continue;
    const Json rec = Json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      log::warn("search index: skipping torn log record");
      continue;
    }
    if (rec.value("op", "") == "upsert") {
      auto decoded = decode(rec.at("doc"));
      auto key = decoded.key;
      next->docs_[key] = IndexSnapshot::make_entry(std::move(decoded));
    } else if (rec.value("op", "") == "remove") {
      next->docs_.erase(rec.at("key").get<std::string>());
    }
    ++log_records_;
  }
  publish(std::move(next));
}

}  // namespace verbatim::search
