#pragma once

// Embedded inverted index over transcript and translation words.
//
// Each indexed document (one transcript or one translation artifact of one meeting) keeps its
// own term → occurrence map; a snapshot is an immutable set of documents, replaced wholesale
// by the single writer so readers never observe a half-indexed document.
//
// Ranking: utterances are the retrieval unit. For an utterance u matching every query term,
//   score(u) = Σ_t (1 + ln tf(t,u)) · ln(1 + N / df(t))
// with N the number of indexed utterances in the snapshot and df(t) the number of those
// containing t. One hit is produced per occurrence of the first query term in u, carrying the
// score of u. Ordering: score descending, then meeting_id, timestamp, channel, document key.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "verbatim/core.hpp"

namespace verbatim::search {

struct IndexedWord {
  std::string display;  // token as transcribed
  std::string term;     // normalized form
  double timestamp_s = 0.0;
  std::optional<Language> language;
  std::optional<std::string> speaker;  // manifest speaker name
  std::optional<std::string> agenda;   // agenda label

  friend bool operator==(const IndexedWord&, const IndexedWord&) = default;
};

struct IndexedDocument {
  std::string key;
  std::string meeting_id;
  ChannelId channel;
  std::vector<std::vector<IndexedWord>> utterances;

  std::size_t posting_count() const;
  friend bool operator==(const IndexedDocument&, const IndexedDocument&) = default;
};

/// Flattened view of one posting, for inspection.
struct SearchPosting {
  std::string term;
  std::string meeting_id;
  ChannelId channel;
  std::optional<Language> language;
  double timestamp_s = 0.0;
  std::size_t utterance = 0;
  std::optional<std::string> speaker;
  std::optional<std::string> agenda;
};

struct Query {
  std::vector<std::string> terms;  // already normalized; AND semantics
  std::optional<std::string> meeting_id;
  std::optional<Language> language;
  std::optional<ChannelId> channel;
  std::optional<std::string> speaker;
  std::optional<std::string> agenda;
  std::size_t limit = 20;
};

/// Normalized query terms for free text; `lang` only matters for scripts the tokenizer
/// splits per character.
std::vector<std::string> query_terms(std::string_view text, Language lang = Language::EN);

struct Hit {
  std::string meeting_id;
  ChannelId channel;
  std::optional<Language> language;
  double timestamp_s = 0.0;
  std::string snippet;  // up to five words either side of the matched word
  double score = 0.0;
  std::string document_key;
  std::size_t utterance = 0;
  std::optional<std::string> speaker;
  std::optional<std::string> agenda;
};

nlohmann::json to_json(const Hit& hit);

class IndexSnapshot {
 public:
  IndexSnapshot() = default;

  std::vector<Hit> search(const Query& query) const;
  std::size_t posting_count() const { return postings_; }
  std::size_t document_count() const { return docs_.size(); }
  std::uint64_t generation() const { return generation_; }
  const IndexedDocument* document(const std::string& key) const;
  std::vector<SearchPosting> postings(const std::string& key) const;
  std::vector<std::string> document_keys() const;

 private:
  friend class SearchIndex;
  struct Entry {
    IndexedDocument doc;
    // term → (utterance, position) occurrences in document order
    std::unordered_map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> terms;
  };
  static std::shared_ptr<const Entry> make_entry(IndexedDocument doc);

  std::map<std::string, std::shared_ptr<const Entry>> docs_;
  std::size_t postings_ = 0;
  std::size_t utterances_ = 0;
  std::uint64_t generation_ = 0;
};

std::string document_key(std::string_view meeting_id, const ChannelId& channel);                  // transcript
std::string document_key(std::string_view meeting_id, const ChannelId& channel, Language target);  // translation

/// Builds the document without touching any index; postings carry speaker and agenda
/// resolved from the manifest at each word's timestamp.
IndexedDocument build_document(const Transcript& transcript, const MeetingManifest& manifest);
IndexedDocument build_document(const TranslationArtifact& artifact, const MeetingManifest& manifest);

/// Single writer, many readers. With a root directory the index persists as
/// {root}/postings.log (one JSON record per upsert/remove) plus {root}/snapshot-{n}, the
/// compacted state; opening replays the newest snapshot and then the log.
class SearchIndex {
 public:
  SearchIndex();
  explicit SearchIndex(std::filesystem::path root, std::size_t compact_after = 256);

  SearchIndex(const SearchIndex&) = delete;
  SearchIndex& operator=(const SearchIndex&) = delete;

  /// Upsert by document key; returns the number of postings now held for the document.
  /// Transcripts failing validate_transcript are rejected with verbatim::Error. Confidential
  /// meetings are never indexed (any earlier postings are removed) and yield 0.
  std::size_t index_document(const Transcript& transcript, const MeetingManifest& manifest);
  std::size_t index_document(const TranslationArtifact& artifact, const MeetingManifest& manifest);
  std::size_t upsert(IndexedDocument doc);
  bool remove_document(const std::string& key);
  /// Removes every document of a meeting; returns how many were removed.
  std::size_t remove_meeting(const std::string& meeting_id);

  std::shared_ptr<const IndexSnapshot> snapshot() const;
  std::vector<Hit> search(const Query& query) const { return snapshot()->search(query); }
  std::size_t posting_count() const { return snapshot()->posting_count(); }

  /// Writes snapshot-{n+1} and truncates the log. No-op for in-memory indexes.
  void compact();

 private:
  void publish(std::shared_ptr<IndexSnapshot> next);
  void append_log(const std::string& line);
  void compact_locked();
  void load();

  std::optional<std::filesystem::path> root_;
  std::size_t compact_after_ = 256;
  std::size_t log_records_ = 0;
  std::uint64_t snapshot_number_ = 0;
  bool pending_compaction_ = false;

  std::mutex writer_;
  mutable std::mutex current_mutex_;
  std::shared_ptr<const IndexSnapshot> current_;
};

}  // namespace verbatim::search
