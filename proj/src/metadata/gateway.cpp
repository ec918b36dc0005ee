#include <chrono>
#include <regex>

#include "verbatim/errors.hpp"
#include "verbatim/metadata.hpp"
#include "verbatim/serialize.hpp"
#include "verbatim/unicode.hpp"

namespace verbatim::metadata {

MeetingManifest parse_manifest(std::string_view json_text) {
  Json doc = Json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("", "malformed JSON");
  MeetingManifest manifest = manifest_from_json(doc);
  const auto report = validate_manifest(manifest);
  if (!report.ok()) throw ParseError(report.violations.front().path, report.violations.front().message);
  return manifest;
}

std::string serialize_manifest(const MeetingManifest& manifest) { return canonical_dump(to_json(manifest)); }

std::string duplicate_key(std::string_view title) {
  const std::u32string folded = unicode::decode(unicode::lower(unicode::fold_diacritics(title)));
  std::string out;
  bool pending_space = false;
  for (char32_t cp : folded) {
    if (unicode::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append(out, cp);
  }
  return out;
}

TitleCheck validate_meeting_title(std::string_view title, const TitleConvention& convention) {
  TitleCheck check;
  check.duplicate_key = duplicate_key(title);
  if (title.empty()) {
    check.violation = "empty title";
    return check;
  }
  const std::regex pattern(convention.pattern);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(title.begin(), title.end(), m, pattern)) {
    check.violation = "title does not match convention";
    return check;
  }
  if (convention.check_calendar_date && m.size() == 4) {
    const std::chrono::year_month_day date{std::chrono::year(std::stoi(m[1].str())),
                                           std::chrono::month(static_cast<unsigned>(std::stoi(m[2].str()))),
                                           std::chrono::day(static_cast<unsigned>(std::stoi(m[3].str())))};
    if (!date.ok()) check.violation = "invalid date";
  }
  return check;
}

Json to_json(const MetadataDelta& delta) {
  // Reuse the manifest encoders for the list fields.
  MeetingManifest carrier;
  if (delta.agenda) carrier.agenda = *delta.agenda;
  if (delta.speakers) carrier.speakers = *delta.speakers;
  if (delta.documents) carrier.documents = *delta.documents;
  const Json encoded = to_json(carrier);

  Json out{{"base_version", delta.base_version}};
  if (delta.title) out["title"] = *delta.title;
  if (delta.category) out["category"] = *delta.category;
  if (delta.agenda) out["agenda"] = encoded["agenda"];
  if (delta.speakers) out["speakers"] = encoded["speakers"];
  if (delta.documents) out["documents"] = encoded["documents"];
  return out;
}

MeetingManifest apply_delta(const MeetingManifest& manifest, const MetadataDelta& delta) {
  if (delta.base_version != manifest.version) {
    throw ConflictError("conflict: delta based on version " + std::to_string(delta.base_version) +
                        ", manifest is at " + std::to_string(manifest.version));
  }
  MeetingManifest next = manifest;
  if (delta.title) next.title = *delta.title;
  if (delta.category) next.category = *delta.category;
  if (delta.agenda) next.agenda = *delta.agenda;
  if (delta.speakers) next.speakers = *delta.speakers;
  if (delta.documents) next.documents = *delta.documents;
  if (next == manifest) return manifest;

  const auto report = validate_manifest(next);
  if (!report.ok()) throw ParseError(report.violations.front().path, report.violations.front().message);
  next.version = manifest.version + 1;
  return next;
}

MetadataDelta diff_manifests(const MeetingManifest& local, const MeetingManifest& remote) {
  MetadataDelta d;
  d.base_version = local.version;
  if (remote.title != local.title) d.title = remote.title;
  if (remote.category != local.category) d.category = remote.category;
  if (remote.agenda != local.agenda) d.agenda = remote.agenda;
  if (remote.speakers != local.speakers) d.speakers = remote.speakers;
  if (remote.documents != local.documents) d.documents = remote.documents;
  return d;
}

ManifestStore::ManifestStore(MeetingManifest initial)
    : current_(std::make_shared<const MeetingManifest>(std::move(initial))), history_{current_} {}

std::shared_ptr<const MeetingManifest> ManifestStore::current() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::shared_ptr<const MeetingManifest> ManifestStore::apply(const MetadataDelta& delta) {
  std::lock_guard lock(mutex_);
  auto next = apply_delta(*current_, delta);
  if (next.version != current_->version) {
    current_ = std::make_shared<const MeetingManifest>(std::move(next));
    history_.push_back(current_);
  }
  return current_;
}

std::vector<MeetingManifest> ManifestStore::history() const {
  std::lock_guard lock(mutex_);
  std::vector<MeetingManifest> out;
  for (const auto& m : history_) out.push_back(*m);
  return out;
}

}  // namespace verbatim::metadata
