#include "verbatim/exporters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "verbatim/errors.hpp"
#include "verbatim/serialize.hpp"

namespace verbatim::exporters {

std::string_view to_string(ExportFormat format) {
  switch (format) {
    case ExportFormat::json: return "json";
    case ExportFormat::html: return "html";
    case ExportFormat::docx: return "docx";
  }
  return "?";
}

std::optional<ExportFormat> parse_format(std::string_view text) {
  if (text == "json") return ExportFormat::json;
  if (text == "html") return ExportFormat::html;
  if (text == "docx") return ExportFormat::docx;
  return std::nullopt;
}

std::string clock_stamp(double seconds) {
  const auto total = static_cast<long long>(std::floor(std::max(0.0, seconds)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "[%02lld:%02lld:%02lld]", total / 3600, total / 60 % 60, total % 60);
  return buf;
}

std::string export_file_name(std::string_view meeting_id, Language lang, ExportFormat format) {
  std::string safe(meeting_id);
  std::replace(safe.begin(), safe.end(), '/', '_');
  return safe + "." + std::string(to_string(lang)) + "." + std::string(to_string(format));
}

namespace {

std::string lang_attr(Language lang) {
  std::string code(to_string(lang));
  std::transform(code.begin(), code.end(), code.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return code;
}

bool right_to_left(Language lang) { return lang == Language::AR; }

std::string escape_markup(std::string_view text, bool attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += attribute ? "&quot;" : "\""; break;
      default:
        // C0 controls other than tab/newline are not representable in XML 1.0.
        if (u < 0x20 && c != '\t' && c != '\n' && c != '\r') break;
        out.push_back(c);
    }
  }
  return out;
}

std::string title_of(const MeetingManifest& m) { return m.title.empty() ? m.meeting_id : m.title; }

// Layout shared by the human-readable formats: entries in time order, an agenda heading
// before the first entry of each item (and trailing headings for items without entries), and
// a speaker change marker.
struct Block {
  enum Kind { agenda, speaker, entry } kind;
  std::size_t index;  // agenda item, speaker turn or entry
};

std::vector<Block> layout(const routing::ViewDocument& doc, const MeetingManifest& m) {
  std::vector<Block> blocks;
  if (doc.entries.empty()) return blocks;

  std::vector<std::size_t> order(doc.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return doc.entries[a].start_s < doc.entries[b].start_s; });

  std::size_t next_agenda = 0;
  std::optional<std::size_t> current_speaker;
  bool speaker_open = false;
  for (std::size_t idx : order) {
    const double t = doc.entries[idx].start_s;
    if (auto a = agenda_at(m, t); a && *a >= next_agenda) {
      for (; next_agenda <= *a; ++next_agenda) blocks.push_back({Block::agenda, next_agenda});
      speaker_open = false;
    }
    const auto s = speaker_at(m, t);
    if (s && (!speaker_open || s != current_speaker)) blocks.push_back({Block::speaker, *s});
    current_speaker = s;
    speaker_open = s.has_value();
    blocks.push_back({Block::entry, idx});
  }
  for (; next_agenda < m.agenda.size(); ++next_agenda) blocks.push_back({Block::agenda, next_agenda});
  return blocks;
}

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

// ---------------------------------------------------------------------------

Json entry_json(const routing::ViewEntry& e, const MeetingManifest& m) {
  Json j{{"start_s", round_ms(e.start_s)}, {"end_s", round_ms(e.end_s)}, {"text", e.text}};
  if (e.mode) j["mode"] = to_string(*e.mode);
  if (e.source_language) j["source_language"] = to_string(*e.source_language);
  if (auto s = speaker_at(m, e.start_s)) j["speaker"] = m.speakers[*s].name;
  return j;
}

std::string render_json(const routing::ViewDocument& doc, const MeetingManifest& m) {
  Json utterances = Json::array();
  for (const auto& e : doc.entries) utterances.push_back(entry_json(e, m));
  const auto& p = doc.provenance;
  Json out{{"meeting", to_json(m)},
           {"language", to_string(doc.language)},
           {"provenance",
            {{"kind", routing::to_string(p.kind)},
             {"channel", to_string(p.channel)},
             {"source_lang", to_string(p.source_lang)},
             {"engine_id", p.engine_id}}},
           {"utterances", std::move(utterances)}};
  return canonical_dump(out);
}

std::string render_html(const routing::ViewDocument& doc, const MeetingManifest& m) {
  const std::string title = escape_markup(title_of(m), false);
  std::string out;
  out += "<!DOCTYPE html>\n";
  out += "<html lang=\"" + lang_attr(doc.language) + "\" dir=\"" + (right_to_left(doc.language) ? "rtl" : "ltr") + "\">\n";
  out += "<head>\n<meta charset=\"utf-8\"/>\n<title>" + title + "</title>\n</head>\n<body>\n";
  out += "<header>\n<h1>" + title + "</h1>\n";
  out += "<p class=\"meta\">" + escape_markup(m.meeting_id, false) + " · " + std::string(to_string(doc.language)) +
         " · " + std::string(routing::to_string(doc.provenance.kind)) + " from " +
         escape_markup(to_string(doc.provenance.channel), false) + "</p>\n</header>\n";
  out += "<main>\n";

  bool section_open = false;
  auto open_section = [&](const std::string& id, const std::string& heading) {
    if (section_open) out += "</section>\n";
    out += "<section aria-labelledby=\"" + id + "\">\n<h2 id=\"" + id + "\">" + heading + "</h2>\n";
    section_open = true;
  };
  for (const auto& b : layout(doc, m)) {
    switch (b.kind) {
      case Block::agenda:
        open_section("agenda-" + std::to_string(b.index + 1), escape_markup(m.agenda[b.index].label, false));
        break;
      case Block::speaker: {
        if (!section_open) {
          out += "<section aria-label=\"proceedings\">\n";
          section_open = true;
        }
        const auto& sp = m.speakers[b.index];
        out += "<h3>" + escape_markup(sp.name, false);
        if (!sp.affiliation.empty()) out += " (" + escape_markup(sp.affiliation, false) + ")";
        out += "</h3>\n";
        break;
      }
      case Block::entry: {
        if (!section_open) {
          out += "<section aria-label=\"proceedings\">\n";
          section_open = true;
        }
        const auto& e = doc.entries[b.index];
        const auto whole = static_cast<long long>(std::floor(std::max(0.0, e.start_s)));
        out += "<p><time datetime=\"PT" + std::to_string(whole) + "S\">" + clock_stamp(e.start_s) + "</time> " +
               escape_markup(e.text, false) + "</p>\n";
        break;
      }
    }
  }
  if (section_open) out += "</section>\n";
  out += "</main>\n</body>\n</html>\n";
  return out;
}

// ---------------------------------------------------------------------------

constexpr std::string_view kContentTypes =
    "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
    "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
    "<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
    "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
    "<Override PartName=\"/word/document.xml\" "
    "ContentType=\"application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml\"/>"
    "</Types>";

constexpr std::string_view kRels =
    "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
    "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
    "<Relationship Id=\"rId1\" "
    "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument\" "
    "Target=\"word/document.xml\"/>"
    "</Relationships>";

constexpr std::array<std::string_view, 3> kDocxParts{"[Content_Types].xml", "_rels/.rels", "word/document.xml"};

std::string docx_paragraph(std::string_view text, std::string_view style, bool bold, int half_points,
                           const std::string& lang, bool rtl) {
  std::string p = "<w:p>";
  if (!style.empty() || rtl) {
    p += "<w:pPr>";
    if (!style.empty()) p += "<w:pStyle w:val=\"" + std::string(style) + "\"/>";
    if (rtl) p += "<w:bidi/>";
    p += "</w:pPr>";
  }
  p += "<w:r><w:rPr>";
  if (bold) p += "<w:b/>";
  if (rtl) p += "<w:rtl/>";
  if (half_points) p += "<w:sz w:val=\"" + std::to_string(half_points) + "\"/>";
  p += "<w:lang w:val=\"" + lang + "\"/></w:rPr>";
  p += "<w:t xml:space=\"preserve\">" + escape_markup(text, false) + "</w:t></w:r></w:p>";
  return p;
}

std::vector<std::uint8_t> render_docx(const routing::ViewDocument& doc, const MeetingManifest& m) {
  const std::string lang = lang_attr(doc.language);
  const bool rtl = right_to_left(doc.language);
  std::string body;
  body += docx_paragraph(title_of(m), "Title", true, 32, lang, rtl);
  for (const auto& b : layout(doc, m)) {
    if (b.kind == Block::agenda) {
      body += docx_paragraph(m.agenda[b.index].label, "Heading1", true, 28, lang, rtl);
    } else if (b.kind == Block::entry) {
      const auto& e = doc.entries[b.index];
      std::string line = clock_stamp(e.start_s) + " ";
      if (auto s = speaker_at(m, e.start_s)) line += m.speakers[*s].name + ": ";
      line += e.text;
      body += docx_paragraph(line, "", false, 0, lang, rtl);
    }
  }
  const std::string document =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<w:document xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\"><w:body>" +
      body + "<w:sectPr/></w:body></w:document>";

  const std::vector<ZipEntry> entries{{std::string(kDocxParts[0]), bytes_of(kContentTypes)},
                                      {std::string(kDocxParts[1]), bytes_of(kRels)},
                                      {std::string(kDocxParts[2]), bytes_of(document)}};
  return write_stored_zip(entries);
}

}  // namespace

std::vector<std::uint8_t> export_document(const routing::ViewDocument& doc, const MeetingManifest& manifest,
                                          ExportFormat format) {
  switch (format) {
    case ExportFormat::json: return bytes_of(render_json(doc, manifest));
    case ExportFormat::html: return bytes_of(render_html(doc, manifest));
    case ExportFormat::docx: return render_docx(doc, manifest);
  }
  throw Error("unknown export format");
}

routing::ViewDocument parse_json_export(std::span<const std::uint8_t> bytes, MeetingManifest* manifest) {
  const Json doc = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError("", "export is not a JSON object");
  auto text_at = [&](const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_string()) throw ParseError(path + "/" + key, std::string("missing ") + key);
    return j[key].get<std::string>();
  };
  auto number_at = [&](const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number()) throw ParseError(path + "/" + key, std::string("missing ") + key);
    return j[key].get<double>();
  };

  if (!doc.contains("meeting")) throw ParseError("/meeting", "missing meeting");
  if (manifest) *manifest = manifest_from_json(doc["meeting"]);

  routing::ViewDocument out;
  const auto lang = parse_language(text_at(doc, "language", ""));
  if (!lang) throw ParseError("/language", "unknown language");
  out.language = *lang;

  if (!doc.contains("provenance") || !doc["provenance"].is_object()) throw ParseError("/provenance", "missing provenance");
  const auto& p = doc["provenance"];
  const auto kind = text_at(p, "kind", "/provenance");
  if (kind != "native" && kind != "translation") throw ParseError("/provenance/kind", "unknown kind");
  out.provenance.kind = kind == "native" ? routing::DocumentKind::native : routing::DocumentKind::translation;
  const auto channel = parse_channel(text_at(p, "channel", "/provenance"));
  if (!channel) throw ParseError("/provenance/channel", "invalid channel");
  out.provenance.channel = *channel;
  const auto src = parse_source_language(text_at(p, "source_lang", "/provenance"));
  if (!src) throw ParseError("/provenance/source_lang", "unknown language");
  out.provenance.source_lang = *src;
  out.provenance.engine_id = text_at(p, "engine_id", "/provenance");

  if (!doc.contains("utterances") || !doc["utterances"].is_array()) throw ParseError("/utterances", "missing utterances");
  for (std::size_t i = 0; i < doc["utterances"].size(); ++i) {
    const auto& u = doc["utterances"][i];
    const std::string path = "/utterances/" + std::to_string(i);
    routing::ViewEntry e;
    e.start_s = number_at(u, "start_s", path);
    e.end_s = number_at(u, "end_s", path);
    e.text = text_at(u, "text", path);
    if (u.contains("mode")) {
      const auto mode = text_at(u, "mode", path);
      if (mode == "copied") e.mode = TranslationMode::copied;
      else if (mode == "translated") e.mode = TranslationMode::translated;
      else throw ParseError(path + "/mode", "unknown mode");
    }
    if (u.contains("source_language")) {
      e.source_language = parse_language(text_at(u, "source_language", path));
      if (!e.source_language) throw ParseError(path + "/source_language", "unknown language");
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

ValidationReport validate_docx(std::span<const std::uint8_t> bytes) {
  ValidationReport report;
  std::vector<ZipEntry> entries;
  try {
    entries = read_zip(bytes);
  } catch (const std::exception& e) {
    report.add(e.what(), "ZIP corrupt");
    return report;
  }
  for (auto part : kDocxParts) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const ZipEntry& e) { return e.name == part; });
    if (it == entries.end()) {
      report.add(std::string(part), "missing part");
      continue;
    }
    const std::string_view xml(reinterpret_cast<const char*>(it->data.data()), it->data.size());
    if (auto err = xml_wellformedness_error(xml)) report.add(std::string(part) + ": " + *err, "malformed XML");
  }
  return report;
}

std::vector<std::string> docx_paragraphs(std::span<const std::uint8_t> bytes) {
  const auto entries = read_zip(bytes);
  auto it = std::find_if(entries.begin(), entries.end(), [](const ZipEntry& e) { return e.name == kDocxParts[2]; });
  if (it == entries.end()) throw Error("docx has no word/document.xml");
  const std::string xml(it->data.begin(), it->data.end());

  auto unescape = [](std::string s) {
    const std::pair<std::string_view, std::string_view> refs[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&amp;", "&"}};
    for (auto [from, to] : refs) {
      for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
        s.replace(at, from.size(), to);
      }
    }
    return s;
  };

  std::vector<std::string> paragraphs;
  std::size_t at = 0;
  while ((at = xml.find("<w:p>", at)) != std::string::npos) {
    const auto end = xml.find("</w:p>", at);
    if (end == std::string::npos) break;
    std::string text;
    for (std::size_t t = xml.find("<w:t", at); t != std::string::npos && t < end; t = xml.find("<w:t", t + 1)) {
      if (xml[t + 4] != '>' && xml[t + 4] != ' ') continue;
      const auto open_end = xml.find('>', t);
      const auto close = xml.find("</w:t>", open_end);
      text += unescape(xml.substr(open_end + 1, close - open_end - 1));
      t = close;
    }
    paragraphs.push_back(std::move(text));
    at = end;
  }
  return paragraphs;
}

}  // namespace verbatim::exporters
