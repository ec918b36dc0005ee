#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verbatim/core.hpp"
#include "verbatim/routing.hpp"

namespace verbatim::exporters {

// ---------------------------------------------------------------------------
// Packaging helpers

struct ZipEntry {
  std::string name;
  std::vector<std::uint8_t> data;
};

/// Stored (uncompressed) archive with DOS timestamp 1980-01-01 00:00 on every entry and no
/// extra fields, so identical entries always produce identical bytes.
std::vector<std::uint8_t> write_stored_zip(std::span<const ZipEntry> entries);

/// Reads stored and deflated entries through the central directory, checking local headers
/// and CRC-32. Throws verbatim::Error describing the first defect.
std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes);

/// nullopt for a well-formed XML 1.0 document (single root, balanced and properly nested
/// tags, quoted unique attributes, valid references); otherwise a short reason.
std::optional<std::string> xml_wellformedness_error(std::string_view xml);

// ---------------------------------------------------------------------------
// Exports

enum class ExportFormat { json, html, docx };
std::string_view to_string(ExportFormat format);
std::optional<ExportFormat> parse_format(std::string_view text);

/// "[hh:mm:ss]" with seconds floored.
std::string clock_stamp(double seconds);

/// Byte-deterministic rendering of one language document.
///  json: {"meeting", "language", "provenance", "utterances": [...]} with sorted keys;
///  html: one section per agenda item, speaker headings, timestamped paragraphs, lang/dir set;
///  docx: [Content_Types].xml, _rels/.rels, word/document.xml; a title heading, one heading per
///        agenda item and one "[hh:mm:ss] Speaker: text" paragraph per utterance. A document
///        without entries renders the title heading alone.
std::vector<std::uint8_t> export_document(const routing::ViewDocument& doc, const MeetingManifest& manifest,
                                          ExportFormat format);

/// Inverse of the JSON export; exact for documents whose times are whole milliseconds, as
/// assembled views are.
routing::ViewDocument parse_json_export(std::span<const std::uint8_t> bytes, MeetingManifest* manifest = nullptr);

/// Empty report when the bytes are a ZIP holding the three required parts, each well-formed.
/// Violations: "ZIP corrupt", "missing part", "malformed XML" (path names the part or defect).
ValidationReport validate_docx(std::span<const std::uint8_t> bytes);

/// word/document.xml paragraphs as plain text, in order; used to compare formats.
std::vector<std::string> docx_paragraphs(std::span<const std::uint8_t> bytes);

/// "{meeting_id}.{lang}.{format}"
std::string export_file_name(std::string_view meeting_id, Language lang, ExportFormat format);

}  // namespace verbatim::exporters
