#pragma once

// Canonical JSON forms of the core types. Objects use sorted keys and every timestamp is
// rounded to whole milliseconds, so equal values always serialize to identical bytes.

#include <string>
#include <vector>

#include <json.hpp>

#include "verbatim/core.hpp"

namespace verbatim {

using Json = nlohmann::json;

Json to_json(const MeetingManifest& manifest);
Json to_json(const Transcript& transcript);
Json to_json(const TranslationArtifact& artifact);
Json to_json(const std::vector<Segment>& segments);

/// Structural mapping only; throws ParseError with the offending field path.
MeetingManifest manifest_from_json(const Json& doc);
Transcript transcript_from_json(const Json& doc);
TranslationArtifact artifact_from_json(const Json& doc);

/// Two-space indented dump with a trailing newline.
std::string canonical_dump(const Json& doc);

}  // namespace verbatim
