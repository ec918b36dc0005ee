#include "verbatim/registry.hpp"

#include "verbatim/errors.hpp"
#include "verbatim/http_engines.hpp"

#include <set>

namespace verbatim::engines {

using Json = nlohmann::json;

EngineSpec parse_engine_spec(const Json& doc) {
  if (!doc.is_object()) throw ParseError("", "engine spec must be an object");
  EngineSpec spec;
  if (!doc.contains("engine_id") || !doc["engine_id"].is_string()) throw ParseError("/engine_id", "missing engine_id");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ParseError("/kind", "missing kind");
  spec.engine_id = doc["engine_id"].get<std::string>();
  spec.kind = doc["kind"].get<std::string>();
  spec.endpoint_url = doc.value("endpoint_url", "");
  spec.fixture_path = doc.value("fixture_path", "");
  spec.timeout_ms = doc.value("timeout_ms", 10000);
  spec.max_retries = doc.value("max_retries", 3);
  if (doc.contains("options")) spec.options = doc["options"];
  return spec;
}

Json to_json(const EngineSpec& spec) {
  Json doc{{"engine_id", spec.engine_id}, {"kind", spec.kind}, {"timeout_ms", spec.timeout_ms},
           {"max_retries", spec.max_retries}};
  if (!spec.endpoint_url.empty()) doc["endpoint_url"] = spec.endpoint_url;
  if (!spec.fixture_path.empty()) doc["fixture_path"] = spec.fixture_path;
  if (!spec.options.empty()) doc["options"] = spec.options;
  return doc;
}

namespace {

HttpEndpoint endpoint_of(const EngineSpec& spec) {
  if (spec.endpoint_url.empty()) throw ParseError("/endpoint_url", "engine '" + spec.engine_id + "' needs endpoint_url");
  HttpEndpoint ep;
  ep.base_url = spec.endpoint_url;
  ep.timeout = std::chrono::milliseconds(spec.timeout_ms);
  ep.max_attempts = spec.max_retries;
  ep.backoff = std::chrono::milliseconds(spec.options.value("backoff_ms", 100));
  ep.rate_per_s = spec.options.value("rate_per_s", 0.0);
  ep.burst = spec.options.value("burst", 1.0);
  return ep;
}

std::pair<Language, Language> parse_pair(const std::string& text) {
  const auto arrow = text.find("->");
  if (arrow != std::string::npos) {
    auto src = parse_language(text.substr(0, arrow));
    auto tgt = parse_language(text.substr(arrow + 2));
    if (src && tgt) return {*src, *tgt};
  }
  throw ParseError("/options/fail_pairs", "expected \"SRC->TGT\", got '" + text + "'");
}

}  // namespace

EngineRegistry EngineRegistry::build(const std::vector<EngineSpec>& specs, const std::filesystem::path& base_dir) {
  EngineRegistry registry;
  std::vector<const EngineSpec*> deferred;
  for (const auto& spec : specs) {
    if (spec.kind == "sidecar") {
      std::filesystem::path fixture = spec.fixture_path;
      if (fixture.is_relative() && !base_dir.empty()) fixture = base_dir / fixture;
      registry.add(std::make_shared<SidecarTranscriber>(spec.engine_id, SidecarTranscriber::load_fixture(fixture),
                                                        spec.options.value("timings", true)));
    } else if (spec.kind == "http-s2t") {
      registry.add(std::make_shared<HttpTranscriber>(spec.engine_id, endpoint_of(spec)));
    } else if (spec.kind == "marker") {
      registry.add(std::make_shared<MarkerTranslator>(spec.engine_id));
    } else if (spec.kind == "http-mt") {
      registry.add(std::make_shared<HttpTranslator>(spec.engine_id, endpoint_of(spec)));
    } else if (spec.kind == "heuristic-lid") {
      registry.add(std::make_shared<HeuristicIdentifier>(spec.engine_id, spec.options.value("min_ratio", 0.2)));
    } else if (spec.kind == "fault-mt") {
      deferred.push_back(&spec);  // wraps another translator
    } else {
      throw ParseError("/kind", "unknown engine kind '" + spec.kind + "'");
    }
  }
  for (const auto* spec : deferred) {
    std::set<std::pair<Language, Language>> pairs;
    for (const auto& p : spec->options.value("fail_pairs", Json::array())) pairs.insert(parse_pair(p.get<std::string>()));
    std::shared_ptr<const Translator> inner = spec->options.contains("inner")
                                                  ? registry.translator(spec->options["inner"].get<std::string>())
                                                  : std::make_shared<MarkerTranslator>("marker");
    registry.add(std::make_shared<FaultInjectingTranslator>(spec->engine_id, inner, std::move(pairs)));
  }
  return registry;
}

void EngineRegistry::add(std::shared_ptr<const SpeechToText> engine) { s2t_[engine->id()] = std::move(engine); }
void EngineRegistry::add(std::shared_ptr<const Translator> engine) { mt_[engine->id()] = std::move(engine); }
void EngineRegistry::add(std::shared_ptr<const LanguageIdentifier> engine) { lid_[engine->id()] = std::move(engine); }

namespace {
template <typename Map>
auto lookup(const Map& map, const std::string& id, const char* what) {
  auto it = map.find(id);
  if (it == map.end()) throw Error(std::string("no ") + what + " engine '" + id + "' registered");
  return it->second;
}
}  // namespace

std::shared_ptr<const SpeechToText> EngineRegistry::s2t(const std::string& id) const { return lookup(s2t_, id, "speech-to-text"); }
std::shared_ptr<const Translator> EngineRegistry::translator(const std::string& id) const { return lookup(mt_, id, "translation"); }
std::shared_ptr<const LanguageIdentifier> EngineRegistry::identifier(const std::string& id) const {
  return lookup(lid_, id, "language-identification");
}

std::vector<std::string> EngineRegistry::translator_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : mt_) ids.push_back(id);
  return ids;
}

}  // namespace verbatim::engines
