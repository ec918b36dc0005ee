#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "verbatim/engines.hpp"

namespace verbatim::engines {

/// One entry of the pipeline config's engine registry.
///
/// kinds: "sidecar" (S2T, fixture_path), "http-s2t" (endpoint_url), "marker" (MT),
/// "http-mt" (endpoint_url), "fault-mt" (options.inner, options.fail_pairs ["EN->RU", ...]),
/// "heuristic-lid" (options.min_ratio).
struct EngineSpec {
  std::string engine_id;
  std::string kind;
  std::string endpoint_url;
  std::string fixture_path;
  int timeout_ms = 10000;
  int max_retries = 3;  // total attempts per request
  nlohmann::json options = nlohmann::json::object();
};

EngineSpec parse_engine_spec(const nlohmann::json& doc);
nlohmann::json to_json(const EngineSpec& spec);

/// Instantiated engines by id. Lookups throw verbatim::Error for unknown ids or a kind mismatch.
class EngineRegistry {
 public:
  EngineRegistry() = default;
  /// Relative fixture paths resolve against `base_dir`.
  static EngineRegistry build(const std::vector<EngineSpec>& specs, const std::filesystem::path& base_dir = {});

  void add(std::shared_ptr<const SpeechToText> engine);
  void add(std::shared_ptr<const Translator> engine);
  void add(std::shared_ptr<const LanguageIdentifier> engine);

  std::shared_ptr<const SpeechToText> s2t(const std::string& id) const;
  std::shared_ptr<const Translator> translator(const std::string& id) const;
  std::shared_ptr<const LanguageIdentifier> identifier(const std::string& id) const;

  std::vector<std::string> translator_ids() const;

 private:
  std::map<std::string, std::shared_ptr<const SpeechToText>> s2t_;
  std::map<std::string, std::shared_ptr<const Translator>> mt_;
  std::map<std::string, std::shared_ptr<const LanguageIdentifier>> lid_;
};

}  // namespace verbatim::engines
