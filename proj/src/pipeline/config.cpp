#include <fstream>
#include <sstream>

#include "verbatim/errors.hpp"
#include "verbatim/pipeline.hpp"

namespace verbatim::pipeline {

using Json = nlohmann::json;

const std::string& PipelineConfig::s2t_for(const ChannelId& channel) const {
  if (channel.is_floor()) return s2t_floor;
  auto it = s2t_booths.find(*channel.language);
  return it != s2t_booths.end() ? it->second : s2t_booth;
}

namespace {

template <typename T>
T get_or(const Json& doc, const char* key, const std::string& path, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const Json::exception&) {
    throw ParseError(path + "/" + key, "wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

}  // namespace

PipelineConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("", "config must be a JSON object");
  PipelineConfig cfg;
  cfg.base_dir = base_dir;

  if (doc.contains("engines")) {
    if (!doc["engines"].is_array()) throw ParseError("/engines", "must be an array");
    for (std::size_t i = 0; i < doc["engines"].size(); ++i) {
      try {
        cfg.engines.push_back(engines::parse_engine_spec(doc["engines"][i]));
      } catch (const ParseError& e) {
        throw ParseError("/engines/" + std::to_string(i) + e.path(), e.what());
      }
    }
  }

  const Json s2t = doc.value("s2t", Json::object());
  cfg.s2t_floor = get_or<std::string>(s2t, "floor", "/s2t", "sidecar");
  cfg.s2t_booth = get_or<std::string>(s2t, "booth", "/s2t", cfg.s2t_floor);
  if (s2t.contains("booths")) {
    for (const auto& [code, id] : s2t["booths"].items()) {
      auto lang = parse_language(code);
      if (!lang || !is_booth_language(*lang)) throw ParseError("/s2t/booths/" + code, "not a booth language");
      cfg.s2t_booths[*lang] = id.get<std::string>();
    }
  }
  cfg.mt = get_or<std::string>(doc, "mt", "", "marker");
  cfg.lid = get_or<std::string>(doc, "lid", "", "heuristic-lid");

  const Json vad = doc.value("vad", Json::object());
  cfg.vad.frame_ms = get_or(vad, "frame_ms", "/vad", cfg.vad.frame_ms);
  cfg.vad.energy_threshold_dbfs = get_or(vad, "energy_threshold_dbfs", "/vad", cfg.vad.energy_threshold_dbfs);
  cfg.vad.hangover_frames = get_or(vad, "hangover_frames", "/vad", cfg.vad.hangover_frames);
  cfg.vad.min_region_s = get_or(vad, "min_region_s", "/vad", cfg.vad.min_region_s);
  try {
    audio::validate(cfg.vad);
  } catch (const std::invalid_argument& e) {
    throw ParseError("/vad", e.what());
  }

  const Json seg = doc.value("segmentation", Json::object());
  cfg.segmentation.min_s = get_or(seg, "min_s", "/segmentation", cfg.segmentation.min_s);
  cfg.segmentation.max_s = get_or(seg, "max_s", "/segmentation", cfg.segmentation.max_s);
  cfg.segmentation.merge_gap_s = get_or(seg, "merge_gap_s", "/segmentation", cfg.segmentation.merge_gap_s);
  cfg.segmentation.frame_ms = get_or(seg, "frame_ms", "/segmentation", cfg.segmentation.frame_ms);
  if (!(cfg.segmentation.min_s > 0) || cfg.segmentation.max_s < 2 * cfg.segmentation.min_s) {
    throw ParseError("/segmentation", "need 0 < min_s and max_s >= 2 * min_s");
  }

  const Json norm = doc.value("normalize", Json::object());
  const auto foreign = get_or<std::string>(norm, "foreign", "/normalize", "keep");
  if (foreign != "keep" && foreign != "drop") throw ParseError("/normalize/foreign", "expected keep or drop");
  cfg.normalize.foreign = foreign == "keep" ? text::ForeignSpanPolicy::keep : text::ForeignSpanPolicy::drop;

  const double poll_s = get_or(doc, "poll_interval_s", "", 30.0);
  if (!(poll_s > 0)) throw ParseError("/poll_interval_s", "must be positive");
  cfg.poll_interval = std::chrono::milliseconds(static_cast<long long>(poll_s * 1000.0));

  cfg.state_dir = resolve(base_dir, get_or<std::string>(doc, "state_dir", "", "state"));
  cfg.index_root = resolve(base_dir, get_or<std::string>(doc, "index_root", "", (cfg.state_dir / "index").string()));
  cfg.sink_dir = resolve(base_dir, get_or<std::string>(doc, "sink_dir", "", (cfg.state_dir / "sink").string()));
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("", "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json doc = Json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw ParseError("", "malformed JSON in " + path.string());
  return parse_config(doc, std::filesystem::absolute(path).parent_path());
}

Json to_json(const PipelineConfig& c) {
  Json engines = Json::array();
  for (const auto& e : c.engines) engines.push_back(engines::to_json(e));
  Json booths = Json::object();
  for (const auto& [lang, id] : c.s2t_booths) booths[std::string(to_string(lang))] = id;
  return {{"engines", engines},
          {"s2t", {{"floor", c.s2t_floor}, {"booth", c.s2t_booth}, {"booths", booths}}},
          {"mt", c.mt},
          {"lid", c.lid},
          {"vad",
           {{"frame_ms", c.vad.frame_ms},
            {"energy_threshold_dbfs", c.vad.energy_threshold_dbfs},
            {"hangover_frames", c.vad.hangover_frames},
            {"min_region_s", c.vad.min_region_s}}},
          {"segmentation",
           {{"min_s", c.segmentation.min_s},
            {"max_s", c.segmentation.max_s},
            {"merge_gap_s", c.segmentation.merge_gap_s},
            {"frame_ms", c.segmentation.frame_ms}}},
          {"normalize", {{"foreign", c.normalize.foreign == text::ForeignSpanPolicy::keep ? "keep" : "drop"}}},
          {"poll_interval_s", static_cast<double>(c.poll_interval.count()) / 1000.0},
          {"state_dir", c.state_dir.string()},
          {"index_root", c.index_root.string()},
          {"sink_dir", c.sink_dir.string()}};
}

}  // namespace verbatim::pipeline
