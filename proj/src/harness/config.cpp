#include "rppg/harness/config.hpp"

#include "rppg/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace rppg::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Range read_range(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(std::string("'") + key + "' must be a [lo, hi] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

}  // namespace

MotionMode parse_motion_mode(const std::string& name) {
  if (name == "rigid") return MotionMode::rigid;
  if (name == "nonrigid") return MotionMode::nonrigid;
  if (name == "both") return MotionMode::both;
  throw ConfigError("unknown motion mode '" + name + "' (expected rigid|nonrigid|both)");
}

const char* to_string(MotionMode mode) {
  switch (mode) {
    case MotionMode::rigid: return "rigid";
    case MotionMode::nonrigid: return "nonrigid";
    case MotionMode::both: return "both";
  }
  return "rigid";
}

void RunConfig::validate() const {
  if (!(band.lo > 0.0 && band.hi > band.lo)) throw ConfigError("band must satisfy 0 < lo < hi");
  if (!(band.hi < synthetic.fps / 2.0)) throw ConfigError("band upper edge must lie below Nyquist");
  if (per_source < 1) throw ConfigError("per_source must be >= 1");
  if (n_sources < 0) throw ConfigError("n_sources must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  const auto& s = synthetic;
  if (!(s.duration_s > 0.0 && s.fps > 0.0)) throw ConfigError("synthetic duration and fps must be positive");
  if (!(s.hr_min_bpm >= 40.0 && s.hr_max_bpm <= 180.0 && s.hr_min_bpm <= s.hr_max_bpm)) {
    throw ConfigError("synthetic HR range must lie within [40, 180] bpm");
  }
  if (!(s.noise_sigma_max >= 0.0)) throw ConfigError("noise_sigma_max must be >= 0");
  if (!(s.rotation_std.lo >= 0.0 && s.rotation_std.lo <= s.rotation_std.hi)) {
    throw ConfigError("rotation_std must be a non-negative [lo, hi] range");
  }
  if (!(s.translation_std_px >= 0.0 && s.warp_amp_px >= 0.0)) {
    throw ConfigError("translation_std_px and warp_amp_px must be >= 0");
  }
  if (s.n_videos < 1) throw ConfigError("n_videos must be >= 1");
  const auto& m = method_options;
  if (!(m.chrom_window_s > 0.0 && m.pos_window_s > 0.0 && m.detrend_window_s > 0.0)) {
    throw ConfigError("method windows must be positive");
  }
  if (m.ica_components < 1 || m.ica_components > 3 || m.ica_max_iter < 1 || !(m.ica_tol > 0.0)) {
    throw ConfigError("ICA settings out of range");
  }
}

RunConfig parse_run_config(const json& j) {
  reject_unknown(j,
                 {"method", "band", "detrend_window_s", "chrom_window_s", "pos_window_s", "ica",
                  "selection", "synthetic", "seed", "output_dir", "workers"},
                 "config");
  RunConfig c;
  if (j.contains("method")) {
    if (!j["method"].is_string()) throw ConfigError("'method' must be a string");
    c.method = parse_method(j["method"].get<std::string>());
  }
  if (j.contains("band")) {
    const Range r = read_range(j, "band");
    c.band = {r.lo, r.hi};
  }
  c.method_options.band = c.band;
  read(j, "detrend_window_s", c.method_options.detrend_window_s);
  read(j, "chrom_window_s", c.method_options.chrom_window_s);
  read(j, "pos_window_s", c.method_options.pos_window_s);
  if (j.contains("ica")) {
    const json& ica = j["ica"];
    reject_unknown(ica, {"n_components", "max_iter", "tol"}, "ica");
    read(ica, "n_components", c.method_options.ica_components);
    read(ica, "max_iter", c.method_options.ica_max_iter);
    read(ica, "tol", c.method_options.ica_tol);
  }
  if (j.contains("selection")) {
    const json& sel = j["selection"];
    reject_unknown(sel, {"rigid_range", "nonrigid_range", "per_source", "n_sources"}, "selection");
    if (sel.contains("rigid_range")) c.criteria.rigid_range = read_range(sel, "rigid_range");
    if (sel.contains("nonrigid_range")) c.criteria.nonrigid_range = read_range(sel, "nonrigid_range");
    read(sel, "per_source", c.per_source);
    read(sel, "n_sources", c.n_sources);
  }
  if (j.contains("synthetic")) {
    const json& s = j["synthetic"];
    reject_unknown(s,
                   {"duration_s", "fps", "hr_range_bpm", "noise_sigma_max", "drift_amplitude",
                    "drift_hz", "rotation_std", "translation_std_px", "motion_mode", "warp_amp_px",
                    "hr_shift_bpm", "n_videos"},
                   "synthetic");
    auto& sc = c.synthetic;
    read(s, "duration_s", sc.duration_s);
    read(s, "fps", sc.fps);
    if (s.contains("hr_range_bpm")) {
      const Range r = read_range(s, "hr_range_bpm");
      sc.hr_min_bpm = r.lo;
      sc.hr_max_bpm = r.hi;
    }
    read(s, "noise_sigma_max", sc.noise_sigma_max);
    read(s, "drift_amplitude", sc.drift_amplitude);
    read(s, "drift_hz", sc.drift_hz);
    if (s.contains("rotation_std")) sc.rotation_std = read_range(s, "rotation_std");
    read(s, "translation_std_px", sc.translation_std_px);
    if (s.contains("motion_mode")) sc.motion_mode = parse_motion_mode(s["motion_mode"].get<std::string>());
    read(s, "warp_amp_px", sc.warp_amp_px);
    read(s, "hr_shift_bpm", sc.hr_shift_bpm);
    read(s, "n_videos", sc.n_videos);
  }
  read(j, "seed", c.seed);
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  read(j, "workers", c.workers);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["method"] = std::string(to_string(c.method));
  j["band"] = json::array({c.band.lo, c.band.hi});
  j["detrend_window_s"] = c.method_options.detrend_window_s;
  j["chrom_window_s"] = c.method_options.chrom_window_s;
  j["pos_window_s"] = c.method_options.pos_window_s;
  j["ica"] = {{"n_components", c.method_options.ica_components},
              {"max_iter", c.method_options.ica_max_iter},
              {"tol", c.method_options.ica_tol}};
  json sel = {{"per_source", c.per_source}, {"n_sources", c.n_sources}};
  if (c.criteria.rigid_range) sel["rigid_range"] = range_json(*c.criteria.rigid_range);
  if (c.criteria.nonrigid_range) sel["nonrigid_range"] = range_json(*c.criteria.nonrigid_range);
  j["selection"] = sel;
  const auto& s = c.synthetic;
  j["synthetic"] = {{"duration_s", s.duration_s},
                    {"fps", s.fps},
                    {"hr_range_bpm", json::array({s.hr_min_bpm, s.hr_max_bpm})},
                    {"noise_sigma_max", s.noise_sigma_max},
                    {"drift_amplitude", s.drift_amplitude},
                    {"drift_hz", s.drift_hz},
                    {"rotation_std", range_json(s.rotation_std)},
                    {"translation_std_px", s.translation_std_px},
                    {"motion_mode", to_string(s.motion_mode)},
                    {"warp_amp_px", s.warp_amp_px},
                    {"hr_shift_bpm", s.hr_shift_bpm},
                    {"n_videos", s.n_videos}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  j["workers"] = c.workers;
  return j;
}

DatasetManifest parse_manifest(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j, {"name", "root", "fps", "eval_window", "entries"}, "manifest");
  DatasetManifest m;
  read(j, "name", m.name);
  m.root = base_dir;
  if (j.contains("root")) m.root = base_dir / j["root"].get<std::string>();
  if (j.contains("fps")) {
    if (!j["fps"].is_number() || !(j["fps"].get<double>() > 0.0)) {
      throw ConfigError("manifest fps override must be a positive number");
    }
    m.fps_override = j["fps"].get<double>();
  }
  if (j.contains("eval_window")) {
    const json& w = j["eval_window"];
    if (w.is_string() && w.get<std::string>() == "whole") {
      m.eval_window_s.reset();
    } else if (w.is_number() && w.get<double>() > 0.0) {
      m.eval_window_s = w.get<double>();
    } else {
      throw ConfigError("eval_window must be \"whole\" or a positive number of seconds");
    }
  }
  if (!j.contains("entries") || !j["entries"].is_array()) throw ConfigError("manifest lacks entries");
  std::set<std::string> ids;
  for (const json& e : j["entries"]) {
    reject_unknown(e, {"id", "frames", "gold", "motion"}, "manifest entry");
    if (!e.contains("id") || !e.contains("frames") || !e.contains("gold")) {
      throw ConfigError("manifest entries need id, frames and gold");
    }
    ManifestEntry entry;
    entry.id = e["id"].get<std::string>();
    if (!ids.insert(entry.id).second) throw ConfigError("duplicate manifest id '" + entry.id + "'");
    entry.frames_dir = m.root / e["frames"].get<std::string>();
    entry.gold_csv = m.root / e["gold"].get<std::string>();
    if (e.contains("motion")) entry.motion_csv = m.root / e["motion"].get<std::string>();
    m.entries.push_back(std::move(entry));
  }
  if (m.entries.empty()) throw ConfigError("manifest has no entries");
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
  }
  return parse_manifest(j, path.parent_path());
}

json to_json(const DatasetManifest& m) {
  json j;
  j["name"] = m.name;
  if (m.fps_override) j["fps"] = *m.fps_override;
  if (m.eval_window_s) {
    j["eval_window"] = *m.eval_window_s;
  } else {
    j["eval_window"] = "whole";
  }
  json entries = json::array();
  for (const auto& e : m.entries) {
    json je = {{"id", e.id},
               {"frames", e.frames_dir.lexically_relative(m.root).string()},
               {"gold", e.gold_csv.lexically_relative(m.root).string()}};
    if (e.motion_csv) je["motion"] = e.motion_csv->lexically_relative(m.root).string();
    entries.push_back(je);
  }
  j["entries"] = entries;
  return j;
}

std::filesystem::path default_output_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("RPPG_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

}  // namespace rppg::harness
