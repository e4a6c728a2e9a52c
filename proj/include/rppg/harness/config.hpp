#pragma once

#include "rppg/methods.hpp"
#include "rppg/motion.hpp"
#include "rppg/spectrum.hpp"
#include "rppg/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rppg::harness {

/// Parameters of the seeded synthetic suites (preservation trials and
/// generated datasets).
struct SyntheticSuiteConfig {
  double duration_s = 30.0;
  double fps = 30.0;
  double hr_min_bpm = 50.0;
  double hr_max_bpm = 120.0;
  double noise_sigma_max = 2.0;
  double drift_amplitude = 0.0;
  double drift_hz = 0.05;
  Range rotation_std{0.10, 0.14};  // rad, per-axis std of generated tracks
  double translation_std_px = 1.5;
  MotionMode motion_mode = MotionMode::rigid;
  double warp_amp_px = 0.0;
  /// Non-zero re-renders the augmented video at HR + shift (negative control).
  double hr_shift_bpm = 0.0;
  int n_videos = 10;
};

struct RunConfig {
  Method method = Method::pos;
  Band band;
  MethodOptions method_options;
  SelectionCriteria criteria;
  int per_source = 1;
  int n_sources = 1;
  SyntheticSuiteConfig synthetic;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  int workers = 1;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Strict parse: unknown keys are rejected. Missing keys keep defaults.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

MotionMode parse_motion_mode(const std::string& name);
const char* to_string(MotionMode mode);

struct ManifestEntry {
  std::string id;
  std::filesystem::path frames_dir;
  std::filesystem::path gold_csv;
  std::optional<std::filesystem::path> motion_csv;
};

/// Dataset listing. `eval_window_s` empty means one HR window per video.
struct DatasetManifest {
  std::string name = "dataset";
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
  std::optional<double> fps_override;
  std::optional<double> eval_window_s;
};

/// Reads a JSON manifest; relative paths resolve against `root`, which itself
/// resolves against the manifest's directory. Ids must be unique. Missing
/// files are not fatal here: evaluation records them per video.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json to_json(const DatasetManifest& manifest);

/// Default output directory: $RPPG_OUTPUT_DIR when set, else `fallback`.
std::filesystem::path default_output_dir(const std::filesystem::path& fallback = "out");

}  // namespace rppg::harness
