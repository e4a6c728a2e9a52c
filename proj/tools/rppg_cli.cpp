// Command-line front end: evaluate, preserve, select-drivers, synth, report.
//
// Exit status: 0 success, 2 run failure (too many videos failed),
// 3 configuration or usage error, 1 anything else.

#include "rppg/errors.hpp"
#include "rppg/harness/config.hpp"
#include "rppg/harness/evaluation.hpp"
#include "rppg/harness/preservation.hpp"
#include "rppg/harness/report.hpp"
#include "rppg/harness/synth_dataset.hpp"
#include "rppg/motion.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace rppg;
using namespace rppg::harness;
using nlohmann::json;

namespace {

constexpr int kExitRun = 2;
constexpr int kExitConfig = 3;

struct Common {
  std::string config_path;
  std::string output;
  std::optional<std::string> method;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("-o,--output", c.output, "output directory (default: $RPPG_OUTPUT_DIR or ./out)");
  app->add_option("-m,--method", c.method, "green | ica | chrom | pos");
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("-j,--workers", c.workers, "worker threads");
}

RunConfig resolve_config(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path);
  if (c.method) config.method = parse_method(*c.method);
  if (c.seed) config.seed = *c.seed;
  if (c.workers) config.workers = *c.workers;
  if (!c.output.empty()) {
    config.output_dir = c.output;
  } else if (c.config_path.empty() || config.output_dir == fs::path("out")) {
    config.output_dir = default_output_dir();
  }
  config.validate();
  return config;
}

std::vector<ReportFormat> formats_for(const std::string& name) {
  if (name == "all") {
    return {ReportFormat::json, ReportFormat::csv, ReportFormat::markdown, ReportFormat::plotdata};
  }
  return {parse_report_format(name)};
}

void print_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cerr << "wrote " << f.string() << "\n";
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

int cmd_evaluate(const Common& common, const std::string& manifest_path, const std::string& format) {
  const RunConfig config = resolve_config(common);
  const DatasetManifest manifest = load_manifest(manifest_path);
  const EvaluationReport report = run_evaluation(manifest, config);
  for (ReportFormat f : formats_for(format)) print_written(emit_report(report, f, config.output_dir));
  std::cout << markdown_table({report});
  if (!report.failures.empty()) {
    std::cerr << report.failures.size() << " video(s) failed:\n";
    for (const auto& f : report.failures) std::cerr << "  " << f.id << " [" << f.kind << "] " << f.message << "\n";
  }
  return 0;
}

int cmd_preserve(const Common& common, int trials, const std::string& format) {
  const RunConfig config = resolve_config(common);
  const PreservationResult result = run_preservation_suite(config, trials);
  for (ReportFormat f : formats_for(format)) print_written(emit_report(result, f, config.output_dir));
  std::size_t passed = 0;
  for (const auto& t : result.trials) passed += t.verdict.preserved ? 1 : 0;
  std::cout << "preserved " << passed << "/" << result.trials.size() << " (pass rate "
            << result.pass_rate << ")\n";
  return 0;
}

std::optional<Range> parse_range_opt(const std::vector<double>& v, const char* name) {
  if (v.empty()) return std::nullopt;
  if (v.size() != 2 || v[0] > v[1]) throw ConfigError(std::string(name) + " needs LO HI with LO <= HI");
  return Range{v[0], v[1]};
}

int cmd_select(const Common& common, const std::vector<std::string>& csvs,
               const std::string& manifest_path, const std::vector<double>& rigid,
               const std::vector<double>& nonrigid, std::optional<int> per_source,
               std::optional<int> n_sources, double fps) {
  RunConfig config = resolve_config(common);
  if (auto r = parse_range_opt(rigid, "--rigid")) config.criteria.rigid_range = r;
  if (auto r = parse_range_opt(nonrigid, "--nonrigid")) config.criteria.nonrigid_range = r;
  if (per_source) config.per_source = *per_source;
  if (n_sources) config.n_sources = *n_sources;
  config.validate();

  std::vector<MotionProfile> pool;
  for (const auto& path : csvs) {
    pool.push_back(load_motion_csv(path, fs::path(path).stem().string(), fps));
  }
  if (!manifest_path.empty()) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    for (const auto& e : manifest.entries) {
      if (e.motion_csv) pool.push_back(load_motion_csv(e.motion_csv->string(), e.id, fps));
    }
  }
  if (pool.empty()) throw ConfigError("no motion profiles given (use --pool or --manifest)");

  const AugmentationPlan plan = select_driving_videos(pool, config.criteria, config.per_source,
                                                      config.n_sources, config.seed);
  fs::create_directories(config.output_dir);
  const fs::path out_path = config.output_dir / "plan.json";
  std::ofstream out(out_path);
  out << dump_json(to_json(plan));
  out.close();
  if (!out) throw IoError("failed writing " + out_path.string());
  std::cerr << "wrote " << out_path.string() << "\n";
  std::cout << plan.qualifying_ids.size() << " qualifying driver(s), " << plan.pairings.size()
            << " pairing(s)\n";
  return 0;
}

int cmd_synth(const Common& common, std::optional<int> n_videos, const std::string& format) {
  RunConfig config = resolve_config(common);
  if (n_videos) config.synthetic.n_videos = *n_videos;
  config.validate();
  FrameFormat ff = FrameFormat::png16;
  if (format == "png8") ff = FrameFormat::png8;
  else if (format == "ppm8") ff = FrameFormat::ppm8;
  else if (format == "ppm16") ff = FrameFormat::ppm16;
  else if (format != "png16") throw ConfigError("unknown frame format '" + format + "'");
  const DatasetManifest m = write_synthetic_dataset(config, config.output_dir, ff);
  std::cout << "wrote " << m.entries.size() << " video(s) and "
            << (config.output_dir / "manifest.json").string() << "\n";
  return 0;
}

int cmd_report(const Common& common, const std::vector<std::string>& inputs, const std::string& format) {
  fs::path out_dir = common.output.empty() ? default_output_dir() : fs::path(common.output);
  std::vector<EvaluationReport> reports;
  for (const auto& in : inputs) {
    try {
      reports.push_back(evaluation_report_from_json(read_json_file(in)));
    } catch (const FormatError& e) {
      throw ConfigError(in + ": " + e.what());
    }
  }
  if (reports.size() == 1) {
    for (ReportFormat f : formats_for(format)) print_written(emit_report(reports[0], f, out_dir));
  } else if (format != "markdown" && format != "md") {
    // Several reports: one subdirectory per input.
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const fs::path sub = out_dir / (reports[i].dataset + "_" + reports[i].method);
      for (ReportFormat f : formats_for(format)) print_written(emit_report(reports[i], f, sub));
    }
  }
  const std::string table = markdown_table(reports);
  if (reports.size() > 1) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "table.md");
    out << table;
    if (!out) throw IoError("failed writing " + (out_dir / "table.md").string());
  }
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rPPG evaluation and motion-augmentation harness"};
  app.require_subcommand(1);

  Common common;
  std::string manifest_path, format = "all", frame_format = "png16";
  int trials = 100;
  std::vector<std::string> pool_csvs, inputs;
  std::vector<double> rigid, nonrigid;
  std::optional<int> per_source, n_sources, n_videos;
  double motion_fps = 30.0;

  auto* evaluate = app.add_subcommand("evaluate", "score a method on a dataset manifest");
  add_common(evaluate, common);
  evaluate->add_option("manifest", manifest_path, "dataset manifest (JSON)")->required();
  evaluate->add_option("-f,--format", format, "json | csv | markdown | plotdata | all");

  auto* preserve = app.add_subcommand("preserve", "run the seeded HR-preservation suite");
  add_common(preserve, common);
  preserve->add_option("-n,--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  preserve->add_option("-f,--format", format, "json | csv | markdown | plotdata | all");

  auto* select = app.add_subcommand("select-drivers", "choose driving videos from a motion pool");
  add_common(select, common);
  select->add_option("--pool", pool_csvs, "motion CSV files")->check(CLI::ExistingFile);
  select->add_option("--manifest", manifest_path, "take motion CSVs from a manifest");
  select->add_option("--rigid", rigid, "rigid MSD range LO HI (rad)")->expected(2);
  select->add_option("--nonrigid", nonrigid, "non-rigid MSD range LO HI")->expected(2);
  select->add_option("--per-source", per_source, "drivers per source video");
  select->add_option("--n-sources", n_sources, "number of source videos");
  select->add_option("--fps", motion_fps, "frame rate of the motion CSVs");

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic dataset");
  add_common(synth, common);
  synth->add_option("-n,--videos", n_videos, "number of videos");
  synth->add_option("--frame-format", frame_format, "png16 | png8 | ppm16 | ppm8");

  auto* report = app.add_subcommand("report", "re-emit saved evaluation reports");
  report->add_option("inputs", inputs, "report.json files")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", common.output, "output directory");
  report->add_option("-f,--format", format, "json | csv | markdown | plotdata | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(common, manifest_path, format);
    if (preserve->parsed()) return cmd_preserve(common, trials, format);
    if (select->parsed()) {
      return cmd_select(common, pool_csvs, manifest_path, rigid, nonrigid, per_source, n_sources,
                        motion_fps);
    }
    if (synth->parsed()) return cmd_synth(common, n_videos, frame_format);
    if (report->parsed()) return cmd_report(common, inputs, format);
  } catch (const RunError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& f : e.roster()) std::cerr << "  " << f.id << " [" << f.kind << "] " << f.message << "\n";
    return kExitRun;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
