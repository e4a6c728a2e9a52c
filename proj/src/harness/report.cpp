#include "rppg/harness/report.hpp"

#include "rppg/errors.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rppg::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

void finish(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string display_name(const std::string& method) {
  if (method == "green") return "Green";
  std::string up = method;
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return up;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "plotdata") return ReportFormat::plotdata;
  throw ConfigError("unknown report format '" + name + "' (expected json|csv|markdown|plotdata)");
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json to_json(const EvaluationReport& r) {
  json j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  if (r.eval_window_s) {
    j["eval_window"] = *r.eval_window_s;
  } else {
    j["eval_window"] = "whole";
  }
  j["mae"] = r.metrics.mae;
  j["rmse"] = r.metrics.rmse;
  j["mape"] = r.metrics.mape;
  j["pearson"] = r.metrics.pearson ? json(*r.metrics.pearson) : json(nullptr);
  j["n_videos"] = r.metrics.n_videos;
  json per = json::array();
  for (const auto& v : r.metrics.per_video) {
    per.push_back({{"id", v.id}, {"gt_bpm", v.gt_bpm}, {"pred_bpm", v.pred_bpm}, {"abs_err", v.abs_err}});
  }
  j["per_video"] = per;
  if (r.agreement) {
    json pts = json::array();
    for (const auto& p : r.agreement->points) pts.push_back(json::array({p.mean, p.diff}));
    j["bland_altman"] = {{"bias", r.agreement->bias},
                         {"loa_lo", r.agreement->loa_lo},
                         {"loa_hi", r.agreement->loa_hi},
                         {"points", pts}};
  } else {
    j["bland_altman"] = nullptr;
  }
  json fails = json::array();
  for (const auto& f : r.failures) {
    fails.push_back({{"id", f.id}, {"kind", f.kind}, {"message", f.message}});
  }
  j["failures"] = fails;
  return j;
}

EvaluationReport evaluation_report_from_json(const json& j) {
  try {
    EvaluationReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.method = j.at("method").get<std::string>();
    if (j.at("eval_window").is_number()) r.eval_window_s = j["eval_window"].get<double>();
    r.metrics.mae = j.at("mae").get<double>();
    r.metrics.rmse = j.at("rmse").get<double>();
    r.metrics.mape = j.at("mape").get<double>();
    if (!j.at("pearson").is_null()) r.metrics.pearson = j["pearson"].get<double>();
    r.metrics.n_videos = j.at("n_videos").get<std::size_t>();
    for (const auto& v : j.at("per_video")) {
      r.metrics.per_video.push_back({v.at("id").get<std::string>(), v.at("gt_bpm").get<double>(),
                                     v.at("pred_bpm").get<double>(), v.at("abs_err").get<double>()});
    }
    if (!j.at("bland_altman").is_null()) {
      const json& ba = j["bland_altman"];
      BlandAltman a;
      a.bias = ba.at("bias").get<double>();
      a.loa_lo = ba.at("loa_lo").get<double>();
      a.loa_hi = ba.at("loa_hi").get<double>();
      for (const auto& p : ba.at("points")) a.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      r.agreement = std::move(a);
    }
    for (const auto& f : j.at("failures")) {
      r.failures.push_back({f.at("id").get<std::string>(), f.at("kind").get<std::string>(),
                            f.at("message").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed evaluation report: ") + e.what());
  }
}

json to_json(const PreservationResult& result) {
  json trials = json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"seed", t.seed},
                      {"hr_bpm", t.hr_bpm},
                      {"noise_sigma", t.noise_sigma},
                      {"rigid_msd", t.rigid_msd},
                      {"preserved", t.verdict.preserved},
                      {"delta_bins", t.verdict.delta_bins},
                      {"f_src", t.verdict.f_src},
                      {"f_aug", t.verdict.f_aug}});
  }
  return {{"pass_rate", result.pass_rate}, {"n_trials", result.trials.size()}, {"trials", trials}};
}

json to_json(const AugmentationPlan& plan) {
  json pairings = json::array();
  for (const auto& p : plan.pairings) {
    pairings.push_back({{"source_index", p.source_index}, {"driving_ids", p.driving_ids}});
  }
  return {{"seed", plan.seed}, {"qualifying_ids", plan.qualifying_ids}, {"pairings", pairings}};
}

AugmentationPlan augmentation_plan_from_json(const json& j) {
  try {
    AugmentationPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.qualifying_ids = j.at("qualifying_ids").get<std::vector<std::string>>();
    for (const auto& p : j.at("pairings")) {
      plan.pairings.push_back({p.at("source_index").get<std::size_t>(),
                               p.at("driving_ids").get<std::vector<std::string>>()});
    }
    return plan;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed augmentation plan: ") + e.what());
  }
}

std::string markdown_table(const std::vector<EvaluationReport>& reports) {
  std::ostringstream md;
  md << "| Dataset | Method | MAE | RMSE | MAPE | \xCF\x81 |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    md << "| " << r.dataset << " | " << display_name(r.method) << " | " << fixed2(r.metrics.mae)
       << " | " << fixed2(r.metrics.rmse) << " | " << fixed2(r.metrics.mape) << " | "
       << (r.metrics.pearson ? fixed2(*r.metrics.pearson) : std::string("-")) << " |\n";
  }
  return md.str();
}

std::vector<fs::path> emit_report(const EvaluationReport& report, ReportFormat format,
                                  const fs::path& dir) {
  ensure_dir(dir);
  std::vector<fs::path> written;
  switch (format) {
    case ReportFormat::json: {
      const fs::path p = dir / "report.json";
      auto out = open_out(p);
      out << dump_json(to_json(report));
      finish(out, p);
      written.push_back(p);
      break;
    }
    case ReportFormat::csv: {
      const fs::path p = dir / "per_video.csv";
      auto out = open_out(p);
      out << "id,gt_bpm,pred_bpm,abs_err\n";
      for (const auto& v : report.metrics.per_video) {
        out << v.id << ',' << v.gt_bpm << ',' << v.pred_bpm << ',' << v.abs_err << '\n';
      }
      finish(out, p);
      written.push_back(p);
      break;
    }
    case ReportFormat::markdown: {
      const fs::path p = dir / "table.md";
      auto out = open_out(p);
      out << markdown_table({report});
      finish(out, p);
      written.push_back(p);
      break;
    }
    case ReportFormat::plotdata: {
      const fs::path scatter = dir / "scatter.csv";
      auto out = open_out(scatter);
      out << "gt,pred\n";
      for (const auto& v : report.metrics.per_video) out << v.gt_bpm << ',' << v.pred_bpm << '\n';
      finish(out, scatter);
      written.push_back(scatter);

      const fs::path ba = dir / "bland_altman.csv";
      auto out2 = open_out(ba);
      out2 << "mean,diff,bias,loa_lo,loa_hi\n";
      if (report.agreement) {
        const auto& a = *report.agreement;
        for (const auto& pt : a.points) {
          out2 << pt.mean << ',' << pt.diff << ',' << a.bias << ',' << a.loa_lo << ',' << a.loa_hi
               << '\n';
        }
      }
      finish(out2, ba);
      written.push_back(ba);
      break;
    }
  }
  return written;
}

std::vector<fs::path> emit_report(const PreservationResult& result, ReportFormat format,
                                  const fs::path& dir) {
  ensure_dir(dir);
  std::vector<fs::path> written;
  switch (format) {
    case ReportFormat::json: {
      const fs::path p = dir / "preservation.json";
      auto out = open_out(p);
      out << dump_json(to_json(result));
      finish(out, p);
      written.push_back(p);
      break;
    }
    case ReportFormat::csv: {
      const fs::path p = dir / "trials.csv";
      auto out = open_out(p);
      out << "trial,seed,hr_bpm,noise_sigma,rigid_msd,preserved,delta_bins,f_src,f_aug\n";
      for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const auto& t = result.trials[i];
        out << i << ',' << t.seed << ',' << t.hr_bpm << ',' << t.noise_sigma << ',' << t.rigid_msd
            << ',' << (t.verdict.preserved ? 1 : 0) << ',' << t.verdict.delta_bins << ','
            << t.verdict.f_src << ',' << t.verdict.f_aug << '\n';
      }
      finish(out, p);
      written.push_back(p);
      break;
    }
    case ReportFormat::markdown: {
      const fs::path p = dir / "preservation.md";
      auto out = open_out(p);
      std::size_t passed = 0;
      for (const auto& t : result.trials) passed += t.verdict.preserved ? 1 : 0;
      out << "| Trials | Preserved | Pass rate |\n|---|---|---|\n"
          << "| " << result.trials.size() << " | " << passed << " | "
          << fixed2(result.pass_rate) << " |\n";
      finish(out, p);
      written.push_back(p);
      break;
    }
    case ReportFormat::plotdata: {
      const std::pair<const char*, const std::optional<Spectrum>*> spectra[] = {
          {"spectrum_src.csv", &result.first_src_spectrum},
          {"spectrum_aug.csv", &result.first_aug_spectrum}};
      for (const auto& [name, spec] : spectra) {
        if (!*spec) continue;
        const fs::path p = dir / name;
        auto out = open_out(p);
        write_spectrum_csv(out, **spec);
        finish(out, p);
        written.push_back(p);
      }
      break;
    }
  }
  return written;
}

}  // namespace rppg::harness
