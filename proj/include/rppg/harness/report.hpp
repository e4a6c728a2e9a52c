#pragma once

#include "rppg/harness/evaluation.hpp"
#include "rppg/harness/preservation.hpp"
#include "rppg/motion.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rppg::harness {

enum class ReportFormat { json, csv, markdown, plotdata };

ReportFormat parse_report_format(const std::string& name);

nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport evaluation_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PreservationResult& result);
nlohmann::json to_json(const AugmentationPlan& plan);
AugmentationPlan augmentation_plan_from_json(const nlohmann::json& j);

/// Markdown table (header + one row) in the column order
/// MAE | RMSE | MAPE | rho, two decimals.
std::string markdown_table(const std::vector<EvaluationReport>& reports);

/// Writes the report under `dir` and returns the files written.
///   json      report.json
///   csv       per_video.csv
///   markdown  table.md
///   plotdata  scatter.csv (gt,pred) and bland_altman.csv
///             (mean,diff,bias,loa_lo,loa_hi)
/// Throws IoError when the directory cannot be written.
std::vector<std::filesystem::path> emit_report(const EvaluationReport& report, ReportFormat format,
                                               const std::filesystem::path& dir);

///   json      preservation.json
///   csv       trials.csv
///   markdown  preservation.md
///   plotdata  spectrum_src.csv and spectrum_aug.csv of the first trial
std::vector<std::filesystem::path> emit_report(const PreservationResult& result,
                                               ReportFormat format,
                                               const std::filesystem::path& dir);

/// Serialised JSON text exactly as emit_report writes it.
std::string dump_json(const nlohmann::json& j);

}  // namespace rppg::harness
