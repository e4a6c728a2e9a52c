#pragma once

#include "rppg/errors.hpp"
#include "rppg/harness/config.hpp"
#include "rppg/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rppg::harness {

struct VideoFailure {
  std::string id;
  std::string kind;
  std::string message;

  bool operator==(const VideoFailure&) const = default;
};

/// Too many videos failed; carries the roster.
class RunError : public Error {
 public:
  RunError(const std::string& what, std::vector<VideoFailure> roster)
      : Error(what), roster_(std::move(roster)) {}
  const char* kind() const noexcept override { return "RunError"; }
  const std::vector<VideoFailure>& roster() const { return roster_; }

 private:
  std::vector<VideoFailure> roster_;
};

struct EvaluationReport {
  std::string dataset;
  std::string method;
  std::optional<double> eval_window_s;
  MetricsReport metrics;
  std::optional<BlandAltman> agreement;
  std::vector<VideoFailure> failures;

  bool operator==(const EvaluationReport&) const = default;
};

/// Evaluates one method over a manifest.
///
/// Per video: frames -> RGB trace -> method -> windowed HR. The gold waveform
/// is interpolated onto the frame clock and passed through the same HR
/// estimator. Pairs are keyed `id` (whole-video window) or `id#k`. Failing
/// videos go to the roster; more than 20% failures raise RunError. Output is
/// sorted by id, so it does not depend on the worker count.
EvaluationReport run_evaluation(const DatasetManifest& manifest, const RunConfig& config);

/// HR pairs for a single video (exposed for tests and tools).
std::vector<HrPair> evaluate_video(const ManifestEntry& entry, const DatasetManifest& manifest,
                                   const RunConfig& config);

}  // namespace rppg::harness
