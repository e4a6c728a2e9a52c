#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rppg {

/// One heart-rate comparison. `id` names the video (or video window).
struct HrPair {
  std::string id;
  double gt_bpm = 0.0;
  double pred_bpm = 0.0;
};

struct VideoError {
  std::string id;
  double gt_bpm = 0.0;
  double pred_bpm = 0.0;
  double abs_err = 0.0;

  bool operator==(const VideoError&) const = default;
};

struct MetricsReport {
  double mae = 0.0;    // beats/min
  double rmse = 0.0;   // beats/min
  double mape = 0.0;   // percent
  std::optional<double> pearson;  // empty when undefined
  std::size_t n_videos = 0;
  std::vector<VideoError> per_video;

  bool operator==(const MetricsReport&) const = default;
};

/// MAE, RMSE, MAPE (ground truth in the denominator) and Pearson r.
///
/// Pearson is left empty for fewer than two pairs or when either series has
/// zero variance. Throws LabelError for gt_bpm <= 0 and SampleError for an
/// empty input.
MetricsReport compute_metrics(const std::vector<HrPair>& pairs);

struct BlandAltmanPoint {
  double mean = 0.0;
  double diff = 0.0;  // pred - gt

  bool operator==(const BlandAltmanPoint&) const = default;
};

struct BlandAltman {
  std::vector<BlandAltmanPoint> points;
  double bias = 0.0;
  double loa_lo = 0.0;
  double loa_hi = 0.0;

  bool operator==(const BlandAltman&) const = default;
};

/// Limits of agreement use the sample (n - 1) standard deviation of the
/// differences. Throws SampleError below two pairs.
BlandAltman bland_altman(const std::vector<HrPair>& pairs);

}  // namespace rppg
