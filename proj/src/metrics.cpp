#include "rppg/metrics.hpp"

#include "rppg/errors.hpp"
#include "rppg/stats.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace rppg {

MetricsReport compute_metrics(const std::vector<HrPair>& pairs) {
  if (pairs.empty()) throw SampleError("metrics need at least one pair");
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::ArrayXd gt(n), pred(n);
  MetricsReport report;
  report.per_video.reserve(pairs.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const HrPair& p = pairs[static_cast<std::size_t>(i)];
    if (!(p.gt_bpm > 0.0)) throw LabelError("ground-truth HR must be positive (" + p.id + ")");
    gt(i) = p.gt_bpm;
    pred(i) = p.pred_bpm;
    report.per_video.push_back({p.id, p.gt_bpm, p.pred_bpm, std::abs(p.gt_bpm - p.pred_bpm)});
  }

  const Eigen::ArrayXd err = gt - pred;
  report.mae = err.abs().mean();
  report.rmse = std::sqrt(err.square().mean());
  report.mape = 100.0 * (err.abs() / gt).mean();
  report.n_videos = pairs.size();
  if (n >= 2) {
    const double r = stats::pearson(gt, pred);
    if (std::isfinite(r)) report.pearson = std::clamp(r, -1.0, 1.0);
  }
  return report;
}

BlandAltman bland_altman(const std::vector<HrPair>& pairs) {
  if (pairs.size() < 2) throw SampleError("Bland-Altman needs at least two pairs");
  BlandAltman ba;
  Eigen::ArrayXd diffs(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double d = pairs[i].pred_bpm - pairs[i].gt_bpm;
    ba.points.push_back({(pairs[i].gt_bpm + pairs[i].pred_bpm) / 2.0, d});
    diffs(static_cast<Eigen::Index>(i)) = d;
  }
  ba.bias = diffs.mean();
  const double spread = 1.96 * stats::sample_std(diffs);
  ba.loa_lo = ba.bias - spread;
  ba.loa_hi = ba.bias + spread;
  return ba;
}

}  // namespace rppg
