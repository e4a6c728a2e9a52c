#include "rppg/harness/evaluation.hpp"

#include "rppg/frame_io.hpp"
#include "rppg/harness/parallel.hpp"
#include "rppg/signal.hpp"

#include <algorithm>
#include <exception>

namespace rppg::harness {

std::vector<HrPair> evaluate_video(const ManifestEntry& entry, const DatasetManifest& manifest,
                                   const RunConfig& config) {
  const FrameSequence video = load_frame_directory(entry.frames_dir, manifest.fps_override);
  const RgbTrace trace = extract_rgb_trace(video);
  const PpgWaveform predicted = run_method(config.method, trace, config.method_options);

  const GoldSeries gold_series = load_gold_csv(entry.gold_csv);
  const PpgWaveform gold = resample_gold(gold_series, video.fps(), trace.size());

  const HrEstimate pred_hr = estimate_hr(predicted, manifest.eval_window_s, config.band);
  const HrEstimate gold_hr = estimate_hr(gold, manifest.eval_window_s, config.band);

  const std::size_t n = std::min(pred_hr.bpm_per_window.size(), gold_hr.bpm_per_window.size());
  std::vector<HrPair> pairs;
  for (std::size_t k = 0; k < n; ++k) {
    HrPair p;
    p.id = manifest.eval_window_s ? entry.id + "#" + std::to_string(k) : entry.id;
    p.gt_bpm = gold_hr.bpm_per_window[k];
    p.pred_bpm = pred_hr.bpm_per_window[k];
    pairs.push_back(std::move(p));
  }
  return pairs;
}

EvaluationReport run_evaluation(const DatasetManifest& manifest, const RunConfig& config) {
  struct Outcome {
    std::vector<HrPair> pairs;
    std::optional<VideoFailure> failure;
  };
  std::vector<Outcome> outcomes(manifest.entries.size());

  parallel_for(manifest.entries.size(), config.workers, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    try {
      outcomes[i].pairs = evaluate_video(entry, manifest, config);
      if (outcomes[i].pairs.empty()) {
        outcomes[i].failure = VideoFailure{entry.id, "WindowError", "no HR windows"};
      }
    } catch (const Error& e) {
      outcomes[i].failure = VideoFailure{entry.id, e.kind(), e.what()};
    } catch (const std::exception& e) {
      outcomes[i].failure = VideoFailure{entry.id, "Exception", e.what()};
    }
  });

  std::vector<std::size_t> order(manifest.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return manifest.entries[a].id < manifest.entries[b].id;
  });

  EvaluationReport report;
  report.dataset = manifest.name;
  report.method = std::string(to_string(config.method));
  report.eval_window_s = manifest.eval_window_s;
  std::vector<HrPair> pairs;
  for (std::size_t i : order) {
    auto& o = outcomes[i];
    if (o.failure) {
      report.failures.push_back(*o.failure);
    } else {
      pairs.insert(pairs.end(), o.pairs.begin(), o.pairs.end());
    }
  }

  const double failed = static_cast<double>(report.failures.size());
  if (failed > 0.2 * static_cast<double>(manifest.entries.size()) || pairs.empty()) {
    throw RunError(std::to_string(report.failures.size()) + " of " +
                       std::to_string(manifest.entries.size()) + " videos failed",
                   report.failures);
  }
  report.metrics = compute_metrics(pairs);
  if (pairs.size() >= 2) report.agreement = bland_altman(pairs);
  return report;
}

}  // namespace rppg::harness
