#pragma once

#include "rppg/types.hpp"

#include <algorithm>

namespace rppg {

/// Spatial mean of each channel over the frame's region (full frame when no
/// region is attached). Accumulates in double precision.
RgbTrace extract_rgb_trace(const FrameSequence& video);

/// C / mean(C) - 1 per channel. Throws DegenerateSignalError when a channel's
/// temporal mean is zero (or too close to it to divide safely).
RgbTrace normalize_trace(const RgbTrace& trace);

/// Subtracts a centred moving average of `cutoff_window_s` seconds.
///
/// The window spans an odd number of samples (round(window * fs), bumped to
/// the next odd count) and is truncated at the signal ends, so the first and
/// last half-window samples are edge samples with weaker detrending.
PpgWaveform detrend(const PpgWaveform& wave, double cutoff_window_s);

/// Forward difference scaled by the sample standard deviation of the
/// differences. Output has one sample fewer and kind == derivative.
PpgWaveform first_derivative_label(const PpgWaveform& wave);

/// Integer decimation when fps / target_fps is integral, linear interpolation
/// onto the target grid otherwise. Upsampling by more than 8x is refused.
RgbTrace resample_trace(const RgbTrace& trace, double target_fps);

/// Linear interpolation of (t, v) samples onto t0 + i / fs for i in [0, n).
/// Points outside the sampled span take the nearest end value.
Eigen::VectorXd interpolate_linear(const Eigen::VectorXd& t, const Eigen::VectorXd& v,
                                   double t0, double fs, Index n);

/// Centred moving average with truncated windows; `half` samples each side.
template <typename Derived>
Eigen::VectorXd moving_average(const Eigen::MatrixBase<Derived>& x, Index half) {
  const Index n = x.size();
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - half);
    const Index hi = std::min<Index>(n - 1, i + half);
    out(i) = x.segment(lo, hi - lo + 1).mean();
  }
  return out;
}

}  // namespace rppg
