#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace rppg {

/// Direct-form II transposed second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Cascade of second-order sections.
struct SosFilter {
  std::vector<Biquad> sections;

  std::complex<double> response(double freq_hz, double fs) const;
  double max_pole_radius() const;
};

/// Digital Butterworth band-pass from an analog prototype of the given order
/// (2 * order poles), bilinear transform with pre-warped band edges. Unit gain
/// at the warped geometric centre frequency.
SosFilter butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs);

/// Samples until the slowest pole decays below `tol`.
Eigen::Index settling_length(const SosFilter& filter, double tol = 1e-3);

/// Single forward pass. When `steady_state` is set, each section starts from
/// the state it would hold after an infinitely long input equal to x(0).
Eigen::VectorXd sosfilt(const SosFilter& filter, const Eigen::VectorXd& x,
                        bool steady_state = false);

/// Forward-backward filtering with odd-reflection padding of `padlen` samples
/// at each end (clamped to n - 1). Zero phase; squared magnitude response.
Eigen::VectorXd filtfilt(const SosFilter& filter, const Eigen::VectorXd& x, Eigen::Index padlen);

}  // namespace rppg
