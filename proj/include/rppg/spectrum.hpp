#pragma once

#include "rppg/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <ostream>
#include <vector>

namespace rppg {

/// Heart-rate band in Hz. Defaults cover 45-150 beats/min.
struct Band {
  double lo = 0.75;
  double hi = 2.5;
};

/// Prototype order of the band-pass used for HR work; forward-backward
/// application squares its magnitude response.
inline constexpr int kBandpassOrder = 2;

/// Zero-phase Butterworth band-pass with odd-reflection edge padding of one
/// settling length. The residual mean is removed from the output.
PpgWaveform bandpass(const PpgWaveform& wave, double lo = 0.75, double hi = 2.5);
inline PpgWaveform bandpass(const PpgWaveform& wave, Band band) {
  return bandpass(wave, band.lo, band.hi);
}

/// One-sided energy spectrum on a uniform grid.
struct Spectrum {
  Eigen::VectorXd freqs;
  Eigen::VectorXd power;
  double resolution = 0.0;

  /// Index of the largest bin with lo <= f <= hi. Throws BandError when no
  /// bin falls in the band.
  Index argmax_in_band(Band band) const;
};

/// Hann-windowed, zero-padded |FFT|^2 over non-negative frequencies.
///
/// Power is scaled by 1 / zero_pad_to and doubled for bins that stand in for
/// their negative-frequency twin, so power.sum() equals the energy of the
/// windowed signal.
Spectrum power_spectrum(const PpgWaveform& wave, Index zero_pad_to);

/// Smallest power of two >= n.
Index next_pow2(Index n);

struct HrEstimate {
  std::vector<double> bpm_per_window;
  double window_s = 0.0;
  Band band;
};

/// Windowed FFT heart rate. `window_s` empty means one window over the whole
/// signal. Windows do not overlap; a trailing partial window is kept only
/// when it holds at least half a window.
HrEstimate estimate_hr(const PpgWaveform& wave, std::optional<double> window_s = std::nullopt,
                       Band band = {});

struct PreservationVerdict {
  bool preserved = false;
  Index delta_bins = 0;
  double f_src = 0.0;
  double f_aug = 0.0;
};

/// Compares the in-band dominant frequency of two waves on a common grid.
PreservationVerdict check_preservation(const PpgWaveform& src, const PpgWaveform& aug,
                                       Band band = {});

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
void write_hr_csv(std::ostream& out, const HrEstimate& estimate);

}  // namespace rppg
