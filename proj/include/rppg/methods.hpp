#pragma once

#include "rppg/spectrum.hpp"
#include "rppg/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rppg {

enum class Method { green, ica, chrom, pos };

/// Accepts the canonical names "green", "ica", "chrom", "pos".
Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// Windows that were zeroed or skipped by a degeneracy guard, by start index.
struct MethodDiagnostics {
  std::vector<Index> flagged_windows;
  std::vector<std::string> notes;
  int ica_iterations = 0;
};

struct MethodOptions {
  double detrend_window_s = 1.0;
  double chrom_window_s = 1.6;
  double pos_window_s = 1.6;
  int ica_components = 3;
  int ica_max_iter = 1000;
  double ica_tol = 1e-6;
  /// Band used by ICA component selection.
  Band band;
};

/// Green channel minus a 1 s centred moving average, then mean-centred.
PpgWaveform green_method(const RgbTrace& trace, MethodDiagnostics* diag = nullptr);

/// Chrominance method: X = 3Rn - 2Gn, Y = 1.5Rn + Gn - 1.5Bn per window of
/// mean-normalised channels, s = X - (sd X / sd Y) Y, Hann-weighted and
/// overlap-added at 50% hop.
PpgWaveform chrom_method(const RgbTrace& trace, double window_s = 1.6,
                         MethodDiagnostics* diag = nullptr);

/// Plane-orthogonal-to-skin: per sliding window (stride 1) of channels divided
/// by their window means, S1 = Gn - Bn, S2 = Gn + Bn - 2Rn,
/// h = S1 + (sd S1 / sd S2) S2, mean-centred and overlap-added.
PpgWaveform pos_method(const RgbTrace& trace, double window_s = 1.6,
                       MethodDiagnostics* diag = nullptr);

/// ICA over the three channels; returns the component with the largest
/// in-band spectral peak, signed so its steepest band-passed slope is rising.
PpgWaveform ica_method(const RgbTrace& trace, int n_components = 3, int max_iter = 1000,
                       double tol = 1e-6, MethodDiagnostics* diag = nullptr, Band band = {});

PpgWaveform run_method(Method method, const RgbTrace& trace, const MethodOptions& options = {},
                       MethodDiagnostics* diag = nullptr);

}  // namespace rppg
