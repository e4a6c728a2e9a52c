#pragma once

#include <Eigen/Core>

namespace rppg {

struct IcaResult {
  /// components x samples, each row zero mean and unit variance.
  Eigen::MatrixXd sources;
  /// components x channels; applies to the standardised channels.
  Eigen::MatrixXd unmixing;
  int iterations = 0;
  double last_change = 0.0;
};

/// Fixed-point ICA (tanh contrast, symmetric decorrelation) over the rows of
/// `channels` (channels x samples). Each sweep is the Newton form of the
/// fixed-point update; its step is halved (down to 1/64) when consecutive
/// updates point in opposite directions and doubled back towards 1 otherwise,
/// which stops the oscillation near-Gaussian directions otherwise cause.
/// On convergence each row pair is tested for a saddle point by a 45 degree
/// rotation; if that raises the log-cosh contrast the iteration resumes from
/// the rotated pair (at most 8 times).
///
/// Rows are standardised, then whitened with the eigendecomposition of their
/// covariance. Whitening keeps min(n_components, numerical rank) directions,
/// so perfectly correlated channels collapse instead of dividing by zero.
/// The rotation starts at the identity, which makes the result a pure function
/// of the input. Converged when max_i (1 - |<w_i, w_i_prev>|) < tol * mu^2.
///
/// Throws DegenerateSignalError when no channel varies and ConvergenceError
/// after max_iter sweeps.
IcaResult fast_ica(const Eigen::MatrixXd& channels, int n_components, int max_iter, double tol);

}  // namespace rppg
