#include "rppg/ica.hpp"

#include "rppg/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rppg {

namespace {

// (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose() * w;
}

// Squared distance of E{log cosh y} from its value under N(0, 1).
double nongaussianity(const Eigen::ArrayXd& y) {
  constexpr double kGaussianLogCosh = 0.37456720749143813;
  const double d = (y.abs() + (1.0 + (-2.0 * y.abs()).exp()).log() - std::log(2.0)).mean() -
                   kGaussianLogCosh;
  return d * d;
}

// Saddle check: for every row pair, rotating by 45 degrees exchanges a saddle
// point of the contrast for a point on the ascent path. Applies the first
// rotation that clearly raises the pair's contrast and reports whether it did.
bool escape_saddle(Eigen::MatrixXd& w, const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd y = w * z;
  // Sampling noise of the squared contrast for Gaussian data is of order 1/n;
  // smaller gains inside a Gaussian subspace are not worth chasing.
  const double min_gain = 0.25 / static_cast<double>(z.cols());
  const double r = std::sqrt(0.5);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.rows(); ++j) {
      const Eigen::ArrayXd u = r * (y.row(i) + y.row(j)).array();
      const Eigen::ArrayXd v = r * (y.row(i) - y.row(j)).array();
      const double current = nongaussianity(y.row(i).array()) + nongaussianity(y.row(j).array());
      const double rotated = nongaussianity(u) + nongaussianity(v);
      if (rotated - current > min_gain) {
        const Eigen::RowVectorXd wi = w.row(i);
        w.row(i) = r * (wi + w.row(j));
        w.row(j) = r * (wi - w.row(j));
        return true;
      }
    }
  }
  return false;
}

}  // namespace

IcaResult fast_ica(const Eigen::MatrixXd& channels, int n_components, int max_iter, double tol) {
  const Eigen::Index c = channels.rows();
  const Eigen::Index n = channels.cols();
  if (n_components < 1 || n_components > c) {
    throw PreconditionError("n_components must lie in [1, channel count]");
  }
  if (n < 10 * n_components) throw PreconditionError("ICA needs at least 10 samples per component");
  if (max_iter < 1 || !(tol > 0.0)) throw PreconditionError("ICA needs max_iter >= 1 and tol > 0");

  Eigen::MatrixXd x = channels.colwise() - channels.rowwise().mean();
  bool any_varying = false;
  for (Eigen::Index i = 0; i < c; ++i) {
    const double scale = channels.row(i).cwiseAbs().maxCoeff();
    const double sd = std::sqrt(x.row(i).squaredNorm() / static_cast<double>(n - 1));
    if (sd <= 1e-12 * std::max(scale, 1.0)) {
      x.row(i).setZero();
    } else {
      x.row(i) /= sd;
      any_varying = true;
    }
  }
  if (!any_varying) throw DegenerateSignalError("all channels are constant; covariance has rank 0");

  const Eigen::MatrixXd cov = x * x.transpose() / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double lambda_max = lambda(c - 1);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < c; ++i) {
    if (lambda(i) > 1e-9 * lambda_max) ++rank;
  }
  if (rank == 0) throw DegenerateSignalError("covariance has rank 0");
  const Eigen::Index k = std::min<Eigen::Index>(n_components, rank);

  const Eigen::MatrixXd basis = eig.eigenvectors().rightCols(k);
  const Eigen::VectorXd scale = lambda.tail(k).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd whitening = scale.asDiagonal() * basis.transpose();
  const Eigen::MatrixXd z = whitening * x;

  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(k, k);
  const double inv_n = 1.0 / static_cast<double>(n);
  double change = 0.0;
  double mu = 1.0;
  Eigen::MatrixXd prev_delta;
  constexpr int kMaxSaddleChecks = 8;
  int saddle_checks = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::MatrixXd y = w * z;
    const Eigen::ArrayXXd g = y.array().tanh();
    const Eigen::ArrayXd g_prime_mean = (1.0 - g.square()).rowwise().mean();
    const Eigen::MatrixXd gy = g.matrix() * y.transpose() * inv_n;  // E{g(y) y^T}
    const Eigen::ArrayXd beta = -gy.diagonal().array();
    const Eigen::ArrayXd alpha = -1.0 / (beta - g_prime_mean);
    Eigen::MatrixXd step = gy;
    step.diagonal().array() += beta;
    Eigen::MatrixXd w_next = w + mu * alpha.matrix().asDiagonal() * step * w;
    w_next = symmetric_decorrelation(w_next);

    change = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      change = std::max(change, 1.0 - std::abs(w_next.row(i).dot(w.row(i))));
    }
    Eigen::MatrixXd delta = w_next - w;
    w = std::move(w_next);
    // A damped step moves the rows by about mu times the full step, so the
    // threshold shrinks with mu squared.
    if (change < tol * mu * mu) {
      if (saddle_checks < kMaxSaddleChecks && escape_saddle(w, z)) {
        ++saddle_checks;
        mu = 1.0;
        prev_delta.resize(0, 0);
        continue;
      }
      IcaResult result;
      result.unmixing = w * whitening;
      result.sources = w * z;
      result.iterations = iter;
      result.last_change = change;
      return result;
    }
    // Consecutive updates pointing against each other mean the iteration is
    // bouncing across the optimum: shorten the step. Aligned updates (including
    // a slow drift away from a saddle) regrow it.
    if (prev_delta.size() != 0 && (delta.array() * prev_delta.array()).sum() < 0.0) {
      mu = std::max(mu * 0.5, 1.0 / 64.0);
    } else {
      mu = std::min(mu * 2.0, 1.0);
    }
    prev_delta = std::move(delta);
  }
  throw ConvergenceError("ICA did not converge in " + std::to_string(max_iter) +
                             " iterations (last change " + std::to_string(change) + ")",
                         max_iter, change);
}

}  // namespace rppg
