#include "rppg/methods.hpp"

#include "rppg/errors.hpp"
#include "rppg/ica.hpp"
#include "rppg/signal.hpp"
#include "rppg/stats.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rppg {

namespace {

// Normalised channel spreads below this are treated as zero variance.
constexpr double kZeroSpread = 1e-12;

Index window_samples(double window_s, double fps) {
  return static_cast<Index>(std::ceil(window_s * fps - 1e-9));
}

void flag(MethodDiagnostics* diag, Index start) {
  if (diag) diag->flagged_windows.push_back(start);
}

// Window means, or false when any channel mean is too close to zero to divide.
bool window_means(const RgbTrace& trace, Index start, Index len, double (&mu)[3]) {
  for (int c = 0; c < 3; ++c) {
    const auto seg = trace.channel(c).segment(start, len);
    mu[c] = seg.mean();
    if (mu[c] == 0.0 || std::abs(mu[c]) <= 1e-12 * seg.cwiseAbs().maxCoeff()) return false;
  }
  return true;
}

PpgWaveform detrended_green(const RgbTrace& trace, double window_s) {
  const PpgWaveform green(trace.g(), trace.fps(), WaveKind::extracted);
  Eigen::VectorXd y = detrend(green, window_s).samples();
  y.array() -= y.mean();
  return PpgWaveform(std::move(y), trace.fps(), WaveKind::extracted);
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "green") return Method::green;
  if (name == "ica") return Method::ica;
  if (name == "chrom") return Method::chrom;
  if (name == "pos") return Method::pos;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected green|ica|chrom|pos)");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::green: return "green";
    case Method::ica: return "ica";
    case Method::chrom: return "chrom";
    case Method::pos: return "pos";
  }
  return "pos";
}

PpgWaveform green_method(const RgbTrace& trace, MethodDiagnostics* /*diag*/) {
  return detrended_green(trace, 1.0);
}

PpgWaveform chrom_method(const RgbTrace& trace, double window_s, MethodDiagnostics* diag) {
  Index len = window_samples(window_s, trace.fps());
  if (len < 16) throw WindowError("CHROM window must span at least 16 samples");
  if (len % 2 != 0) ++len;
  const Index n = trace.size();
  if (len > n) throw WindowError("CHROM window longer than trace");
  const Index hop = len / 2;

  Eigen::ArrayXd hann(len);
  for (Index i = 0; i < len; ++i) {
    hann(i) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(len));
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index start = 0; start + len <= n; start += hop) {
    double mu[3];
    if (!window_means(trace, start, len, mu)) {
      flag(diag, start);
      continue;
    }
    const Eigen::ArrayXd rn = trace.r().segment(start, len).array() / mu[0] - 1.0;
    const Eigen::ArrayXd gn = trace.g().segment(start, len).array() / mu[1] - 1.0;
    const Eigen::ArrayXd bn = trace.b().segment(start, len).array() / mu[2] - 1.0;
    const Eigen::ArrayXd x = 3.0 * rn - 2.0 * gn;
    const Eigen::ArrayXd y = 1.5 * rn + gn - 1.5 * bn;
    const double sy = stats::population_std(y);
    if (sy < kZeroSpread) {
      flag(diag, start);
      continue;
    }
    const double alpha = stats::population_std(x) / sy;
    Eigen::ArrayXd s = x - alpha * y;
    s -= s.mean();
    out.segment(start, len).array() += s * hann;
  }
  return PpgWaveform(std::move(out), trace.fps(), WaveKind::extracted);
}

PpgWaveform pos_method(const RgbTrace& trace, double window_s, MethodDiagnostics* diag) {
  const Index len = window_samples(window_s, trace.fps());
  if (len < 3) throw WindowError("POS window must span at least 3 samples");
  const Index n = trace.size();
  if (len > n) throw WindowError("POS window longer than trace");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index start = 0; start + len <= n; ++start) {
    double mu[3];
    if (!window_means(trace, start, len, mu)) {
      flag(diag, start);
      continue;
    }
    const Eigen::ArrayXd rn = trace.r().segment(start, len).array() / mu[0];
    const Eigen::ArrayXd gn = trace.g().segment(start, len).array() / mu[1];
    const Eigen::ArrayXd bn = trace.b().segment(start, len).array() / mu[2];
    const Eigen::ArrayXd s1 = gn - bn;
    const Eigen::ArrayXd s2 = gn + bn - 2.0 * rn;
    const double sd2 = stats::population_std(s2);
    if (sd2 < kZeroSpread) {
      flag(diag, start);
      continue;
    }
    Eigen::ArrayXd h = s1 + (stats::population_std(s1) / sd2) * s2;
    h -= h.mean();
    out.segment(start, len).array() += h;
  }
  return PpgWaveform(std::move(out), trace.fps(), WaveKind::extracted);
}

PpgWaveform ica_method(const RgbTrace& trace, int n_components, int max_iter, double tol,
                       MethodDiagnostics* diag, Band band) {
  Eigen::MatrixXd channels(3, trace.size());
  channels.row(0) = trace.r().transpose();
  channels.row(1) = trace.g().transpose();
  channels.row(2) = trace.b().transpose();
  const IcaResult ica = fast_ica(channels, n_components, max_iter, tol);
  if (diag) {
    diag->ica_iterations = ica.iterations;
    if (ica.sources.rows() < n_components) {
      diag->notes.push_back("trace rank " + std::to_string(ica.sources.rows()) +
                            " below requested component count");
    }
  }

  const Index pad = next_pow2(trace.size());
  Index best = 0;
  double best_power = -1.0;
  for (Index i = 0; i < ica.sources.rows(); ++i) {
    const PpgWaveform comp(ica.sources.row(i).transpose(), trace.fps());
    const Spectrum spec = power_spectrum(comp, pad);
    const double p = spec.power(spec.argmax_in_band(band));
    if (p > best_power) {
      best_power = p;
      best = i;
    }
  }

  Eigen::VectorXd selected = ica.sources.row(best).transpose();
  const PpgWaveform filtered = bandpass(PpgWaveform(selected, trace.fps()), band);
  const Index m = filtered.size();
  const Eigen::VectorXd slope = filtered.samples().tail(m - 1) - filtered.samples().head(m - 1);
  if (-slope.minCoeff() > slope.maxCoeff()) selected = -selected;
  return PpgWaveform(std::move(selected), trace.fps(), WaveKind::extracted);
}

PpgWaveform run_method(Method method, const RgbTrace& trace, const MethodOptions& options,
                       MethodDiagnostics* diag) {
  switch (method) {
    case Method::green: return detrended_green(trace, options.detrend_window_s);
    case Method::chrom: return chrom_method(trace, options.chrom_window_s, diag);
    case Method::pos: return pos_method(trace, options.pos_window_s, diag);
    case Method::ica:
      return ica_method(trace, options.ica_components, options.ica_max_iter, options.ica_tol, diag,
                        options.band);
  }
  throw ConfigError("unknown method");
}

}  // namespace rppg
