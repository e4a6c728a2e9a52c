#include "rppg/filter.hpp"

#include "rppg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rppg {

using Complex = std::complex<double>;

std::complex<double> SosFilter::response(double freq_hz, double fs) const {
  const Complex z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs);
  const Complex z2 = z1 * z1;
  Complex h(1.0, 0.0);
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

double SosFilter::max_pole_radius() const {
  double r = 0.0;
  for (const auto& s : sections) {
    // z^2 + a1 z + a2
    const Complex disc = std::sqrt(Complex(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    r = std::max({r, std::abs((-s.a1 + disc) / 2.0), std::abs((-s.a1 - disc) / 2.0)});
  }
  return r;
}

SosFilter butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs) {
  if (order < 1) throw PreconditionError("filter order must be >= 1");
  if (!(lo_hz > 0.0) || !(hi_hz > lo_hz)) throw BandError("band edges must satisfy 0 < lo < hi");
  if (!(hi_hz < fs / 2.0)) throw BandError("upper band edge must lie below Nyquist");

  const double pi = std::numbers::pi;
  const double k2 = 2.0 * fs;
  const double wl = k2 * std::tan(pi * lo_hz / fs);
  const double wh = k2 * std::tan(pi * hi_hz / fs);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  std::vector<Complex> upper;
  for (int k = 0; k < order; ++k) {
    const Complex p = std::polar(1.0, pi * (2.0 * k + order + 1.0) / (2.0 * order));
    const Complex half = p * bw / 2.0;
    const Complex disc = std::sqrt(half * half - w0sq);
    for (const Complex s : {half + disc, half - disc}) {
      const Complex z = (k2 + s) / (k2 - s);
      if (z.imag() > 0.0) upper.push_back(z);
    }
  }
  if (static_cast<int>(upper.size()) != order) {
    throw BandError("band too wide for conjugate-pair section layout");
  }

  SosFilter filter;
  for (const Complex& z : upper) {
    Biquad s;
    // zeros at z = 1 and z = -1
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    filter.sections.push_back(s);
  }

  const double f_center = fs / pi * std::atan(std::sqrt(w0sq) / k2);
  const double gain = std::abs(filter.response(f_center, fs));
  auto& first = filter.sections.front();
  first.b0 /= gain;
  first.b1 /= gain;
  first.b2 /= gain;
  return filter;
}

Eigen::Index settling_length(const SosFilter& filter, double tol) {
  const double r = filter.max_pole_radius();
  if (r <= 0.0) return 1;
  if (r >= 1.0) throw BandError("unstable filter");
  return static_cast<Eigen::Index>(std::ceil(std::log(tol) / std::log(r)));
}

namespace {

struct SectionState {
  double z0 = 0.0, z1 = 0.0;
};

}  // namespace

Eigen::VectorXd sosfilt(const SosFilter& filter, const Eigen::VectorXd& x, bool steady_state) {
  std::vector<SectionState> state(filter.sections.size());
  if (steady_state && x.size() > 0) {
    double level = x(0);
    for (std::size_t k = 0; k < filter.sections.size(); ++k) {
      const Biquad& s = filter.sections[k];
      const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
      const double y = dc * level;
      state[k].z1 = s.b2 * level - s.a2 * y;
      state[k].z0 = s.b1 * level - s.a1 * y + state[k].z1;
      level = y;
    }
  }

  Eigen::VectorXd y = x;
  for (std::size_t k = 0; k < filter.sections.size(); ++k) {
    const Biquad& s = filter.sections[k];
    double z0 = state[k].z0, z1 = state[k].z1;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double in = y(i);
      const double out = s.b0 * in + z0;
      z0 = s.b1 * in - s.a1 * out + z1;
      z1 = s.b2 * in - s.a2 * out;
      y(i) = out;
    }
  }
  return y;
}

Eigen::VectorXd filtfilt(const SosFilter& filter, const Eigen::VectorXd& x, Eigen::Index padlen) {
  const Eigen::Index n = x.size();
  if (n < 2) throw PreconditionError("filtfilt needs at least 2 samples");
  const Eigen::Index pad = std::clamp<Eigen::Index>(padlen, 0, n - 1);

  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index i = 0; i < pad; ++i) {
    ext(i) = 2.0 * x(0) - x(pad - i);
    ext(n + pad + i) = 2.0 * x(n - 1) - x(n - 2 - i);
  }
  ext.segment(pad, n) = x;

  Eigen::VectorXd fwd = sosfilt(filter, ext, true);
  Eigen::VectorXd rev = fwd.reverse();
  Eigen::VectorXd back = sosfilt(filter, rev, true);
  return back.reverse().segment(pad, n);
}

}  // namespace rppg
