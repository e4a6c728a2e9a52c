#include "rppg/spectrum.hpp"

#include "rppg/errors.hpp"
#include "rppg/filter.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>

namespace rppg {

PpgWaveform bandpass(const PpgWaveform& wave, double lo, double hi) {
  const double fs = wave.fs();
  if (!(lo > 0.0) || !(hi > lo)) throw BandError("band edges must satisfy 0 < lo < hi");
  if (!(hi < fs / 2.0)) throw BandError("upper band edge must lie below Nyquist");
  const SosFilter filter = butterworth_bandpass(kBandpassOrder, lo, hi, fs);
  Eigen::VectorXd y = filtfilt(filter, wave.samples(), settling_length(filter));
  y.array() -= y.mean();
  return PpgWaveform(std::move(y), fs, wave.kind());
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

Index Spectrum::argmax_in_band(Band band) const {
  Index best = -1;
  for (Index k = 0; k < freqs.size(); ++k) {
    if (freqs(k) < band.lo || freqs(k) > band.hi) continue;
    if (best < 0 || power(k) > power(best)) best = k;
  }
  if (best < 0) throw BandError("no spectral bin inside the band");
  return best;
}

Spectrum power_spectrum(const PpgWaveform& wave, Index zero_pad_to) {
  const Index n = wave.size();
  if (zero_pad_to < n || next_pow2(zero_pad_to) != zero_pad_to) {
    throw PreconditionError("zero_pad_to must be a power of two >= signal length");
  }
  std::vector<double> buf(static_cast<std::size_t>(zero_pad_to), 0.0);
  const double denom = static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
    buf[static_cast<std::size_t>(i)] = w * wave.samples()(i);
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> bins;
  fft.fwd(bins, buf);

  const Index half = zero_pad_to / 2;
  Spectrum s;
  s.freqs.resize(half + 1);
  s.power.resize(half + 1);
  s.resolution = wave.fs() / static_cast<double>(zero_pad_to);
  const double scale = 1.0 / static_cast<double>(zero_pad_to);
  for (Index k = 0; k <= half; ++k) {
    s.freqs(k) = static_cast<double>(k) * s.resolution;
    const double p = std::norm(bins[static_cast<std::size_t>(k)]) * scale;
    s.power(k) = (k == 0 || k == half) ? p : 2.0 * p;
  }
  return s;
}

namespace {

double peak_frequency(const PpgWaveform& chunk, Band band) {
  const PpgWaveform filtered = bandpass(chunk, band);
  const Spectrum spec = power_spectrum(filtered, next_pow2(8 * filtered.size()));
  return spec.freqs(spec.argmax_in_band(band));
}

}  // namespace

HrEstimate estimate_hr(const PpgWaveform& wave, std::optional<double> window_s, Band band) {
  const double fs = wave.fs();
  const Index n = wave.size();
  Index len = n;
  if (window_s) {
    if (!(*window_s > 0.0)) throw WindowError("window must be positive");
    len = static_cast<Index>(std::llround(*window_s * fs));
  }
  if (static_cast<double>(len) < 2.0 * fs) throw WindowError("HR window shorter than 2 s");

  HrEstimate est;
  est.window_s = static_cast<double>(len) / fs;
  est.band = band;
  for (Index start = 0; start < n; start += len) {
    const Index count = std::min(len, n - start);
    if (count < len && 2 * count < len) break;
    const PpgWaveform chunk(wave.samples().segment(start, count), fs, wave.kind());
    est.bpm_per_window.push_back(60.0 * peak_frequency(chunk, band));
  }
  if (est.bpm_per_window.empty()) throw WindowError("signal shorter than half an HR window");
  return est;
}

PreservationVerdict check_preservation(const PpgWaveform& src, const PpgWaveform& aug, Band band) {
  if (src.fs() != aug.fs()) throw FormatError("source and augmented waves differ in sampling rate");
  const Index longer = std::max(src.size(), aug.size());
  const Index shorter = std::min(src.size(), aug.size());
  if (static_cast<double>(longer - shorter) > 0.01 * static_cast<double>(longer)) {
    throw FormatError("source and augmented lengths differ by more than 1%");
  }
  const PpgWaveform a = bandpass(src.head(shorter), band);
  const PpgWaveform b = bandpass(aug.head(shorter), band);
  const Index pad = next_pow2(8 * shorter);
  const Spectrum sa = power_spectrum(a, pad);
  const Spectrum sb = power_spectrum(b, pad);
  const Index ia = sa.argmax_in_band(band);
  const Index ib = sb.argmax_in_band(band);

  PreservationVerdict v;
  v.delta_bins = std::abs(ia - ib);
  v.preserved = v.delta_bins == 0;
  v.f_src = sa.freqs(ia);
  v.f_aug = sb.freqs(ib);
  return v;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "freq_hz,power\n" << std::setprecision(17);
  for (Index k = 0; k < spectrum.freqs.size(); ++k) {
    out << spectrum.freqs(k) << ',' << spectrum.power(k) << '\n';
  }
}

void write_hr_csv(std::ostream& out, const HrEstimate& estimate) {
  out << "window_index,bpm\n" << std::setprecision(17);
  for (std::size_t i = 0; i < estimate.bpm_per_window.size(); ++i) {
    out << i << ',' << estimate.bpm_per_window[i] << '\n';
  }
}

}  // namespace rppg
