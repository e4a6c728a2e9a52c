#include "rppg/errors.hpp"
#include "rppg/ica.hpp"
#include "rppg/methods.hpp"
#include "rppg/signal.hpp"
#include "rppg/stats.hpp"
#include "rppg/synthetic.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace rppg {
namespace {

using testing::bin_width;
using testing::dominant_hz;
using testing::tone;

constexpr double kFps = 30.0;

RgbTrace skin_trace(double hr_bpm, double seconds, Eigen::Array3d strength = {0.006, 0.012, 0.004}) {
  SyntheticScene scene = SyntheticScene::make_default();
  scene.pulse_strength = strength;
  const PpgWaveform ppg = generate_ppg_waveform(HeartRate::constant(hr_bpm), seconds, kFps, 0.3, 7);
  return extract_rgb_trace(render_scene(scene, ppg));
}

RgbTrace tone_trace(double hz, Index n, double kr, double kg, double kb) {
  const Eigen::VectorXd t = tone(hz, kFps, n);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  return RgbTrace(one + kr * t, one + kg * t, one + kb * t, kFps);
}

double mean_of(const std::vector<double>& v, std::size_t lo, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = lo; i < lo + len; ++i) s += v[i];
  return s / static_cast<double>(len);
}

double pop_std(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

TEST(ParseMethod, NamesRoundTrip) {
  for (Method m : {Method::green, Method::ica, Method::chrom, Method::pos}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("POS2"), ConfigError);
}

TEST(GreenMethod, ConstantGivesZeros) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(300, 120.0);
  EXPECT_LT(green_method(RgbTrace(c, c, c, kFps)).samples().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GreenMethod, RemovesSlowDrift) {
  const Index n = 1800;
  const Eigen::VectorXd pulse = tone(1.0, kFps, n);
  const Eigen::VectorXd g = Eigen::VectorXd::Constant(n, 100.0) + pulse + tone(0.01, kFps, n, 20.0);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd out = green_method(RgbTrace(one, g, one, kFps)).samples();
  EXPECT_GT(stats::pearson(out.segment(15, n - 30), pulse.segment(15, n - 30)), 0.99);
}

TEST(GreenMethod, SyntheticSceneAt72Bpm) {
  const PpgWaveform w = green_method(skin_trace(72.0, 30.0));
  EXPECT_NEAR(dominant_hz(w), 1.2, bin_width(w.size(), kFps));
}

TEST(ChromMethod, ConstantFlagsEveryWindow) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(200, 90.0);
  MethodDiagnostics diag;
  const PpgWaveform w = chrom_method(RgbTrace(c, c, c, kFps), 1.6, &diag);
  EXPECT_EQ(w.samples().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_FALSE(diag.flagged_windows.empty());
}

TEST(ChromMethod, ScaledToneKeepsFrequency) {
  const PpgWaveform w = chrom_method(tone_trace(1.2, 900, 0.3, 0.8, 0.2));
  EXPECT_NEAR(dominant_hz(w), 1.2, bin_width(900, kFps));
}

TEST(ChromMethod, MatchesLoopOracleOnShortTrace) {
  const Index n = 64;
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<std::vector<double>, 3> ch;
  Eigen::VectorXd r(n), g(n), b(n);
  for (Index i = 0; i < n; ++i) {
    const double p = std::sin(2 * std::numbers::pi * 1.3 * i / kFps);
    r(i) = 150 + 0.8 * p + u(gen);
    g(i) = 110 + 1.5 * p + u(gen);
    b(i) = 90 + 0.4 * p + u(gen);
  }
  for (Index i = 0; i < n; ++i) {
    ch[0].push_back(r(i));
    ch[1].push_back(g(i));
    ch[2].push_back(b(i));
  }
  const double window_s = 0.6;  // 18 samples, hop 9
  const PpgWaveform w = chrom_method(RgbTrace(r, g, b, kFps), window_s);

  const std::size_t len = 18, hop = 9;
  std::vector<double> oracle(n, 0.0);
  for (std::size_t s = 0; s + len <= static_cast<std::size_t>(n); s += hop) {
    const double mr = mean_of(ch[0], s, len), mg = mean_of(ch[1], s, len), mb = mean_of(ch[2], s, len);
    std::vector<double> x(len), y(len);
    for (std::size_t i = 0; i < len; ++i) {
      const double rn = ch[0][s + i] / mr - 1, gn = ch[1][s + i] / mg - 1, bn = ch[2][s + i] / mb - 1;
      x[i] = 3 * rn - 2 * gn;
      y[i] = 1.5 * rn + gn - 1.5 * bn;
    }
    const double alpha = pop_std(x) / pop_std(y);
    std::vector<double> sig(len);
    double m = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      sig[i] = x[i] - alpha * y[i];
      m += sig[i] / static_cast<double>(len);
    }
    for (std::size_t i = 0; i < len; ++i) {
      const double hann = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / static_cast<double>(len));
      oracle[s + i] += (sig[i] - m) * hann;
    }
  }
  for (Index i = 0; i < n; ++i) EXPECT_NEAR(w.samples()(i), oracle[i], 1e-12) << i;
}

TEST(ChromMethod, SyntheticSceneWithNoise) {
  SyntheticScene scene = SyntheticScene::make_default();
  scene.noise_sigma = 2.0;
  scene.seed = 99;
  const PpgWaveform ppg = generate_ppg_waveform(HeartRate::constant(72.0), 30.0, kFps, 0.3, 3);
  const PpgWaveform w = chrom_method(extract_rgb_trace(render_scene(scene, ppg)));
  EXPECT_NEAR(estimate_hr(w).bpm_per_window[0], 72.0, 2.0);
}

TEST(PosMethod, ConstantGivesZeros) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(100, 50.0);
  MethodDiagnostics diag;
  EXPECT_EQ(pos_method(RgbTrace(c, c, c, kFps), 1.6, &diag).samples().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(diag.flagged_windows.size(), 100u - 48u + 1u);
}

TEST(PosMethod, FiveFrameToyMatchesHandComputation) {
  Eigen::VectorXd r(5), g(5), b(5);
  r << 1, 1, 1, 1, 1;
  g << 1, 1.1, 1, 0.9, 1;
  b << 1, 0.95, 1, 1.05, 1;
  const PpgWaveform w = pos_method(RgbTrace(r, g, b, kFps), 5.0 / kFps);

  // Window means are all 1, so the normalised channels equal the inputs.
  //   S1 = G - B = (0, 0.15, 0, -0.15, 0)
  //   S2 = G + B - 2R = (0, 0.05, 0, -0.05, 0)
  //   sd(S1) / sd(S2) = 3, h = S1 + 3 S2 = (0, 0.3, 0, -0.3, 0), mean 0.
  const double expected[5] = {0.0, 0.3, 0.0, -0.3, 0.0};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(w.samples()(i), expected[i], 1e-9);
}

TEST(PosMethod, SyntheticSceneAt100Bpm) {
  const PpgWaveform w = pos_method(skin_trace(100.0, 30.0));
  EXPECT_NEAR(dominant_hz(w), 100.0 / 60.0, bin_width(w.size(), kFps));
}

TEST(OverlapAdd, PureToneFrequencyMatchesForEveryHr) {
  for (double bpm = 48.0; bpm <= 150.0; bpm += 6.0) {
    const RgbTrace t = tone_trace(bpm / 60.0, 900, 0.004, 0.01, 0.002);
    const PpgWaveform in(tone(bpm / 60.0, kFps, 900), kFps);
    EXPECT_DOUBLE_EQ(dominant_hz(chrom_method(t)), dominant_hz(in)) << bpm;
    EXPECT_DOUBLE_EQ(dominant_hz(pos_method(t)), dominant_hz(in)) << bpm;
  }
}

TEST(Methods, RejectShortWindows) {
  const RgbTrace t = tone_trace(1.2, 40, 0.1, 0.2, 0.05);
  EXPECT_THROW(chrom_method(t, 0.3), WindowError);
  EXPECT_THROW(pos_method(t, 2.0), WindowError);
}

TEST(Methods, HrBinInvariantToGain) {
  const RgbTrace t = skin_trace(84.0, 30.0);
  for (Method m : {Method::green, Method::ica, Method::chrom, Method::pos}) {
    const double base = dominant_hz(run_method(m, t));
    for (double gain : {0.01, 3.0}) {
      EXPECT_DOUBLE_EQ(dominant_hz(run_method(m, t.scaled(gain))), base) << to_string(m);
    }
  }
}

TEST(Methods, DeterministicOutputs) {
  const RgbTrace t = skin_trace(66.0, 20.0);
  for (Method m : {Method::green, Method::ica, Method::chrom, Method::pos}) {
    EXPECT_EQ(run_method(m, t).samples(), run_method(m, t).samples()) << to_string(m);
  }
}

TEST(Methods, NoiseFreeScenesWithinOneBin) {
  for (double bpm : {48.0, 75.0, 110.0, 150.0}) {
    const RgbTrace t = skin_trace(bpm, 30.0);
    for (Method m : {Method::green, Method::ica, Method::chrom, Method::pos}) {
      const double est = estimate_hr(run_method(m, t)).bpm_per_window[0];
      EXPECT_LE(std::abs(est - bpm), 60.0 * bin_width(900, kFps)) << to_string(m) << " " << bpm;
    }
  }
}

TEST(FastIca, ConstantChannelsAreDegenerate) {
  EXPECT_THROW(fast_ica(Eigen::MatrixXd::Constant(3, 100, 4.0), 3, 100, 1e-6), DegenerateSignalError);
}

TEST(FastIca, SourcesAreWhite) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(3, 2000);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = nd(gen);
  const IcaResult r = fast_ica(x, 3, 1000, 1e-6);
  const Eigen::MatrixXd cov = r.sources * r.sources.transpose() / 1999.0;
  EXPECT_LT((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FastIca, RecoversMixedSourcesUpToPermutation) {
  const Index n = 1800;
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd s(3, n);
  s.row(0) = tone(1.0, kFps, n).transpose();
  s.row(1) = tone(1.8, kFps, n, 1.0, 0.7).transpose();
  for (Index i = 0; i < n; ++i) s(2, i) = u(gen);
  Eigen::Matrix3d a;
  a << 1.0, 0.5, 0.3, 0.4, 1.0, 0.6, 0.2, 0.7, 1.0;
  const IcaResult r = fast_ica(a * s, 3, 1000, 1e-6);
  ASSERT_EQ(r.sources.rows(), 3);

  std::array<int, 3> perm{0, 1, 2};
  double best = -1.0;
  do {
    double worst = 1.0;
    for (int k = 0; k < 3; ++k) {
      worst = std::min(worst, std::abs(stats::pearson(r.sources.row(perm[k]).transpose(),
                                                      s.row(k).transpose())));
    }
    best = std::max(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_GT(best, 0.95);
}

TEST(IcaMethod, SelectsToneComponentAmongNoise) {
  const Index n = 900;
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd;
  const Eigen::VectorXd t = tone(1.5, kFps, n);
  Eigen::VectorXd r(n), g(n), b(n);
  for (Index i = 0; i < n; ++i) {
    r(i) = 100 + nd(gen) + 0.8 * t(i);
    g(i) = 100 + nd(gen) + 1.0 * t(i);
    b(i) = 100 + nd(gen) + 0.6 * t(i);
  }
  const PpgWaveform w = ica_method(RgbTrace(r, g, b, kFps));
  EXPECT_NEAR(dominant_hz(w), 1.5, bin_width(n, kFps));
}

TEST(FastIca, ConvergesWithGaussianNoiseDirections) {
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd x(3, 900);
    for (Index i = 0; i < 900; ++i) {
      const double t = std::sin(2 * std::numbers::pi * 1.5 * i / kFps);
      x(0, i) = nd(gen) + 0.8 * t;
      x(1, i) = nd(gen) + t;
      x(2, i) = nd(gen) + 0.6 * t;
    }
    EXPECT_NO_THROW(fast_ica(x, 3, 1000, 1e-6)) << seed;
  }
}

TEST(FastIca, ReportsNonConvergence) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(3, 500);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = nd(gen);
  try {
    fast_ica(x, 3, 2, 1e-15);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.last_change(), 0.0);
  }
}

TEST(IcaMethod, RankDeficientTraceStillWorks) {
  MethodDiagnostics diag;
  const PpgWaveform w = ica_method(skin_trace(90.0, 30.0), 3, 1000, 1e-6, &diag);
  EXPECT_NEAR(dominant_hz(w), 1.5, bin_width(w.size(), kFps));
  EXPECT_FALSE(diag.notes.empty());
}

TEST(IcaMethod, SignFollowsRisingSlope) {
  const PpgWaveform w = ica_method(skin_trace(72.0, 30.0));
  const PpgWaveform f = bandpass(w);
  const Eigen::VectorXd& y = f.samples();
  const Eigen::VectorXd d = y.tail(y.size() - 1) - y.head(y.size() - 1);
  EXPECT_GE(d.maxCoeff(), -d.minCoeff());
}

}  // namespace
}  // namespace rppg
