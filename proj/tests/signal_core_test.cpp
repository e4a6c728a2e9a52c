#include "rppg/errors.hpp"
#include "rppg/signal.hpp"
#include "rppg/stats.hpp"
#include "rppg/synthetic.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace rppg {
namespace {

using testing::dominant_hz;
using testing::tone;

Image uniform_image(Index h, Index w, double r, double g, double b) {
  Image img(h, w);
  img.channels[0].setConstant(r);
  img.channels[1].setConstant(g);
  img.channels[2].setConstant(b);
  return img;
}

RgbTrace trace_of(const Eigen::VectorXd& r, const Eigen::VectorXd& g, const Eigen::VectorXd& b,
                  double fps = 30.0) {
  return RgbTrace(r, g, b, fps);
}

TEST(ExtractRgbTrace, UniformFrameGivesItsColour) {
  // A trace holds at least two samples, so the frame is shown twice.
  const Image img = uniform_image(4, 5, 100, 150, 50);
  FrameSequence video({img, img}, 30.0);
  const RgbTrace t = extract_rgb_trace(video);
  ASSERT_EQ(t.size(), 2);
  EXPECT_DOUBLE_EQ(t.r()(0), 100.0);
  EXPECT_DOUBLE_EQ(t.g()(0), 150.0);
  EXPECT_DOUBLE_EQ(t.b()(0), 50.0);
}

TEST(ExtractRgbTrace, TwoPixelMaskAverages) {
  Image img = uniform_image(3, 3, 10, 10, 10);
  img.channels[1](0, 0) = 0.0;
  img.channels[1](2, 1) = 200.0;
  Mask m = Mask::Constant(3, 3, false);
  m(0, 0) = true;
  m(2, 1) = true;
  FrameSequence video({img, img}, 30.0, {Roi(m)});
  EXPECT_DOUBLE_EQ(extract_rgb_trace(video).g()(0), 100.0);
}

TEST(ExtractRgbTrace, RectRoiSelectsBlock) {
  Image img = uniform_image(6, 6, 0, 0, 0);
  img.channels[0].block(1, 2, 2, 3).setConstant(90.0);
  FrameSequence video({img, img}, 30.0, {Roi(Rect{2, 1, 3, 2})});
  EXPECT_DOUBLE_EQ(extract_rgb_trace(video).r()(0), 90.0);
}

TEST(ExtractRgbTrace, LinearInPixelValues) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<Image> a, b;
  for (int t = 0; t < 5; ++t) {
    Image img(8, 7);
    for (auto& ch : img.channels) ch = ch.unaryExpr([&](double) { return u(gen); });
    Image scaled = img;
    for (auto& ch : scaled.channels) ch *= 0.37;
    a.push_back(img);
    b.push_back(scaled);
  }
  const RgbTrace ta = extract_rgb_trace(FrameSequence(a, 30.0));
  const RgbTrace tb = extract_rgb_trace(FrameSequence(b, 30.0));
  for (int c = 0; c < 3; ++c) {
    EXPECT_LT((ta.channel(c) * 0.37 - tb.channel(c)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExtractRgbTrace, MatchesClosedFormSkinMean) {
  SyntheticScene scene = SyntheticScene::make_default();
  scene.pulse_strength << 0.01, 0.02, 0.005;
  const PpgWaveform ppg = generate_ppg_waveform(HeartRate::constant(72), 4.0, 30.0);
  const RgbTrace t = extract_rgb_trace(render_scene(scene, ppg));
  for (Index i = 0; i < ppg.size(); ++i) {
    const double expected = scene.base_color(1) * (1.0 + scene.pulse_strength(1) * ppg.samples()(i));
    EXPECT_NEAR(t.g()(i), expected, 1e-9);
  }
}

TEST(ExtractRgbTrace, RejectsEmptyMask) {
  EXPECT_THROW(FrameSequence({uniform_image(2, 2, 1, 1, 1)}, 30.0, {Roi(Mask::Constant(2, 2, false))}),
               RegionError);
}

TEST(NormalizeTrace, ConstantChannelBecomesZero) {
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(10, 80.0);
  const RgbTrace n = normalize_trace(trace_of(c, c, c));
  EXPECT_EQ(n.g().cwiseAbs().maxCoeff(), 0.0);
}

TEST(NormalizeTrace, TwoSampleExample) {
  Eigen::VectorXd x(2);
  x << 1.0, 3.0;
  const RgbTrace n = normalize_trace(trace_of(x, x, x));
  EXPECT_DOUBLE_EQ(n.r()(0), -0.5);
  EXPECT_DOUBLE_EQ(n.r()(1), 0.5);
}

TEST(NormalizeTrace, OutputIsZeroMean) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(20.0, 200.0);
  Eigen::VectorXd r(500), g(500), b(500);
  for (Index i = 0; i < 500; ++i) {
    r(i) = u(gen);
    g(i) = u(gen);
    b(i) = u(gen);
  }
  const RgbTrace n = normalize_trace(trace_of(r, g, b));
  for (int c = 0; c < 3; ++c) {
    double s = 0.0;
    for (Index i = 0; i < 500; ++i) s += n.channel(c)(i);
    EXPECT_LT(std::abs(s / 500.0), 1e-12);
  }
}

TEST(NormalizeTrace, InvariantToIlluminationGain) {
  const Eigen::VectorXd r = Eigen::VectorXd::Constant(60, 120.0) + tone(1.1, 30, 60);
  const Eigen::VectorXd g = Eigen::VectorXd::Constant(60, 90.0) + tone(0.7, 30, 60);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(60, 70.0) + tone(1.9, 30, 60);
  const RgbTrace a = normalize_trace(trace_of(r, g, b));
  const RgbTrace d = normalize_trace(trace_of(r, g, b).scaled(2.0));
  for (int c = 0; c < 3; ++c) EXPECT_LT((a.channel(c) - d.channel(c)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NormalizeTrace, ZeroMeanInputRaises) {
  const Eigen::VectorXd x = tone(1.0, 30, 30);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(30);
  EXPECT_THROW(normalize_trace(trace_of(one, x, one)), DegenerateSignalError);
}

TEST(Detrend, ConstantBecomesZero) {
  const PpgWaveform w(Eigen::VectorXd::Constant(90, 3.5), 30.0);
  EXPECT_LT(detrend(w, 1.0).samples().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Detrend, RampInteriorIsZero) {
  const PpgWaveform w(Eigen::VectorXd::LinSpaced(200, 0.0, 50.0), 30.0);
  const Eigen::VectorXd out = detrend(w, 1.0).samples();
  EXPECT_LT(out.segment(15, 200 - 30).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Detrend, MatchesBruteForceMovingAverage) {
  const Index n = 300;
  const Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(n, 0.0, 4.0);
  const Eigen::VectorXd sine = tone(2.0, 30.0, n, 0.5);
  const Eigen::VectorXd x = ramp + sine;
  const Eigen::VectorXd out = detrend(PpgWaveform(x, 30.0), 1.0).samples();

  // 1 s at 30 Hz: 30 samples, bumped to 31, half width 15.
  Eigen::VectorXd oracle(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    int count = 0;
    for (Index j = i - 15; j <= i + 15; ++j) {
      if (j < 0 || j >= n) continue;
      s += x(j);
      ++count;
    }
    oracle(i) = x(i) - s / count;
  }
  EXPECT_LT((out - oracle).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(stats::pearson(out.segment(15, n - 30), sine.segment(15, n - 30)), 0.99);
}

TEST(Detrend, RejectsBadWindows) {
  const PpgWaveform w(Eigen::VectorXd::Ones(20), 30.0);
  EXPECT_THROW(detrend(w, 0.05), WindowError);
  EXPECT_THROW(detrend(w, 2.0), WindowError);
}

TEST(MovingAverage, TruncatedEdges) {
  Eigen::VectorXd x(5);
  x << 1, 2, 3, 4, 10;
  const Eigen::VectorXd m = moving_average(x, 1);
  EXPECT_DOUBLE_EQ(m(0), 1.5);
  EXPECT_DOUBLE_EQ(m(2), 3.0);
  EXPECT_DOUBLE_EQ(m(4), 7.0);
}

TEST(FirstDerivativeLabel, ConstantRaises) {
  EXPECT_THROW(first_derivative_label(PpgWaveform(Eigen::VectorXd::Constant(10, 2.0), 30.0)),
               DegenerateSignalError);
}

TEST(FirstDerivativeLabel, HandComputedDifferences) {
  Eigen::VectorXd x(6);
  x << 0, 2, 4, 7, 8, 10;  // slope-2 ramp, sample 3 raised by 1
  const PpgWaveform d = first_derivative_label(PpgWaveform(x, 30.0));
  ASSERT_EQ(d.size(), 5);
  EXPECT_EQ(d.kind(), WaveKind::derivative);
  const double raw[5] = {2, 2, 3, 1, 2};
  // sample std of {2,2,3,1,2}: mean 2, sum sq dev 2, var 0.5
  const double sd = std::sqrt(0.5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(d.samples()(i), raw[i] / sd, 1e-12);
}

TEST(FirstDerivativeLabel, SinusoidKeepsFrequencyAndLeadsByQuarterCycle) {
  const Index n = 900;
  const PpgWaveform w(tone(1.0, 30.0, n), 30.0);
  const PpgWaveform d = first_derivative_label(w);
  EXPECT_NEAR(dominant_hz(d), dominant_hz(w), 1e-12);
  // Forward difference of sin(wt) is proportional to cos(w(t + dt/2)).
  const Eigen::VectorXd cosine = tone(1.0, 30.0, n - 1, 1.0, std::numbers::pi / 2 + 2 * std::numbers::pi / 60);
  EXPECT_GT(stats::pearson(d.samples(), cosine), 0.9999);
}

TEST(ResampleTrace, IntegerDecimationTakesEveryKth) {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(120, 0, 119);
  const RgbTrace out = resample_trace(trace_of(x, x, x, 120.0), 30.0);
  ASSERT_EQ(out.size(), 30);
  EXPECT_DOUBLE_EQ(out.fps(), 30.0);
  for (Index i = 0; i < 30; ++i) EXPECT_DOUBLE_EQ(out.g()(i), 4.0 * static_cast<double>(i));
}

TEST(ResampleTrace, SameRateIsIdentity) {
  const Eigen::VectorXd x = tone(1.3, 30, 77) + Eigen::VectorXd::Constant(77, 5.0);
  const RgbTrace out = resample_trace(trace_of(x, x, x), 30.0);
  EXPECT_EQ(out.g(), x);
}

TEST(ResampleTrace, FractionalRateKeepsTone) {
  const Eigen::VectorXd x = tone(1.0, 30, 900) + Eigen::VectorXd::Constant(900, 5.0);
  const RgbTrace out = resample_trace(trace_of(x, x, x), 25.0);
  const PpgWaveform w(out.g().array() - out.g().mean(), 25.0);
  EXPECT_NEAR(dominant_hz(w), 1.0, testing::bin_width(w.size(), 25.0));
}

TEST(ResampleTrace, DecimationKeepsToneBin) {
  const Eigen::VectorXd x = tone(1.7, 120, 3600);
  const RgbTrace out = resample_trace(trace_of(x, x, x, 120.0), 30.0);
  const PpgWaveform src(x, 120.0), dst(out.g(), 30.0);
  EXPECT_NEAR(dominant_hz(dst), 1.7, testing::bin_width(dst.size(), 30.0) / 2 + 1e-12);
  EXPECT_NEAR(dominant_hz(src), 1.7, testing::bin_width(src.size(), 120.0) / 2 + 1e-12);
}

TEST(ResampleTrace, RefusesLargeUpsampling) {
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(10);
  EXPECT_THROW(resample_trace(trace_of(x, x, x, 10.0), 100.0), ResampleError);
}

TEST(FrameSequence, ValidatesShapesAndRois) {
  EXPECT_THROW(FrameSequence({}, 30.0), FormatError);
  EXPECT_THROW(FrameSequence({Image(2, 2), Image(3, 2)}, 30.0), FormatError);
  EXPECT_THROW(FrameSequence({Image(2, 2)}, 0.0), FormatError);
  EXPECT_THROW(FrameSequence({Image(2, 2)}, 30.0, {Roi(Rect{1, 1, 2, 2})}), RegionError);
}

}  // namespace
}  // namespace rppg
