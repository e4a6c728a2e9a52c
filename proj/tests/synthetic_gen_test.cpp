#include "rppg/errors.hpp"
#include "rppg/methods.hpp"
#include "rppg/motion.hpp"
#include "rppg/signal.hpp"
#include "rppg/stats.hpp"
#include "rppg/synthetic.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace rppg {
namespace {

using testing::bin_width;
using testing::dominant_hz;

bool frames_equal(const FrameSequence& a, const FrameSequence& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (int c = 0; c < 3; ++c) {
      if (!(a.frame(t).channels[c] == b.frame(t).channels[c]).all()) return false;
    }
  }
  return true;
}

// Times of rising zero crossings, linearly interpolated between samples.
std::vector<double> rising_crossings(const PpgWaveform& w) {
  std::vector<double> out;
  const Eigen::VectorXd& x = w.samples();
  for (Index i = 1; i < x.size(); ++i) {
    if (x(i - 1) < 0.0 && x(i) >= 0.0) {
      const double frac = -x(i - 1) / (x(i) - x(i - 1));
      out.push_back((static_cast<double>(i - 1) + frac) / w.fs());
    }
  }
  return out;
}

TEST(GeneratePpg, LengthAndFrequency) {
  const PpgWaveform w = generate_ppg_waveform(HeartRate::constant(72.0), 30.0, 30.0);
  EXPECT_EQ(w.size(), 900);
  EXPECT_EQ(w.kind(), WaveKind::gold);
  EXPECT_NEAR(dominant_hz(w), 1.2, bin_width(900, 30.0) / 2 + 1e-12);
  EXPECT_NEAR(w.samples().cwiseAbs().maxCoeff(), 1.0, 1e-12);
}

TEST(GeneratePpg, PureToneHasNoHarmonic) {
  const PpgWaveform w = generate_ppg_waveform(HeartRate::constant(60.0), 30.0, 30.0, 0.0);
  const Spectrum s = power_spectrum(w, 8192);
  const double peak = s.power(std::lround(1.0 / s.resolution));
  const double second = s.power(std::lround(2.0 / s.resolution));
  EXPECT_LT(second, 0.01 * peak);
}

TEST(GeneratePpg, ChirpZeroCrossingRateIncreases) {
  const PpgWaveform w = generate_ppg_waveform(HeartRate{60.0, 90.0}, 60.0, 30.0, 0.3, 5);
  const std::vector<double> z = rising_crossings(w);
  ASSERT_GT(z.size(), 50u);
  for (std::size_t i = 2; i < z.size(); ++i) EXPECT_LT(z[i] - z[i - 1], z[i - 1] - z[i - 2] + 1e-3);
  EXPECT_NEAR(60.0 / (z[1] - z[0]), 60.0, 1.5);
  EXPECT_NEAR(60.0 / (z.back() - z[z.size() - 2]), 90.0, 1.5);
}

TEST(GeneratePpg, RejectsOutOfRange) {
  EXPECT_THROW(generate_ppg_waveform(HeartRate::constant(30.0), 30.0, 30.0), ParamError);
  EXPECT_THROW(generate_ppg_waveform(HeartRate::constant(72.0), 1.0, 30.0), ParamError);
}

TEST(RenderScene, DefaultMaskCoverage) {
  const SyntheticScene s = SyntheticScene::make_default();
  const double frac = static_cast<double>(s.skin_mask.count()) / (64.0 * 64.0);
  EXPECT_NEAR(frac, 0.4, 0.03);
}

TEST(RenderScene, NoModulationNoNoiseIsStatic) {
  SyntheticScene s = SyntheticScene::make_default();
  s.pulse_strength.setZero();
  const FrameSequence v = render_scene(s, generate_ppg_waveform(HeartRate::constant(70), 3.0, 30.0));
  for (std::size_t t = 1; t < v.size(); ++t) {
    for (int c = 0; c < 3; ++c) EXPECT_TRUE((v.frame(t).channels[c] == v.frame(0).channels[c]).all());
  }
}

TEST(RenderScene, NoModulationWithNoiseVariesOnlyByNoise) {
  SyntheticScene s = SyntheticScene::make_default();
  s.pulse_strength.setZero();
  s.noise_sigma = 1.0;
  const FrameSequence v = render_scene(s, generate_ppg_waveform(HeartRate::constant(70), 3.0, 30.0));
  const double diff = (v.frame(5).channels[1] - v.frame(0).channels[1]).abs().maxCoeff();
  EXPECT_GT(diff, 0.0);
  EXPECT_LT(diff, 10.0);
}

TEST(RenderScene, GreenTraceFollowsPulse) {
  SyntheticScene s = SyntheticScene::make_default();
  s.pulse_strength << 0.0, 0.02, 0.0;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(80), 10.0, 30.0, 0.3, 2);
  const RgbTrace t = extract_rgb_trace(render_scene(s, p));
  EXPECT_GT(stats::pearson(t.g(), p.samples()), 0.999);
}

TEST(RenderScene, NoisyScenePosWithinOneBin) {
  SyntheticScene s = SyntheticScene::make_default();
  s.noise_sigma = 2.0;
  s.seed = 21;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(72), 30.0, 30.0, 0.3, 8);
  const PpgWaveform w = pos_method(extract_rgb_trace(render_scene(s, p)));
  EXPECT_NEAR(estimate_hr(w).bpm_per_window[0], 72.0, 60.0 * bin_width(900, 30.0));
}

TEST(RenderScene, DeterministicForSeed) {
  SyntheticScene s = SyntheticScene::make_default();
  s.noise_sigma = 1.5;
  s.seed = 3;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(90), 3.0, 30.0);
  EXPECT_TRUE(frames_equal(render_scene(s, p), render_scene(s, p)));
  SyntheticScene other = s;
  other.seed = 4;
  EXPECT_FALSE(frames_equal(render_scene(s, p), render_scene(other, p)));
}

TEST(RenderScene, SkinLuminanceStaysNearBase) {
  SyntheticScene s = SyntheticScene::make_default();
  s.noise_sigma = 2.0;
  s.drift_amplitude = 1.5;
  s.drift_hz = 0.05;
  s.seed = 5;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(100), 20.0, 30.0);
  const RgbTrace t = extract_rgb_trace(render_scene(s, p));
  const double base = s.base_color.mean();
  const double bound = s.pulse_strength.maxCoeff() * base + s.drift_amplitude + 3.0 * s.noise_sigma;
  for (Index i = 0; i < t.size(); ++i) {
    const double lum = (t.r()(i) + t.g()(i) + t.b()(i)) / 3.0;
    EXPECT_LE(std::abs(lum - base), bound);
  }
}

TEST(RenderScene, SaturationAndParamErrors) {
  SyntheticScene s = SyntheticScene::make_default();
  s.base_color << 250, 250, 250;
  s.pulse_strength << 0.1, 0.1, 0.1;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(72), 5.0, 30.0);
  EXPECT_THROW(render_scene(s, p), SaturationError);

  SyntheticScene bad = SyntheticScene::make_default();
  bad.pulse_strength << 0.02, 0.01, 0.0;  // a_R > a_G
  EXPECT_THROW(render_scene(bad, p), ParamError);
}

TEST(ApplyMotion, ZeroTrackIsIdentity) {
  SyntheticScene s = SyntheticScene::make_default();
  s.noise_sigma = 1.0;
  const FrameSequence v = render_scene(s, generate_ppg_waveform(HeartRate::constant(72), 3.0, 30.0));
  for (MotionMode m : {MotionMode::rigid, MotionMode::nonrigid, MotionMode::both}) {
    const FrameSequence out = apply_motion(v, PoseTrack::zeros(90, 30.0), m, 0.0);
    EXPECT_TRUE(frames_equal(v, out));
  }
}

TEST(ApplyMotion, GeneratingTrackReportsLargeBand) {
  const PoseTrack t = random_pose_track(900, 30.0, 0.12, 1.0, 17);
  const MotionSummary s = summarize_motion(to_motion_profile(t));
  EXPECT_GE(s.rigid_msd, 0.10);
  EXPECT_LE(s.rigid_msd, 0.14);
}

TEST(ApplyMotion, LargeRigidTrackPreservesHr) {
  SyntheticScene s = SyntheticScene::make_default();
  s.noise_sigma = 1.0;
  s.seed = 77;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(72), 30.0, 30.0, 0.3, 6);
  const FrameSequence src = render_scene(s, p);
  const FrameSequence aug = apply_motion(src, random_pose_track(900, 30.0, 0.12, 1.5, 6), MotionMode::rigid, 0.0);
  const PreservationVerdict v =
      check_preservation(pos_method(extract_rgb_trace(src)), pos_method(extract_rgb_trace(aug)));
  EXPECT_TRUE(v.preserved);
  EXPECT_NEAR(v.f_src, 1.2, bin_width(900, 30.0));
}

TEST(ApplyMotion, NonrigidWarpMovesPixelsButKeepsHr) {
  SyntheticScene s = SyntheticScene::make_default();
  s.noise_sigma = 0.5;
  s.seed = 12;
  const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(96), 20.0, 30.0, 0.3, 2);
  const FrameSequence src = render_scene(s, p);
  const FrameSequence aug = apply_motion(src, PoseTrack::zeros(600, 30.0), MotionMode::nonrigid, 2.0);
  EXPECT_FALSE(frames_equal(src, aug));
  EXPECT_TRUE(check_preservation(green_method(extract_rgb_trace(src)),
                                 green_method(extract_rgb_trace(aug)))
                  .preserved);
}

TEST(ApplyMotion, GreenTraceHrSweep) {
  int agree = 0, total = 0;
  for (double bpm : {50.0, 65.0, 80.0, 95.0, 110.0, 120.0, 130.0, 140.0, 145.0, 150.0}) {
    for (double rot : {0.02, 0.05, 0.08, 0.11, 0.14}) {
      SyntheticScene s = SyntheticScene::make_default();
      const PpgWaveform p = generate_ppg_waveform(HeartRate::constant(bpm), 20.0, 30.0, 0.3, total);
      const FrameSequence src = render_scene(s, p);
      // Translation std 1.5 px stays well under 10% of the 40 px skin width.
      const PoseTrack track = random_pose_track(600, 30.0, rot, 1.5, static_cast<std::uint64_t>(total));
      const FrameSequence aug = apply_motion(src, track, MotionMode::rigid, 0.0);
      const double embedded = dominant_hz(PpgWaveform(p.samples().array() - p.samples().mean(), 30.0));
      agree += dominant_hz(green_method(extract_rgb_trace(aug))) == embedded ? 1 : 0;
      ++total;
    }
  }
  EXPECT_EQ(agree, total);
}

TEST(ApplyMotion, RoiFollowsTheTransform) {
  SyntheticScene s = SyntheticScene::make_default();
  const FrameSequence v = render_scene(s, generate_ppg_waveform(HeartRate::constant(72), 3.0, 30.0));
  PoseTrack t = PoseTrack::zeros(90, 30.0);
  t.translation.col(0).setConstant(5.0);
  const FrameSequence out = apply_motion(v, t, MotionMode::rigid, 0.0);
  ASSERT_EQ(out.rois().size(), 90u);
  const Mask& m = std::get<Mask>(out.rois()[0]);
  // Shifted 5 px right: the column left of the old left edge is background now.
  for (Index y = 0; y < 64; ++y) {
    for (Index x = 5; x < 64; ++x) EXPECT_EQ(m(y, x), s.skin_mask(y, x - 5)) << y << "," << x;
  }
}

TEST(ApplyMotion, Errors) {
  SyntheticScene s = SyntheticScene::make_default();
  const FrameSequence v = render_scene(s, generate_ppg_waveform(HeartRate::constant(72), 3.0, 30.0));
  EXPECT_THROW(apply_motion(v, PoseTrack::zeros(80, 30.0), MotionMode::rigid, 0.0), PreconditionError);
  PoseTrack far = PoseTrack::zeros(90, 30.0);
  far.translation(10, 0) = 40.0;
  EXPECT_THROW(apply_motion(v, far, MotionMode::rigid, 0.0), MotionError);
}

TEST(PoseTrackFromProfile, LoopsAndHoldsNan) {
  MotionProfile p;
  p.fps = 30.0;
  p.pose.resize(3, 3);
  p.pose << 0, 0, 0.1, 0, 0, 0.2, 0, 0, std::nan("");
  p.aus = Eigen::MatrixXd::Zero(3, kActionUnitCount);
  const PoseTrack t = pose_track_from_profile(p, 6);
  const double want[6] = {0.1, 0.2, 0.2, 0.2, 0.1, 0.2};
  for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(t.rotation(i, 2), want[i]);
  EXPECT_TRUE(t.translation.isZero());
}

}  // namespace
}  // namespace rppg
