#include "rppg/harness/synth_dataset.hpp"

#include "rppg/errors.hpp"
#include "rppg/harness/parallel.hpp"
#include "rppg/harness/preservation.hpp"
#include "rppg/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>

namespace rppg::harness {

namespace fs = std::filesystem;

namespace {

Eigen::MatrixXd random_au_track(Index n, double fps, Rng& rng) {
  Eigen::MatrixXd aus(n, kActionUnitCount);
  const double spread = rng.uniform(0.15, 0.55);
  for (int k = 0; k < kActionUnitCount; ++k) {
    const double f = rng.uniform(0.2, 0.8);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double level = rng.uniform(1.0, 2.0);
    for (Index i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fps;
      aus(i, k) = std::clamp(
          level + spread * std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * f * t + phase),
          0.0, 5.0);
    }
  }
  return aus;
}

FrameSequence with_shared_mask(const FrameSequence& video) {
  if (video.rois().size() <= 1) return video;
  Mask shared = Mask::Constant(video.height(), video.width(), true);
  for (const Roi& roi : video.rois()) {
    const Mask* m = std::get_if<Mask>(&roi);
    if (m == nullptr) throw FormatError("expected per-frame mask ROIs");
    shared = shared && *m;
  }
  if (shared.count() == 0) return FrameSequence(video.frames(), video.fps());
  return FrameSequence(video.frames(), video.fps(), {Roi(std::move(shared))});
}

std::string video_id(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth_%03d", i);
  return buf;
}

}  // namespace

DatasetManifest write_synthetic_dataset(const RunConfig& config, const fs::path& dir,
                                        FrameFormat format) {
  const SyntheticSuiteConfig& suite = config.synthetic;
  if (suite.n_videos < 1) throw ConfigError("synthetic.n_videos must be >= 1");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const bool moving = suite.rotation_std.hi > 0.0 || suite.translation_std_px > 0.0 ||
                      (suite.motion_mode != MotionMode::rigid && suite.warp_amp_px > 0.0);
  const auto n_videos = static_cast<std::size_t>(suite.n_videos);

  DatasetManifest manifest;
  manifest.name = "synthetic";
  manifest.root = fs::absolute(dir).lexically_normal();
  manifest.entries.resize(n_videos);
  std::vector<std::exception_ptr> errors(n_videos);

  parallel_for(n_videos, config.workers, [&](std::size_t i) {
    try {
      const std::uint64_t seed = mix_seed(config.seed, i);
      TrialSetup setup = make_trial_setup(suite, seed);
      const double hr =
          n_videos == 1 ? 0.5 * (suite.hr_min_bpm + suite.hr_max_bpm)
                        : suite.hr_min_bpm + (suite.hr_max_bpm - suite.hr_min_bpm) *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(n_videos - 1);
      const PpgWaveform ppg =
          generate_ppg_waveform(HeartRate::constant(hr), suite.duration_s, suite.fps, 0.3, seed);
      FrameSequence video = render_scene(setup.scene, ppg);
      if (moving) {
        video = with_shared_mask(
            apply_motion(video, setup.track, suite.motion_mode, suite.warp_amp_px));
      }

      const std::string id = video_id(static_cast<int>(i));
      const fs::path vdir = dir / id;
      write_frame_directory(video, vdir / "frames", format);

      const fs::path gold_path = vdir / "gold.csv";
      std::ofstream gold(gold_path);
      write_gold_csv(gold, ppg);
      if (!gold) throw IoError("failed writing " + gold_path.string());

      Rng au_rng(mix_seed(seed, 1));
      MotionProfile profile = to_motion_profile(setup.track, id);
      profile.aus = random_au_track(profile.frames(), suite.fps, au_rng);
      const fs::path motion_path = vdir / "motion.csv";
      std::ofstream motion(motion_path);
      write_motion_csv(motion, profile);
      if (!motion) throw IoError("failed writing " + motion_path.string());

      const fs::path root = manifest.root / id;
      manifest.entries[i] = {id, root / "frames", root / "gold.csv", root / "motion.csv"};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  const fs::path mpath = dir / "manifest.json";
  std::ofstream out(mpath);
  out << to_json(manifest).dump(2) << "\n";
  out.close();
  if (!out) throw IoError("failed writing " + mpath.string());
  return manifest;
}

}  // namespace rppg::harness
