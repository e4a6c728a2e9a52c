#include "rppg/harness/preservation.hpp"

#include "rppg/errors.hpp"
#include "rppg/harness/parallel.hpp"
#include "rppg/signal.hpp"

#include <cmath>
#include <exception>

namespace rppg::harness {

Eigen::Array3d random_pulse_strength(Rng& rng) {
  const double a_g = rng.uniform(0.008, 0.015);
  const double a_b = rng.uniform(0.25, 0.45) * a_g;
  const double a_r = a_b + rng.uniform(0.10, 0.35) * (a_g - a_b);
  return {a_r, a_g, a_b};
}

TrialSetup make_trial_setup(const SyntheticSuiteConfig& suite, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  TrialSetup setup;
  setup.scene = SyntheticScene::make_default();
  setup.scene.base_color += Eigen::Array3d(rng.uniform(-15, 15), rng.uniform(-15, 15),
                                           rng.uniform(-15, 15));
  setup.scene.pulse_strength = random_pulse_strength(rng);
  setup.scene.noise_sigma = rng.uniform(0.0, suite.noise_sigma_max);
  setup.scene.drift_amplitude = suite.drift_amplitude;
  setup.scene.drift_hz = suite.drift_hz;
  setup.scene.seed = rng.next();
  setup.hr_bpm = rng.uniform(suite.hr_min_bpm, suite.hr_max_bpm);

  const auto n = static_cast<Index>(std::llround(suite.duration_s * suite.fps));
  const Range band = suite.rotation_std;
  if (band.hi == 0.0 && suite.translation_std_px == 0.0) {
    setup.track = PoseTrack::zeros(n, suite.fps);
    setup.rigid_msd = 0.0;
    return setup;
  }
  // Redraw until the realised spread lands inside the requested band.
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double target = rng.uniform(band.lo, band.hi);
    PoseTrack track = random_pose_track(n, suite.fps, target, suite.translation_std_px, rng.next());
    const double msd = summarize_motion(to_motion_profile(track)).rigid_msd;
    if (band.contains(msd)) {
      setup.track = std::move(track);
      setup.rigid_msd = msd;
      return setup;
    }
  }
  throw ParamError("could not draw a pose track inside the requested rotation band");
}

PreservationResult run_preservation_suite(const RunConfig& config, int n_trials) {
  if (n_trials < 1) throw PreconditionError("n_trials must be >= 1");
  const SyntheticSuiteConfig& suite = config.synthetic;

  std::vector<PreservationTrial> trials(static_cast<std::size_t>(n_trials));
  std::vector<std::exception_ptr> errors(trials.size());
  std::optional<Spectrum> src_spec, aug_spec;

  parallel_for(trials.size(), config.workers, [&](std::size_t i) {
    try {
      const std::uint64_t trial_seed = mix_seed(config.seed, i);
      const TrialSetup setup = make_trial_setup(suite, trial_seed);
      const PpgWaveform ppg = generate_ppg_waveform(HeartRate::constant(setup.hr_bpm),
                                                    suite.duration_s, suite.fps, 0.3, trial_seed);

      const FrameSequence source = render_scene(setup.scene, ppg);
      const PpgWaveform src_wave =
          run_method(config.method, extract_rgb_trace(source), config.method_options);

      // With no HR shift the augmented base is the source video itself.
      const PpgWaveform aug_wave = [&] {
        const auto augment = [&](const FrameSequence& base) {
          const FrameSequence augmented =
              apply_motion(base, setup.track, suite.motion_mode, suite.warp_amp_px);
          return run_method(config.method, extract_rgb_trace(augmented), config.method_options);
        };
        if (suite.hr_shift_bpm == 0.0) return augment(source);
        const PpgWaveform shifted = generate_ppg_waveform(
            HeartRate::constant(setup.hr_bpm + suite.hr_shift_bpm), suite.duration_s, suite.fps,
            0.3, trial_seed);
        return augment(render_scene(setup.scene, shifted));
      }();

      PreservationTrial& trial = trials[i];
      trial.seed = trial_seed;
      trial.hr_bpm = setup.hr_bpm;
      trial.noise_sigma = setup.scene.noise_sigma;
      trial.rigid_msd = setup.rigid_msd;
      trial.verdict = check_preservation(src_wave, aug_wave, config.band);

      if (i == 0) {
        const Index pad = next_pow2(8 * src_wave.size());
        src_spec = power_spectrum(bandpass(src_wave, config.band), pad);
        aug_spec = power_spectrum(bandpass(aug_wave, config.band), pad);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });

  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  PreservationResult result;
  std::size_t passed = 0;
  for (const auto& t : trials) passed += t.verdict.preserved ? 1 : 0;
  result.pass_rate = static_cast<double>(passed) / static_cast<double>(trials.size());
  result.trials = std::move(trials);
  result.first_src_spectrum = std::move(src_spec);
  result.first_aug_spectrum = std::move(aug_spec);
  return result;
}

}  // namespace rppg::harness
