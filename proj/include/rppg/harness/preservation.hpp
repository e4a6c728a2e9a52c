#pragma once

#include "rppg/harness/config.hpp"
#include "rppg/random.hpp"
#include "rppg/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rppg::harness {

struct PreservationTrial {
  std::uint64_t seed = 0;
  double hr_bpm = 0.0;
  double noise_sigma = 0.0;
  double rigid_msd = 0.0;
  PreservationVerdict verdict;
};

struct PreservationResult {
  double pass_rate = 0.0;
  std::vector<PreservationTrial> trials;
  /// Spectra of the first trial's source and augmented pulses.
  std::optional<Spectrum> first_src_spectrum;
  std::optional<Spectrum> first_aug_spectrum;
};

/// Scene and track parameters of one trial, drawn from `trial_seed`.
struct TrialSetup {
  SyntheticScene scene;
  double hr_bpm = 0.0;
  PoseTrack track;
  double rigid_msd = 0.0;
};

TrialSetup make_trial_setup(const SyntheticSuiteConfig& suite, std::uint64_t trial_seed);

/// Random pulse strengths with a_G >= a_R >= a_B and the R weight kept below
/// the G/B midpoint, so both chrominance projections see the pulse with the
/// same sign.
Eigen::Array3d random_pulse_strength(Rng& rng);

/// Runs n_trials seeded trials: render a source scene, transfer a qualifying
/// motion track onto it (or re-render at HR + hr_shift_bpm first), extract
/// both pulses with config.method and compare their spectral peaks.
PreservationResult run_preservation_suite(const RunConfig& config, int n_trials);

}  // namespace rppg::harness
