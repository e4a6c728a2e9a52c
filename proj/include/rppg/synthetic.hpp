#pragma once

#include "rppg/motion.hpp"
#include "rppg/types.hpp"

#include <cstdint>
#include <string>

namespace rppg {

/// Flat-shaded scene whose skin pixels carry an embedded pulse.
///
/// Skin pixel value: clamp(base_c * (1 + a_c * p(t)) + drift(t) + noise, 0, 255)
/// with drift(t) = drift_amplitude * sin(2 pi drift_hz t). Background pixels
/// are static plus noise.
struct SyntheticScene {
  Index width = 64;
  Index height = 64;
  Mask skin_mask;
  Eigen::Array3d base_color{170.0, 120.0, 95.0};
  Eigen::Array3d background{40.0, 55.0, 70.0};
  Eigen::Array3d pulse_strength{0.006, 0.012, 0.004};  // (a_R, a_G, a_B)
  double noise_sigma = 0.0;  // 8-bit counts
  double drift_amplitude = 0.0;
  double drift_hz = 0.0;
  std::uint64_t seed = 0;

  /// 64x64 with an elliptical skin mask covering about 40% of the frame.
  static SyntheticScene make_default();

  /// Throws ParamError when an invariant does not hold.
  void validate() const;
};

/// Ellipse centred in an h x w frame.
Mask elliptical_mask(Index height, Index width, double semi_x, double semi_y);

/// Heart rate held constant (start == end) or drifting linearly.
struct HeartRate {
  double start_bpm = 72.0;
  double end_bpm = 72.0;

  static HeartRate constant(double bpm) { return {bpm, bpm}; }
};

/// p(t) = sin(2 pi phi(t)) + harmonic_ratio * sin(4 pi phi(t)) with phi the
/// integrated instantaneous frequency, scaled to unit peak. The seed only sets
/// the starting phase. Kind is gold.
PpgWaveform generate_ppg_waveform(HeartRate hr, double duration_s, double fs,
                                  double harmonic_ratio = 0.3, std::uint64_t seed = 0);

/// Renders one frame per waveform sample at fps = ppg.fs(). The skin mask is
/// attached as the sequence ROI. Throws SaturationError when the noise-free
/// modulation pushes more than 1% of skin samples outside [0, 255].
FrameSequence render_scene(const SyntheticScene& scene, const PpgWaveform& ppg);

/// Per-frame head rotation (rad) and in-plane translation (pixels).
struct PoseTrack {
  Eigen::MatrixX3d rotation;     // Rx, Ry, Rz
  Eigen::MatrixX2d translation;  // tx, ty
  double fps = 30.0;

  Index size() const { return rotation.rows(); }
  static PoseTrack zeros(Index n, double fps);
};

/// Smooth random track: each axis is a sum of four sinusoids at separated
/// frequencies in 0.12-0.6 Hz with random phases, scaled so the per-axis
/// standard deviation is about `rotation_std` (`translation_std` for tx, ty).
PoseTrack random_pose_track(Index n, double fps, double rotation_std, double translation_std,
                            std::uint64_t seed);

/// Driving profile pose resized to n frames by reflected looping; no translation.
PoseTrack pose_track_from_profile(const MotionProfile& profile, Index n);

/// Wraps a track as a motion profile (AUs all zero) for summarize_motion.
MotionProfile to_motion_profile(const PoseTrack& track, std::string id = "track");

enum class MotionMode { rigid, nonrigid, both };

struct NonrigidField {
  double wavelength_px = 16.0;
  double rate_hz = 0.3;  // phase advance of the displacement pattern
};

/// Parametric stand-in for motion transfer.
///
/// Rigid: in-plane rotation by Rz about the frame centre, translation
/// (tx, ty), and out-of-plane Rx / Ry approximated by vertical / horizontal
/// scaling by |cos|. Non-rigid: sinusoidal displacement of amplitude
/// `warp_amp` pixels tapered to zero at the skin boundary, applied before the
/// rigid transform. Bilinear sampling with edge replication. The skin ROI is
/// carried through the same transform.
///
/// Throws MotionError when more than 30% of skin pixels leave the frame.
FrameSequence apply_motion(const FrameSequence& video, const PoseTrack& track, MotionMode mode,
                           double warp_amp, const NonrigidField& field = {});

}  // namespace rppg
