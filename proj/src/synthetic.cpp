#include "rppg/synthetic.hpp"

#include "rppg/errors.hpp"
#include "rppg/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rppg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t frame_seed(std::uint64_t seed, Index t) {
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t + 1));
}

}  // namespace

Mask elliptical_mask(Index height, Index width, double semi_x, double semi_y) {
  Mask m(height, width);
  const double cx = (static_cast<double>(width) - 1.0) / 2.0;
  const double cy = (static_cast<double>(height) - 1.0) / 2.0;
  for (Index y = 0; y < height; ++y) {
    for (Index x = 0; x < width; ++x) {
      const double dx = (static_cast<double>(x) - cx) / semi_x;
      const double dy = (static_cast<double>(y) - cy) / semi_y;
      m(y, x) = dx * dx + dy * dy <= 1.0;
    }
  }
  return m;
}

SyntheticScene SyntheticScene::make_default() {
  SyntheticScene s;
  s.skin_mask = elliptical_mask(s.height, s.width, 20.0, 26.0);
  return s;
}

void SyntheticScene::validate() const {
  if (width <= 0 || height <= 0) throw ParamError("scene must have positive dimensions");
  if (skin_mask.rows() != height || skin_mask.cols() != width) {
    throw ParamError("skin mask does not match scene dimensions");
  }
  if (!skin_mask.any()) throw ParamError("skin mask is empty");
  const auto& a = pulse_strength;
  if (!(a(1) >= a(0) && a(0) >= a(2) && a(2) >= 0.0)) {
    throw ParamError("pulse strengths must satisfy a_G >= a_R >= a_B >= 0");
  }
  if (!(noise_sigma >= 0.0)) throw ParamError("noise sigma must be non-negative");
  if (!base_color.allFinite() || !background.allFinite()) throw ParamError("colours must be finite");
}

PpgWaveform generate_ppg_waveform(HeartRate hr, double duration_s, double fs,
                                  double harmonic_ratio, std::uint64_t seed) {
  for (double bpm : {hr.start_bpm, hr.end_bpm}) {
    if (!(bpm >= 40.0 && bpm <= 180.0)) throw ParamError("heart rate must lie in [40, 180] bpm");
  }
  if (!(fs > 0.0)) throw ParamError("sampling rate must be positive");
  const auto n = static_cast<Index>(std::llround(duration_s * fs));
  if (n < 64) throw ParamError("waveform needs at least 64 samples");

  Rng rng(seed);
  const double phase0 = rng.uniform();
  const double f0 = hr.start_bpm / 60.0;
  const double f1 = hr.end_bpm / 60.0;
  const double total = static_cast<double>(n) / fs;

  Eigen::VectorXd p(n);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double phi = phase0 + f0 * t + (f1 - f0) * t * t / (2.0 * total);
    p(i) = std::sin(kTwoPi * phi) + harmonic_ratio * std::sin(2.0 * kTwoPi * phi);
  }
  const double peak = p.cwiseAbs().maxCoeff();
  if (peak > 0.0) p /= peak;
  return PpgWaveform(std::move(p), fs, WaveKind::gold);
}

FrameSequence render_scene(const SyntheticScene& scene, const PpgWaveform& ppg) {
  scene.validate();
  const Index n = ppg.size();
  const double fs = ppg.fs();
  const Eigen::VectorXd& p = ppg.samples();

  // Saturation check on the noise-free skin signal.
  Index clipped = 0;
  for (Index t = 0; t < n; ++t) {
    const double drift = scene.drift_amplitude * std::sin(kTwoPi * scene.drift_hz * t / fs);
    for (int c = 0; c < 3; ++c) {
      const double v = scene.base_color(c) * (1.0 + scene.pulse_strength(c) * p(t)) + drift;
      if (v < 0.0 || v > 255.0) ++clipped;
    }
  }
  if (static_cast<double>(clipped) > 0.01 * static_cast<double>(3 * n)) {
    throw SaturationError("pulse modulation drives skin pixels into clamp saturation");
  }

  const Index h = scene.height, w = scene.width;
  std::vector<Image> frames;
  frames.reserve(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) {
    const double drift = scene.drift_amplitude * std::sin(kTwoPi * scene.drift_hz * t / fs);
    Image img(h, w);
    double skin[3];
    for (int c = 0; c < 3; ++c) {
      skin[c] = scene.base_color(c) * (1.0 + scene.pulse_strength(c) * p(t)) + drift;
    }
    Rng rng(frame_seed(scene.seed, t));
    const bool noisy = scene.noise_sigma > 0.0;
    for (int c = 0; c < 3; ++c) {
      Eigen::ArrayXXd& ch = img.channels[c];
      for (Index x = 0; x < w; ++x) {
        for (Index y = 0; y < h; ++y) {
          double v = scene.skin_mask(y, x) ? skin[c] : scene.background(c);
          if (noisy) v += scene.noise_sigma * rng.normal();
          ch(y, x) = std::clamp(v, 0.0, 255.0);
        }
      }
    }
    frames.push_back(std::move(img));
  }
  return FrameSequence(std::move(frames), fs, {scene.skin_mask});
}

PoseTrack PoseTrack::zeros(Index n, double fps) {
  PoseTrack t;
  t.rotation = Eigen::MatrixX3d::Zero(n, 3);
  t.translation = Eigen::MatrixX2d::Zero(n, 2);
  t.fps = fps;
  return t;
}

namespace {

Eigen::VectorXd smooth_axis(Rng& rng, Index n, double fps, double target_std) {
  static constexpr double kBaseHz[4] = {0.15, 0.27, 0.41, 0.56};
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (target_std == 0.0) return v;
  const double amp = target_std * std::sqrt(2.0 / 4.0);
  for (double base : kBaseHz) {
    const double f = base + rng.uniform(-0.03, 0.03);
    const double phase = rng.uniform(0.0, kTwoPi);
    for (Index i = 0; i < n; ++i) v(i) += amp * std::sin(kTwoPi * f * i / fps + phase);
  }
  return v;
}

}  // namespace

PoseTrack random_pose_track(Index n, double fps, double rotation_std, double translation_std,
                            std::uint64_t seed) {
  if (n < 2 || !(fps > 0.0)) throw ParamError("track needs >= 2 frames and positive fps");
  Rng rng(seed);
  PoseTrack track = PoseTrack::zeros(n, fps);
  for (int a = 0; a < 3; ++a) track.rotation.col(a) = smooth_axis(rng, n, fps, rotation_std);
  for (int a = 0; a < 2; ++a) track.translation.col(a) = smooth_axis(rng, n, fps, translation_std);
  return track;
}

PoseTrack pose_track_from_profile(const MotionProfile& profile, Index n) {
  PoseTrack track = PoseTrack::zeros(n, profile.fps);
  Eigen::MatrixXd pose = profile.pose;
  // NaN rows would poison the warp; hold the previous valid pose instead.
  for (Index i = 0; i < pose.rows(); ++i) {
    if (!pose.row(i).allFinite()) {
      if (i == 0) {
        pose.row(i).setZero();
      } else {
        pose.row(i) = pose.row(i - 1);
      }
    }
  }
  track.rotation = fit_track_length(pose, n);
  return track;
}

MotionProfile to_motion_profile(const PoseTrack& track, std::string id) {
  MotionProfile p;
  p.id = std::move(id);
  p.fps = track.fps;
  p.pose = track.rotation;
  p.aus = Eigen::MatrixXd::Zero(track.size(), kActionUnitCount);
  p.au_names = default_au_names();
  return p;
}

namespace {

// Chamfer distance (1, sqrt 2) from each mask pixel to the nearest non-mask
// pixel; pixels outside the frame count as non-mask.
Eigen::ArrayXXd boundary_distance(const Mask& mask) {
  const Index h = mask.rows(), w = mask.cols();
  const double inf = std::numeric_limits<double>::infinity();
  const double diag = std::numbers::sqrt2;
  Eigen::ArrayXXd d(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) d(y, x) = mask(y, x) ? inf : 0.0;
  }
  auto at = [&](Index y, Index x) { return (y < 0 || x < 0 || y >= h || x >= w) ? 0.0 : d(y, x); };
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      if (d(y, x) == 0.0) continue;
      d(y, x) = std::min({d(y, x), at(y, x - 1) + 1.0, at(y - 1, x) + 1.0,
                          at(y - 1, x - 1) + diag, at(y - 1, x + 1) + diag});
    }
  }
  for (Index y = h - 1; y >= 0; --y) {
    for (Index x = w - 1; x >= 0; --x) {
      if (d(y, x) == 0.0) continue;
      d(y, x) = std::min({d(y, x), at(y, x + 1) + 1.0, at(y + 1, x) + 1.0,
                          at(y + 1, x + 1) + diag, at(y + 1, x - 1) + diag});
    }
  }
  return d;
}

// Clamp-to-edge bilinear taps of one sample position.
struct Taps {
  Index i00, i01, i10, i11;  // column-major offsets
  double w00, w01, w10, w11;

  Taps(double x, double y, Index h, Index w) {
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const auto x0 = static_cast<Index>(x);
    const auto y0 = static_cast<Index>(y);
    const Index x1 = std::min(x0 + 1, w - 1);
    const Index y1 = std::min(y0 + 1, h - 1);
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    i00 = x0 * h + y0;
    i01 = x1 * h + y0;
    i10 = x0 * h + y1;
    i11 = x1 * h + y1;
    w00 = (1.0 - fx) * (1.0 - fy);
    w01 = fx * (1.0 - fy);
    w10 = (1.0 - fx) * fy;
    w11 = fx * fy;
  }

  double operator()(const double* img) const {
    return (img[i00] * w00 + img[i01] * w01) + (img[i10] * w10 + img[i11] * w11);
  }
};

Mask roi_as_mask(const Roi* roi, Index h, Index w) {
  if (roi == nullptr) return Mask::Constant(h, w, true);
  if (const auto* rect = std::get_if<Rect>(roi)) {
    Mask m = Mask::Constant(h, w, false);
    m.block(rect->y, rect->x, rect->h, rect->w).setConstant(true);
    return m;
  }
  return std::get<Mask>(*roi);
}

struct RigidPose {
  double cos_z = 1.0, sin_z = 0.0;
  double sx = 1.0, sy = 1.0;
  double tx = 0.0, ty = 0.0;
};

}  // namespace

FrameSequence apply_motion(const FrameSequence& video, const PoseTrack& track, MotionMode mode,
                           double warp_amp, const NonrigidField& field) {
  const auto n = static_cast<Index>(video.size());
  if (track.size() != n || track.translation.rows() != n) {
    throw PreconditionError("pose track length must equal frame count");
  }
  if (!(warp_amp >= 0.0)) throw PreconditionError("warp amplitude must be non-negative");
  if (!track.rotation.allFinite() || !track.translation.allFinite()) {
    throw PreconditionError("pose track contains non-finite values");
  }

  const bool rigid = mode != MotionMode::nonrigid;
  const bool nonrigid = mode != MotionMode::rigid && warp_amp > 0.0;
  const Index h = video.height(), w = video.width();
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  const bool has_roi = !video.rois().empty();

  std::vector<Image> frames;
  frames.reserve(video.size());
  std::vector<Roi> rois;

  Mask mask;
  Eigen::ArrayXXd mask_f;
  Eigen::ArrayXXd taper;
  const Roi* cached_roi = nullptr;

  for (Index t = 0; t < n; ++t) {
    const Roi* roi = video.roi_for(static_cast<std::size_t>(t));
    if (t == 0 || roi != cached_roi) {
      mask = roi_as_mask(roi, h, w);
      mask_f = mask.cast<double>();
      if (nonrigid) taper = (boundary_distance(mask) / (warp_amp + 1.0)).min(1.0);
      cached_roi = roi;
    }

    RigidPose pose;
    if (rigid) {
      const double rz = track.rotation(t, 2);
      pose.cos_z = std::cos(rz);
      pose.sin_z = std::sin(rz);
      pose.sx = std::max(std::abs(std::cos(track.rotation(t, 1))), 0.05);
      pose.sy = std::max(std::abs(std::cos(track.rotation(t, 0))), 0.05);
      pose.tx = track.translation(t, 0);
      pose.ty = track.translation(t, 1);

      Index total = 0, outside = 0;
      for (Index x = 0; x < w; ++x) {
        for (Index y = 0; y < h; ++y) {
          if (!mask(y, x)) continue;
          ++total;
          const double ux = pose.sx * (static_cast<double>(x) - cx);
          const double uy = pose.sy * (static_cast<double>(y) - cy);
          const double fx = cx + pose.tx + pose.cos_z * ux - pose.sin_z * uy;
          const double fy = cy + pose.ty + pose.sin_z * ux + pose.cos_z * uy;
          if (fx < -0.5 || fy < -0.5 || fx > static_cast<double>(w) - 0.5 ||
              fy > static_cast<double>(h) - 0.5) {
            ++outside;
          }
        }
      }
      if (static_cast<double>(outside) > 0.3 * static_cast<double>(total)) {
        throw MotionError("frame " + std::to_string(t) + " moves " + std::to_string(outside) +
                          " of " + std::to_string(total) + " skin pixels out of frame");
      }
    }

    const double phase = kTwoPi * field.rate_hz * static_cast<double>(t) / video.fps();
    const Image& src = video.frame(static_cast<std::size_t>(t));
    Image out(h, w);
    Mask out_mask(h, w);
    for (Index x = 0; x < w; ++x) {
      for (Index y = 0; y < h; ++y) {
        double qx = static_cast<double>(x);
        double qy = static_cast<double>(y);
        if (rigid) {
          const double ux = qx - cx - pose.tx;
          const double uy = qy - cy - pose.ty;
          qx = cx + (pose.cos_z * ux + pose.sin_z * uy) / pose.sx;
          qy = cy + (-pose.sin_z * ux + pose.cos_z * uy) / pose.sy;
        }
        if (has_roi) out_mask(y, x) = Taps(qx, qy, h, w)(mask_f.data()) >= 1.0 - 1e-9;
        double sx = qx, sy = qy;
        if (nonrigid) {
          const auto ix = static_cast<Index>(std::lround(qx));
          const auto iy = static_cast<Index>(std::lround(qy));
          if (ix >= 0 && iy >= 0 && ix < w && iy < h && mask(iy, ix)) {
            const double a = warp_amp * taper(iy, ix);
            sx += a * std::sin(kTwoPi * qy / field.wavelength_px + phase);
            sy += a * std::sin(kTwoPi * qx / field.wavelength_px + phase);
          }
        }
        const Taps taps(sx, sy, h, w);
        for (int c = 0; c < 3; ++c) out.channels[c](y, x) = taps(src.channels[c].data());
      }
    }
    frames.push_back(std::move(out));
    if (has_roi) rois.emplace_back(std::move(out_mask));
  }
  return FrameSequence(std::move(frames), video.fps(), std::move(rois));
}

}  // namespace rppg
