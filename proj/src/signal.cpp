#include "rppg/signal.hpp"

#include "rppg/errors.hpp"
#include "rppg/stats.hpp"

#include <cmath>
#include <string>

namespace rppg {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void check_roi(const Roi& roi, Index height, Index width) {
  if (const auto* rect = std::get_if<Rect>(&roi)) {
    if (rect->w <= 0 || rect->h <= 0) throw RegionError("rectangular ROI is empty");
    if (rect->x < 0 || rect->y < 0 || rect->x + rect->w > width || rect->y + rect->h > height) {
      throw RegionError("rectangular ROI exceeds frame bounds");
    }
  } else {
    const auto& mask = std::get<Mask>(roi);
    if (mask.rows() != height || mask.cols() != width) {
      throw RegionError("ROI mask does not match frame dimensions");
    }
    if (!mask.any()) throw RegionError("ROI mask is empty");
  }
}

}  // namespace

Image::Image(Index height, Index width) {
  for (auto& c : channels) c = Eigen::ArrayXXd::Zero(height, width);
}

bool Image::same_shape(const Image& other) const {
  for (int c = 0; c < 3; ++c) {
    if (channels[c].rows() != other.channels[c].rows() ||
        channels[c].cols() != other.channels[c].cols()) {
      return false;
    }
  }
  return true;
}

FrameSequence::FrameSequence(std::vector<Image> frames, double fps, std::vector<Roi> rois)
    : frames_(std::move(frames)), fps_(fps), rois_(std::move(rois)) {
  if (frames_.empty()) throw FormatError("frame sequence is empty");
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) throw FormatError("fps must be positive");
  const Image& first = frames_.front();
  if (first.height() <= 0 || first.width() <= 0) throw FormatError("frames have no pixels");
  for (const auto& f : frames_) {
    if (!f.same_shape(first) || f.channels[1].rows() != first.height() ||
        f.channels[2].rows() != first.height()) {
      throw FormatError("frames have mismatched shapes");
    }
  }
  if (!rois_.empty() && rois_.size() != 1 && rois_.size() != frames_.size()) {
    throw RegionError("expected 0, 1 or one ROI per frame");
  }
  for (const auto& roi : rois_) check_roi(roi, first.height(), first.width());
}

const Roi* FrameSequence::roi_for(std::size_t i) const {
  if (rois_.empty()) return nullptr;
  if (rois_.size() == 1) return &rois_.front();
  return &rois_[i];
}

RgbTrace::RgbTrace(Eigen::VectorXd r, Eigen::VectorXd g, Eigen::VectorXd b, double fps)
    : r_(std::move(r)), g_(std::move(g)), b_(std::move(b)), fps_(fps) {
  if (r_.size() != g_.size() || r_.size() != b_.size()) {
    throw FormatError("trace channels differ in length");
  }
  if (r_.size() < 2) throw FormatError("trace needs at least 2 samples");
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) throw FormatError("trace fps must be positive");
  if (!all_finite(r_) || !all_finite(g_) || !all_finite(b_)) {
    throw FormatError("trace contains non-finite values");
  }
}

const Eigen::VectorXd& RgbTrace::channel(int c) const {
  switch (c) {
    case 0: return r_;
    case 1: return g_;
    default: return b_;
  }
}

RgbTrace RgbTrace::scaled(double gain) const {
  return RgbTrace(gain * r_, gain * g_, gain * b_, fps_);
}

std::string_view to_string(WaveKind kind) {
  switch (kind) {
    case WaveKind::gold: return "gold";
    case WaveKind::extracted: return "extracted";
    case WaveKind::derivative: return "derivative";
  }
  return "extracted";
}

PpgWaveform::PpgWaveform(Eigen::VectorXd samples, double fs, WaveKind kind)
    : samples_(std::move(samples)), fs_(fs), kind_(kind) {
  if (samples_.size() < 2) throw FormatError("waveform needs at least 2 samples");
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) throw FormatError("sampling rate must be positive");
  if (!samples_.allFinite()) throw FormatError("waveform contains non-finite values");
}

PpgWaveform PpgWaveform::scaled(double gain) const {
  return PpgWaveform(gain * samples_, fs_, kind_);
}

PpgWaveform PpgWaveform::head(Index n) const {
  return PpgWaveform(samples_.head(std::min(n, samples_.size())), fs_, kind_);
}

RgbTrace extract_rgb_trace(const FrameSequence& video) {
  const Index n = static_cast<Index>(video.size());
  std::array<Eigen::VectorXd, 3> means;
  for (auto& m : means) m.resize(n);

  for (Index t = 0; t < n; ++t) {
    const Image& frame = video.frame(static_cast<std::size_t>(t));
    const Roi* roi = video.roi_for(static_cast<std::size_t>(t));
    for (int c = 0; c < 3; ++c) {
      const Eigen::ArrayXXd& ch = frame.channels[c];
      double value = 0.0;
      if (roi == nullptr) {
        value = ch.mean();
      } else if (const auto* rect = std::get_if<Rect>(roi)) {
        value = ch.block(rect->y, rect->x, rect->h, rect->w).mean();
      } else {
        const Mask& mask = std::get<Mask>(*roi);
        const Index count = mask.count();
        if (count == 0) throw RegionError("ROI mask is empty");
        value = mask.select(ch, 0.0).sum() / static_cast<double>(count);
      }
      means[c](t) = value;
    }
  }
  return RgbTrace(std::move(means[0]), std::move(means[1]), std::move(means[2]), video.fps());
}

RgbTrace normalize_trace(const RgbTrace& trace) {
  std::array<Eigen::VectorXd, 3> out;
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd& x = trace.channel(c);
    const double mu = stats::mean(x);
    const double scale = x.cwiseAbs().maxCoeff();
    if (mu == 0.0 || std::abs(mu) <= 1e-12 * scale) {
      throw DegenerateSignalError("channel " + std::to_string(c) + " has zero temporal mean");
    }
    out[c] = (x.array() / mu - 1.0).matrix();
  }
  return RgbTrace(std::move(out[0]), std::move(out[1]), std::move(out[2]), trace.fps());
}

PpgWaveform detrend(const PpgWaveform& wave, double cutoff_window_s) {
  const double fs = wave.fs();
  if (!(cutoff_window_s > 2.0 / fs)) {
    throw WindowError("detrend window must span more than 2 samples");
  }
  Index len = static_cast<Index>(std::llround(cutoff_window_s * fs));
  if (len % 2 == 0) ++len;
  if (len > wave.size()) throw WindowError("detrend window longer than signal");
  const Eigen::VectorXd trend = moving_average(wave.samples(), len / 2);
  return PpgWaveform(wave.samples() - trend, fs, wave.kind());
}

PpgWaveform first_derivative_label(const PpgWaveform& wave) {
  const Index n = wave.size();
  if (n < 3) throw PreconditionError("derivative label needs at least 3 samples");
  const Eigen::VectorXd& p = wave.samples();
  const Eigen::VectorXd d = p.tail(n - 1) - p.head(n - 1);
  const double sd = stats::sample_std(d);
  if (!(sd > 0.0)) throw DegenerateSignalError("differences have zero variance");
  return PpgWaveform(d / sd, wave.fs(), WaveKind::derivative);
}

Eigen::VectorXd interpolate_linear(const Eigen::VectorXd& t, const Eigen::VectorXd& v,
                                   double t0, double fs, Index n) {
  Eigen::VectorXd out(n);
  const Index m = t.size();
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    const double ti = t0 + static_cast<double>(i) / fs;
    if (ti <= t(0)) {
      out(i) = v(0);
      continue;
    }
    if (ti >= t(m - 1)) {
      out(i) = v(m - 1);
      continue;
    }
    while (k + 1 < m && t(k + 1) < ti) ++k;
    const double span = t(k + 1) - t(k);
    const double w = span > 0.0 ? (ti - t(k)) / span : 0.0;
    out(i) = (1.0 - w) * v(k) + w * v(k + 1);
  }
  return out;
}

RgbTrace resample_trace(const RgbTrace& trace, double target_fps) {
  if (!(target_fps > 0.0) || !std::isfinite(target_fps)) {
    throw PreconditionError("target fps must be positive");
  }
  const double fps = trace.fps();
  if (target_fps / fps > 8.0) throw ResampleError("upsampling ratio exceeds 8");

  const double ratio = fps / target_fps;
  const double k_round = std::round(ratio);
  const Index n = trace.size();

  if (k_round >= 1.0 && std::abs(ratio - k_round) < 1e-9) {
    const Index k = static_cast<Index>(k_round);
    const Index m = (n + k - 1) / k;
    std::array<Eigen::VectorXd, 3> out;
    for (int c = 0; c < 3; ++c) {
      out[c].resize(m);
      for (Index i = 0; i < m; ++i) out[c](i) = trace.channel(c)(i * k);
    }
    return RgbTrace(std::move(out[0]), std::move(out[1]), std::move(out[2]), target_fps);
  }

  const double span = static_cast<double>(n - 1) / fps;
  const Index m = static_cast<Index>(std::floor(span * target_fps + 1e-9)) + 1;
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fps;
  std::array<Eigen::VectorXd, 3> out;
  for (int c = 0; c < 3; ++c) out[c] = interpolate_linear(t, trace.channel(c), 0.0, target_fps, m);
  return RgbTrace(std::move(out[0]), std::move(out[1]), std::move(out[2]), target_fps);
}

}  // namespace rppg
