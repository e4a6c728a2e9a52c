#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace rppg {

using Eigen::Index;

/// One planar RGB image. Each channel is height x width; values are on the
/// 0-255 scale unless the producer documents otherwise (unit-interval inputs
/// are accepted everywhere because every consumer is linear in pixel values).
struct Image {
  std::array<Eigen::ArrayXXd, 3> channels;

  Image() = default;
  Image(Index height, Index width);

  Index height() const { return channels[0].rows(); }
  Index width() const { return channels[0].cols(); }
  bool same_shape(const Image& other) const;
};

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Rect {
  Index x = 0;
  Index y = 0;
  Index w = 0;
  Index h = 0;
};

using Roi = std::variant<Rect, Mask>;

/// Ordered frames with a frame rate and optional skin region.
///
/// `rois` is empty (full frame), holds one region shared by all frames, or
/// one region per frame. Construction validates every invariant; the object
/// is immutable afterwards.
class FrameSequence {
 public:
  FrameSequence(std::vector<Image> frames, double fps, std::vector<Roi> rois = {});

  const std::vector<Image>& frames() const { return frames_; }
  const Image& frame(std::size_t i) const { return frames_[i]; }
  std::size_t size() const { return frames_.size(); }
  double fps() const { return fps_; }
  Index height() const { return frames_.front().height(); }
  Index width() const { return frames_.front().width(); }
  const std::vector<Roi>& rois() const { return rois_; }

  /// Region for frame i, or nullptr for the full frame.
  const Roi* roi_for(std::size_t i) const;

 private:
  std::vector<Image> frames_;
  double fps_;
  std::vector<Roi> rois_;
};

/// Per-frame spatial means of a skin region.
class RgbTrace {
 public:
  RgbTrace(Eigen::VectorXd r, Eigen::VectorXd g, Eigen::VectorXd b, double fps);

  const Eigen::VectorXd& r() const { return r_; }
  const Eigen::VectorXd& g() const { return g_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& channel(int c) const;
  Index size() const { return r_.size(); }
  double fps() const { return fps_; }

  RgbTrace scaled(double gain) const;

 private:
  Eigen::VectorXd r_, g_, b_;
  double fps_;
};

enum class WaveKind { gold, extracted, derivative };

std::string_view to_string(WaveKind kind);

/// Uniformly sampled scalar physiological signal.
class PpgWaveform {
 public:
  PpgWaveform(Eigen::VectorXd samples, double fs, WaveKind kind = WaveKind::extracted);

  const Eigen::VectorXd& samples() const { return samples_; }
  Index size() const { return samples_.size(); }
  double fs() const { return fs_; }
  WaveKind kind() const { return kind_; }
  double duration_s() const { return static_cast<double>(samples_.size()) / fs_; }

  PpgWaveform scaled(double gain) const;
  PpgWaveform head(Index n) const;

 private:
  Eigen::VectorXd samples_;
  double fs_;
  WaveKind kind_;
};

}  // namespace rppg
