#pragma once

#include "rppg/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace rppg {

enum class FrameFormat { png8, png16, ppm8, ppm16 };

/// Reads a frame directory: zero-padded, lexicographically ordered `.png` /
/// `.ppm` files plus `meta.json` with `fps`, optional `roi` = [x, y, w, h]
/// and optional `roi_mask` (grayscale PNG, non-zero = skin, relative path).
/// Pixel values land on the 0-255 scale; 16-bit samples are divided by 257.
FrameSequence load_frame_directory(const std::filesystem::path& dir,
                                   std::optional<double> fps_override = std::nullopt);

/// Writes frames as frame_000000.<ext> plus meta.json. A shared mask ROI is
/// written to mask.png; a shared rectangle goes into `roi`. Per-frame ROIs
/// are not representable and raise FormatError.
void write_frame_directory(const FrameSequence& video, const std::filesystem::path& dir,
                           FrameFormat format = FrameFormat::png16);

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image, int bit_depth);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& image, int bit_depth);

/// Gold PPG CSV: header `timestamp_s,value`, strictly increasing timestamps.
struct GoldSeries {
  Eigen::VectorXd timestamps;
  Eigen::VectorXd values;
};

GoldSeries read_gold_csv(std::istream& in);
GoldSeries load_gold_csv(const std::filesystem::path& path);
void write_gold_csv(std::ostream& out, const PpgWaveform& wave);

/// Gold series interpolated onto n samples at fs, time measured from the
/// first timestamp.
PpgWaveform resample_gold(const GoldSeries& gold, double fs, Index n);

}  // namespace rppg
