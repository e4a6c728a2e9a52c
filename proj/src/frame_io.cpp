#include "rppg/frame_io.hpp"

#include "rppg/errors.hpp"
#include "rppg/signal.hpp"

#include <nlohmann/json.hpp>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace rppg {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

double to_byte_scale(unsigned value, int bit_depth) {
  return bit_depth == 16 ? static_cast<double>(value) / 257.0 : static_cast<double>(value);
}

unsigned from_byte_scale(double value, int bit_depth) {
  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  const double scaled = bit_depth == 16 ? value * 257.0 : value;
  return static_cast<unsigned>(std::clamp(std::round(scaled), 0.0, maxv));
}

}  // namespace

Image read_png(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  std::vector<png_bytep> rows;
  std::vector<png_byte> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("corrupt PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // host order on little-endian
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);

  data.resize(stride * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = data.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels < 3) throw FormatError("unsupported PNG channel layout in " + path.string());
  Image img(static_cast<Index>(height), static_cast<Index>(width));
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        unsigned v;
        if (depth == 16) {
          std::uint16_t s;
          std::memcpy(&s, rows[y] + (x * channels + c) * 2, 2);
          v = s;
        } else {
          v = rows[y][x * channels + c];
        }
        img.channels[c](y, x) = to_byte_scale(v, depth);
      }
    }
  }
  return img;
}

void write_png(const fs::path& path, const Image& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw PreconditionError("PNG bit depth must be 8 or 16");
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  const auto height = static_cast<std::size_t>(image.height());
  const auto width = static_cast<std::size_t>(image.width());
  const std::size_t bytes = bit_depth / 8;
  std::vector<png_byte> data(height * width * 3 * bytes);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const unsigned v = from_byte_scale(
            image.channels[c](static_cast<Index>(y), static_cast<Index>(x)), bit_depth);
        png_byte* dst = data.data() + ((y * width + x) * 3 + c) * bytes;
        if (bit_depth == 16) {
          dst[0] = static_cast<png_byte>(v >> 8);
          dst[1] = static_cast<png_byte>(v & 0xFF);
        } else {
          dst[0] = static_cast<png_byte>(v);
        }
      }
    }
  }
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = data.data() + y * width * 3 * bytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing PNG " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string ppm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

Image read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (ppm_token(in) != "P6") throw FormatError("not a binary PPM (P6): " + path.string());
  Index width = 0, height = 0;
  unsigned maxval = 0;
  try {
    width = std::stol(ppm_token(in));
    height = std::stol(ppm_token(in));
    maxval = static_cast<unsigned>(std::stoul(ppm_token(in)));
  } catch (const std::exception&) {
    throw FormatError("malformed PPM header in " + path.string());
  }
  if (width <= 0 || height <= 0 || maxval == 0 || maxval > 65535) {
    throw FormatError("unsupported PPM geometry in " + path.string());
  }
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> data(static_cast<std::size_t>(width * height * 3 * bytes));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw FormatError("truncated PPM " + path.string());
  }
  Image img(height, width);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (Index y = 0; y < height; ++y) {
    for (Index x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const std::size_t i = static_cast<std::size_t>((y * width + x) * 3 + c) * bytes;
        const unsigned v = bytes == 2 ? (data[i] << 8) | data[i + 1] : data[i];
        img.channels[c](y, x) = static_cast<double>(v) * scale;
      }
    }
  }
  return img;
}

void write_ppm(const fs::path& path, const Image& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw PreconditionError("PPM bit depth must be 8 or 16");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "P6\n" << image.width() << ' ' << image.height() << '\n'
      << (bit_depth == 16 ? 65535 : 255) << '\n';
  std::vector<unsigned char> data;
  data.reserve(static_cast<std::size_t>(image.width() * image.height() * 3 * (bit_depth / 8)));
  for (Index y = 0; y < image.height(); ++y) {
    for (Index x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const unsigned v = from_byte_scale(image.channels[c](y, x), bit_depth);
        if (bit_depth == 16) data.push_back(static_cast<unsigned char>(v >> 8));
        data.push_back(static_cast<unsigned char>(v & 0xFF));
      }
    }
  }
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

FrameSequence load_frame_directory(const fs::path& dir, std::optional<double> fps_override) {
  if (!fs::is_directory(dir)) throw IoError("frame directory not found: " + dir.string());
  const fs::path meta_path = dir / "meta.json";
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw IoError("missing meta.json in " + dir.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid meta.json in " + dir.string() + ": " + e.what());
  }

  double fps = 0.0;
  if (fps_override) {
    fps = *fps_override;
  } else if (meta.contains("fps") && meta["fps"].is_number()) {
    fps = meta["fps"].get<double>();
  } else {
    throw FormatError("meta.json lacks a numeric fps");
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto ext = lower_ext(entry.path());
    if ((ext == ".png" || ext == ".ppm") && name.rfind("mask", 0) != 0) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw FormatError("no frames in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::vector<Image> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(lower_ext(f) == ".png" ? read_png(f) : read_ppm(f));

  std::vector<Roi> rois;
  if (meta.contains("roi_mask")) {
    const Image m = read_png(dir / meta["roi_mask"].get<std::string>());
    rois.emplace_back(Mask(m.channels[0] > 0.0));
  } else if (meta.contains("roi")) {
    const auto& r = meta["roi"];
    if (!r.is_array() || r.size() != 4) throw FormatError("roi must be [x, y, w, h]");
    rois.emplace_back(Rect{r[0].get<Index>(), r[1].get<Index>(), r[2].get<Index>(),
                           r[3].get<Index>()});
  }
  return FrameSequence(std::move(frames), fps, std::move(rois));
}

void write_frame_directory(const FrameSequence& video, const fs::path& dir, FrameFormat format) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (video.rois().size() > 1) throw FormatError("per-frame ROIs cannot be stored in meta.json");

  const bool png = format == FrameFormat::png8 || format == FrameFormat::png16;
  const int depth = (format == FrameFormat::png16 || format == FrameFormat::ppm16) ? 16 : 8;
  for (std::size_t i = 0; i < video.size(); ++i) {
    std::ostringstream name;
    name << "frame_" << std::setw(6) << std::setfill('0') << i << (png ? ".png" : ".ppm");
    if (png) {
      write_png(dir / name.str(), video.frame(i), depth);
    } else {
      write_ppm(dir / name.str(), video.frame(i), depth);
    }
  }

  nlohmann::json meta;
  meta["fps"] = video.fps();
  if (!video.rois().empty()) {
    const Roi& roi = video.rois().front();
    if (const auto* rect = std::get_if<Rect>(&roi)) {
      meta["roi"] = {rect->x, rect->y, rect->w, rect->h};
    } else {
      const Mask& m = std::get<Mask>(roi);
      Image img(m.rows(), m.cols());
      for (auto& ch : img.channels) ch = m.cast<double>() * 255.0;
      write_png(dir / "mask.png", img, 8);
      meta["roi_mask"] = "mask.png";
    }
  }
  std::ofstream out(dir / "meta.json");
  if (!out) throw IoError("cannot write meta.json in " + dir.string());
  out << meta.dump(2) << '\n';
}

GoldSeries read_gold_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("gold CSV is empty");
  line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
             line.end());
  if (line != "timestamp_s,value") throw FormatError("gold CSV header must be timestamp_s,value");
  std::vector<double> ts, vs;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("gold CSV row lacks a comma");
    try {
      ts.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError("unparseable gold CSV row: " + line);
    }
    if (ts.size() > 1 && !(ts.back() > ts[ts.size() - 2])) {
      throw FormatError("gold CSV timestamps must increase strictly");
    }
  }
  if (ts.size() < 2) throw FormatError("gold CSV needs at least 2 rows");
  GoldSeries g;
  g.timestamps = Eigen::Map<Eigen::VectorXd>(ts.data(), static_cast<Index>(ts.size()));
  g.values = Eigen::Map<Eigen::VectorXd>(vs.data(), static_cast<Index>(vs.size()));
  return g;
}

GoldSeries load_gold_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gold CSV " + path.string());
  return read_gold_csv(in);
}

void write_gold_csv(std::ostream& out, const PpgWaveform& wave) {
  out << "timestamp_s,value\n" << std::setprecision(17);
  for (Index i = 0; i < wave.size(); ++i) {
    out << static_cast<double>(i) / wave.fs() << ',' << wave.samples()(i) << '\n';
  }
}

PpgWaveform resample_gold(const GoldSeries& gold, double fs, Index n) {
  const double t0 = gold.timestamps(0);
  return PpgWaveform(interpolate_linear(gold.timestamps, gold.values, t0, fs, n), fs, WaveKind::gold);
}

}  // namespace rppg
