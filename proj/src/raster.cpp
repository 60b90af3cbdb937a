#include "camgeom/augmentation.hpp"

#include "camgeom/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace camgeom {

namespace {

void check_shape(int width, int height, int channels, std::size_t size) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kInvalidArgument, "image extent must be at least 1x1");
  if (channels != 1 && channels != 3) throw Error(ErrorCode::kInvalidArgument, "images have 1 or 3 channels");
  if (size != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidArgument, "image data length does not match width*height*channels");
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels, u8().size());
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels, f32().size());
}

RasterImage RasterImage::zeros(int width, int height, int channels, SampleFormat format) {
  const auto n = static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * std::max(channels, 0);
  if (format == SampleFormat::kU8) return RasterImage(width, height, channels, std::vector<std::uint8_t>(n, 0));
  return RasterImage(width, height, channels, std::vector<float>(n, 0.0f));
}

float RasterImage::sample(int row, int col, int channel) const {
  const auto i = index(row, col, channel);
  if (const auto* bytes = std::get_if<std::vector<std::uint8_t>>(&data_)) return (*bytes)[i];
  return std::get<std::vector<float>>(data_)[i];
}

void RasterImage::set(int row, int col, int channel, float value) {
  const auto i = index(row, col, channel);
  if (auto* bytes = std::get_if<std::vector<std::uint8_t>>(&data_)) {
    (*bytes)[i] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
  } else {
    std::get<std::vector<float>>(data_)[i] = value;
  }
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token.push_back(static_cast<char>(bytes[pos++]));
  }
  return token;
}

int pnm_int(std::span<const std::uint8_t> bytes, std::size_t& pos, const char* what) {
  const std::string token = pnm_token(bytes, pos);
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(c); }) ||
      token.size() > 9) {
    throw Error(ErrorCode::kParse, std::string("PNM: bad ") + what + " \"" + token + "\"");
  }
  return std::stoi(token);
}

}  // namespace

RasterImage decode_pnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string magic = pnm_token(bytes, pos);
  int channels = 0;
  if (magic == "P6") {
    channels = 3;
  } else if (magic == "P5") {
    channels = 1;
  } else {
    throw Error(ErrorCode::kParse, "PNM: unsupported magic \"" + magic + "\" (expected P5 or P6)");
  }
  const int width = pnm_int(bytes, pos, "width");
  const int height = pnm_int(bytes, pos, "height");
  const int maxval = pnm_int(bytes, pos, "maxval");
  if (maxval != 255) throw Error(ErrorCode::kParse, "PNM: only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw Error(ErrorCode::kParse, "PNM: truncated header");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - pos != n) {
    throw Error(ErrorCode::kParse, "PNM: expected " + std::to_string(n) + " data bytes, found " +
                                       std::to_string(bytes.size() - pos));
  }
  return RasterImage(width, height, channels,
                     std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end()));
}

std::vector<std::uint8_t> encode_pnm(const RasterImage& image) {
  if (image.format() != SampleFormat::kU8) {
    throw Error(ErrorCode::kInvalidArgument, "PNM output needs an 8-bit image");
  }
  const std::string header = std::string(image.channels() == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(image.width()) + " " + std::to_string(image.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.u8().begin(), image.u8().end());
  return out;
}

RasterImage image_from_tensor(const Tensor& tensor) {
  if (tensor.dim != 1 && tensor.dim != 3) {
    throw Error(ErrorCode::kBadDimension, "image tensors need dim 1 or 3");
  }
  return RasterImage(static_cast<int>(tensor.cols), static_cast<int>(tensor.rows),
                     static_cast<int>(tensor.dim), tensor.values);
}

Tensor image_to_tensor(const RasterImage& image) {
  Tensor t;
  t.rows = static_cast<std::uint32_t>(image.height());
  t.cols = static_cast<std::uint32_t>(image.width());
  t.dim = static_cast<std::uint32_t>(image.channels());
  if (image.format() == SampleFormat::kF32) {
    t.values = image.f32();
  } else {
    t.values.assign(image.u8().begin(), image.u8().end());
  }
  return t;
}

namespace {

void check_crop_window(const PixelTransform& t, int src_width, int src_height) {
  const Pixel lo = t.apply_inverse({0.0, 0.0});
  const Pixel hi = t.apply_inverse({static_cast<double>(t.out_width()), static_cast<double>(t.out_height())});
  const double tol = 1e-9 * std::max(src_width, src_height);
  if (lo.u < -tol || lo.v < -tol || hi.u > src_width + tol || hi.v > src_height + tol) {
    throw Error(ErrorCode::kCropOutOfBounds, "crop window [" + std::to_string(lo.u) + ", " +
                                                 std::to_string(hi.u) + "] x [" + std::to_string(lo.v) +
                                                 ", " + std::to_string(hi.v) +
                                                 "] leaves the source image");
  }
}

bool covers(const Pixel& p, int width, int height) {
  return p.u >= 0.0 && p.v >= 0.0 && p.u <= width && p.v <= height;
}

}  // namespace

RasterImage resample(const RasterImage& image, const PixelTransform& t, CanvasMode mode,
                     float pad_value) {
  if (mode == CanvasMode::kCrop) check_crop_window(t, image.width(), image.height());
  RasterImage out = RasterImage::zeros(t.out_width(), t.out_height(), image.channels(), image.format());
  const int w = image.width();
  const int h = image.height();
  for (int i = 0; i < out.height(); ++i) {
    for (int j = 0; j < out.width(); ++j) {
      const Pixel src = t.apply_inverse({j + 0.5, i + 0.5});
      if (!covers(src, w, h)) {
        for (int c = 0; c < out.channels(); ++c) out.set(i, j, c, pad_value);
        continue;
      }
      // Sample lattice sits at half-integers; edges replicate.
      const double x = src.u - 0.5;
      const double y = src.v - 0.5;
      const double fx0 = std::floor(x);
      const double fy0 = std::floor(y);
      const double ax = x - fx0;
      const double ay = y - fy0;
      const int x0 = std::clamp(static_cast<int>(fx0), 0, w - 1);
      const int x1 = std::clamp(static_cast<int>(fx0) + 1, 0, w - 1);
      const int y0 = std::clamp(static_cast<int>(fy0), 0, h - 1);
      const int y1 = std::clamp(static_cast<int>(fy0) + 1, 0, h - 1);
      for (int c = 0; c < out.channels(); ++c) {
        const double top = image.sample(y0, x0, c) * (1.0 - ax) + image.sample(y0, x1, c) * ax;
        const double bottom = image.sample(y1, x0, c) * (1.0 - ax) + image.sample(y1, x1, c) * ax;
        out.set(i, j, c, static_cast<float>(top * (1.0 - ay) + bottom * ay));
      }
    }
  }
  return out;
}

DepthMap resample_nearest(const DepthMap& depth, const PixelTransform& t, CanvasMode mode) {
  if (mode == CanvasMode::kCrop) check_crop_window(t, depth.width(), depth.height());
  const auto n = static_cast<std::size_t>(t.out_width()) * t.out_height();
  std::vector<double> values(n, 0.0);
  std::vector<std::uint8_t> valid(n, 0);
  for (int i = 0; i < t.out_height(); ++i) {
    for (int j = 0; j < t.out_width(); ++j) {
      const Pixel src = t.apply_inverse({j + 0.5, i + 0.5});
      if (!covers(src, depth.width(), depth.height())) continue;
      const int col = std::min(static_cast<int>(std::floor(src.u)), depth.width() - 1);
      const int row = std::min(static_cast<int>(std::floor(src.v)), depth.height() - 1);
      if (!depth.valid(row, col)) continue;
      const std::size_t idx = static_cast<std::size_t>(i) * t.out_width() + j;
      values[idx] = depth.depth(row, col);
      valid[idx] = 1;
    }
  }
  return DepthMap(t.out_width(), t.out_height(), std::move(values), std::move(valid));
}

}  // namespace camgeom
