#pragma once

#include "camgeom/camera_model.hpp"
#include "camgeom/geometric_prior.hpp"
#include "camgeom/intrinsics_transforms.hpp"
#include "camgeom/random.hpp"
#include "camgeom/tensor_io.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace camgeom {

enum class SampleFormat { kU8, kF32 };

/// Row-major interleaved raster, 1 or 3 channels, 8-bit or float32 samples.
class RasterImage {
 public:
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);
  RasterImage(int width, int height, int channels, std::vector<float> data);
  static RasterImage zeros(int width, int height, int channels, SampleFormat format);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  SampleFormat format() const noexcept {
    return std::holds_alternative<std::vector<std::uint8_t>>(data_) ? SampleFormat::kU8
                                                                   : SampleFormat::kF32;
  }

  float sample(int row, int col, int channel) const;
  /// U8 images round to nearest and saturate.
  void set(int row, int col, int channel, float value);

  const std::vector<std::uint8_t>& u8() const { return std::get<std::vector<std::uint8_t>>(data_); }
  const std::vector<float>& f32() const { return std::get<std::vector<float>>(data_); }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(channel);
  }

  int width_;
  int height_;
  int channels_;
  std::variant<std::vector<std::uint8_t>, std::vector<float>> data_;
};

// Binary PPM (P6, 3 channels) and PGM (P5, 1 channel), maxval 255.
RasterImage decode_pnm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pnm(const RasterImage& image);
/// Float images travel as CGEM tensors with dim = channels.
RasterImage image_from_tensor(const Tensor& tensor);
Tensor image_to_tensor(const RasterImage& image);

enum class CanvasMode { kPad, kCrop };

/// Bilinear resampling of `image` onto t's output canvas. Pixels whose source
/// position lies outside the source extent get the pad value in pad mode; crop
/// mode throws CropOutOfBounds unless the whole canvas maps inside the source.
RasterImage resample(const RasterImage& image, const PixelTransform& t,
                     CanvasMode mode = CanvasMode::kPad, float pad_value = 0.0f);

/// Nearest-sample resampling for depth; uncovered pixels become invalid.
DepthMap resample_nearest(const DepthMap& depth, const PixelTransform& t,
                          CanvasMode mode = CanvasMode::kPad);

struct AugmentationPolicy {
  double scale_min = 0.7;
  double scale_max = 1.4;
  double shift_fraction = 0.15;  // max principal-point shift, fraction of the output extent
  CanvasMode mode = CanvasMode::kPad;
  bool anisotropic = false;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const AugmentationPolicy& policy);
AugmentationPolicy augmentation_policy_from_json(const nlohmann::json& j,
                                                 AugmentationPolicy base = {});

struct Sample {
  std::string id;
  RasterImage image;
  Intrinsics intrinsics;
  std::optional<DepthMap> depth;
  // Opaque 3D annotation payload; copied through untouched.
  std::optional<std::vector<std::uint8_t>> boxes;
};

struct AugmentedSample {
  std::string source_id;
  std::uint64_t seed = 0;
  RasterImage image;
  Intrinsics intrinsics;
  PixelTransform transform;
  std::optional<DepthMap> depth;
  std::optional<std::vector<std::uint8_t>> boxes;
};

/// Draws the transform for a source of the given extent.
PixelTransform draw_transform(int width, int height, const AugmentationPolicy& policy,
                              std::mt19937_64& rng);

AugmentedSample augment(const Sample& sample, const AugmentationPolicy& policy,
                        std::uint64_t seed);

struct SampleOutcome {
  std::size_t index = 0;
  std::string id;
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  std::optional<PixelTransform> transform;
};

struct BatchReport {
  std::vector<SampleOutcome> samples;
  double elapsed_seconds = 0.0;
  std::size_t succeeded() const;
  std::size_t failed() const;
  double throughput() const;  // samples per second
  nlohmann::json to_json() const;
};

/// Runs `count` independent samples on `workers` threads. `load(i)` produces
/// the input and `sink(i, out)` consumes the result; an exception from either
/// marks only that sample as failed.
BatchReport batch_augment(std::size_t count, const std::function<Sample(std::size_t)>& load,
                          const std::function<void(std::size_t, const AugmentedSample&)>& sink,
                          const AugmentationPolicy& policy, int workers);

/// In-memory convenience wrapper. Failed samples are std::nullopt.
std::vector<std::optional<AugmentedSample>> batch_augment(const std::vector<Sample>& samples,
                                                          const AugmentationPolicy& policy,
                                                          int workers, BatchReport* report = nullptr);

// ---------------------------------------------------------------------------
// File-level pipeline (JSON-lines manifest in, mirrored output tree out).

struct ManifestEntry {
  std::string id;
  std::filesystem::path image;
  std::variant<std::filesystem::path, Intrinsics> intrinsics;
  std::optional<std::filesystem::path> depth;
  std::optional<std::filesystem::path> boxes;
};

/// Relative paths are resolved against `base_dir`. Throws Parse with the line
/// number on malformed lines.
std::vector<ManifestEntry> parse_manifest(std::string_view text,
                                          const std::filesystem::path& base_dir);

Sample load_sample(const ManifestEntry& entry);

/// Augments every entry and writes images, intrinsics, depth and boxes under
/// `out_root` mirroring the input layout, plus manifest.jsonl, transforms.jsonl
/// and report.json.
BatchReport augment_manifest(const std::vector<ManifestEntry>& entries,
                             const std::filesystem::path& manifest_dir,
                             const std::filesystem::path& out_root,
                             const AugmentationPolicy& policy, int workers);

}  // namespace camgeom
