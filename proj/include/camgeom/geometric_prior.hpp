#pragma once

#include "camgeom/camera_model.hpp"
#include "camgeom/ray_embedding.hpp"
#include "camgeom/tensor_io.hpp"

#include <cstdint>
#include <vector>

namespace camgeom {

/// Metric depth (meters) per pixel with a validity mask. Valid depths are
/// finite and strictly positive.
class DepthMap {
 public:
  DepthMap(int width, int height, std::vector<double> values, std::vector<std::uint8_t> valid);
  /// All pixels with a finite positive depth are valid; everything else is not.
  static DepthMap from_values(int width, int height, std::vector<double> values);
  /// dim must be 1; NaN (or any non-positive value) marks an invalid pixel.
  static DepthMap from_tensor(const Tensor& tensor);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double depth(int row, int col) const { return values_[index(row, col)]; }
  bool valid(int row, int col) const { return valid_[index(row, col)] != 0; }
  std::size_t valid_count() const;

  Tensor to_tensor() const;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

/// Camera-frame points on a rows x cols lattice with per-entry validity. Used at
/// pixel resolution (unproject) and token resolution (pool_to_tokens).
struct PointGrid {
  int rows = 0;
  int cols = 0;
  std::vector<Point3> points;
  std::vector<std::uint8_t> valid;

  const Point3& at(int row, int col) const {
    return points[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(col)];
  }
  bool is_valid(int row, int col) const {
    return valid[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(col)] != 0;
  }

  /// rows x cols x 3 tensor; invalid entries are NaN.
  Tensor to_tensor() const;
};

/// Pixel-resolution point cloud: pixel center (u, v) with depth Z maps to
/// ((u - cx) / fx * Z, (v - cy) / fy * Z, Z).
PointGrid unproject(const DepthMap& depth, const Intrinsics& k);

/// Token-resolution point grid. Each token takes the depth of the pixel under
/// its anchor (nearest sample, no averaging) and places it on the token's own
/// ray, so project(point) lands exactly on the anchor.
PointGrid pool_to_tokens(const DepthMap& depth, const Intrinsics& k, const TokenGridSpec& grid);

struct PointEmbeddingConfig {
  int dim = 96;
  double period = 100.0;  // meters
};

/// [x | y | z] blocks of dim/3 sinusoid channels each; invalid tokens are all
/// zero. dim must be a positive multiple of 6.
EmbeddingGrid embed_points(const PointGrid& grid, const PointEmbeddingConfig& config);

nlohmann::json point_embedding_sidecar(const Intrinsics& k, const TokenGridSpec& grid,
                                       const PointEmbeddingConfig& config);

/// Depth a camera-agnostic estimator reports: f_assumed * H_prior / h_proj.
double biased_depth_estimate(double projected_height_px, double height_prior_m,
                             double assumed_focal_px);
/// Depth from the true (current) fy: fy * H_prior / h_proj.
double aware_depth_estimate(double projected_height_px, double height_prior_m,
                            const Intrinsics& k);

}  // namespace camgeom
