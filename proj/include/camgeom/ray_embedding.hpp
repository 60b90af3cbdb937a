#pragma once

#include "camgeom/camera_model.hpp"
#include "camgeom/tensor_io.hpp"

#include <json.hpp>

#include <span>
#include <vector>

namespace camgeom {

/// Where a token's image coordinate is taken inside its patch.
enum class TokenAnchor { kCenter, kTopLeft };

struct TokenGridSpec {
  int rows = 1;
  int cols = 1;
  int patch = 1;
  TokenAnchor anchor = TokenAnchor::kCenter;

  /// Image coordinate associated with token (row, col).
  Pixel token_pixel(int row, int col) const;

  /// Smallest grid covering the image with the given patch size.
  static TokenGridSpec covering(const Intrinsics& k, int patch);
};

/// Throws GridExceedsImage when the grid overhangs the image by more than one
/// partial patch on either axis.
void validate_grid(const TokenGridSpec& grid, const Intrinsics& k);

/// Per-token normalized ray components rx = (u - cx) / fx, ry = (v - cy) / fy.
class RayGrid {
 public:
  RayGrid(int rows, int cols, std::vector<double> rx, std::vector<double> ry);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double rx(int row, int col) const { return rx_[index(row, col)]; }
  double ry(int row, int col) const { return ry_[index(row, col)]; }
  std::span<const double> rx_values() const noexcept { return rx_; }
  std::span<const double> ry_values() const noexcept { return ry_; }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  int rows_;
  int cols_;
  std::vector<double> rx_;
  std::vector<double> ry_;
};

/// rows x cols x dim values, row-major with the channel index fastest.
class EmbeddingGrid {
 public:
  EmbeddingGrid(int rows, int cols, int dim);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int dim() const noexcept { return dim_; }

  std::span<double> token(int row, int col);
  std::span<const double> token(int row, int col) const;
  std::span<const double> values() const noexcept { return data_; }

  /// Narrowed to float32 for the on-disk tensor format.
  Tensor to_tensor() const;

 private:
  int rows_;
  int cols_;
  int dim_;
  std::vector<double> data_;
};

struct CameraEmbeddingConfig {
  int dim = 256;
  double period = 10000.0;       // base period T of the sinusoid ladder
  double focal_reference = 1000.0;  // f0; focals enter as ln(f / f0)
};

/// Writes sin/cos pairs for scalar x into `out` (size must be even):
///   out[2m] = sin(x / period^(2m / n)), out[2m + 1] = cos(same), n = out.size().
void sinusoid_encode(double x, double period, std::span<double> out);

RayGrid ray_grid(const Intrinsics& k, const TokenGridSpec& grid);

/// Camera embedding with channel layout [rx | ry | ln(fx/f0) | ln(fy/f0)], each
/// block dim/4 wide. dim must be a positive multiple of 8.
EmbeddingGrid embed(const RayGrid& grid, const Intrinsics& k, const CameraEmbeddingConfig& config);

nlohmann::json to_json(const TokenGridSpec& grid);
TokenGridSpec token_grid_from_json(const nlohmann::json& j);

/// Sidecar describing an exported camera embedding.
nlohmann::json camera_embedding_sidecar(const Intrinsics& k, const TokenGridSpec& grid,
                                        const CameraEmbeddingConfig& config);

}  // namespace camgeom
