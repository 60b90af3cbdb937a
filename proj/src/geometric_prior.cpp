#include "camgeom/geometric_prior.hpp"

#include "camgeom/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace camgeom {

namespace {

bool usable_depth(double z) { return std::isfinite(z) && z > 0.0; }

}  // namespace

DepthMap::DepthMap(int width, int height, std::vector<double> values,
                   std::vector<std::uint8_t> valid)
    : width_(width), height_(height), values_(std::move(values)), valid_(std::move(valid)) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width < 1 || height < 1 || values_.size() != n || valid_.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "depth map shape mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (valid_[i] && !usable_depth(values_[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "depth map marks a non-positive or non-finite depth as valid at index " +
                      std::to_string(i));
    }
  }
}

DepthMap DepthMap::from_values(int width, int height, std::vector<double> values) {
  std::vector<std::uint8_t> valid(values.size());
  std::transform(values.begin(), values.end(), valid.begin(),
                 [](double z) { return static_cast<std::uint8_t>(usable_depth(z)); });
  return DepthMap(width, height, std::move(values), std::move(valid));
}

DepthMap DepthMap::from_tensor(const Tensor& tensor) {
  if (tensor.dim != 1) {
    throw Error(ErrorCode::kBadDimension, "depth tensor must have dim 1, got " + std::to_string(tensor.dim));
  }
  std::vector<double> values(tensor.values.begin(), tensor.values.end());
  return from_values(static_cast<int>(tensor.cols), static_cast<int>(tensor.rows), std::move(values));
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

Tensor DepthMap::to_tensor() const {
  Tensor t;
  t.rows = static_cast<std::uint32_t>(height_);
  t.cols = static_cast<std::uint32_t>(width_);
  t.dim = 1;
  t.values.resize(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    t.values[i] = valid_[i] ? static_cast<float>(values_[i]) : std::numeric_limits<float>::quiet_NaN();
  }
  return t;
}

Tensor PointGrid::to_tensor() const {
  Tensor t;
  t.rows = static_cast<std::uint32_t>(rows);
  t.cols = static_cast<std::uint32_t>(cols);
  t.dim = 3;
  t.values.reserve(points.size() * 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      t.values.push_back(valid[i] ? static_cast<float>(points[i][c])
                                  : std::numeric_limits<float>::quiet_NaN());
    }
  }
  return t;
}

namespace {

Point3 point_on_ray(const Pixel& p, double z, const Intrinsics& k) {
  return {(p.u - k.cx()) / k.fx() * z, (p.v - k.cy()) / k.fy() * z, z};
}

}  // namespace

PointGrid unproject(const DepthMap& depth, const Intrinsics& k) {
  if (depth.width() != k.width() || depth.height() != k.height()) {
    throw Error(ErrorCode::kExtentMismatch,
                "depth map is " + std::to_string(depth.width()) + "x" + std::to_string(depth.height()) +
                    " but intrinsics describe " + std::to_string(k.width()) + "x" +
                    std::to_string(k.height()));
  }
  PointGrid out;
  out.rows = depth.height();
  out.cols = depth.width();
  out.points.resize(static_cast<std::size_t>(out.rows) * out.cols, Point3::Zero());
  out.valid.resize(out.points.size(), 0);
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) {
      if (!depth.valid(i, j)) continue;
      const std::size_t idx = static_cast<std::size_t>(i) * out.cols + j;
      out.points[idx] = point_on_ray({j + 0.5, i + 0.5}, depth.depth(i, j), k);
      out.valid[idx] = 1;
    }
  }
  return out;
}

PointGrid pool_to_tokens(const DepthMap& depth, const Intrinsics& k, const TokenGridSpec& grid) {
  if (depth.width() != k.width() || depth.height() != k.height()) {
    throw Error(ErrorCode::kExtentMismatch, "depth map extent differs from intrinsics extent");
  }
  validate_grid(grid, k);
  PointGrid out;
  out.rows = grid.rows;
  out.cols = grid.cols;
  out.points.resize(static_cast<std::size_t>(grid.rows) * grid.cols, Point3::Zero());
  out.valid.resize(out.points.size(), 0);
  for (int i = 0; i < grid.rows; ++i) {
    for (int j = 0; j < grid.cols; ++j) {
      const Pixel anchor = grid.token_pixel(i, j);
      // Pixel containing the anchor; a final partial patch may put the anchor
      // past the edge, in which case the token is only kept if the nearest
      // pixel still lies inside its patch.
      const int col = std::clamp(static_cast<int>(std::floor(anchor.u)), 0, depth.width() - 1);
      const int row = std::clamp(static_cast<int>(std::floor(anchor.v)), 0, depth.height() - 1);
      const double reach = 0.5 * grid.patch;
      if (std::abs(col + 0.5 - anchor.u) > reach || std::abs(row + 0.5 - anchor.v) > reach) continue;
      if (!depth.valid(row, col)) continue;
      const std::size_t idx = static_cast<std::size_t>(i) * grid.cols + j;
      out.points[idx] = point_on_ray(anchor, depth.depth(row, col), k);
      out.valid[idx] = 1;
    }
  }
  return out;
}

EmbeddingGrid embed_points(const PointGrid& grid, const PointEmbeddingConfig& config) {
  if (config.dim < 6 || config.dim % 6 != 0) {
    throw Error(ErrorCode::kBadDimension,
                "point embedding dim must be a positive multiple of 6, got " + std::to_string(config.dim));
  }
  if (!(config.period > 0.0)) throw Error(ErrorCode::kInvalidArgument, "period must be positive");
  const std::size_t block = static_cast<std::size_t>(config.dim) / 3;
  EmbeddingGrid out(grid.rows, grid.cols, config.dim);
  for (int i = 0; i < grid.rows; ++i) {
    for (int j = 0; j < grid.cols; ++j) {
      if (!grid.is_valid(i, j)) continue;
      const Point3& p = grid.at(i, j);
      auto token = out.token(i, j);
      for (int c = 0; c < 3; ++c) sinusoid_encode(p[c], config.period, token.subspan(c * block, block));
    }
  }
  return out;
}

nlohmann::json point_embedding_sidecar(const Intrinsics& k, const TokenGridSpec& grid,
                                       const PointEmbeddingConfig& config) {
  const int block = config.dim / 3;
  return nlohmann::json{
      {"kind", "geometric_prior_embedding"},
      {"intrinsics", to_json(k)},
      {"token_grid", to_json(grid)},
      {"dim", config.dim},
      {"period", config.period},
      {"frame", "camera"},
      {"pooling", "nearest pixel under token anchor; point placed on the anchor ray"},
      {"invalid_tokens", "all-zero vector"},
      {"pair_layout", "interleaved sin,cos per frequency"},
      {"channels",
       nlohmann::json::array({
           {{"name", "x"}, {"offset", 0}, {"width", block}},
           {{"name", "y"}, {"offset", block}, {"width", block}},
           {{"name", "z"}, {"offset", 2 * block}, {"width", block}},
       })},
  };
}

namespace {

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kNonPositiveInput, std::string(name) + " must be positive and finite");
  }
}

}  // namespace

double biased_depth_estimate(double projected_height_px, double height_prior_m,
                             double assumed_focal_px) {
  require_positive(projected_height_px, "projected height");
  require_positive(height_prior_m, "height prior");
  require_positive(assumed_focal_px, "assumed focal");
  return assumed_focal_px * height_prior_m / projected_height_px;
}

double aware_depth_estimate(double projected_height_px, double height_prior_m,
                            const Intrinsics& k) {
  require_positive(projected_height_px, "projected height");
  require_positive(height_prior_m, "height prior");
  return k.fy() * height_prior_m / projected_height_px;
}

}  // namespace camgeom
