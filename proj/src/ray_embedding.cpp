#include "camgeom/ray_embedding.hpp"

#include "camgeom/error.hpp"

#include <cmath>
#include <string>

namespace camgeom {

Pixel TokenGridSpec::token_pixel(int row, int col) const {
  const double offset = anchor == TokenAnchor::kCenter ? 0.5 : 0.0;
  return {(col + offset) * patch, (row + offset) * patch};
}

TokenGridSpec TokenGridSpec::covering(const Intrinsics& k, int patch) {
  if (patch < 1) throw Error(ErrorCode::kInvalidArgument, "patch must be at least 1");
  return TokenGridSpec{(k.height() + patch - 1) / patch, (k.width() + patch - 1) / patch, patch,
                       TokenAnchor::kCenter};
}

void validate_grid(const TokenGridSpec& grid, const Intrinsics& k) {
  if (grid.rows < 1 || grid.cols < 1 || grid.patch < 1) {
    throw Error(ErrorCode::kInvalidArgument, "token grid dimensions must be at least 1");
  }
  const long long rows_px = static_cast<long long>(grid.rows) * grid.patch;
  const long long cols_px = static_cast<long long>(grid.cols) * grid.patch;
  if (rows_px > k.height() + grid.patch || cols_px > k.width() + grid.patch) {
    throw Error(ErrorCode::kGridExceedsImage,
                std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " tokens of " +
                    std::to_string(grid.patch) + " px overhang a " + std::to_string(k.width()) +
                    "x" + std::to_string(k.height()) + " image");
  }
}

RayGrid::RayGrid(int rows, int cols, std::vector<double> rx, std::vector<double> ry)
    : rows_(rows), cols_(cols), rx_(std::move(rx)), ry_(std::move(ry)) {
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (rows < 1 || cols < 1 || rx_.size() != n || ry_.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "ray grid shape mismatch");
  }
}

EmbeddingGrid::EmbeddingGrid(int rows, int cols, int dim)
    : rows_(rows),
      cols_(cols),
      dim_(dim),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) *
                static_cast<std::size_t>(dim),
            0.0) {}

std::span<double> EmbeddingGrid::token(int row, int col) {
  const auto offset = (static_cast<std::size_t>(row) * cols_ + col) * dim_;
  return std::span<double>(data_).subspan(offset, dim_);
}

std::span<const double> EmbeddingGrid::token(int row, int col) const {
  const auto offset = (static_cast<std::size_t>(row) * cols_ + col) * dim_;
  return std::span<const double>(data_).subspan(offset, dim_);
}

Tensor EmbeddingGrid::to_tensor() const {
  Tensor t;
  t.rows = static_cast<std::uint32_t>(rows_);
  t.cols = static_cast<std::uint32_t>(cols_);
  t.dim = static_cast<std::uint32_t>(dim_);
  t.values.reserve(data_.size());
  for (double v : data_) t.values.push_back(static_cast<float>(v));
  return t;
}

void sinusoid_encode(double x, double period, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t m = 0; 2 * m < n; ++m) {
    const double denom = std::pow(period, static_cast<double>(2 * m) / static_cast<double>(n));
    const double arg = x / denom;
    out[2 * m] = std::sin(arg);
    out[2 * m + 1] = std::cos(arg);
  }
}

RayGrid ray_grid(const Intrinsics& k, const TokenGridSpec& grid) {
  validate_grid(grid, k);
  const auto n = static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols);
  std::vector<double> rx(n);
  std::vector<double> ry(n);
  for (int i = 0; i < grid.rows; ++i) {
    for (int j = 0; j < grid.cols; ++j) {
      const Pixel p = grid.token_pixel(i, j);
      const std::size_t idx = static_cast<std::size_t>(i) * grid.cols + j;
      rx[idx] = (p.u - k.cx()) / k.fx();
      ry[idx] = (p.v - k.cy()) / k.fy();
    }
  }
  return RayGrid(grid.rows, grid.cols, std::move(rx), std::move(ry));
}

EmbeddingGrid embed(const RayGrid& grid, const Intrinsics& k, const CameraEmbeddingConfig& config) {
  if (config.dim < 8 || config.dim % 8 != 0) {
    throw Error(ErrorCode::kBadDimension,
                "camera embedding dim must be a positive multiple of 8, got " +
                    std::to_string(config.dim));
  }
  if (!(config.period > 0.0) || !(config.focal_reference > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "embedding period and focal reference must be positive");
  }
  const std::size_t block = static_cast<std::size_t>(config.dim) / 4;
  const double log_fx = std::log(k.fx() / config.focal_reference);
  const double log_fy = std::log(k.fy() / config.focal_reference);

  // The focal blocks are identical for every token.
  std::vector<double> focal_blocks(2 * block);
  sinusoid_encode(log_fx, config.period, std::span(focal_blocks).first(block));
  sinusoid_encode(log_fy, config.period, std::span(focal_blocks).last(block));

  EmbeddingGrid out(grid.rows(), grid.cols(), config.dim);
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      auto token = out.token(i, j);
      sinusoid_encode(grid.rx(i, j), config.period, token.subspan(0, block));
      sinusoid_encode(grid.ry(i, j), config.period, token.subspan(block, block));
      std::copy(focal_blocks.begin(), focal_blocks.end(), token.begin() + 2 * block);
    }
  }
  return out;
}

nlohmann::json to_json(const TokenGridSpec& grid) {
  return nlohmann::json{{"rows", grid.rows},
                        {"cols", grid.cols},
                        {"patch", grid.patch},
                        {"anchor", grid.anchor == TokenAnchor::kCenter ? "center" : "top_left"}};
}

TokenGridSpec token_grid_from_json(const nlohmann::json& j) {
  try {
    TokenGridSpec g;
    g.rows = j.at("rows").get<int>();
    g.cols = j.at("cols").get<int>();
    g.patch = j.at("patch").get<int>();
    const std::string anchor = j.value("anchor", "center");
    if (anchor == "center") {
      g.anchor = TokenAnchor::kCenter;
    } else if (anchor == "top_left") {
      g.anchor = TokenAnchor::kTopLeft;
    } else {
      throw Error(ErrorCode::kParse, "token grid: unknown anchor \"" + anchor + "\"");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("token grid: ") + e.what());
  }
}

nlohmann::json camera_embedding_sidecar(const Intrinsics& k, const TokenGridSpec& grid,
                                        const CameraEmbeddingConfig& config) {
  const int block = config.dim / 4;
  return nlohmann::json{
      {"kind", "camera_ray_embedding"},
      {"intrinsics", to_json(k)},
      {"token_grid", to_json(grid)},
      {"dim", config.dim},
      {"period", config.period},
      {"focal_reference", config.focal_reference},
      {"pair_layout", "interleaved sin,cos per frequency"},
      {"channels",
       nlohmann::json::array({
           {{"name", "rx"}, {"offset", 0}, {"width", block}},
           {{"name", "ry"}, {"offset", block}, {"width", block}},
           {{"name", "log_fx"}, {"offset", 2 * block}, {"width", block}},
           {{"name", "log_fy"}, {"offset", 3 * block}, {"width", block}},
       })},
  };
}

}  // namespace camgeom
