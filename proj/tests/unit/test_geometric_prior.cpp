#include "camgeom/error.hpp"
#include "camgeom/geometric_prior.hpp"
#include "camgeom/intrinsics_transforms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace camgeom;

namespace {

DepthMap constant_depth(int w, int h, double z) {
  return DepthMap::from_values(w, h, std::vector<double>(static_cast<std::size_t>(w) * h, z));
}

DepthMap random_depth(int w, int h, std::mt19937_64& rng, double invalid_fraction = 0.1) {
  std::uniform_real_distribution<double> z(0.2, 80.0), u(0, 1);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = u(rng) < invalid_fraction ? std::nan("") : z(rng);
  return DepthMap::from_values(w, h, std::move(v));
}

}  // namespace

TEST(Unproject, PrincipalPixel) {
  // Pixel (1, 1) has its center at (1.5, 1.5).
  const Intrinsics k(100, 100, 1.5, 1.5, 3, 3);
  const PointGrid g = unproject(constant_depth(3, 3, 2.0), k);
  EXPECT_EQ(g.at(1, 1), Point3(0, 0, 2));
}

TEST(Unproject, ConstantPlaneSpansFrustum) {
  const Intrinsics k(250, 260, 64, 48, 128, 96);
  const double z0 = 3.5;
  const PointGrid g = unproject(constant_depth(128, 96, z0), k);
  for (const auto& p : g.points) EXPECT_EQ(p.z(), z0);
  // Oracle: back-project the first and last pixel centers and scale to z0.
  const auto left = back_project({0.5, 48}, k);
  const auto right = back_project({127.5, 48}, k);
  const double span = z0 * (right.x() / right.z() - left.x() / left.z());
  EXPECT_NEAR(g.at(0, 127).x() - g.at(0, 0).x(), span, 1e-12);
  EXPECT_NEAR(span, z0 * 127.0 / 250.0, 1e-12);
  // Full cross-section of the image edges.
  EXPECT_NEAR((g.at(0, 127).x() + 0.5 * z0 / 250) - (g.at(0, 0).x() - 0.5 * z0 / 250), z0 * 128 / 250.0, 1e-12);
}

TEST(Unproject, ReprojectionRoundTrip) {
  std::mt19937_64 rng(21);
  const Intrinsics k(301.7, 287.2, 40.3, 29.9, 80, 60);
  const DepthMap d = random_depth(80, 60, rng);
  const PointGrid g = unproject(d, k);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 80; ++j) {
      EXPECT_EQ(g.is_valid(i, j), d.valid(i, j));
      if (!g.is_valid(i, j)) continue;
      const Pixel p = project(g.at(i, j), k);
      EXPECT_NEAR(p.u, j + 0.5, 1e-9);
      EXPECT_NEAR(p.v, i + 0.5, 1e-9);
    }
  }
}

TEST(Unproject, ExtentMismatch) {
  const Intrinsics k(100, 100, 1.5, 1.5, 3, 3);
  try {
    unproject(constant_depth(4, 3, 1.0), k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExtentMismatch);
  }
}

TEST(DepthMap, Validation) {
  EXPECT_THROW(DepthMap(2, 1, {1.0, -1.0}, {1, 1}), Error);
  EXPECT_NO_THROW(DepthMap(2, 1, {1.0, -1.0}, {1, 0}));
  const DepthMap d = DepthMap::from_values(3, 1, {1.0, 0.0, std::nan("")});
  EXPECT_EQ(d.valid_count(), 1u);
  const DepthMap back = DepthMap::from_tensor(d.to_tensor());
  EXPECT_EQ(back.valid_count(), 1u);
  EXPECT_EQ(back.depth(0, 0), 1.0);
}

TEST(PoolToTokens, PointsReprojectOntoTokenAnchors) {
  std::mt19937_64 rng(22);
  const Intrinsics k(301.7, 287.2, 40.3, 29.9, 80, 60);
  const DepthMap d = random_depth(80, 60, rng, 0.0);
  const TokenGridSpec grid = TokenGridSpec::covering(k, 14);
  const PointGrid g = pool_to_tokens(d, k, grid);
  for (int i = 0; i < grid.rows; ++i) {
    for (int j = 0; j < grid.cols; ++j) {
      if (!g.is_valid(i, j)) continue;
      const Pixel p = project(g.at(i, j), k);
      const Pixel a = grid.token_pixel(i, j);
      EXPECT_NEAR(p.u, a.u, 1e-9);
      EXPECT_NEAR(p.v, a.v, 1e-9);
    }
  }
  // The depth comes from the pixel under the anchor.
  EXPECT_EQ(g.at(1, 2).z(), d.depth(21, 35));
}

TEST(PoolToTokens, PartialPatchBeyondImageIsInvalid) {
  // 20 px wide, patch 14: second column's center is at 21, past the edge.
  const Intrinsics k(100, 100, 10, 10, 20, 20);
  const PointGrid g = pool_to_tokens(constant_depth(20, 20, 1.0), k, {2, 2, 14});
  EXPECT_TRUE(g.is_valid(0, 0));
  EXPECT_TRUE(g.is_valid(0, 1));  // nearest pixel center 19.5 is within 7 px of 21
  // 14 px wide: the anchor at 21 is 7.5 px from the last pixel center 13.5.
  const PointGrid h = pool_to_tokens(constant_depth(14, 14, 1.0), Intrinsics(100, 100, 7, 7, 14, 14), {2, 2, 14});
  EXPECT_TRUE(h.is_valid(0, 0));
  EXPECT_FALSE(h.is_valid(0, 1));
  EXPECT_FALSE(h.is_valid(1, 1));
}

TEST(EmbedPoints, ZeroPointPatternAndInvalidZeros) {
  PointGrid g;
  g.rows = 1;
  g.cols = 2;
  g.points = {Point3::Zero(), Point3(1, 2, 3)};
  g.valid = {1, 0};
  const EmbeddingGrid e = embed_points(g, {12, 100.0});
  const auto t0 = e.token(0, 0);
  for (std::size_t c = 0; c < t0.size(); ++c) EXPECT_EQ(t0[c], c % 2 == 0 ? 0.0 : 1.0);
  for (double v : e.token(0, 1)) EXPECT_EQ(v, 0.0);
}

TEST(EmbedPoints, ScalarOracleAndBlocks) {
  PointGrid g;
  g.rows = g.cols = 1;
  g.points = {Point3(0.5, -1.25, 4.0)};
  g.valid = {1};
  const EmbeddingGrid e = embed_points(g, {12, 100.0});
  const auto t = e.token(0, 0);
  const double xyz[3] = {0.5, -1.25, 4.0};
  for (int c = 0; c < 3; ++c) {
    for (int m = 0; m < 2; ++m) {
      const double arg = xyz[c] / std::pow(100.0, 2.0 * m / 4.0);
      EXPECT_NEAR(t[c * 4 + 2 * m], std::sin(arg), 1e-15);
      EXPECT_NEAR(t[c * 4 + 2 * m + 1], std::cos(arg), 1e-15);
    }
  }
}

TEST(EmbedPoints, Deterministic) {
  std::mt19937_64 rng(23);
  const Intrinsics k(301.7, 287.2, 40.3, 29.9, 80, 60);
  const DepthMap d = random_depth(80, 60, rng);
  const auto grid = TokenGridSpec::covering(k, 14);
  const auto a = embed_points(pool_to_tokens(d, k, grid), {});
  const auto b = embed_points(pool_to_tokens(d, k, grid), {});
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(EmbedPoints, BadDimension) {
  PointGrid g;
  g.rows = g.cols = 1;
  g.points = {Point3::Zero()};
  g.valid = {1};
  EXPECT_THROW(embed_points(g, {16, 100.0}), Error);
  EXPECT_THROW(embed_points(g, {0, 100.0}), Error);
}

TEST(DepthEstimates, BiasLaw) {
  const Intrinsics k(580, 580, 320, 240, 640, 480);
  const double h = projected_height(1.6, 4.0, k);
  EXPECT_DOUBLE_EQ(biased_depth_estimate(h, 1.6, 580), 4.0);
  EXPECT_NEAR(biased_depth_estimate(0.8 * h, 1.6, 580), 4.0 / 0.8, 1e-12);
  EXPECT_NEAR(biased_depth_estimate(1.2 * h, 1.6, 580), 4.0 / 1.2, 1e-12);
  for (double s : {0.5, 0.8, 1.2, 3.0}) {
    const Intrinsics ks = scale(k, s);
    EXPECT_NEAR(aware_depth_estimate(projected_height(1.6, 4.0, ks), 1.6, ks), 4.0, 1e-12);
  }
  EXPECT_EQ(aware_depth_estimate(h, 1.6, k), biased_depth_estimate(h, 1.6, 580));
}

TEST(DepthEstimates, ForwardThenInvert) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> f(100, 5000), hh(0.05, 5), z(0.2, 50);
  for (int i = 0; i < 1000; ++i) {
    const Intrinsics k(f(rng), f(rng), 320, 240, 640, 480);
    const double H = hh(rng), Z = z(rng);
    EXPECT_NEAR(aware_depth_estimate(projected_height(H, Z, k), H, k), Z, 1e-12 * Z);
  }
}

TEST(DepthEstimates, RejectNonPositive) {
  EXPECT_THROW(biased_depth_estimate(0, 1, 1), Error);
  EXPECT_THROW(biased_depth_estimate(1, -1, 1), Error);
  EXPECT_THROW(biased_depth_estimate(1, 1, 0), Error);
}
