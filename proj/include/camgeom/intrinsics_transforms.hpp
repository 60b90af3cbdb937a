#pragma once

#include "camgeom/camera_model.hpp"

#include <json.hpp>

namespace camgeom {

/// Scale-then-translate map between pixel coordinate systems:
///   u' = sx * u - du,   v' = sy * v - dv
/// The offsets are measured in the rescaled image. Closed under compose/invert.
class PixelTransform {
 public:
  PixelTransform(double sx, double sy, double du, double dv, int out_width, int out_height);

  static PixelTransform identity(int width, int height);
  /// Isotropic resize with the output canvas rounded to whole pixels.
  static PixelTransform resize(double s, int width, int height);

  double sx() const noexcept { return sx_; }
  double sy() const noexcept { return sy_; }
  double du() const noexcept { return du_; }
  double dv() const noexcept { return dv_; }
  int out_width() const noexcept { return out_width_; }
  int out_height() const noexcept { return out_height_; }

  Pixel apply(const Pixel& p) const noexcept { return {sx_ * p.u - du_, sy_ * p.v - dv_}; }
  Pixel apply_inverse(const Pixel& p) const noexcept {
    return {(p.u + du_) / sx_, (p.v + dv_) / sy_};
  }

  friend bool operator==(const PixelTransform&, const PixelTransform&) = default;

 private:
  double sx_;
  double sy_;
  double du_;
  double dv_;
  int out_width_;
  int out_height_;
};

/// max(1, round(s * extent)); the canvas rounds, the geometry never does.
int scaled_extent(double s, int extent);

Intrinsics scale(const Intrinsics& k, double s);
Intrinsics apply_transform(const Intrinsics& k, const PixelTransform& t);

/// The transform that applies `first`, then `second`. Extent comes from `second`.
PixelTransform compose(const PixelTransform& first, const PixelTransform& second);

/// Inverse map. The output extent is the rounded pre-image of t's canvas unless
/// given explicitly.
PixelTransform invert(const PixelTransform& t);
PixelTransform invert(const PixelTransform& t, int source_width, int source_height);

/// Maximum angle (radians) between the ray through each sampled source pixel
/// under `source` and the ray through its transformed position under `target`.
/// Samples a `samples_per_axis`^2 lattice of pixel centers spanning the image.
double ray_deviation(const Intrinsics& source, const PixelTransform& t, const Intrinsics& target,
                     int samples_per_axis = 64);

/// ray_deviation against the consistently updated intrinsics; ~0 by construction.
double ray_preservation_check(const Intrinsics& k, const PixelTransform& t,
                              int samples_per_axis = 64);

nlohmann::json to_json(const PixelTransform& t);
PixelTransform pixel_transform_from_json(const nlohmann::json& j);

}  // namespace camgeom
