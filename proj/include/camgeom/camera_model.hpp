#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <json.hpp>

#include <string_view>

namespace camgeom {

using Point3 = Eigen::Vector3d;

/// Continuous pixel coordinate. The top-left corner of the image is (0, 0) and
/// the center of integer pixel (row i, col j) sits at (j + 0.5, i + 0.5).
struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

/// Pinhole intrinsics without skew or distortion, plus the raster extent they
/// describe. Immutable once constructed.
class Intrinsics {
 public:
  Intrinsics(double fx, double fy, double cx, double cy, int width, int height);

  double fx() const noexcept { return fx_; }
  double fy() const noexcept { return fy_; }
  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// The 3x3 calibration matrix K.
  Eigen::Matrix3d matrix() const;

  /// Same camera, different focal lengths (coupled-scaling experiments).
  Intrinsics with_focal(double fx, double fy) const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;

 private:
  double fx_;
  double fy_;
  double cx_;
  double cy_;
  int width_;
  int height_;
};

/// World-to-camera rigid transform: P_c = R * P_w + t.
class CameraPose {
 public:
  CameraPose();
  CameraPose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static CameraPose identity() { return CameraPose(); }

  const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
  const Eigen::Vector3d& translation() const noexcept { return translation_; }

  Point3 apply(const Point3& world) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

Pixel project(const Point3& camera_point, const Intrinsics& k);
Pixel project_world(const Point3& world_point, const CameraPose& pose, const Intrinsics& k);

/// Unit-length viewing direction through `pixel`, in the camera frame.
Eigen::Vector3d back_project(const Pixel& pixel, const Intrinsics& k);

/// Vertical image extent (pixels) of a fronto-parallel object of height
/// `height_m` at depth `depth_m`: fy * H / Z.
double projected_height(double height_m, double depth_m, const Intrinsics& k);
/// Horizontal counterpart of projected_height: fx * W / Z.
double projected_width(double width_m, double depth_m, const Intrinsics& k);

/// Angle between two directions, stable near zero.
double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// JSON: {"fx","fy","cx","cy","width","height"}.
nlohmann::json to_json(const Intrinsics& k);
Intrinsics intrinsics_from_json(const nlohmann::json& j);
/// Parses JSON text; syntax errors report the byte offset.
Intrinsics parse_intrinsics(std::string_view text);

}  // namespace camgeom
