#include "camgeom/camera_model.hpp"

#include "camgeom/error.hpp"

#include <cmath>
#include <string>

namespace camgeom {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

Intrinsics::Intrinsics(double fx, double fy, double cx, double cy, int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!finite(fx) || !finite(fy) || !finite(cx) || !finite(cy)) {
    throw Error(ErrorCode::kInvalidArgument, "intrinsics must be finite");
  }
  if (fx <= 0.0 || fy <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image extent must be at least 1x1");
  }
}

Eigen::Matrix3d Intrinsics::matrix() const {
  Eigen::Matrix3d K;
  K << fx_, 0.0, cx_, 0.0, fy_, cy_, 0.0, 0.0, 1.0;
  return K;
}

Intrinsics Intrinsics::with_focal(double fx, double fy) const {
  return Intrinsics(fx, fy, cx_, cy_, width_, height_);
}

CameraPose::CameraPose()
    : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}

CameraPose::CameraPose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  constexpr double kTol = 1e-9;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "pose must be finite");
  }
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kTol || std::abs(rotation.determinant() - 1.0) > kTol) {
    throw Error(ErrorCode::kInvalidArgument, "rotation is not a proper orthonormal matrix");
  }
}

Point3 CameraPose::apply(const Point3& world) const { return rotation_ * world + translation_; }

Pixel project(const Point3& p, const Intrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth, "point is not in front of the camera (z = " +
                                                  std::to_string(p.z()) + ")");
  }
  return {k.fx() * p.x() / p.z() + k.cx(), k.fy() * p.y() / p.z() + k.cy()};
}

Pixel project_world(const Point3& world_point, const CameraPose& pose, const Intrinsics& k) {
  return project(pose.apply(world_point), k);
}

Eigen::Vector3d back_project(const Pixel& pixel, const Intrinsics& k) {
  return Eigen::Vector3d((pixel.u - k.cx()) / k.fx(), (pixel.v - k.cy()) / k.fy(), 1.0).normalized();
}

namespace {

void check_extent_args(double size_m, double depth_m) {
  if (!(depth_m > 0.0)) throw Error(ErrorCode::kNonPositiveDepth, "depth must be positive");
  if (!(size_m > 0.0)) throw Error(ErrorCode::kNonPositiveSize, "size must be positive");
}

}  // namespace

double projected_height(double height_m, double depth_m, const Intrinsics& k) {
  check_extent_args(height_m, depth_m);
  return k.fy() * height_m / depth_m;
}

double projected_width(double width_m, double depth_m, const Intrinsics& k) {
  check_extent_args(width_m, depth_m);
  return k.fx() * width_m / depth_m;
}

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

nlohmann::json to_json(const Intrinsics& k) {
  return nlohmann::json{{"fx", k.fx()},         {"fy", k.fy()},          {"cx", k.cx()},
                        {"cy", k.cy()},         {"width", k.width()},    {"height", k.height()}};
}

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kParse, std::string("intrinsics: missing key \"") + key + "\"");
  }
  const auto& v = j.at(key);
  if (!v.is_number()) {
    throw Error(ErrorCode::kParse, std::string("intrinsics: key \"") + key + "\" is not a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::kParse, std::string("intrinsics: key \"") + key + "\" is not finite");
  }
  return x;
}

int extent_field(const nlohmann::json& j, const char* key) {
  const double x = number_field(j, key);
  if (!j.at(key).is_number_integer() && std::floor(x) != x) {
    throw Error(ErrorCode::kParse, std::string("intrinsics: key \"") + key + "\" must be an integer");
  }
  if (x < 1 || x > 1 << 30) {
    throw Error(ErrorCode::kParse, std::string("intrinsics: key \"") + key + "\" out of range");
  }
  return static_cast<int>(x);
}

}  // namespace

Intrinsics intrinsics_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "intrinsics: expected a JSON object");
  const double fx = number_field(j, "fx");
  const double fy = number_field(j, "fy");
  const double cx = number_field(j, "cx");
  const double cy = number_field(j, "cy");
  const int width = extent_field(j, "width");
  const int height = extent_field(j, "height");
  if (fx <= 0.0) throw Error(ErrorCode::kParse, "intrinsics: key \"fx\" must be positive");
  if (fy <= 0.0) throw Error(ErrorCode::kParse, "intrinsics: key \"fy\" must be positive");
  return Intrinsics(fx, fy, cx, cy, width, height);
}

Intrinsics parse_intrinsics(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse,
                "intrinsics: invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return intrinsics_from_json(j);
}

}  // namespace camgeom
