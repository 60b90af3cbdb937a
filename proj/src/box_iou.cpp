#include "camgeom/detection_eval.hpp"

#include "camgeom/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace camgeom {

OrientedBox3 OrientedBox3::from_array(const std::array<double, 9>& v) {
  OrientedBox3 b;
  b.center = Point3(v[0], v[1], v[2]);
  b.size = Eigen::Vector3d(v[3], v[4], v[5]);
  b.yaw = v[6];
  b.pitch = v[7];
  b.roll = v[8];
  return b;
}

std::array<double, 9> OrientedBox3::to_array() const {
  return {center.x(), center.y(), center.z(), size.x(), size.y(), size.z(), yaw, pitch, roll};
}

Eigen::Matrix3d OrientedBox3::rotation(EulerOrder order) const {
  const Eigen::AngleAxisd rz(yaw, Eigen::Vector3d::UnitZ());
  const Eigen::AngleAxisd ry(pitch, Eigen::Vector3d::UnitY());
  const Eigen::AngleAxisd rx(roll, Eigen::Vector3d::UnitX());
  if (order == EulerOrder::kZYX) return (rz * ry * rx).toRotationMatrix();
  return (rx * ry * rz).toRotationMatrix();
}

std::array<Point3, 8> box_corners(const OrientedBox3& box, EulerOrder order) {
  const Eigen::Matrix3d R = box.rotation(order);
  const Eigen::Vector3d half = 0.5 * box.size;
  std::array<Point3, 8> corners;
  // Bit 0 -> x, bit 1 -> y, bit 2 -> z; a set bit is the positive side.
  for (int b = 0; b < 8; ++b) {
    const Eigen::Vector3d local((b & 1) ? half.x() : -half.x(), (b & 2) ? half.y() : -half.y(),
                                (b & 4) ? half.z() : -half.z());
    corners[b] = box.center + R * local;
  }
  return corners;
}

namespace {

using Polygon = std::vector<Eigen::Vector3d>;
using Polytope = std::vector<Polygon>;

void check_box(const OrientedBox3& b) {
  if (!b.size.allFinite() || (b.size.array() <= 0.0).any()) {
    throw Error(ErrorCode::kDegenerateBox, "box sizes must be positive and finite");
  }
  if (!b.center.allFinite() || !std::isfinite(b.yaw) || !std::isfinite(b.pitch) ||
      !std::isfinite(b.roll)) {
    throw Error(ErrorCode::kDegenerateBox, "box pose must be finite");
  }
}

Eigen::Vector3d newell_normal(const Polygon& poly) {
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

// Box as six outward-wound quads, expressed relative to `origin`.
Polytope box_polytope(const OrientedBox3& box, EulerOrder order, const Point3& origin) {
  static constexpr int kFaces[6][4] = {{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                       {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}};
  const auto corners = box_corners(box, order);
  const Eigen::Vector3d center = box.center - origin;
  Polytope faces;
  for (const auto& f : kFaces) {
    Polygon poly;
    for (int idx : f) poly.push_back(corners[idx] - origin);
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : poly) centroid += p;
    centroid /= 4.0;
    if (newell_normal(poly).dot(centroid - center) < 0.0) std::reverse(poly.begin(), poly.end());
    faces.push_back(std::move(poly));
  }
  return faces;
}

struct Plane {
  Eigen::Vector3d normal;  // unit, pointing out of the kept half-space
  double offset;           // kept: normal . p <= offset
};

std::array<Plane, 6> box_planes(const OrientedBox3& box, EulerOrder order, const Point3& origin) {
  const Eigen::Matrix3d R = box.rotation(order);
  const Eigen::Vector3d center = box.center - origin;
  std::array<Plane, 6> planes;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const Eigen::Vector3d n = (side == 0 ? 1.0 : -1.0) * R.col(axis);
      planes[2 * axis + side] = Plane{n, n.dot(center) + 0.5 * box.size[axis]};
    }
  }
  return planes;
}

void append_unique(Polygon& points, const Eigen::Vector3d& p, double tol) {
  for (const auto& q : points) {
    if ((q - p).squaredNorm() <= tol * tol) return;
  }
  points.push_back(p);
}

// Keeps the part of `body` with normal . p <= offset. Vertices within `eps` of
// the plane count as on it.
Polytope clip(const Polytope& body, const Plane& plane, double eps) {
  bool any_out = false;
  bool any_in = false;
  for (const auto& face : body) {
    for (const auto& p : face) {
      const double d = plane.normal.dot(p) - plane.offset;
      any_out |= d > eps;
      any_in |= d < -eps;
    }
  }
  if (!any_out) return body;
  if (!any_in) return {};

  Polytope out;
  Polygon cap;
  for (const auto& face : body) {
    Polygon kept;
    const std::size_t n = face.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = face[i];
      const auto& b = face[(i + 1) % n];
      const double da = plane.normal.dot(a) - plane.offset;
      const double db = plane.normal.dot(b) - plane.offset;
      if (da <= eps) kept.push_back(a);
      if (std::abs(da) <= eps) append_unique(cap, a, eps);
      if ((da < -eps && db > eps) || (da > eps && db < -eps)) {
        const Eigen::Vector3d x = a + (da / (da - db)) * (b - a);
        kept.push_back(x);
        append_unique(cap, x, eps);
      }
    }
    if (kept.size() >= 3) out.push_back(std::move(kept));
  }

  if (cap.size() >= 3) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : cap) centroid += p;
    centroid /= static_cast<double>(cap.size());
    const Eigen::Vector3d e1 = plane.normal.unitOrthogonal();
    const Eigen::Vector3d e2 = plane.normal.cross(e1);
    // Counter-clockwise about the outward normal.
    std::sort(cap.begin(), cap.end(), [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
      return std::atan2((a - centroid).dot(e2), (a - centroid).dot(e1)) <
             std::atan2((b - centroid).dot(e2), (b - centroid).dot(e1));
    });
    out.push_back(std::move(cap));
  }
  return out;
}

// Divergence theorem: sum of signed tetrahedra from the origin to each face fan.
double polytope_volume(const Polytope& body) {
  double six_v = 0.0;
  for (const auto& face : body) {
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      six_v += face[0].dot(face[i].cross(face[i + 1]));
    }
  }
  return std::max(0.0, six_v / 6.0);
}

double axis_aligned_overlap(const OrientedBox3& a, const OrientedBox3& b) {
  double v = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double lo = std::max(a.center[k] - 0.5 * a.size[k], b.center[k] - 0.5 * b.size[k]);
    const double hi = std::min(a.center[k] + 0.5 * a.size[k], b.center[k] + 0.5 * b.size[k]);
    if (hi <= lo) return 0.0;
    v *= hi - lo;
  }
  return v;
}

}  // namespace

double intersection_volume(const OrientedBox3& a, const OrientedBox3& b, EulerOrder order) {
  check_box(a);
  check_box(b);
  // Bounding-sphere rejection.
  if ((a.center - b.center).norm() > 0.5 * (a.size.norm() + b.size.norm())) return 0.0;

  const Point3 origin = a.center;
  const double scale = std::max({a.size.maxCoeff(), b.size.maxCoeff(), (b.center - a.center).norm()});
  const double eps = 1e-12 * scale;
  Polytope body = box_polytope(a, order, origin);
  for (const Plane& plane : box_planes(b, order, origin)) {
    body = clip(body, plane, eps);
    if (body.empty()) return 0.0;
  }
  return std::min({polytope_volume(body), a.volume(), b.volume()});
}

double iou3d(const OrientedBox3& a, const OrientedBox3& b, IouMode mode, EulerOrder order) {
  check_box(a);
  check_box(b);
  OrientedBox3 pa = a;
  OrientedBox3 pb = b;
  double inter = 0.0;
  switch (mode) {
    case IouMode::kAxisAligned:
      inter = axis_aligned_overlap(a, b);
      break;
    case IouMode::kYawOnly:
      pa.pitch = pa.roll = pb.pitch = pb.roll = 0.0;
      inter = intersection_volume(pa, pb, order);
      break;
    case IouMode::kOriented:
      inter = intersection_volume(pa, pb, order);
      break;
  }
  const double uni = a.volume() + b.volume() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace camgeom
