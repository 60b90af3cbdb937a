#pragma once

#include "camgeom/camera_model.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace camgeom {

/// Euler composition used to orient boxes. The default is
/// R = Rz(yaw) * Ry(pitch) * Rx(roll) about the box center.
enum class EulerOrder { kZYX, kXYZ };

struct OrientedBox3 {
  Point3 center = Point3::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  /// [x, y, z, sx, sy, sz, yaw, pitch, roll]
  static OrientedBox3 from_array(const std::array<double, 9>& values);
  std::array<double, 9> to_array() const;

  Eigen::Matrix3d rotation(EulerOrder order = EulerOrder::kZYX) const;
  double volume() const { return size.prod(); }
};

std::array<Point3, 8> box_corners(const OrientedBox3& box, EulerOrder order = EulerOrder::kZYX);

enum class IouMode {
  kOriented,     // full 3-angle orientation
  kYawOnly,      // pitch and roll ignored
  kAxisAligned,  // all angles ignored
};

/// Intersection-over-union of two cuboids. The oriented path clips one box's
/// polytope against the other's six half-spaces and sums signed tetrahedra over
/// the clipped faces.
double iou3d(const OrientedBox3& a, const OrientedBox3& b, IouMode mode = IouMode::kOriented,
             EulerOrder order = EulerOrder::kZYX);

/// Volume of the intersection of two boxes (same construction as iou3d).
double intersection_volume(const OrientedBox3& a, const OrientedBox3& b,
                           EulerOrder order = EulerOrder::kZYX);

struct Detection {
  std::string label;
  OrientedBox3 box;
};

/// Lowercase, trimmed label.
std::string normalize_label(std::string_view label);

struct ParseResult {
  std::vector<Detection> detections;
  std::vector<std::string> warnings;
};

/// Reads model output in the detection prompt's answer format: a JSON list of
/// {"label": ..., "bbox_3d"|"box_3d": [9 numbers]}, bare or inside a ```json
/// fence. Entries that do not fit are skipped with a warning. If the list as a
/// whole is not valid JSON (e.g. an elided "..." line), each {...} object is
/// recovered individually.
ParseResult parse_detections(std::string_view text);

nlohmann::json to_json(const Detection& d);

struct ClassScore {
  std::string label;
  std::size_t predictions = 0;
  std::size_t truths = 0;
  std::size_t matched = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
};

struct MatchedPair {
  std::size_t prediction = 0;
  std::size_t truth = 0;
  double iou = 0.0;
};

struct EvalReport {
  double threshold = 0.25;
  std::vector<ClassScore> classes;  // sorted by label
  ClassScore micro;                 // pooled counts
  ClassScore macro;                 // unweighted class mean of P, R (F1 from those)
  std::vector<MatchedPair> matches;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// F1 = 2PR / (P + R), 0 when P + R = 0.
double f1_score(double precision, double recall);

struct MatchOptions {
  double threshold = 0.25;
  IouMode mode = IouMode::kOriented;
  EulerOrder order = EulerOrder::kZYX;
  std::optional<std::set<std::string>> classes;  // restrict scoring to these labels
};

/// Greedy class-wise matching: same-label pairs with IoU >= threshold are taken
/// in descending IoU order (ties by lower prediction index, then lower truth
/// index), each prediction and truth used at most once.
EvalReport match_and_score(const std::vector<Detection>& predictions,
                           const std::vector<Detection>& truths, const MatchOptions& options = {});

struct SceneDetections {
  std::string id;
  std::vector<Detection> predictions;
  std::vector<Detection> truths;
};

/// Scores scenes independently (optionally in parallel) and merges their counts
/// in scene-id order. Matched pairs are not carried into the merged report.
EvalReport evaluate_scenes(const std::vector<SceneDetections>& scenes, const MatchOptions& options,
                           int workers = 1);

}  // namespace camgeom
