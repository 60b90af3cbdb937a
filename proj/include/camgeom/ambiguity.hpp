#pragma once

#include "camgeom/camera_model.hpp"
#include "camgeom/detection_eval.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace camgeom {

/// (f, H, Z): focal (pixels), physical height (m), depth (m).
struct FocalSizeDepth {
  double focal = 0.0;
  double height = 0.0;
  double depth = 0.0;

  double projected_height() const { return focal * height / depth; }
  friend bool operator==(const FocalSizeDepth&, const FocalSizeDepth&) = default;
};

enum class WitnessKind { kFocalDepth, kSizeDepth, kCoupled };

struct EquivalenceWitness {
  FocalSizeDepth base;
  FocalSizeDepth variant;
  WitnessKind kind = WitnessKind::kFocalDepth;
  double alpha = 1.0;  // focal factor
  double beta = 1.0;   // size factor
  double base_projected = 0.0;
  double variant_projected = 0.0;

  double relative_gap() const;
};

/// Variants that leave h_proj unchanged:
///   focal_depth: (lambda f, H, lambda Z)
///   size_depth:  (f, lambda H, lambda Z)
/// Throws NonPositiveFactor for lambda <= 0.
EquivalenceWitness make_witness(const FocalSizeDepth& base, WitnessKind kind, double lambda);
/// Coupled class (alpha f, beta H, alpha beta Z).
EquivalenceWitness make_coupled_witness(const FocalSizeDepth& base, double alpha, double beta);

/// Class size prior: mean height/width (m) and the log-normal spread of
/// real instances around them. spread = 0 makes the prior exact.
struct SizePrior {
  double height = 1.0;
  double width = 0.5;
  double spread = 0.0;
};

struct SceneObject {
  std::string label;
  double height = 0.0;  // true H
  double width = 0.0;   // true W
  double depth = 0.0;   // true Z
  double height_prior = 0.0;
  double width_prior = 0.0;
  Pixel anchor;             // image position of the object center
  OrientedBox3 box;         // ground truth, camera frame
  double projected_height = 0.0;  // annotation, pixels
  double projected_width = 0.0;
};

struct SyntheticScene {
  std::string id;
  std::size_t camera_index = 0;
  Intrinsics camera;
  CameraPose pose;
  std::vector<SceneObject> objects;
};

struct SceneGenerationOptions {
  int objects_per_scene = 10;
  double depth_min = 1.0;
  double depth_max = 8.0;
};

/// Deterministic synthetic corpus. Cameras are assigned round-robin from the
/// pool so each source is equally represented; classes, sizes, depths and image
/// positions are drawn from `seed`.
std::vector<SyntheticScene> generate_scenes(int count, const std::vector<Intrinsics>& camera_pool,
                                            const std::map<std::string, SizePrior>& size_priors,
                                            std::uint64_t seed,
                                            const SceneGenerationOptions& options = {});

std::map<std::string, SizePrior> default_size_priors();

enum class Estimator { kAgnostic, kAware };
enum class FocalFit { kMean, kMedian };

std::string_view to_string(Estimator e);

/// f_assumed absorbed from a training corpus: mean or median of per-scene fy.
double fit_assumed_focal(const std::vector<SyntheticScene>& scenes, FocalFit fit = FocalFit::kMean);

struct BiasRow {
  Estimator estimator = Estimator::kAgnostic;
  double scale = 1.0;
  std::size_t objects = 0;
  double ratio_mean = 0.0;  // mean Z_pred / Z_true
  double ratio_std = 0.0;
  double depth_abs_error = 0.0;  // mean |Z_pred - Z_true|, meters
  double f1 = 0.0;               // percent, IoU threshold from options
};

struct BiasExperimentOptions {
  double assumed_focal = 0.0;  // <= 0: fit from the scenes
  FocalFit fit = FocalFit::kMean;
  double iou_threshold = 0.25;
  int workers = 1;
};

/// For each resize factor s, rescales every scene consistently (intrinsics and
/// annotations), estimates depth from the resized projected height, places a
/// prior-sized box at that depth along the object's true ray, and scores it.
std::vector<BiasRow> run_bias_experiment(const std::vector<SyntheticScene>& scenes,
                                         const std::vector<double>& resize_factors,
                                         Estimator estimator,
                                         const BiasExperimentOptions& options = {});

struct ClusterRow {
  std::size_t camera_index = 0;
  double focal = 0.0;  // cluster fy
  double assumed_focal = 0.0;
  std::size_t objects = 0;
  double agnostic_ratio = 0.0;
  double aware_ratio = 0.0;
  double agnostic_f1 = 0.0;
  double aware_f1 = 0.0;
};

/// Per-camera-cluster bias when f_assumed is fit on the whole mixture (s = 1).
std::vector<ClusterRow> run_mixed_pool_experiment(const std::vector<SyntheticScene>& scenes,
                                                  const BiasExperimentOptions& options = {});

struct AmbiguityConfig {
  std::vector<Intrinsics> camera_pool;
  int n_scenes = 200;
  int objects_per_scene = 10;
  std::vector<double> resize_factors{0.8, 1.0, 1.2};
  std::vector<Estimator> estimators{Estimator::kAgnostic, Estimator::kAware};
  double prior_spread = 0.0;
  FocalFit fit = FocalFit::kMean;
  double iou_threshold = 0.25;
  std::uint64_t seed = 0;

  static AmbiguityConfig defaults();
  void validate() const;
};

nlohmann::json to_json(const AmbiguityConfig& config);
AmbiguityConfig ambiguity_config_from_json(const nlohmann::json& j,
                                           AmbiguityConfig base = AmbiguityConfig::defaults());

std::string bias_rows_to_csv(const std::vector<BiasRow>& rows);
std::string cluster_rows_to_csv(const std::vector<ClusterRow>& rows);
std::string ambiguity_summary(const AmbiguityConfig& config, const std::vector<BiasRow>& bias,
                              const std::vector<ClusterRow>& clusters);

}  // namespace camgeom
