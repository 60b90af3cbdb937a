#include "camgeom/ambiguity.hpp"

#include "camgeom/error.hpp"
#include "camgeom/format.hpp"
#include "camgeom/geometric_prior.hpp"
#include "camgeom/intrinsics_transforms.hpp"
#include "camgeom/random.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace camgeom {

double EquivalenceWitness::relative_gap() const {
  return std::abs(variant_projected - base_projected) / std::abs(base_projected);
}

namespace {

void check_base(const FocalSizeDepth& b) {
  if (!(b.focal > 0.0) || !(b.height > 0.0) || !(b.depth > 0.0)) {
    throw Error(ErrorCode::kNonPositiveInput, "witness base (f, H, Z) must be positive");
  }
}

void check_factor(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kNonPositiveFactor, std::string(name) + " must be positive and finite");
  }
}

EquivalenceWitness finish(const FocalSizeDepth& base, const FocalSizeDepth& variant, WitnessKind kind,
                          double alpha, double beta) {
  EquivalenceWitness w{base, variant, kind, alpha, beta, base.projected_height(),
                       variant.projected_height()};
  constexpr double kTol = 1e-9;
  if (w.relative_gap() > kTol) {
    throw Error(ErrorCode::kInvalidArgument, "witness does not preserve the projected height");
  }
  return w;
}

}  // namespace

EquivalenceWitness make_witness(const FocalSizeDepth& base, WitnessKind kind, double lambda) {
  check_base(base);
  check_factor(lambda, "lambda");
  switch (kind) {
    case WitnessKind::kFocalDepth:
      return finish(base, {lambda * base.focal, base.height, lambda * base.depth}, kind, lambda, 1.0);
    case WitnessKind::kSizeDepth:
      return finish(base, {base.focal, lambda * base.height, lambda * base.depth}, kind, 1.0, lambda);
    case WitnessKind::kCoupled:
      return make_coupled_witness(base, lambda, lambda);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown witness kind");
}

EquivalenceWitness make_coupled_witness(const FocalSizeDepth& base, double alpha, double beta) {
  check_base(base);
  check_factor(alpha, "alpha");
  check_factor(beta, "beta");
  return finish(base, {alpha * base.focal, beta * base.height, alpha * beta * base.depth},
                WitnessKind::kCoupled, alpha, beta);
}

std::map<std::string, SizePrior> default_size_priors() {
  // Typical indoor object dimensions (meters).
  return {
      {"bed", {0.6, 2.0, 0.0}},     {"cabinet", {1.0, 0.8, 0.0}}, {"chair", {0.9, 0.5, 0.0}},
      {"door", {2.0, 0.9, 0.0}},    {"lamp", {1.5, 0.4, 0.0}},    {"monitor", {0.4, 0.55, 0.0}},
      {"sofa", {0.85, 2.0, 0.0}},   {"table", {0.75, 1.2, 0.0}},
  };
}

std::vector<SyntheticScene> generate_scenes(int count, const std::vector<Intrinsics>& camera_pool,
                                            const std::map<std::string, SizePrior>& size_priors,
                                            std::uint64_t seed, const SceneGenerationOptions& options) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "scene count must be at least 1");
  if (camera_pool.empty()) throw Error(ErrorCode::kInvalidArgument, "camera pool is empty");
  if (size_priors.empty()) throw Error(ErrorCode::kInvalidArgument, "no size priors");
  if (options.objects_per_scene < 1 || !(options.depth_min > 0.0) ||
      !(options.depth_min <= options.depth_max)) {
    throw Error(ErrorCode::kInvalidArgument, "bad scene generation options");
  }
  std::vector<std::pair<std::string, SizePrior>> classes(size_priors.begin(), size_priors.end());

  std::vector<SyntheticScene> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    const std::size_t cam = static_cast<std::size_t>(s) % camera_pool.size();
    const Intrinsics& k = camera_pool[cam];
    std::mt19937_64 rng(sample_seed(seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> normal(0.0, 1.0);

    SyntheticScene scene{"scene_" + std::to_string(s), cam, k, CameraPose::identity(), {}};
    for (int o = 0; o < options.objects_per_scene; ++o) {
      const auto cls = std::min(classes.size() - 1,
                                static_cast<std::size_t>(uniform01(rng) * static_cast<double>(classes.size())));
      const auto& [label, prior] = classes[cls];
      const double z = options.depth_min + (options.depth_max - options.depth_min) * uniform01(rng);
      const Pixel anchor{k.width() * uniform01(rng), k.height() * uniform01(rng)};
      const double factor = std::exp(prior.spread * normal(rng));

      SceneObject obj;
      obj.label = label;
      obj.height = prior.height * factor;
      obj.width = prior.width * factor;
      obj.depth = z;
      obj.height_prior = prior.height;
      obj.width_prior = prior.width;
      obj.anchor = anchor;
      obj.box.center = Point3((anchor.u - k.cx()) / k.fx() * z, (anchor.v - k.cy()) / k.fy() * z, z);
      obj.box.size = Eigen::Vector3d(obj.width, obj.height, obj.width);
      obj.projected_height = projected_height(obj.height, z, k);
      obj.projected_width = projected_width(obj.width, z, k);
      scene.objects.push_back(std::move(obj));
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

std::string_view to_string(Estimator e) { return e == Estimator::kAgnostic ? "agnostic" : "aware"; }

double fit_assumed_focal(const std::vector<SyntheticScene>& scenes, FocalFit fit) {
  if (scenes.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot fit a focal on zero scenes");
  std::vector<double> f;
  f.reserve(scenes.size());
  for (const auto& s : scenes) f.push_back(s.camera.fy());
  if (fit == FocalFit::kMedian) {
    std::sort(f.begin(), f.end());
    const std::size_t n = f.size();
    return n % 2 ? f[n / 2] : 0.5 * (f[n / 2 - 1] + f[n / 2]);
  }
  double sum = 0.0;
  for (double x : f) sum += x;
  return sum / static_cast<double>(f.size());
}

namespace {

struct Estimate {
  double ratio = 0.0;
  double abs_error = 0.0;
};

struct SceneOutcome {
  std::vector<Estimate> estimates;
  SceneDetections detections;
};

// Re-observe `scene` through a consistent resize by s and estimate every depth.
SceneOutcome observe(const SyntheticScene& scene, double s, Estimator estimator, double assumed_focal) {
  const Intrinsics k = scale(scene.camera, s);
  const PixelTransform t = PixelTransform::resize(s, scene.camera.width(), scene.camera.height());
  SceneOutcome out;
  out.detections.id = scene.id;
  for (const auto& obj : scene.objects) {
    const double h = projected_height(obj.height, obj.depth, k);
    const double z = estimator == Estimator::kAgnostic
                         ? biased_depth_estimate(h, obj.height_prior, assumed_focal)
                         : aware_depth_estimate(h, obj.height_prior, k);
    out.estimates.push_back({z / obj.depth, std::abs(z - obj.depth)});

    // Place a prior-sized box at the estimated depth on the object's own ray.
    const Eigen::Vector3d ray = back_project(t.apply(obj.anchor), k);
    OrientedBox3 pred;
    pred.center = ray / ray.z() * z;
    pred.size = Eigen::Vector3d(obj.width_prior, obj.height_prior, obj.width_prior);
    out.detections.predictions.push_back({obj.label, pred});
    out.detections.truths.push_back({obj.label, obj.box});
  }
  return out;
}

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double abs_error = 0.0;
};

Summary summarize(const std::vector<Estimate>& e) {
  Summary s;
  s.count = e.size();
  if (e.empty()) return s;
  for (const auto& x : e) {
    s.mean += x.ratio;
    s.abs_error += x.abs_error;
  }
  s.mean /= static_cast<double>(e.size());
  s.abs_error /= static_cast<double>(e.size());
  double var = 0.0;
  for (const auto& x : e) var += (x.ratio - s.mean) * (x.ratio - s.mean);
  s.std = std::sqrt(var / static_cast<double>(e.size()));
  return s;
}

}  // namespace

std::vector<BiasRow> run_bias_experiment(const std::vector<SyntheticScene>& scenes,
                                         const std::vector<double>& resize_factors, Estimator estimator,
                                         const BiasExperimentOptions& options) {
  if (scenes.empty()) throw Error(ErrorCode::kInvalidArgument, "bias experiment needs scenes");
  const double assumed = options.assumed_focal > 0.0 ? options.assumed_focal
                                                     : fit_assumed_focal(scenes, options.fit);
  MatchOptions match;
  match.threshold = options.iou_threshold;

  std::vector<BiasRow> rows;
  for (double s : resize_factors) {
    if (!(s > 0.0)) throw Error(ErrorCode::kNonPositiveScale, "resize factors must be positive");
    std::vector<Estimate> all;
    std::vector<SceneDetections> dets;
    for (const auto& scene : scenes) {
      auto o = observe(scene, s, estimator, assumed);
      all.insert(all.end(), o.estimates.begin(), o.estimates.end());
      dets.push_back(std::move(o.detections));
    }
    const Summary sum = summarize(all);
    const EvalReport report = evaluate_scenes(dets, match, options.workers);
    rows.push_back(BiasRow{estimator, s, sum.count, sum.mean, sum.std, sum.abs_error, report.micro.f1});
  }
  return rows;
}

std::vector<ClusterRow> run_mixed_pool_experiment(const std::vector<SyntheticScene>& scenes,
                                                  const BiasExperimentOptions& options) {
  if (scenes.empty()) throw Error(ErrorCode::kInvalidArgument, "mixed-pool experiment needs scenes");
  const double assumed = options.assumed_focal > 0.0 ? options.assumed_focal
                                                     : fit_assumed_focal(scenes, options.fit);
  MatchOptions match;
  match.threshold = options.iou_threshold;

  std::map<std::size_t, std::vector<const SyntheticScene*>> clusters;
  for (const auto& s : scenes) clusters[s.camera_index].push_back(&s);

  std::vector<ClusterRow> rows;
  for (const auto& [index, members] : clusters) {
    ClusterRow row;
    row.camera_index = index;
    row.focal = members.front()->camera.fy();
    row.assumed_focal = assumed;
    for (Estimator e : {Estimator::kAgnostic, Estimator::kAware}) {
      std::vector<Estimate> all;
      std::vector<SceneDetections> dets;
      for (const auto* scene : members) {
        auto o = observe(*scene, 1.0, e, assumed);
        all.insert(all.end(), o.estimates.begin(), o.estimates.end());
        dets.push_back(std::move(o.detections));
      }
      const Summary sum = summarize(all);
      const double f1 = evaluate_scenes(dets, match, options.workers).micro.f1;
      row.objects = sum.count;
      if (e == Estimator::kAgnostic) {
        row.agnostic_ratio = sum.mean;
        row.agnostic_f1 = f1;
      } else {
        row.aware_ratio = sum.mean;
        row.aware_f1 = f1;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

AmbiguityConfig AmbiguityConfig::defaults() {
  AmbiguityConfig c;
  c.camera_pool = {Intrinsics(580.0, 580.0, 320.0, 240.0, 640, 480)};
  return c;
}

void AmbiguityConfig::validate() const {
  if (camera_pool.empty()) throw Error(ErrorCode::kInvalidArgument, "camera_pool must not be empty");
  if (n_scenes < 1) throw Error(ErrorCode::kInvalidArgument, "n_scenes must be at least 1");
  if (objects_per_scene < 1) throw Error(ErrorCode::kInvalidArgument, "objects_per_scene must be at least 1");
  if (resize_factors.empty()) throw Error(ErrorCode::kInvalidArgument, "resize_factors must not be empty");
  for (double s : resize_factors) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kNonPositiveScale, "resize factors must be positive");
    }
  }
  if (estimators.empty()) throw Error(ErrorCode::kInvalidArgument, "no estimator selected");
  if (!(prior_spread >= 0.0) || !std::isfinite(prior_spread)) {
    throw Error(ErrorCode::kInvalidArgument, "prior_spread must be non-negative");
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorCode::kBadThreshold, "iou must lie in (0, 1]");
  }
}

nlohmann::json to_json(const AmbiguityConfig& c) {
  nlohmann::json pool = nlohmann::json::array();
  for (const auto& k : c.camera_pool) pool.push_back(to_json(k));
  nlohmann::json est = nlohmann::json::array();
  for (Estimator e : c.estimators) est.push_back(std::string(to_string(e)));
  return nlohmann::json{{"camera_pool", std::move(pool)},
                        {"n_scenes", c.n_scenes},
                        {"objects_per_scene", c.objects_per_scene},
                        {"resize_factors", c.resize_factors},
                        {"estimator", std::move(est)},
                        {"prior_spread", c.prior_spread},
                        {"fit", c.fit == FocalFit::kMean ? "mean" : "median"},
                        {"iou", c.iou_threshold},
                        {"seed", c.seed}};
}

namespace {

Estimator parse_estimator(const std::string& s) {
  if (s == "agnostic") return Estimator::kAgnostic;
  if (s == "aware") return Estimator::kAware;
  throw Error(ErrorCode::kParse, "estimator must be \"agnostic\", \"aware\" or \"both\", got \"" + s + "\"");
}

}  // namespace

AmbiguityConfig ambiguity_config_from_json(const nlohmann::json& j, AmbiguityConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "ambiguity config must be a JSON object");
  try {
    if (j.contains("camera_pool")) {
      c.camera_pool.clear();
      for (const auto& k : j.at("camera_pool")) c.camera_pool.push_back(intrinsics_from_json(k));
    }
    if (j.contains("n_scenes")) c.n_scenes = j.at("n_scenes").get<int>();
    if (j.contains("objects_per_scene")) c.objects_per_scene = j.at("objects_per_scene").get<int>();
    if (j.contains("resize_factors")) c.resize_factors = j.at("resize_factors").get<std::vector<double>>();
    if (j.contains("estimator")) {
      const auto& e = j.at("estimator");
      c.estimators.clear();
      if (e.is_string() && e.get<std::string>() == "both") {
        c.estimators = {Estimator::kAgnostic, Estimator::kAware};
      } else if (e.is_string()) {
        c.estimators = {parse_estimator(e.get<std::string>())};
      } else {
        for (const auto& x : e) c.estimators.push_back(parse_estimator(x.get<std::string>()));
      }
    }
    if (j.contains("prior_spread")) c.prior_spread = j.at("prior_spread").get<double>();
    if (j.contains("fit")) {
      const auto fit = j.at("fit").get<std::string>();
      if (fit == "mean") {
        c.fit = FocalFit::kMean;
      } else if (fit == "median") {
        c.fit = FocalFit::kMedian;
      } else {
        throw Error(ErrorCode::kParse, "fit must be \"mean\" or \"median\"");
      }
    }
    if (j.contains("iou")) c.iou_threshold = j.at("iou").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("ambiguity config: ") + e.what());
  }
  return c;
}

std::string bias_rows_to_csv(const std::vector<BiasRow>& rows) {
  std::ostringstream out;
  out << "estimator,s,objects,ratio_mean,ratio_std,depth_abs_error,f1\n";
  for (const auto& r : rows) {
    out << to_string(r.estimator) << ',' << format_number(r.scale) << ',' << r.objects << ','
        << format_number(r.ratio_mean) << ',' << format_number(r.ratio_std) << ','
        << format_number(r.depth_abs_error) << ',' << format_number(r.f1) << '\n';
  }
  return out.str();
}

std::string cluster_rows_to_csv(const std::vector<ClusterRow>& rows) {
  std::ostringstream out;
  out << "camera_index,focal,assumed_focal,objects,agnostic_ratio,aware_ratio,agnostic_f1,aware_f1\n";
  for (const auto& r : rows) {
    out << r.camera_index << ',' << format_number(r.focal) << ',' << format_number(r.assumed_focal) << ','
        << r.objects << ',' << format_number(r.agnostic_ratio) << ',' << format_number(r.aware_ratio) << ','
        << format_number(r.agnostic_f1) << ',' << format_number(r.aware_f1) << '\n';
  }
  return out.str();
}

std::string ambiguity_summary(const AmbiguityConfig& config, const std::vector<BiasRow>& bias,
                              const std::vector<ClusterRow>& clusters) {
  std::ostringstream out;
  out << "Synthetic depth-ambiguity experiment\n"
      << "Objects are placed exactly on their true viewing rays, so only the depth estimate varies.\n"
      << "The experiment reproduces the direction and the 1/s law of the depth bias; its F1 values\n"
      << "are not comparable to the detection scores of a trained model.\n\n"
      << "scenes: " << config.n_scenes << "  objects/scene: " << config.objects_per_scene
      << "  cameras: " << config.camera_pool.size() << "  prior spread: " << config.prior_spread
      << "  seed: " << config.seed << "\n\n";
  out << std::fixed << std::setprecision(4);
  out << "estimator      s   Z_pred/Z_true (mean +- std)   |dZ| m      F1\n";
  for (const auto& r : bias) {
    out << std::left << std::setw(10) << to_string(r.estimator) << std::right << std::setw(6)
        << r.scale << "   " << std::setw(10) << r.ratio_mean << " +- " << std::setw(8) << r.ratio_std
        << "      " << std::setw(8) << r.depth_abs_error << "  " << std::setw(7) << std::setprecision(2)
        << r.f1 << std::setprecision(4) << "\n";
  }
  if (!clusters.empty()) {
    out << "\nMixed camera pool (f_assumed fit on the mixture, s = 1)\n"
        << "camera   fy        f_assumed   agnostic ratio   aware ratio   agnostic F1   aware F1\n";
    for (const auto& c : clusters) {
      out << std::setw(6) << c.camera_index << "   " << std::setw(8) << std::setprecision(1) << c.focal
          << "  " << std::setw(9) << c.assumed_focal << std::setprecision(4) << "   " << std::setw(14)
          << c.agnostic_ratio << "   " << std::setw(11) << c.aware_ratio << "   " << std::setw(11)
          << std::setprecision(2) << c.agnostic_f1 << "   " << std::setw(8) << c.aware_f1
          << std::setprecision(4) << "\n";
    }
  }
  return out.str();
}

}  // namespace camgeom
