#include "camgeom/cli.hpp"

#include "camgeom/ambiguity.hpp"
#include "camgeom/augmentation.hpp"
#include "camgeom/detection_eval.hpp"
#include "camgeom/error.hpp"
#include "camgeom/geometric_prior.hpp"
#include "camgeom/ray_embedding.hpp"
#include "camgeom/tensor_io.hpp"
#include "camgeom/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace camgeom::cli {

namespace fs = std::filesystem;

nlohmann::json default_config() {
  return nlohmann::json{
      {"seed", 0},
      {"workers", 1},
      {"embedding",
       {{"dim", 256},
        {"period", 10000.0},
        {"focal_reference", 1000.0},
        {"patch", 14},
        {"anchor", "center"},
        {"geo_dim", 96},
        {"geo_period", 100.0}}},
      {"augmentation", to_json(AugmentationPolicy{})},
      {"eval", {{"iou", 0.25}, {"iou_mode", "oriented"}, {"euler", "zyx"}}},
      {"ambiguity", to_json(AmbiguityConfig::defaults())},
  };
}

nlohmann::json merge_config_file(nlohmann::json base, const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json patch;
  try {
    patch = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, path + ": invalid JSON at byte " + std::to_string(e.byte));
  }
  if (!patch.is_object()) throw Error(ErrorCode::kParse, path + ": config must be a JSON object");
  base.merge_patch(patch);
  return base;
}

namespace {

// Typed view of the resolved configuration; constructing it validates everything.
struct Resolved {
  std::uint64_t seed = 0;
  int workers = 1;
  CameraEmbeddingConfig camera;
  PointEmbeddingConfig points;
  int patch = 14;
  TokenAnchor anchor = TokenAnchor::kCenter;
  AugmentationPolicy policy;
  MatchOptions match;
  AmbiguityConfig ambiguity;
};

template <typename T>
T get(const nlohmann::json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config ") + section + "." + key + ": " + e.what());
  }
}

Resolved resolve(const nlohmann::json& j) {
  Resolved r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    r.workers = j.at("workers").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (r.workers < 1) throw Error(ErrorCode::kInvalidArgument, "workers must be at least 1");

  r.camera.dim = get<int>(j, "embedding", "dim");
  r.camera.period = get<double>(j, "embedding", "period");
  r.camera.focal_reference = get<double>(j, "embedding", "focal_reference");
  r.points.dim = get<int>(j, "embedding", "geo_dim");
  r.points.period = get<double>(j, "embedding", "geo_period");
  r.patch = get<int>(j, "embedding", "patch");
  const auto anchor = get<std::string>(j, "embedding", "anchor");
  if (anchor == "center") {
    r.anchor = TokenAnchor::kCenter;
  } else if (anchor == "top_left") {
    r.anchor = TokenAnchor::kTopLeft;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "embedding.anchor must be \"center\" or \"top_left\"");
  }
  if (r.camera.dim < 8 || r.camera.dim % 8 != 0) {
    throw Error(ErrorCode::kBadDimension, "embedding.dim must be a positive multiple of 8");
  }
  if (r.points.dim < 6 || r.points.dim % 6 != 0) {
    throw Error(ErrorCode::kBadDimension, "embedding.geo_dim must be a positive multiple of 6");
  }
  if (!(r.camera.period > 0.0) || !(r.camera.focal_reference > 0.0) || !(r.points.period > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "embedding periods and focal reference must be positive");
  }
  if (r.patch < 1) throw Error(ErrorCode::kInvalidArgument, "embedding.patch must be at least 1");

  r.policy = augmentation_policy_from_json(j.at("augmentation"));
  r.policy.seed = r.seed;
  r.policy.validate();

  r.match.threshold = get<double>(j, "eval", "iou");
  if (!(r.match.threshold > 0.0 && r.match.threshold <= 1.0)) {
    throw Error(ErrorCode::kBadThreshold, "eval.iou must lie in (0, 1]");
  }
  const auto mode = get<std::string>(j, "eval", "iou_mode");
  if (mode == "oriented") {
    r.match.mode = IouMode::kOriented;
  } else if (mode == "yaw_only") {
    r.match.mode = IouMode::kYawOnly;
  } else if (mode == "axis_aligned") {
    r.match.mode = IouMode::kAxisAligned;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "eval.iou_mode must be oriented, yaw_only or axis_aligned");
  }
  const auto euler = get<std::string>(j, "eval", "euler");
  if (euler == "zyx") {
    r.match.order = EulerOrder::kZYX;
  } else if (euler == "xyz") {
    r.match.order = EulerOrder::kXYZ;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "eval.euler must be zyx or xyz");
  }

  r.ambiguity = ambiguity_config_from_json(j.at("ambiguity"));
  r.ambiguity.seed = r.seed;
  r.ambiguity.validate();
  return r;
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::kIo ? kIoFailure : kValidationFailure;
}

void echo_config(const fs::path& out_dir, const nlohmann::json& config) {
  write_json_file(out_dir / "config.resolved.json", config);
}

Intrinsics load_intrinsics(const std::string& path) { return parse_intrinsics(read_text_file(path)); }

std::string sidecar_path(const fs::path& tensor_path) { return tensor_path.string() + ".json"; }

// ---------------------------------------------------------------------------

struct AugmentArgs {
  std::string manifest;
  std::string out;
};

int cmd_augment(const AugmentArgs& a, const nlohmann::json& config, const Resolved& r, std::ostream& out) {
  const fs::path manifest_path(a.manifest);
  std::vector<ManifestEntry> entries;
  try {
    entries = parse_manifest(read_text_file(manifest_path), manifest_path.parent_path());
  } catch (const Error& e) {
    throw;
  }
  fs::create_directories(a.out);
  echo_config(a.out, config);
  const BatchReport report = augment_manifest(entries, manifest_path.parent_path(), a.out, r.policy, r.workers);
  write_json_file(fs::path(a.out) / "timing.json",
                  nlohmann::json{{"elapsed_seconds", report.elapsed_seconds},
                                 {"samples_per_second", report.throughput()},
                                 {"workers", r.workers}});
  out << "augmented " << report.succeeded() << "/" << report.samples.size() << " samples ("
      << std::fixed << std::setprecision(1) << report.throughput() << " samples/s)\n";
  for (const auto& s : report.samples) {
    if (!s.ok) out << "warning: sample " << s.index << " (" << s.id << ") failed: " << s.error << "\n";
  }
  return kOk;
}

struct EmbedArgs {
  std::string intrinsics;
  std::string out;
  std::optional<std::string> depth;
  std::optional<int> rows;
  std::optional<int> cols;
};

int cmd_embed(const EmbedArgs& a, const nlohmann::json& config, const Resolved& r, std::ostream& out) {
  const Intrinsics k = load_intrinsics(a.intrinsics);
  TokenGridSpec grid = TokenGridSpec::covering(k, r.patch);
  grid.anchor = r.anchor;
  if (a.rows) grid.rows = *a.rows;
  if (a.cols) grid.cols = *a.cols;

  const EmbeddingGrid e_cam = embed(ray_grid(k, grid), k, r.camera);
  std::optional<EmbeddingGrid> e_geo;
  if (a.depth) {
    const DepthMap depth = DepthMap::from_tensor(read_tensor(*a.depth));
    e_geo = embed_points(pool_to_tokens(depth, k, grid), r.points);
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  echo_config(dir, config);
  write_tensor(dir / "e_cam.cgem", e_cam.to_tensor());
  write_json_file(sidecar_path(dir / "e_cam.cgem"), camera_embedding_sidecar(k, grid, r.camera));
  out << "wrote " << (dir / "e_cam.cgem").string() << " (" << grid.rows << "x" << grid.cols << "x"
      << r.camera.dim << ")\n";
  if (e_geo) {
    write_tensor(dir / "e_geo.cgem", e_geo->to_tensor());
    write_json_file(sidecar_path(dir / "e_geo.cgem"), point_embedding_sidecar(k, grid, r.points));
    out << "wrote " << (dir / "e_geo.cgem").string() << " (" << grid.rows << "x" << grid.cols << "x"
        << r.points.dim << ")\n";
  }
  return kOk;
}

struct UnprojectArgs {
  std::string depth;
  std::string intrinsics;
  std::string out;
  bool tokens = false;
};

int cmd_unproject(const UnprojectArgs& a, const nlohmann::json& config, const Resolved& r,
                  std::ostream& out) {
  const Intrinsics k = load_intrinsics(a.intrinsics);
  const DepthMap depth = DepthMap::from_tensor(read_tensor(a.depth));
  const PointGrid cloud = unproject(depth, k);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  echo_config(dir, config);
  write_tensor(dir / "points.cgem", cloud.to_tensor());
  write_json_file(sidecar_path(dir / "points.cgem"),
                  nlohmann::json{{"kind", "point_cloud"},
                                 {"frame", "camera"},
                                 {"intrinsics", to_json(k)},
                                 {"layout", "height x width x (x, y, z) meters; NaN marks invalid"},
                                 {"valid_points", depth.valid_count()}});
  out << "wrote " << (dir / "points.cgem").string() << " (" << depth.valid_count() << " valid points)\n";
  if (a.tokens) {
    TokenGridSpec grid = TokenGridSpec::covering(k, r.patch);
    grid.anchor = r.anchor;
    const PointGrid pooled = pool_to_tokens(depth, k, grid);
    write_tensor(dir / "token_points.cgem", pooled.to_tensor());
    write_json_file(sidecar_path(dir / "token_points.cgem"),
                    nlohmann::json{{"kind", "token_point_grid"},
                                   {"frame", "camera"},
                                   {"intrinsics", to_json(k)},
                                   {"token_grid", to_json(grid)},
                                   {"pooling", "nearest pixel under token anchor; point placed on the anchor ray"}});
    out << "wrote " << (dir / "token_points.cgem").string() << "\n";
  }
  return kOk;
}

struct EvalArgs {
  std::string preds;
  std::string truths;
  std::optional<std::string> classes;
  std::optional<std::string> out;
};

std::vector<Detection> load_detections(const fs::path& path, std::ostream& err) {
  const ParseResult parsed = parse_detections(read_text_file(path));
  for (const auto& w : parsed.warnings) err << "warning: " << path.string() << ": " << w << "\n";
  return parsed.detections;
}

int cmd_eval(const EvalArgs& a, const nlohmann::json& config, Resolved r, std::ostream& out,
             std::ostream& err) {
  if (a.classes) {
    std::set<std::string> classes;
    std::istringstream in(read_text_file(*a.classes));
    std::string line;
    while (std::getline(in, line)) {
      const std::string label = normalize_label(line);
      if (!label.empty()) classes.insert(label);
    }
    r.match.classes = std::move(classes);
  }

  EvalReport report;
  if (fs::is_directory(a.preds) && fs::is_directory(a.truths)) {
    // One scene per truth file; predictions are paired by file name.
    std::vector<SceneDetections> scenes;
    std::vector<fs::path> truth_files;
    for (const auto& entry : fs::directory_iterator(a.truths)) {
      if (entry.is_regular_file()) truth_files.push_back(entry.path());
    }
    std::sort(truth_files.begin(), truth_files.end());
    for (const auto& tf : truth_files) {
      SceneDetections scene;
      scene.id = tf.stem().string();
      scene.truths = load_detections(tf, err);
      const fs::path pf = fs::path(a.preds) / tf.filename();
      if (fs::exists(pf)) scene.predictions = load_detections(pf, err);
      else err << "warning: no predictions for scene " << scene.id << "\n";
      scenes.push_back(std::move(scene));
    }
    report = evaluate_scenes(scenes, r.match, r.workers);
  } else {
    report = match_and_score(load_detections(a.preds, err), load_detections(a.truths, err), r.match);
  }

  out << std::fixed << std::setprecision(1);
  out << "IoU >= " << std::setprecision(2) << report.threshold << std::setprecision(1) << "\n";
  out << std::left << std::setw(20) << "class" << std::right << std::setw(7) << "pred" << std::setw(7)
      << "gt" << std::setw(7) << "tp" << std::setw(8) << "P" << std::setw(8) << "R" << std::setw(8) << "F1"
      << "\n";
  auto row = [&](const ClassScore& s) {
    out << std::left << std::setw(20) << s.label << std::right << std::setw(7) << s.predictions
        << std::setw(7) << s.truths << std::setw(7) << s.matched << std::setw(8) << s.precision
        << std::setw(8) << s.recall << std::setw(8) << s.f1 << "\n";
  };
  for (const auto& c : report.classes) row(c);
  row(report.micro);
  row(report.macro);

  if (a.out) {
    const fs::path dir(*a.out);
    fs::create_directories(dir);
    echo_config(dir, config);
    write_json_file(dir / "report.json", report.to_json());
    write_text_file(dir / "per_class.csv", report.to_csv());
  }
  return kOk;
}

struct AmbiguityArgs {
  std::string out;
};

int cmd_ambiguity(const AmbiguityArgs& a, const nlohmann::json& config, const Resolved& r,
                  std::ostream& out) {
  const AmbiguityConfig& c = r.ambiguity;
  auto priors = default_size_priors();
  for (auto& [label, prior] : priors) prior.spread = c.prior_spread;
  SceneGenerationOptions gen;
  gen.objects_per_scene = c.objects_per_scene;
  const auto scenes = generate_scenes(c.n_scenes, c.camera_pool, priors, c.seed, gen);

  BiasExperimentOptions opts;
  opts.fit = c.fit;
  opts.iou_threshold = c.iou_threshold;
  opts.workers = r.workers;
  std::vector<BiasRow> bias;
  for (Estimator e : c.estimators) {
    auto rows = run_bias_experiment(scenes, c.resize_factors, e, opts);
    bias.insert(bias.end(), rows.begin(), rows.end());
  }
  std::vector<ClusterRow> clusters;
  if (c.camera_pool.size() >= 2) clusters = run_mixed_pool_experiment(scenes, opts);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  echo_config(dir, config);
  write_text_file(dir / "bias.csv", bias_rows_to_csv(bias));
  if (!clusters.empty()) write_text_file(dir / "mixed_pool.csv", cluster_rows_to_csv(clusters));
  const std::string summary = ambiguity_summary(c, bias, clusters);
  write_text_file(dir / "summary.txt", summary);
  out << summary;
  return kOk;
}

std::vector<double> parse_factor_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "bad resize factor \"" + item + "\"");
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"camgeom: camera-aware geometry toolkit"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  app.add_option("--config", config_path, "JSON config file (default: $CAMGEOM_CONFIG)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  // Flags that map onto config keys: section, key, value.
  std::vector<std::function<void(nlohmann::json&)>> overrides;
  auto bind_override = [&]<typename T>(CLI::App* sub, const std::string& flag, const char* section,
                                       const char* key, T* storage, const std::string& help) {
    sub->add_option(flag, *storage, help);
    overrides.push_back([=](nlohmann::json& j) {
      if (sub->parsed() && sub->count(flag) > 0) j[section][key] = *storage;
    });
  };

  // augment
  AugmentArgs augment_args;
  double scale_min = 0, scale_max = 0, shift = 0;
  std::string mode;
  bool anisotropic = false;
  auto* augment_cmd = app.add_subcommand("augment", "camera-consistent scale/shift augmentation");
  augment_cmd->fallthrough();
  augment_cmd->add_option("--manifest", augment_args.manifest, "JSON-lines manifest")->required();
  augment_cmd->add_option("--out", augment_args.out, "output root")->required();
  augment_cmd->add_option("--scale-min", scale_min, "smallest resize factor");
  augment_cmd->add_option("--scale-max", scale_max, "largest resize factor");
  bind_override(augment_cmd, "--shift-range", "augmentation", "shift_range", &shift,
                "max principal-point shift (fraction of extent)");
  bind_override(augment_cmd, "--pad-or-crop", "augmentation", "pad_or_crop", &mode, "pad | crop");
  augment_cmd->add_flag("--anisotropic", anisotropic, "draw x and y scales independently");
  overrides.push_back([&](nlohmann::json& j) {
    if (!augment_cmd->parsed()) return;
    auto& range = j["augmentation"]["scale_range"];
    if (augment_cmd->count("--scale-min")) range[0] = scale_min;
    if (augment_cmd->count("--scale-max")) range[1] = scale_max;
    if (augment_cmd->count("--anisotropic")) j["augmentation"]["anisotropic"] = anisotropic;
  });

  // embed
  EmbedArgs embed_args;
  int dim = 0, patch = 0, geo_dim = 0;
  double period = 0, focal_ref = 0, geo_period = 0;
  std::string anchor;
  auto* embed_cmd = app.add_subcommand("embed", "export the camera ray embedding (and point embedding)");
  embed_cmd->fallthrough();
  embed_cmd->add_option("--intrinsics", embed_args.intrinsics, "intrinsics JSON")->required();
  embed_cmd->add_option("--out", embed_args.out, "output directory")->required();
  embed_cmd->add_option("--depth", embed_args.depth, "metric depth map (CGEM, dim 1) for the point embedding");
  embed_cmd->add_option("--rows", embed_args.rows, "token rows (default: cover the image)");
  embed_cmd->add_option("--cols", embed_args.cols, "token cols (default: cover the image)");
  bind_override(embed_cmd, "--dim", "embedding", "dim", &dim, "camera embedding width (multiple of 8)");
  bind_override(embed_cmd, "--period", "embedding", "period", &period, "sinusoid base period");
  bind_override(embed_cmd, "--focal-reference", "embedding", "focal_reference", &focal_ref,
                "reference focal f0 (pixels)");
  bind_override(embed_cmd, "--patch", "embedding", "patch", &patch, "pixels per token side");
  bind_override(embed_cmd, "--anchor", "embedding", "anchor", &anchor, "center | top_left");
  bind_override(embed_cmd, "--geo-dim", "embedding", "geo_dim", &geo_dim, "point embedding width (multiple of 6)");
  bind_override(embed_cmd, "--geo-period", "embedding", "geo_period", &geo_period, "point sinusoid period (m)");

  // unproject
  UnprojectArgs unproject_args;
  int unproject_patch = 0;
  auto* unproject_cmd = app.add_subcommand("unproject", "depth map to camera-frame point cloud");
  unproject_cmd->fallthrough();
  unproject_cmd->add_option("--depth", unproject_args.depth, "metric depth map (CGEM, dim 1)")->required();
  unproject_cmd->add_option("--intrinsics", unproject_args.intrinsics, "intrinsics JSON")->required();
  unproject_cmd->add_option("--out", unproject_args.out, "output directory")->required();
  unproject_cmd->add_flag("--tokens", unproject_args.tokens, "also write the token-resolution point grid");
  bind_override(unproject_cmd, "--patch", "embedding", "patch", &unproject_patch, "pixels per token side");

  // eval
  EvalArgs eval_args;
  double iou = 0;
  std::string iou_mode, euler;
  auto* eval_cmd = app.add_subcommand("eval", "score 3D detections (P/R/F1 at an IoU threshold)");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--preds", eval_args.preds, "model output (file or directory)")->required();
  eval_cmd->add_option("--truths", eval_args.truths, "ground truth (file or directory)")->required();
  eval_cmd->add_option("--classes", eval_args.classes, "file with one class label per line");
  eval_cmd->add_option("--out", eval_args.out, "write report.json and per_class.csv here");
  bind_override(eval_cmd, "--iou", "eval", "iou", &iou, "IoU threshold");
  bind_override(eval_cmd, "--iou-mode", "eval", "iou_mode", &iou_mode, "oriented | yaw_only | axis_aligned");
  bind_override(eval_cmd, "--euler", "eval", "euler", &euler, "zyx | xyz");

  // ambiguity
  AmbiguityArgs ambiguity_args;
  int n_scenes = 0, objects_per_scene = 0;
  double prior_spread = 0;
  std::string factors, estimator, fit;
  auto* ambiguity_cmd = app.add_subcommand("ambiguity", "synthetic focal/size/depth ambiguity experiments");
  ambiguity_cmd->fallthrough();
  ambiguity_cmd->add_option("--out", ambiguity_args.out, "output directory")->required();
  bind_override(ambiguity_cmd, "--n-scenes", "ambiguity", "n_scenes", &n_scenes, "number of scenes");
  bind_override(ambiguity_cmd, "--objects-per-scene", "ambiguity", "objects_per_scene", &objects_per_scene,
                "objects per scene");
  bind_override(ambiguity_cmd, "--prior-spread", "ambiguity", "prior_spread", &prior_spread,
                "log-normal spread of object sizes around the class prior");
  bind_override(ambiguity_cmd, "--estimator", "ambiguity", "estimator", &estimator, "agnostic | aware | both");
  bind_override(ambiguity_cmd, "--fit", "ambiguity", "fit", &fit, "mean | median");
  ambiguity_cmd->add_option("--resize-factors", factors, "comma-separated resize factors");

  app.add_subcommand("version", "print the version");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  }

  if (app.got_subcommand("version")) {
    out << "camgeom " << kVersion << "\n";
    return kOk;
  }

  try {
    nlohmann::json config = default_config();
    if (!config_path) {
      if (const char* env = std::getenv("CAMGEOM_CONFIG"); env != nullptr && *env != '\0') {
        config_path = env;
      }
    }
    if (config_path) config = merge_config_file(std::move(config), *config_path);
    if (seed) config["seed"] = *seed;
    if (workers) config["workers"] = *workers;
    for (const auto& apply : overrides) apply(config);
    if (ambiguity_cmd->parsed() && ambiguity_cmd->count("--resize-factors")) {
      config["ambiguity"]["resize_factors"] = parse_factor_list(factors);
    }
    const Resolved resolved = resolve(config);
    // The echo records what actually ran, including the effective seed.
    config["augmentation"]["seed"] = resolved.seed;
    config["ambiguity"]["seed"] = resolved.seed;

    if (augment_cmd->parsed()) return cmd_augment(augment_args, config, resolved, out);
    if (embed_cmd->parsed()) return cmd_embed(embed_args, config, resolved, out);
    if (unproject_cmd->parsed()) return cmd_unproject(unproject_args, config, resolved, out);
    if (eval_cmd->parsed()) return cmd_eval(eval_args, config, resolved, out, err);
    if (ambiguity_cmd->parsed()) return cmd_ambiguity(ambiguity_args, config, resolved, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  }
  return kValidationFailure;
}

}  // namespace camgeom::cli
