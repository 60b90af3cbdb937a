#include "camgeom/augmentation.hpp"

#include "camgeom/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace camgeom {

void AugmentationPolicy::validate() const {
  if (!(scale_min > 0.0) || !(scale_min <= scale_max) || !std::isfinite(scale_max)) {
    throw Error(ErrorCode::kInvalidArgument, "scale range must satisfy 0 < min <= max");
  }
  if (!(shift_fraction >= 0.0 && shift_fraction <= 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "shift fraction must lie in [0, 0.5]");
  }
}

nlohmann::json to_json(const AugmentationPolicy& policy) {
  return nlohmann::json{{"scale_range", {policy.scale_min, policy.scale_max}},
                        {"shift_range", policy.shift_fraction},
                        {"pad_or_crop", policy.mode == CanvasMode::kPad ? "pad" : "crop"},
                        {"anisotropic", policy.anisotropic},
                        {"seed", policy.seed}};
}

AugmentationPolicy augmentation_policy_from_json(const nlohmann::json& j, AugmentationPolicy base) {
  try {
    if (j.contains("scale_range")) {
      const auto& r = j.at("scale_range");
      if (!r.is_array() || r.size() != 2) throw Error(ErrorCode::kParse, "scale_range must be [min, max]");
      base.scale_min = r.at(0).get<double>();
      base.scale_max = r.at(1).get<double>();
    }
    if (j.contains("shift_range")) base.shift_fraction = j.at("shift_range").get<double>();
    if (j.contains("pad_or_crop")) {
      const auto mode = j.at("pad_or_crop").get<std::string>();
      if (mode == "pad") {
        base.mode = CanvasMode::kPad;
      } else if (mode == "crop") {
        base.mode = CanvasMode::kCrop;
      } else {
        throw Error(ErrorCode::kParse, "pad_or_crop must be \"pad\" or \"crop\"");
      }
    }
    if (j.contains("anisotropic")) base.anisotropic = j.at("anisotropic").get<bool>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("augmentation policy: ") + e.what());
  }
  return base;
}

PixelTransform draw_transform(int width, int height, const AugmentationPolicy& policy,
                              std::mt19937_64& rng) {
  policy.validate();
  const double span = policy.scale_max - policy.scale_min;
  const double sx = policy.scale_min + span * uniform01(rng);
  const double sy_draw = policy.scale_min + span * uniform01(rng);
  const double sy = policy.anisotropic ? sy_draw : sx;
  const double shift_u = 2.0 * uniform01(rng) - 1.0;
  const double shift_v = 2.0 * uniform01(rng) - 1.0;

  const double scaled_w = sx * width;
  const double scaled_h = sy * height;
  if (policy.mode == CanvasMode::kPad) {
    // Original canvas, scaled image centered, then shifted.
    const double du = 0.5 * (scaled_w - width) + policy.shift_fraction * width * shift_u;
    const double dv = 0.5 * (scaled_h - height) + policy.shift_fraction * height * shift_v;
    return PixelTransform(sx, sy, du, dv, width, height);
  }
  // Crop: the canvas is the original extent, shrunk to what the scaled image can
  // fill; the shift is limited by the slack on each side.
  const int out_w = std::clamp(static_cast<int>(std::floor(scaled_w + 1e-9)), 1, width);
  const int out_h = std::clamp(static_cast<int>(std::floor(scaled_h + 1e-9)), 1, height);
  const double slack_w = std::max(0.0, scaled_w - out_w);
  const double slack_h = std::max(0.0, scaled_h - out_h);
  const double reach_w = std::min(policy.shift_fraction * out_w, 0.5 * slack_w);
  const double reach_h = std::min(policy.shift_fraction * out_h, 0.5 * slack_h);
  return PixelTransform(sx, sy, 0.5 * slack_w + reach_w * shift_u, 0.5 * slack_h + reach_h * shift_v,
                        out_w, out_h);
}

AugmentedSample augment(const Sample& sample, const AugmentationPolicy& policy, std::uint64_t seed) {
  const Intrinsics& k = sample.intrinsics;
  if (sample.image.width() != k.width() || sample.image.height() != k.height()) {
    throw Error(ErrorCode::kExtentMismatch, "image extent differs from intrinsics extent");
  }
  if (sample.depth && (sample.depth->width() != k.width() || sample.depth->height() != k.height())) {
    throw Error(ErrorCode::kExtentMismatch, "depth extent differs from intrinsics extent");
  }
  std::mt19937_64 rng(seed);
  const PixelTransform t = draw_transform(k.width(), k.height(), policy, rng);

  std::optional<DepthMap> depth;
  if (sample.depth) depth = resample_nearest(*sample.depth, t, policy.mode);
  return AugmentedSample{
      .source_id = sample.id,
      .seed = seed,
      .image = resample(sample.image, t, policy.mode),
      .intrinsics = apply_transform(k, t),
      .transform = t,
      .depth = std::move(depth),
      .boxes = sample.boxes,
  };
}

std::size_t BatchReport::succeeded() const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const SampleOutcome& s) { return s.ok; }));
}

std::size_t BatchReport::failed() const { return samples.size() - succeeded(); }

double BatchReport::throughput() const {
  return elapsed_seconds > 0.0 ? static_cast<double>(samples.size()) / elapsed_seconds : 0.0;
}

nlohmann::json BatchReport::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& s : samples) {
    nlohmann::json e{{"index", s.index}, {"id", s.id}, {"ok", s.ok}, {"seed", s.seed}};
    if (s.transform) e["transform"] = camgeom::to_json(*s.transform);
    if (!s.ok) e["error"] = s.error;
    entries.push_back(std::move(e));
  }
  return nlohmann::json{{"samples", samples.size()},
                        {"succeeded", succeeded()},
                        {"failed", failed()},
                        {"entries", std::move(entries)}};
}

BatchReport batch_augment(std::size_t count, const std::function<Sample(std::size_t)>& load,
                          const std::function<void(std::size_t, const AugmentedSample&)>& sink,
                          const AugmentationPolicy& policy, int workers) {
  policy.validate();
  BatchReport report;
  report.samples.resize(count);
  const auto start = std::chrono::steady_clock::now();

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      SampleOutcome& outcome = report.samples[i];
      outcome.index = i;
      outcome.seed = sample_seed(policy.seed, i);
      try {
        const Sample sample = load(i);
        outcome.id = sample.id;
        const AugmentedSample result = augment(sample, policy, outcome.seed);
        sink(i, result);
        outcome.transform = result.transform;
        outcome.ok = true;
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(work);
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<std::optional<AugmentedSample>> batch_augment(const std::vector<Sample>& samples,
                                                          const AugmentationPolicy& policy,
                                                          int workers, BatchReport* report) {
  std::vector<std::optional<AugmentedSample>> out(samples.size());
  BatchReport r = batch_augment(
      samples.size(), [&](std::size_t i) { return samples[i]; },
      [&](std::size_t i, const AugmentedSample& s) { out[i] = s; }, policy, workers);
  if (report) *report = std::move(r);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<std::filesystem::path> optional_path(const nlohmann::json& obj, const char* key,
                                                   const std::filesystem::path& base) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return resolve(base, obj.at(key).get<std::string>());
}

bool has_extension(const std::filesystem::path& p, std::initializer_list<const char*> exts) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::any_of(exts.begin(), exts.end(), [&](const char* e) { return ext == e; });
}

RasterImage load_image(const std::filesystem::path& path) {
  if (has_extension(path, {".ppm", ".pgm", ".pnm"})) return decode_pnm(read_file_bytes(path));
  if (has_extension(path, {".cgem"})) return image_from_tensor(read_tensor(path));
  throw Error(ErrorCode::kParse, "unsupported image format: " + path.string());
}

void save_image(const std::filesystem::path& path, const RasterImage& image) {
  if (has_extension(path, {".ppm", ".pgm", ".pnm"}) && image.format() == SampleFormat::kU8) {
    write_file_bytes(path, encode_pnm(image));
  } else {
    write_tensor(path, image_to_tensor(image));
  }
}

// Where an input file lands under the output root.
std::filesystem::path mirror_path(const std::filesystem::path& out_root,
                                  const std::filesystem::path& manifest_dir,
                                  const std::filesystem::path& input, const std::string& id) {
  const auto rel = input.lexically_normal().lexically_relative(manifest_dir.lexically_normal());
  if (rel.empty() || *rel.begin() == "..") return out_root / "external" / id / input.filename();
  return out_root / rel;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw Error(ErrorCode::kParse, "expected a JSON object");
      if (!obj.contains("id") || !obj.contains("image") || !obj.contains("intrinsics")) {
        throw Error(ErrorCode::kParse, "\"id\", \"image\" and \"intrinsics\" are required");
      }
      const auto& intr = obj.at("intrinsics");
      std::variant<std::filesystem::path, Intrinsics> intrinsics =
          intr.is_string() ? std::variant<std::filesystem::path, Intrinsics>(
                                 resolve(base_dir, intr.get<std::string>()))
                           : std::variant<std::filesystem::path, Intrinsics>(intrinsics_from_json(intr));
      entries.push_back(ManifestEntry{
          .id = obj.at("id").get<std::string>(),
          .image = resolve(base_dir, obj.at("image").get<std::string>()),
          .intrinsics = std::move(intrinsics),
          .depth = optional_path(obj, "depth", base_dir),
          .boxes = optional_path(obj, "boxes", base_dir),
      });
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

Sample load_sample(const ManifestEntry& entry) {
  const Intrinsics k = std::holds_alternative<Intrinsics>(entry.intrinsics)
                           ? std::get<Intrinsics>(entry.intrinsics)
                           : parse_intrinsics(read_text_file(std::get<std::filesystem::path>(entry.intrinsics)));
  Sample s{.id = entry.id, .image = load_image(entry.image), .intrinsics = k, .depth = {}, .boxes = {}};
  if (entry.depth) s.depth = DepthMap::from_tensor(read_tensor(*entry.depth));
  if (entry.boxes) s.boxes = read_file_bytes(*entry.boxes);
  return s;
}

BatchReport augment_manifest(const std::vector<ManifestEntry>& entries,
                             const std::filesystem::path& manifest_dir,
                             const std::filesystem::path& out_root, const AugmentationPolicy& policy,
                             int workers) {
  std::filesystem::create_directories(out_root);
  std::vector<nlohmann::json> manifest_lines(entries.size());
  std::vector<nlohmann::json> transform_lines(entries.size());

  auto sink = [&](std::size_t i, const AugmentedSample& out) {
    const ManifestEntry& e = entries[i];
    const auto image_path = mirror_path(out_root, manifest_dir, e.image, e.id);
    save_image(image_path, out.image);

    nlohmann::json line{{"id", e.id}, {"image", image_path.lexically_relative(out_root).generic_string()}};
    if (const auto* p = std::get_if<std::filesystem::path>(&e.intrinsics)) {
      const auto k_path = mirror_path(out_root, manifest_dir, *p, e.id);
      write_json_file(k_path, to_json(out.intrinsics));
      line["intrinsics"] = k_path.lexically_relative(out_root).generic_string();
    } else {
      line["intrinsics"] = to_json(out.intrinsics);
    }
    if (e.depth && out.depth) {
      const auto d_path = mirror_path(out_root, manifest_dir, *e.depth, e.id);
      write_tensor(d_path, out.depth->to_tensor());
      line["depth"] = d_path.lexically_relative(out_root).generic_string();
    }
    if (e.boxes && out.boxes) {
      const auto b_path = mirror_path(out_root, manifest_dir, *e.boxes, e.id);
      write_file_bytes(b_path, *out.boxes);
      line["boxes"] = b_path.lexically_relative(out_root).generic_string();
    }
    manifest_lines[i] = std::move(line);

    const Intrinsics source = std::holds_alternative<Intrinsics>(e.intrinsics)
                                  ? std::get<Intrinsics>(e.intrinsics)
                                  : parse_intrinsics(read_text_file(std::get<std::filesystem::path>(e.intrinsics)));
    transform_lines[i] = nlohmann::json{{"id", e.id},
                                        {"index", i},
                                        {"seed", out.seed},
                                        {"transform", to_json(out.transform)},
                                        {"source_intrinsics", to_json(source)},
                                        {"intrinsics", to_json(out.intrinsics)}};
  };

  BatchReport report =
      batch_augment(entries.size(), [&](std::size_t i) { return load_sample(entries[i]); }, sink, policy, workers);

  std::string manifest_text;
  std::string transforms_text;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!report.samples[i].ok) continue;
    manifest_text += manifest_lines[i].dump() + "\n";
    transforms_text += transform_lines[i].dump() + "\n";
  }
  write_text_file(out_root / "manifest.jsonl", manifest_text);
  write_text_file(out_root / "transforms.jsonl", transforms_text);
  write_json_file(out_root / "report.json", report.to_json());
  return report;
}

}  // namespace camgeom
