#include "camgeom/augmentation.hpp"
#include "camgeom/error.hpp"
#include "camgeom/ray_embedding.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <unistd.h>

using namespace camgeom;
namespace fs = std::filesystem;

namespace {

RasterImage gradient(int w, int h, int channels = 1) {
  RasterImage img = RasterImage::zeros(w, h, channels, SampleFormat::kU8);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      for (int c = 0; c < channels; ++c) img.set(i, j, c, static_cast<float>(2 * j + i + 10 * c) * 0.5f);
  return img;
}

RasterImage noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * 3);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng() & 0xFF);
  return RasterImage(w, h, 3, std::move(data));
}

Sample make_sample(int index) {
  const int w = 64 + 8 * (index % 3), h = 48;
  Sample s{.id = "frame" + std::to_string(index),
           .image = noise(w, h, 100 + index),
           .intrinsics = Intrinsics(0.9 * w, 0.9 * w, 0.5 * w + 0.25, 0.5 * h - 0.75, w, h),
           .depth = {},
           .boxes = std::vector<std::uint8_t>{1, 2, 3}};
  std::vector<double> d(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.0 + 0.01 * static_cast<double>(i % 97);
  s.depth = DepthMap::from_values(w, h, std::move(d));
  return s;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[e.path().lexically_relative(root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("camgeom_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Resample, IdentityIsBitExact) {
  const RasterImage img = noise(31, 17, 1);
  EXPECT_EQ(resample(img, PixelTransform::identity(31, 17)), img);
  const RasterImage f = image_from_tensor(image_to_tensor(img));
  EXPECT_EQ(resample(f, PixelTransform::identity(31, 17)), f);
}

TEST(Resample, ScaleUpAndDownOnGradient) {
  // Linear ramp in float so the only error left is 8-bit quantization.
  const int w = 64, h = 48;
  RasterImage img = RasterImage::zeros(w, h, 1, SampleFormat::kU8);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) img.set(i, j, 0, 2.0f * j + 1.0f * i + 20.0f);
  const PixelTransform up = PixelTransform::resize(2.0, w, h);
  const PixelTransform down = PixelTransform::resize(0.5, 2 * w, 2 * h);
  const RasterImage back = resample(resample(img, up), down);
  ASSERT_EQ(back.width(), w);
  int worst = 0;
  // Interior only: edge clamping breaks the affine assumption in the last half pixel.
  for (int i = 1; i < h - 1; ++i)
    for (int j = 1; j < w - 1; ++j)
      worst = std::max(worst, std::abs(static_cast<int>(back.sample(i, j, 0)) - static_cast<int>(img.sample(i, j, 0))));
  EXPECT_LE(worst, 2);
}

TEST(Resample, ConstantStaysConstant) {
  RasterImage img = RasterImage::zeros(40, 30, 3, SampleFormat::kU8);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 40; ++j)
      for (int c = 0; c < 3; ++c) img.set(i, j, c, 77.0f);
  const PixelTransform t(1.37, 0.81, 3.3, -2.1, 40, 30);
  const RasterImage out = resample(img, t, CanvasMode::kPad, 0.0f);
  // Canvas pixels whose centers map inside the source are interior.
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 40; ++j) {
      const Pixel src = t.apply_inverse({j + 0.5, i + 0.5});
      if (src.u < 0 || src.u > 40 || src.v < 0 || src.v > 30) continue;
      for (int c = 0; c < 3; ++c) EXPECT_EQ(out.sample(i, j, c), 77.0f);
    }
  }
}

TEST(Resample, CropOutOfBounds) {
  const RasterImage img = noise(20, 20, 2);
  try {
    resample(img, PixelTransform(1, 1, -5, 0, 20, 20), CanvasMode::kCrop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCropOutOfBounds);
  }
  EXPECT_NO_THROW(resample(img, PixelTransform(1, 1, 5, 5, 15, 15), CanvasMode::kCrop));
}

TEST(Pnm, RoundTrip) {
  const RasterImage rgb = noise(9, 7, 3);
  EXPECT_EQ(decode_pnm(encode_pnm(rgb)), rgb);
  const RasterImage gray = gradient(9, 7);
  EXPECT_EQ(decode_pnm(encode_pnm(gray)), gray);
  const std::string bad = "P6\n2 2\n65535\n";
  EXPECT_THROW(decode_pnm(std::span(reinterpret_cast<const std::uint8_t*>(bad.data()), bad.size())), Error);
}

TEST(Augment, UnitPolicyIsIdentity) {
  AugmentationPolicy p;
  p.scale_min = p.scale_max = 1.0;
  p.shift_fraction = 0.0;
  const Sample s = make_sample(0);
  const AugmentedSample out = augment(s, p, 1234);
  EXPECT_EQ(out.image, s.image);
  EXPECT_EQ(out.intrinsics, s.intrinsics);
  EXPECT_EQ(out.transform, PixelTransform::identity(s.intrinsics.width(), s.intrinsics.height()));
  EXPECT_EQ(out.boxes, s.boxes);
}

TEST(Augment, IntrinsicsFollowTheDrawnTransform) {
  AugmentationPolicy p;
  p.scale_min = p.scale_max = 0.8;
  p.shift_fraction = 0.0;
  const Sample s = make_sample(1);
  const AugmentedSample out = augment(s, p, 9);
  EXPECT_DOUBLE_EQ(out.intrinsics.fx(), 0.8 * s.intrinsics.fx());
  EXPECT_DOUBLE_EQ(out.intrinsics.fy(), 0.8 * s.intrinsics.fy());
  EXPECT_LT(ray_deviation(s.intrinsics, out.transform, out.intrinsics), 1e-10);
  // Token rays at corresponding positions.
  const RayGrid a = ray_grid(s.intrinsics, {3, 4, 10});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Pixel src = TokenGridSpec{3, 4, 10}.token_pixel(i, j);
      const Pixel dst = out.transform.apply(src);
      const Eigen::Vector3d d = back_project(dst, out.intrinsics);
      EXPECT_NEAR(d.x() / d.z(), a.rx(i, j), 1e-10);
      EXPECT_NEAR(d.y() / d.z(), a.ry(i, j), 1e-10);
    }
  }
}

TEST(Augment, SameSeedSameOutput) {
  AugmentationPolicy p;
  p.anisotropic = true;
  const Sample s = make_sample(2);
  const AugmentedSample a = augment(s, p, 77);
  const AugmentedSample b = augment(s, p, 77);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.transform, b.transform);
  EXPECT_EQ(a.depth->to_tensor().values.size(), b.depth->to_tensor().values.size());
  EXPECT_EQ(encode_tensor(a.depth->to_tensor()), encode_tensor(b.depth->to_tensor()));
  EXPECT_NE(augment(s, p, 78).transform, a.transform);
}

TEST(Augment, CropModeStaysInside) {
  AugmentationPolicy p;
  p.mode = CanvasMode::kCrop;
  p.shift_fraction = 0.3;
  const Sample s = make_sample(0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const AugmentedSample out = augment(s, p, seed);
    EXPECT_LE(out.image.width(), s.image.width());
    EXPECT_LT(ray_deviation(s.intrinsics, out.transform, out.intrinsics, 8), 1e-9);
  }
}

TEST(Augment, ExtentMismatch) {
  Sample s = make_sample(0);
  s.intrinsics = Intrinsics(50, 50, 10, 10, 20, 20);
  try {
    augment(s, {}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExtentMismatch);
  }
}

TEST(Policy, ValidationAndJson) {
  AugmentationPolicy p;
  p.scale_min = 1.5;
  p.scale_max = 1.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.scale_min = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.shift_fraction = -0.1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.mode = CanvasMode::kCrop;
  p.anisotropic = true;
  const AugmentationPolicy q = augmentation_policy_from_json(to_json(p));
  EXPECT_EQ(q.mode, CanvasMode::kCrop);
  EXPECT_TRUE(q.anisotropic);
  EXPECT_EQ(q.scale_min, p.scale_min);
}

TEST(Batch, WorkerCountDoesNotChangeResults) {
  std::vector<Sample> samples;
  for (int i = 0; i < 24; ++i) samples.push_back(make_sample(i));
  AugmentationPolicy p;
  p.seed = 5;
  BatchReport r1, r8;
  const auto a = batch_augment(samples, p, 1, &r1);
  const auto b = batch_augment(samples, p, 8, &r8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_TRUE(a[i] && b[i]);
    EXPECT_EQ(a[i]->image, b[i]->image);
    EXPECT_EQ(a[i]->intrinsics, b[i]->intrinsics);
    EXPECT_EQ(a[i]->seed, sample_seed(5, i));
  }
  EXPECT_EQ(r1.to_json(), r8.to_json());
}

TEST(Batch, EmptyAndFailureIsolation) {
  BatchReport r;
  EXPECT_TRUE(batch_augment(std::vector<Sample>{}, {}, 4, &r).empty());
  EXPECT_EQ(r.failed(), 0u);

  std::vector<Sample> samples{make_sample(0), make_sample(1), make_sample(2)};
  samples[1].intrinsics = Intrinsics(50, 50, 10, 10, 20, 20);
  const auto out = batch_augment(samples, {}, 3, &r);
  EXPECT_TRUE(out[0] && out[2]);
  EXPECT_FALSE(out[1]);
  EXPECT_EQ(r.failed(), 1u);
  EXPECT_NE(r.samples[1].error.find("ExtentMismatch"), std::string::npos);
}

TEST(Seeds, DistinctAndStable) {
  EXPECT_EQ(sample_seed(0, 0), sample_seed(0, 0));
  EXPECT_NE(sample_seed(0, 0), sample_seed(0, 1));
  EXPECT_NE(sample_seed(0, 1), sample_seed(1, 0));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

class ManifestPipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fresh_dir("manifest");
    fs::create_directories(root_ / "images");
    fs::create_directories(root_ / "calib");
    std::string manifest;
    for (int i = 0; i < 3; ++i) {
      const Sample s = make_sample(i);
      const std::string id = "s" + std::to_string(i);
      write_file_bytes(root_ / "images" / (id + ".ppm"), encode_pnm(s.image));
      write_json_file(root_ / "calib" / (id + ".json"), to_json(s.intrinsics));
      write_tensor(root_ / "images" / (id + "_depth.cgem"), s.depth->to_tensor());
      manifest += nlohmann::json{{"id", id},
                                 {"image", "images/" + id + ".ppm"},
                                 {"intrinsics", "calib/" + id + ".json"},
                                 {"depth", "images/" + id + "_depth.cgem"}}
                      .dump() +
                  "\n";
    }
    manifest += R"({"id": "broken", "image": "images/missing.ppm", "intrinsics": {"fx": 10, "fy": 10, "cx": 4, "cy": 4, "width": 8, "height": 8}})";
    manifest += "\n";
    write_text_file(root_ / "manifest.jsonl", manifest);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path root_;
};

TEST_F(ManifestPipeline, MirrorsTreeAndIsolatesFailures) {
  const auto entries = parse_manifest(read_text_file(root_ / "manifest.jsonl"), root_);
  ASSERT_EQ(entries.size(), 4u);
  AugmentationPolicy p;
  p.seed = 11;
  const BatchReport r = augment_manifest(entries, root_, root_ / "out1", p, 1);
  EXPECT_EQ(r.succeeded(), 3u);
  EXPECT_EQ(r.failed(), 1u);
  EXPECT_TRUE(fs::exists(root_ / "out1" / "images" / "s0.ppm"));
  EXPECT_TRUE(fs::exists(root_ / "out1" / "calib" / "s2.json"));
  EXPECT_TRUE(fs::exists(root_ / "out1" / "images" / "s1_depth.cgem"));
  const auto report = nlohmann::json::parse(read_text_file(root_ / "out1" / "report.json"));
  EXPECT_EQ(report.at("failed"), 1);
  // Saved intrinsics are the updated ones.
  const auto lines = read_text_file(root_ / "out1" / "transforms.jsonl");
  const auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  const Intrinsics saved = parse_intrinsics(read_text_file(root_ / "out1" / "calib" / "s0.json"));
  EXPECT_EQ(saved, apply_transform(intrinsics_from_json(first.at("source_intrinsics")),
                                   pixel_transform_from_json(first.at("transform"))));

  augment_manifest(entries, root_, root_ / "out8", p, 8);
  EXPECT_EQ(read_tree(root_ / "out1"), read_tree(root_ / "out8"));
}

TEST_F(ManifestPipeline, ParseErrorsNameTheLine) {
  try {
    parse_manifest("{\"id\": \"a\", \"image\": \"x.ppm\", \"intrinsics\": \"k.json\"}\n{\"id\": 3}\n", root_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
