#include "camgeom/cli.hpp"
#include "camgeom/augmentation.hpp"
#include "camgeom/tensor_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <unistd.h>

using namespace camgeom;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("camgeom_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::unsetenv("CAMGEOM_CONFIG");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    ::unsetenv("CAMGEOM_CONFIG");
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_intrinsics(const std::string& name, const Intrinsics& k) {
    write_json_file(dir_ / name, to_json(k));
    return path(name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, VersionAndUsageErrors) {
  EXPECT_EQ(run({"version"}).code, 0);
  EXPECT_EQ(run({}).code, cli::kValidationFailure);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kValidationFailure);
  EXPECT_EQ(run({"embed", "--out", path("x")}).code, cli::kValidationFailure);  // --intrinsics missing
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, MissingInputIsIoFailure) {
  const Result r = run({"embed", "--intrinsics", path("nope.json"), "--out", path("o")});
  EXPECT_EQ(r.code, cli::kIoFailure);
  EXPECT_NE(r.err.find("nope.json"), std::string::npos);
}

TEST_F(Cli, EmbedPrincipalTokenAndDeterminism) {
  const auto k = write_intrinsics("k.json", Intrinsics(1000, 1000, 7, 7, 14, 14));
  ASSERT_EQ(run({"embed", "--intrinsics", k, "--out", path("a"), "--patch", "14", "--dim", "16"}).code, 0);
  const Tensor t = read_tensor(dir_ / "a" / "e_cam.cgem");
  ASSERT_EQ(t.rows, 1u);
  ASSERT_EQ(t.dim, 16u);
  for (std::uint32_t c = 0; c < 16; ++c) EXPECT_EQ(t.values[c], c % 2 == 0 ? 0.0f : 1.0f);
  ASSERT_EQ(run({"embed", "--intrinsics", k, "--out", path("b"), "--patch", "14", "--dim", "16"}).code, 0);
  EXPECT_EQ(read_file_bytes(dir_ / "a" / "e_cam.cgem"), read_file_bytes(dir_ / "b" / "e_cam.cgem"));
  const auto sidecar = nlohmann::json::parse(read_text_file(dir_ / "a" / "e_cam.cgem.json"));
  EXPECT_EQ(sidecar.at("dim"), 16);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.resolved.json"));
}

TEST_F(Cli, EmbedScaledCameraKeepsRayChannels) {
  const Intrinsics k(612.3, 598.7, 331.1, 247.9, 644, 476);
  const auto k1 = write_intrinsics("k1.json", k);
  const auto k2 = write_intrinsics("k2.json", scale(k, 2.0));
  ASSERT_EQ(run({"embed", "--intrinsics", k1, "--out", path("a"), "--patch", "14"}).code, 0);
  ASSERT_EQ(run({"embed", "--intrinsics", k2, "--out", path("b"), "--patch", "28"}).code, 0);
  const Tensor a = read_tensor(dir_ / "a" / "e_cam.cgem");
  const Tensor b = read_tensor(dir_ / "b" / "e_cam.cgem");
  ASSERT_EQ(a.rows, b.rows);
  ASSERT_EQ(a.cols, b.cols);
  const std::uint32_t ray_channels = a.dim / 2;
  for (std::uint32_t i = 0; i < a.rows; ++i)
    for (std::uint32_t j = 0; j < a.cols; ++j)
      for (std::uint32_t c = 0; c < ray_channels; ++c) EXPECT_EQ(a.at(i, j, c), b.at(i, j, c));
}

TEST_F(Cli, EmbedWithDepthAndUnproject) {
  const Intrinsics k(100, 100, 14, 14, 28, 28);
  const auto kp = write_intrinsics("k.json", k);
  Tensor depth{28, 28, 1, std::vector<float>(28 * 28, 2.5f)};
  depth.values[0] = -1.0f;
  write_tensor(dir_ / "d.cgem", depth);
  ASSERT_EQ(run({"embed", "--intrinsics", kp, "--depth", path("d.cgem"), "--out", path("e")}).code, 0);
  EXPECT_EQ(read_tensor(dir_ / "e" / "e_geo.cgem").dim, 96u);
  const Result r = run({"unproject", "--depth", path("d.cgem"), "--intrinsics", kp, "--out", path("u"), "--tokens"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Tensor pts = read_tensor(dir_ / "u" / "points.cgem");
  EXPECT_TRUE(std::isnan(pts.at(0, 0, 0)));
  EXPECT_EQ(pts.at(5, 5, 2), 2.5f);
  EXPECT_TRUE(fs::exists(dir_ / "u" / "token_points.cgem"));
}

TEST_F(Cli, ConfigPrecedence) {
  const auto k = write_intrinsics("k.json", Intrinsics(500, 500, 112, 112, 224, 224));
  write_text_file(dir_ / "cfg.json", R"({"embedding": {"dim": 32, "patch": 16}, "seed": 9})");
  ::setenv("CAMGEOM_CONFIG", path("cfg.json").c_str(), 1);
  ASSERT_EQ(run({"embed", "--intrinsics", k, "--out", path("a")}).code, 0);
  EXPECT_EQ(read_tensor(dir_ / "a" / "e_cam.cgem").dim, 32u);
  EXPECT_EQ(read_tensor(dir_ / "a" / "e_cam.cgem").rows, 14u);
  // Flags override the file.
  ASSERT_EQ(run({"embed", "--intrinsics", k, "--out", path("b"), "--dim", "64", "--seed", "3"}).code, 0);
  const auto resolved = nlohmann::json::parse(read_text_file(dir_ / "b" / "config.resolved.json"));
  EXPECT_EQ(resolved.at("embedding").at("dim"), 64);
  EXPECT_EQ(resolved.at("embedding").at("patch"), 16);
  EXPECT_EQ(resolved.at("seed"), 3);
  // Explicit --config wins over the environment; global flags may follow the subcommand.
  write_text_file(dir_ / "cfg2.json", R"({"embedding": {"dim": 8}})");
  ASSERT_EQ(run({"embed", "--intrinsics", k, "--out", path("c"), "--config", path("cfg2.json")}).code, 0);
  EXPECT_EQ(read_tensor(dir_ / "c" / "e_cam.cgem").dim, 8u);
}

TEST_F(Cli, ValidationHappensBeforeWork) {
  const auto k = write_intrinsics("k.json", Intrinsics(500, 500, 112, 112, 224, 224));
  EXPECT_EQ(run({"embed", "--intrinsics", k, "--out", path("a"), "--dim", "12"}).code, cli::kValidationFailure);
  EXPECT_FALSE(fs::exists(dir_ / "a"));
  write_text_file(dir_ / "bad.json", "{ not json");
  EXPECT_EQ(run({"embed", "--intrinsics", k, "--out", path("b"), "--config", path("bad.json")}).code,
            cli::kValidationFailure);
  write_text_file(dir_ / "iou.json", R"({"eval": {"iou": 2}})");
  EXPECT_EQ(run({"ambiguity", "--out", path("c"), "--config", path("iou.json")}).code, cli::kValidationFailure);
  EXPECT_FALSE(fs::exists(dir_ / "c"));
  write_text_file(dir_ / "badk.json", R"({"fx": -1, "fy": 1, "cx": 0, "cy": 0, "width": 4, "height": 4})");
  EXPECT_EQ(run({"embed", "--intrinsics", path("badk.json"), "--out", path("d")}).code, cli::kValidationFailure);
}

TEST_F(Cli, EvalSelfAndFixture) {
  const std::string dets = R"([{"label": "chair", "bbox_3d": [0,0,3,1,1,1,0,0,0]},
                               {"label": "table", "bbox_3d": [2,0,3,1,0.8,1.2,0.3,0,0]}])";
  write_text_file(dir_ / "t.json", dets);
  const Result r = run({"eval", "--preds", path("t.json"), "--truths", path("t.json"), "--out", path("r")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(read_text_file(dir_ / "r" / "report.json"));
  EXPECT_EQ(report.at("micro").at("f1"), 100.0);
  EXPECT_TRUE(fs::exists(dir_ / "r" / "per_class.csv"));

  const Result f = run({"eval", "--preds", CAMGEOM_TEST_DATA "/agent_output.txt", "--truths", path("t.json")});
  EXPECT_EQ(f.code, 0) << f.err;

  write_text_file(dir_ / "junk.txt", "nothing here");
  EXPECT_EQ(run({"eval", "--preds", path("junk.txt"), "--truths", path("t.json")}).code, cli::kValidationFailure);
}

TEST_F(Cli, EvalDirectoriesAndClassFilter) {
  fs::create_directories(dir_ / "p");
  fs::create_directories(dir_ / "g");
  write_text_file(dir_ / "g" / "a.json", R"([{"label": "chair", "bbox_3d": [0,0,3,1,1,1,0,0,0]}])");
  write_text_file(dir_ / "p" / "a.json", R"([{"label": "chair", "bbox_3d": [0,0,3,1,1,1,0,0,0]}])");
  write_text_file(dir_ / "g" / "b.json", R"([{"label": "lamp", "bbox_3d": [0,0,3,1,1,1,0,0,0]}])");
  write_text_file(dir_ / "classes.txt", "Chair\n");
  const Result r = run({"eval", "--preds", path("p"), "--truths", path("g"), "--out", path("r"), "--workers", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto report = nlohmann::json::parse(read_text_file(dir_ / "r" / "report.json"));
  EXPECT_EQ(report.at("micro").at("recall"), 50.0);
  ASSERT_EQ(run({"eval", "--preds", path("p"), "--truths", path("g"), "--out", path("r2"), "--classes",
                 path("classes.txt")})
                .code,
            0);
  report = nlohmann::json::parse(read_text_file(dir_ / "r2" / "report.json"));
  EXPECT_EQ(report.at("micro").at("f1"), 100.0);
}

TEST_F(Cli, AmbiguityDefaults) {
  const Result r = run({"ambiguity", "--out", path("amb"), "--n-scenes", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_text_file(dir_ / "amb" / "bias.csv");
  EXPECT_NE(csv.find("agnostic,0.8,200,1.25,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\nagnostic,1.2,"), std::string::npos);
  EXPECT_NE(csv.find("\naware,0.8,200,1,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\naware,1.2,200,1,"), std::string::npos) << csv;
  EXPECT_FALSE(fs::exists(dir_ / "amb" / "mixed_pool.csv"));
  EXPECT_NE(read_text_file(dir_ / "amb" / "summary.txt").find("not comparable"), std::string::npos);
}

TEST_F(Cli, AmbiguityMixedPoolFromConfig) {
  write_text_file(dir_ / "cfg.json", R"({"ambiguity": {"camera_pool": [
      {"fx": 580, "fy": 580, "cx": 320, "cy": 240, "width": 640, "height": 480},
      {"fx": 1160, "fy": 1160, "cx": 640, "cy": 480, "width": 1280, "height": 960}],
      "n_scenes": 20, "resize_factors": [1.0]}})");
  const Result r = run({"ambiguity", "--config", path("cfg.json"), "--out", path("amb")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_text_file(dir_ / "amb" / "mixed_pool.csv");
  EXPECT_NE(csv.find("0,580,870,100,1.5"), std::string::npos) << csv;
  EXPECT_NE(csv.find("1,1160,870,100,0.75"), std::string::npos) << csv;
}

TEST_F(Cli, AugmentRepeatableWithSeed) {
  fs::create_directories(dir_ / "in");
  RasterImage img = RasterImage::zeros(32, 24, 1, SampleFormat::kU8);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 32; ++j) img.set(i, j, 0, static_cast<float>(i * 7 + j * 3));
  write_file_bytes(dir_ / "in" / "a.pgm", encode_pnm(img));
  write_file_bytes(dir_ / "in" / "b.pgm", encode_pnm(img));
  const std::string k = R"("intrinsics": {"fx": 30, "fy": 30, "cx": 16, "cy": 12, "width": 32, "height": 24})";
  write_text_file(dir_ / "in" / "m.jsonl", "{\"id\": \"a\", \"image\": \"a.pgm\", " + k + "}\n" +
                                               "{\"id\": \"b\", \"image\": \"b.pgm\", " + k + "}\n" +
                                               "{\"id\": \"c\", \"image\": \"missing.pgm\", " + k + "}\n");
  const Result r1 = run({"augment", "--manifest", path("in/m.jsonl"), "--out", path("o1"), "--seed", "4"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_NE(r1.out.find("2/3"), std::string::npos) << r1.out;
  ASSERT_EQ(run({"augment", "--manifest", path("in/m.jsonl"), "--out", path("o2"), "--seed", "4", "--workers", "3"}).code, 0);
  for (const char* f : {"a.pgm", "b.pgm", "manifest.jsonl", "transforms.jsonl", "report.json"}) {
    EXPECT_EQ(read_file_bytes(dir_ / "o1" / f), read_file_bytes(dir_ / "o2" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(dir_ / "o1" / "timing.json"));
  EXPECT_EQ(run({"augment", "--manifest", path("in/m.jsonl"), "--out", path("o3"), "--pad-or-crop", "zoom"}).code,
            cli::kValidationFailure);
}
