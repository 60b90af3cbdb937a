#include "camgeom/intrinsics_transforms.hpp"

#include "camgeom/error.hpp"

#include <algorithm>
#include <cmath>

namespace camgeom {

PixelTransform::PixelTransform(double sx, double sy, double du, double dv, int out_width,
                               int out_height)
    : sx_(sx), sy_(sy), du_(du), dv_(dv), out_width_(out_width), out_height_(out_height) {
  if (!std::isfinite(sx) || !std::isfinite(sy) || !std::isfinite(du) || !std::isfinite(dv)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel transform must be finite");
  }
  if (sx <= 0.0 || sy <= 0.0) {
    throw Error(ErrorCode::kNonPositiveScale, "pixel transform scales must be positive");
  }
  if (out_width < 1 || out_height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "output extent must be at least 1x1");
  }
}

PixelTransform PixelTransform::identity(int width, int height) {
  return PixelTransform(1.0, 1.0, 0.0, 0.0, width, height);
}

PixelTransform PixelTransform::resize(double s, int width, int height) {
  if (!(s > 0.0)) throw Error(ErrorCode::kNonPositiveScale, "resize factor must be positive");
  return PixelTransform(s, s, 0.0, 0.0, scaled_extent(s, width), scaled_extent(s, height));
}

int scaled_extent(double s, int extent) {
  return std::max(1, static_cast<int>(std::lround(s * static_cast<double>(extent))));
}

Intrinsics scale(const Intrinsics& k, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kNonPositiveScale, "scale factor must be positive");
  }
  return apply_transform(k, PixelTransform::resize(s, k.width(), k.height()));
}

Intrinsics apply_transform(const Intrinsics& k, const PixelTransform& t) {
  return Intrinsics(t.sx() * k.fx(), t.sy() * k.fy(), t.sx() * k.cx() - t.du(),
                    t.sy() * k.cy() - t.dv(), t.out_width(), t.out_height());
}

PixelTransform compose(const PixelTransform& first, const PixelTransform& second) {
  // second(first(u)) = s2 (s1 u - d1) - d2
  return PixelTransform(second.sx() * first.sx(), second.sy() * first.sy(),
                        second.sx() * first.du() + second.du(),
                        second.sy() * first.dv() + second.dv(), second.out_width(),
                        second.out_height());
}

PixelTransform invert(const PixelTransform& t) {
  return invert(t, scaled_extent(1.0 / t.sx(), t.out_width()),
                scaled_extent(1.0 / t.sy(), t.out_height()));
}

PixelTransform invert(const PixelTransform& t, int source_width, int source_height) {
  // u = (u' + du) / sx
  return PixelTransform(1.0 / t.sx(), 1.0 / t.sy(), -t.du() / t.sx(), -t.dv() / t.sy(),
                        source_width, source_height);
}

double ray_deviation(const Intrinsics& source, const PixelTransform& t, const Intrinsics& target,
                     int samples_per_axis) {
  const int n = std::max(2, samples_per_axis);
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    // Pixel centers from the first to the last row/column.
    const double v = 0.5 + (source.height() - 1) * static_cast<double>(a) / (n - 1);
    for (int b = 0; b < n; ++b) {
      const double u = 0.5 + (source.width() - 1) * static_cast<double>(b) / (n - 1);
      const Pixel p{u, v};
      const double angle = angle_between(back_project(p, source), back_project(t.apply(p), target));
      worst = std::max(worst, angle);
    }
  }
  return worst;
}

double ray_preservation_check(const Intrinsics& k, const PixelTransform& t, int samples_per_axis) {
  return ray_deviation(k, t, apply_transform(k, t), samples_per_axis);
}

nlohmann::json to_json(const PixelTransform& t) {
  return nlohmann::json{{"sx", t.sx()}, {"sy", t.sy()}, {"du", t.du()}, {"dv", t.dv()},
                        {"out_width", t.out_width()}, {"out_height", t.out_height()}};
}

PixelTransform pixel_transform_from_json(const nlohmann::json& j) {
  try {
    return PixelTransform(j.at("sx").get<double>(), j.at("sy").get<double>(),
                          j.at("du").get<double>(), j.at("dv").get<double>(),
                          j.at("out_width").get<int>(), j.at("out_height").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("pixel transform: ") + e.what());
  }
}

}  // namespace camgeom
