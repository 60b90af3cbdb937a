#include "camgeom/ambiguity.hpp"
#include "camgeom/cli.hpp"
#include "camgeom/detection_eval.hpp"
#include "camgeom/error.hpp"
#include "camgeom/geometric_prior.hpp"
#include "camgeom/intrinsics_transforms.hpp"
#include "camgeom/ray_embedding.hpp"
#include "camgeom/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace py = pybind11;
using namespace camgeom;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::array_t<double> grid_array(const EmbeddingGrid& g) {
  py::array_t<double> out({g.rows(), g.cols(), g.dim()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

py::array_t<double> point_array(const PointGrid& g) {
  py::array_t<double> out({g.rows, g.cols, 3});
  double* p = out.mutable_data();
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const bool ok = g.is_valid(r, c);
      for (int a = 0; a < 3; ++a) *p++ = ok ? g.at(r, c)[a] : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

DepthMap depth_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kBadDimension, "depth must be a 2-D array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  std::vector<double> values(a.data(), a.data() + a.size());
  std::vector<std::uint8_t> valid(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    valid[i] = std::isfinite(values[i]) && values[i] > 0.0;
    if (!valid[i]) values[i] = 0.0;
  }
  return DepthMap(w, h, std::move(values), std::move(valid));
}

TokenGridSpec grid_for(const Intrinsics& k, int patch, std::optional<int> rows, std::optional<int> cols) {
  TokenGridSpec g = TokenGridSpec::covering(k, patch);
  if (rows) g.rows = *rows;
  if (cols) g.cols = *cols;
  return g;
}

std::vector<Detection> detections_from(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return parse_detections(obj.cast<std::string>()).detections;
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return parse_detections(text).detections;
}

}  // namespace

PYBIND11_MODULE(_camgeom, m) {
  m.doc() = "Camera-aware geometry: intrinsics, ray embeddings, 3D IoU and detection scoring.";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "CamgeomError", PyExc_ValueError);

  py::class_<Intrinsics>(m, "Intrinsics")
      .def(py::init<double, double, double, double, int, int>(), py::arg("fx"), py::arg("fy"),
           py::arg("cx"), py::arg("cy"), py::arg("width"), py::arg("height"))
      .def_property_readonly("fx", &Intrinsics::fx)
      .def_property_readonly("fy", &Intrinsics::fy)
      .def_property_readonly("cx", &Intrinsics::cx)
      .def_property_readonly("cy", &Intrinsics::cy)
      .def_property_readonly("width", &Intrinsics::width)
      .def_property_readonly("height", &Intrinsics::height)
      .def("matrix", &Intrinsics::matrix)
      .def("to_dict", [](const Intrinsics& k) { return to_python(to_json(k)); })
      .def(py::self == py::self)
      .def("__repr__", [](const Intrinsics& k) { return "Intrinsics(" + to_json(k).dump() + ")"; });

  py::class_<PixelTransform>(m, "PixelTransform")
      .def(py::init<double, double, double, double, int, int>(), py::arg("sx"), py::arg("sy"),
           py::arg("du"), py::arg("dv"), py::arg("out_width"), py::arg("out_height"))
      .def_static("identity", &PixelTransform::identity)
      .def_static("resize", &PixelTransform::resize, py::arg("s"), py::arg("width"), py::arg("height"))
      .def_property_readonly("sx", &PixelTransform::sx)
      .def_property_readonly("sy", &PixelTransform::sy)
      .def_property_readonly("du", &PixelTransform::du)
      .def_property_readonly("dv", &PixelTransform::dv)
      .def_property_readonly("out_width", &PixelTransform::out_width)
      .def_property_readonly("out_height", &PixelTransform::out_height)
      .def("apply", [](const PixelTransform& t, double u, double v) {
        const Pixel p = t.apply({u, v});
        return std::make_pair(p.u, p.v);
      })
      .def(py::self == py::self)
      .def("__repr__", [](const PixelTransform& t) { return "PixelTransform(" + to_json(t).dump() + ")"; });

  m.def("project", [](const Eigen::Vector3d& x, const Intrinsics& k) {
    const Pixel p = project(x, k);
    return std::make_pair(p.u, p.v);
  });
  m.def("back_project", [](double u, double v, const Intrinsics& k) { return back_project({u, v}, k); });
  m.def("projected_height", &projected_height, py::arg("height_m"), py::arg("depth_m"), py::arg("k"));
  m.def("scale", &scale, py::arg("k"), py::arg("s"));
  m.def("apply_transform", &apply_transform, py::arg("k"), py::arg("t"));
  m.def("compose", &compose, py::arg("first"), py::arg("second"));
  m.def("invert", py::overload_cast<const PixelTransform&>(&invert), py::arg("t"));
  m.def("ray_deviation", &ray_deviation, py::arg("source"), py::arg("t"), py::arg("target"),
        py::arg("samples_per_axis") = 64);

  m.def(
      "camera_embedding",
      [](const Intrinsics& k, int patch, int dim, double period, double focal_reference,
         std::optional<int> rows, std::optional<int> cols) {
        const TokenGridSpec g = grid_for(k, patch, rows, cols);
        return grid_array(embed(ray_grid(k, g), k, CameraEmbeddingConfig{dim, period, focal_reference}));
      },
      py::arg("k"), py::arg("patch") = 14, py::arg("dim") = 256, py::arg("period") = 10000.0,
      py::arg("focal_reference") = 1000.0, py::arg("rows") = py::none(), py::arg("cols") = py::none());

  m.def(
      "unproject",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> depth, const Intrinsics& k) {
        return point_array(unproject(depth_from_array(depth), k));
      },
      py::arg("depth"), py::arg("k"));

  m.def(
      "point_embedding",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> depth, const Intrinsics& k,
         int patch, int dim, double period) {
        const PointGrid pooled = pool_to_tokens(depth_from_array(depth), k, grid_for(k, patch, {}, {}));
        return grid_array(embed_points(pooled, PointEmbeddingConfig{dim, period}));
      },
      py::arg("depth"), py::arg("k"), py::arg("patch") = 14, py::arg("dim") = 96, py::arg("period") = 100.0);

  m.def(
      "iou3d",
      [](const std::array<double, 9>& a, const std::array<double, 9>& b, const std::string& mode) {
        IouMode m = IouMode::kOriented;
        if (mode == "yaw_only") m = IouMode::kYawOnly;
        else if (mode == "axis_aligned") m = IouMode::kAxisAligned;
        else if (mode != "oriented") throw Error(ErrorCode::kInvalidArgument, "unknown IoU mode " + mode);
        return iou3d(OrientedBox3::from_array(a), OrientedBox3::from_array(b), m);
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "oriented");

  m.def(
      "parse_detections",
      [](const std::string& text) {
        const ParseResult r = parse_detections(text);
        py::list dets;
        for (const auto& d : r.detections) dets.append(to_python(to_json(d)));
        return py::make_tuple(dets, r.warnings);
      },
      py::arg("text"));

  m.def(
      "evaluate",
      [](const py::object& predictions, const py::object& truths, double iou) {
        MatchOptions o;
        o.threshold = iou;
        return to_python(match_and_score(detections_from(predictions), detections_from(truths), o).to_json());
      },
      py::arg("predictions"), py::arg("truths"), py::arg("iou") = 0.25);

  m.def("f1_score", &f1_score, py::arg("precision"), py::arg("recall"));
  m.def("biased_depth_estimate", &biased_depth_estimate);
  m.def("aware_depth_estimate", &aware_depth_estimate);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
