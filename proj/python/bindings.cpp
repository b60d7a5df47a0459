// Python bindings. Images cross the boundary as float64 arrays of shape
// (H, W, 3) and depth maps as (H, W) with NaN marking invalid pixels.

#include "hazemvs/cost_volume.hpp"
#include "hazemvs/errors.hpp"
#include "hazemvs/estimation.hpp"
#include "hazemvs/evaluation.hpp"
#include "hazemvs/extraction.hpp"
#include "hazemvs/io.hpp"
#include "hazemvs/scattering.hpp"
#include "hazemvs/synthesis.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace hazemvs;

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const ImageBuffer& img) {
  py::array_t<double> out({img.height(), img.width(), 3});
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size() * sizeof(double));
  return out;
}

ImageBuffer to_image(const F64Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidArgument("image array must have shape (H, W, 3)");
  ImageBuffer img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::memcpy(img.data().data(), a.data(), img.data().size() * sizeof(double));
  return img;
}

py::array_t<double> to_numpy(const DepthMap& d) {
  py::array_t<double> out({d.height(), d.width()});
  std::memcpy(out.mutable_data(), d.depths().data(), d.size() * sizeof(double));
  return out;
}

DepthMap to_depth(const F64Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("depth array must have shape (H, W)");
  DepthMap d(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  for (std::size_t i = 0; i < d.size(); ++i) d.set(i, a.data()[i]);
  return d;
}

std::vector<unsigned char> to_mask(const std::optional<py::array_t<bool>>& m) {
  if (!m) return {};
  auto flat = py::array_t<bool, py::array::c_style | py::array::forcecast>(*m);
  return {flat.data(), flat.data() + flat.size()};
}

std::vector<SourceView> to_sources(const std::vector<std::pair<F64Array, CameraModel>>& src) {
  std::vector<SourceView> out;
  for (const auto& [img, cam] : src) out.push_back({to_image(img), cam});
  return out;
}

py::array_t<double> volume_to_numpy(const CostVolume& v) {
  py::array_t<double> out({static_cast<py::ssize_t>(v.n_hypotheses()), static_cast<py::ssize_t>(v.height()),
                           static_cast<py::ssize_t>(v.width())});
  std::memcpy(out.mutable_data(), v.data().data(), v.data().size() * sizeof(double));
  return out;
}

py::dict estimate_to_dict(const DepthEstimate& e, int w, int h) {
  py::dict d;
  d["depth"] = to_numpy(e.depth);
  py::array_t<double> conf({h, w});
  std::memcpy(conf.mutable_data(), e.confidence.data(), e.confidence.size() * sizeof(double));
  d["confidence"] = conf;
  py::array_t<std::uint32_t> idx({h, w});
  std::memcpy(idx.mutable_data(), e.argmin_index.data(), e.argmin_index.size() * sizeof(std::uint32_t));
  d["argmin_index"] = idx;
  return d;
}

using Sources = std::vector<std::pair<F64Array, CameraModel>>;

}  // namespace

PYBIND11_MODULE(_hazemvs, m) {
  m.doc() = "Multi-view stereo in scattering media";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NoObservationsError>(m, "NoObservationsError", PyExc_RuntimeError);
  py::register_exception<NoPixelsError>(m, "NoPixelsError", PyExc_RuntimeError);
  py::register_exception<InvalidSpecError>(m, "InvalidSpecError", PyExc_ValueError);

  py::class_<CameraModel>(m, "CameraModel")
      .def_static("pinhole", &CameraModel::pinhole, py::arg("focal"), py::arg("cx"), py::arg("cy"),
                  py::arg("width"), py::arg("height"))
      .def("with_pose", &CameraModel::with_pose, py::arg("rotation"), py::arg("translation"))
      .def_property_readonly("intrinsics", &CameraModel::intrinsics)
      .def_property_readonly("rotation", &CameraModel::rotation)
      .def_property_readonly("translation", &CameraModel::translation)
      .def_property_readonly("center", &CameraModel::center)
      .def_property_readonly("width", &CameraModel::width)
      .def_property_readonly("height", &CameraModel::height);

  py::class_<HypothesisSet>(m, "HypothesisSet")
      .def("__len__", &HypothesisSet::size)
      .def_property_readonly("depths", &HypothesisSet::depths)
      .def_property_readonly("disparity_min", &HypothesisSet::disparity_min)
      .def_property_readonly("disparity_max", &HypothesisSet::disparity_max)
      .def_property_readonly("step", &HypothesisSet::step);
  m.def("make_hypotheses", &make_hypotheses, py::arg("n") = 256, py::arg("disparity_min") = 0.02,
        py::arg("disparity_max") = 2.0);

  py::class_<ScatteringParams>(m, "ScatteringParams")
      .def(py::init([](double a, double b) {
             ScatteringParams p{a, b};
             p.validate();
             return p;
           }),
           py::arg("airlight"), py::arg("beta"))
      .def_readonly("airlight", &ScatteringParams::airlight)
      .def_readonly("beta", &ScatteringParams::beta)
      .def("__eq__", [](const ScatteringParams& a, const ScatteringParams& b) { return a == b; })
      .def("__repr__", [](const ScatteringParams& p) {
        return "ScatteringParams(airlight=" + std::to_string(p.airlight) + ", beta=" + std::to_string(p.beta) + ")";
      });
  m.def("transmission", &transmission, py::arg("depth"), py::arg("params"));
  m.def("apply_haze", [](const F64Array& clear, const F64Array& depth, const ScatteringParams& p) {
    return to_numpy(apply_haze(to_image(clear), to_depth(depth), p));
  }, py::arg("clear"), py::arg("depth"), py::arg("params"));
  m.def("dehaze", [](const F64Array& hazy, const F64Array& depth, const ScatteringParams& p) {
    return to_numpy(dehaze_with_depth(to_image(hazy), to_depth(depth), p));
  }, py::arg("hazy"), py::arg("depth"), py::arg("params"));

  m.def("build_volume",
        [](const F64Array& ref, const CameraModel& cam, const Sources& src, const HypothesisSet& hyps,
           std::optional<ScatteringParams> params, double gamma, unsigned workers) {
          const auto sources = to_sources(src);
          const ImageBuffer r = to_image(ref);
          const VolumeOptions opt{gamma, workers};
          py::gil_scoped_release release;
          CostVolume v = params ? build_dehazing(r, cam, sources, hyps, *params, opt)
                                : build_ordinary(r, cam, sources, hyps, opt);
          py::gil_scoped_acquire acquire;
          return volume_to_numpy(v);
        },
        py::arg("reference"), py::arg("ref_camera"), py::arg("sources"), py::arg("hypotheses"),
        py::arg("params") = py::none(), py::arg("gamma") = kDefaultGamma, py::arg("workers") = 1,
        "Cost volume of shape (N, H, W); dehazing when params are given.");

  m.def("estimate_depth",
        [](const F64Array& ref, const CameraModel& cam, const Sources& src, const HypothesisSet& hyps,
           std::optional<ScatteringParams> params, double gamma, int radius, bool refine, unsigned workers) {
          const auto sources = to_sources(src);
          const ImageBuffer r = to_image(ref);
          DepthEstimate e;
          {
            py::gil_scoped_release release;
            e = estimate_depth(r, cam, sources, hyps, params, DepthOptions{gamma, radius, refine, workers});
          }
          return estimate_to_dict(e, r.width(), r.height());
        },
        py::arg("reference"), py::arg("ref_camera"), py::arg("sources"), py::arg("hypotheses"),
        py::arg("params") = py::none(), py::arg("gamma") = kDefaultGamma, py::arg("radius") = 2,
        py::arg("refine") = true, py::arg("workers") = 1);

  m.def("estimate_airlight", [](const F64Array& img) { return estimate_airlight(to_image(img)); });

  py::class_<SparseDepth>(m, "SparseDepth")
      .def(py::init([](int w, int h, const std::vector<std::tuple<int, int, double>>& obs) {
             SparseDepth s(w, h);
             for (const auto& [x, y, z] : obs) s.add({x, y, z});
             return s;
           }),
           py::arg("width"), py::arg("height"), py::arg("observations"))
      .def("__len__", &SparseDepth::size)
      .def_property_readonly("observations", [](const SparseDepth& s) {
        std::vector<std::tuple<int, int, double>> out;
        for (const auto& o : s.observations()) out.emplace_back(o.x, o.y, o.depth);
        return out;
      });

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("beta_min", &SearchConfig::beta_min)
      .def_readwrite("beta_max", &SearchConfig::beta_max)
      .def_readwrite("beta_steps", &SearchConfig::beta_steps)
      .def_readwrite("delta_airlight", &SearchConfig::delta_airlight)
      .def_readwrite("delta_beta", &SearchConfig::delta_beta)
      .def_readwrite("refine_steps_airlight", &SearchConfig::refine_steps_airlight)
      .def_readwrite("refine_steps_beta", &SearchConfig::refine_steps_beta)
      .def_readwrite("delta_px", &SearchConfig::delta_px)
      .def("evaluation_budget", &SearchConfig::evaluation_budget);

  m.def("grid_search",
        [](const F64Array& ref, const CameraModel& cam, const Sources& src, const HypothesisSet& hyps,
           const SparseDepth& sparse, const SearchConfig& cfg, double gamma, int radius, unsigned workers,
           std::optional<double> airlight_init) {
          const auto sources = to_sources(src);
          const ImageBuffer r = to_image(ref);
          EstimationResult res;
          {
            py::gil_scoped_release release;
            res = grid_search(r, cam, sources, hyps, sparse, cfg, DepthOptions{gamma, radius, true, workers},
                              airlight_init);
          }
          py::dict d;
          d["airlight"] = res.airlight;
          d["beta"] = res.beta;
          d["objective"] = res.objective_value;
          d["evaluations"] = res.evaluations;
          d["airlight_init"] = res.airlight_init;
          d["beta_init"] = res.beta_init;
          d["depth"] = to_numpy(res.depth.depth);
          py::list trace;
          for (const auto& s : res.trace) trace.append(py::make_tuple(s.stage, s.airlight, s.beta, s.objective));
          d["trace"] = trace;
          return d;
        },
        py::arg("reference"), py::arg("ref_camera"), py::arg("sources"), py::arg("hypotheses"), py::arg("sparse"),
        py::arg("config") = SearchConfig{}, py::arg("gamma") = kDefaultGamma, py::arg("radius") = 2,
        py::arg("workers") = 1, py::arg("airlight_init") = py::none());

  m.def("evaluate",
        [](const F64Array& pred, const F64Array& gt, std::optional<py::array_t<bool>> mask) {
          const auto mk = to_mask(mask);
          const MetricsReport r = evaluate(to_depth(pred), to_depth(gt), mk);
          py::dict d;
          d["l1_rel"] = r.l1_rel;
          d["l1_inv"] = r.l1_inv;
          d["sc_inv"] = r.sc_inv;
          d["correct_pct"] = r.correct_pct;
          d["n_pixels"] = r.n_pixels;
          return d;
        },
        py::arg("pred"), py::arg("gt"), py::arg("mask") = py::none());

  m.def("standard_rig", &standard_rig, py::arg("width") = 96, py::arg("height") = 72);

  py::class_<SceneSpec>(m, "SceneSpec").def_readwrite("background_depth", &SceneSpec::background_depth);
  m.def("random_scene", &random_scene, py::arg("seed"));
  m.def("plane_scene", &plane_scene, py::arg("depth"), py::arg("seed"));

  m.def("make_sample",
        [](const SceneSpec& spec, const CameraModel& ref, const CameraModel& src, std::uint64_t seed,
           std::optional<ScatteringParams> params, double sparse_fraction, bool sparse_visible_only,
           double sparse_min_transmission, double jitter) {
          SampleConfig cfg;
          cfg.params = params;
          cfg.sparse_fraction = sparse_fraction;
          cfg.sparse_visible_only = sparse_visible_only;
          cfg.sparse_min_transmission = sparse_min_transmission;
          cfg.edge_jitter_fraction = jitter;
          const DatasetSample s = make_sample(spec, ref, src, cfg, seed);
          py::dict d;
          d["reference"] = to_numpy(s.reference);
          d["source"] = to_numpy(s.source);
          d["clear_reference"] = to_numpy(s.clear_reference);
          d["clear_source"] = to_numpy(s.clear_source);
          d["gt_depth"] = to_numpy(s.gt_depth);
          d["ref_camera"] = s.ref_camera;
          d["src_camera"] = s.src_camera;
          d["params"] = s.params;
          d["sparse"] = s.sparse;
          py::array_t<bool> vis({s.gt_depth.height(), s.gt_depth.width()});
          for (std::size_t i = 0; i < s.visible.size(); ++i) vis.mutable_data()[i] = s.visible[i] != 0;
          d["visible"] = vis;
          return d;
        },
        py::arg("scene"), py::arg("ref_camera"), py::arg("src_camera"), py::arg("seed"),
        py::arg("params") = py::none(), py::arg("sparse_fraction") = 0.1, py::arg("sparse_visible_only") = false,
        py::arg("sparse_min_transmission") = 0.0, py::arg("jitter") = 0.0);

  m.def("read_image", [](const std::filesystem::path& p) { return to_numpy(io::read_image(p)); });
  m.def("read_pfm", [](const std::filesystem::path& p) { return to_numpy(io::read_pfm(p)); });
  m.def("write_pfm", [](const std::filesystem::path& p, const F64Array& d) { io::write_pfm(p, to_depth(d)); });
  m.def("read_camera", [](const std::filesystem::path& p) { return io::read_camera(p); });
  m.def("read_params", [](const std::filesystem::path& p) { return io::read_params(p); });
}
