#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "corrgroup/correspondence.hpp"
#include "corrgroup/error.hpp"
#include "corrgroup/evaluation.hpp"
#include "corrgroup/grouping.hpp"
#include "corrgroup/numeric.hpp"
#include "corrgroup/ply.hpp"
#include "corrgroup/report.hpp"
#include "corrgroup/synthbench.hpp"

namespace py = pybind11;
using namespace corrgroup;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Points to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw ValidationError("expected an (N, 3) array");
  auto r = a.unchecked<2>();
  Points pts(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[static_cast<std::size_t>(i)] = Point3(r(i, 0), r(i, 1), r(i, 2));
  return pts;
}

Array to_array(const Points& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int k = 0; k < 3; ++k) w(static_cast<py::ssize_t>(i), k) = pts[i][k];
  }
  return a;
}

py::dict record_dict(const EvaluationRecord& r) {
  py::dict d;
  d["algorithm"] = r.algorithm;
  d["axis"] = r.axis;
  d["level"] = r.level;
  d["trial"] = r.trial;
  d["n_initial"] = r.n_initial;
  d["n_grouped"] = r.n_grouped;
  d["n_correct"] = r.n_correct;
  d["n_gt"] = r.n_gt_inliers;
  d["precision"] = r.precision ? py::object(py::float_(*r.precision)) : py::object(py::none());
  d["recall"] = r.recall ? py::object(py::float_(*r.recall)) : py::object(py::none());
  d["wall_time_ns"] = r.wall_time_ns;
  return d;
}

}  // namespace

PYBIND11_MODULE(_corrgroup, m) {
  m.doc() = "Correspondence grouping for 3D rigid registration";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init([](const Eigen::Matrix3d& r, const Eigen::Vector3d& t) { return RigidTransform{r, t}; }),
           py::arg("rotation") = Eigen::Matrix3d::Identity(), py::arg("translation") = Eigen::Vector3d::Zero())
      .def_readwrite("rotation", &RigidTransform::rotation)
      .def_readwrite("translation", &RigidTransform::translation)
      .def("inverse", &RigidTransform::inverse)
      .def("compose", &RigidTransform::compose)
      .def("apply", [](const RigidTransform& t, const Array& pts) {
        Points p = to_points(pts);
        for (auto& q : p) q = t(q);
        return to_array(p);
      });

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init([](const Array& pts) { return PointCloud(to_points(pts)); }), py::arg("points"))
      .def_property_readonly("points", [](const PointCloud& c) { return to_array(c.points()); })
      .def("resolution", &PointCloud::resolution)
      .def("centroid", &PointCloud::centroid)
      .def("__len__", &PointCloud::size);

  m.def("read_ply", py::overload_cast<const std::filesystem::path&>(&read_ply), py::arg("path"));
  m.def(
      "write_ply",
      [](const std::filesystem::path& path, const PointCloud& cloud, bool binary) {
        write_ply(path, cloud, binary ? PlyFormat::kBinaryLittleEndian : PlyFormat::kAscii);
      },
      py::arg("path"), py::arg("cloud"), py::arg("binary") = true);
  m.def(
      "compute_resolution", [](const Array& pts) { return compute_resolution(PointCloud(to_points(pts))); },
      py::arg("points"));
  m.def(
      "estimate_rigid_transform",
      [](const Array& src, const Array& dst) {
        const Points s = to_points(src), d = to_points(dst);
        return estimate_rigid_transform(s, d);
      },
      py::arg("source"), py::arg("target"));

  py::class_<LocalReferenceFrame>(m, "LocalReferenceFrame")
      .def(py::init([](const Eigen::Matrix3d& axes) { return LocalReferenceFrame{axes}; }), py::arg("axes"))
      .def_readwrite("axes", &LocalReferenceFrame::axes);

  py::class_<Correspondence>(m, "Correspondence")
      .def(py::init<>())
      .def_readwrite("source_point", &Correspondence::source_point)
      .def_readwrite("target_point", &Correspondence::target_point)
      .def_readwrite("similarity", &Correspondence::similarity)
      .def_readwrite("nn_distance", &Correspondence::nn_distance)
      .def_readwrite("second_nn_distance", &Correspondence::second_nn_distance)
      .def_readwrite("source_lrf", &Correspondence::source_lrf)
      .def_readwrite("target_lrf", &Correspondence::target_lrf);

  py::class_<CorrespondenceSet>(m, "CorrespondenceSet")
      .def(py::init<>())
      .def_readwrite("items", &CorrespondenceSet::items)
      .def_readwrite("source_resolution_pr", &CorrespondenceSet::source_resolution_pr)
      .def_readwrite("ground_truth", &CorrespondenceSet::ground_truth)
      .def("validate", &CorrespondenceSet::validate)
      .def("__len__", &CorrespondenceSet::size);

  m.def("load_correspondences", &load_correspondences, py::arg("path"));
  m.def("save_correspondences", &save_correspondences, py::arg("set"), py::arg("path"));
  m.def("load_transform", &load_transform, py::arg("path"));
  m.def("save_transform", &save_transform, py::arg("transform"), py::arg("path"));

  py::class_<AlgorithmParams>(m, "AlgorithmParams")
      .def(py::init<>())
      .def_readwrite("t_ss", &AlgorithmParams::t_ss)
      .def_readwrite("t_nnsr", &AlgorithmParams::t_nnsr)
      .def_readwrite("n_ransac", &AlgorithmParams::n_ransac)
      .def_readwrite("d_ransac_pr", &AlgorithmParams::d_ransac_pr)
      .def_readwrite("t_st", &AlgorithmParams::t_st)
      .def_readwrite("t_gc_pr", &AlgorithmParams::t_gc_pr)
      .def_readwrite("hough_bin_pr", &AlgorithmParams::hough_bin_pr)
      .def_readwrite("si_kappa", &AlgorithmParams::si_kappa)
      .def_readwrite("si_sigma", &AlgorithmParams::si_sigma)
      .def_readwrite("si_delta_pr", &AlgorithmParams::si_delta_pr)
      .def_readwrite("rng_seed", &AlgorithmParams::rng_seed)
      .def("to_json", &params_to_json)
      .def_static("from_json", &params_from_json)
      .def("__eq__", [](const AlgorithmParams& a, const AlgorithmParams& b) { return a == b; });

  py::class_<GroupingResult>(m, "GroupingResult")
      .def_readonly("inlier_indices", &GroupingResult::inlier_indices)
      .def_readonly("scores", &GroupingResult::scores)
      .def_readonly("transform", &GroupingResult::transform);

  m.attr("ALGORITHMS") = [] {
    py::list names;
    for (Algorithm a : kAllAlgorithms) names.append(std::string(algorithm_name(a)));
    return names;
  }();

  m.def(
      "group",
      [](const std::string& algorithm, const CorrespondenceSet& set, std::optional<AlgorithmParams> params,
         std::optional<PointCloud> source_cloud) {
        const AlgorithmParams p = params.value_or(AlgorithmParams{});
        py::gil_scoped_release release;
        return run_grouping(parse_algorithm(algorithm), set, p, source_cloud ? &*source_cloud : nullptr);
      },
      py::arg("algorithm"), py::arg("set"), py::arg("params") = py::none(), py::arg("source_cloud") = py::none());

  m.def(
      "score",
      [](const GroupingResult& result, const CorrespondenceSet& set, double epsilon_pr) {
        return record_dict(score(result, set, epsilon_pr));
      },
      py::arg("result"), py::arg("set"), py::arg("epsilon_pr") = kDefaultEpsilonPr);

  m.def(
      "make_test_model",
      [](const std::string& kind, std::size_t n, std::uint64_t seed) {
        return make_test_model(parse_model_kind(kind), n, seed);
      },
      py::arg("kind") = "sphere", py::arg("n_points") = 20000, py::arg("seed") = 1);

  m.def(
      "synthesize",
      [](const std::string& model, std::size_t model_points, std::size_t n, double inlier_ratio, double noise_pr,
         double downsample, std::uint64_t seed) {
        InstanceRecipe recipe;
        recipe.model_kind = parse_model_kind(model);
        recipe.model_points = model_points;
        recipe.correspondences.n_total = n;
        recipe.correspondences.inlier_ratio = inlier_ratio;
        recipe.scene.noise_sigma_pr = noise_pr;
        recipe.scene.downsample_ratio = downsample;
        recipe.scene.validate();
        recipe.correspondences.validate();
        PointCloud cloud = build_model(recipe);
        BenchmarkInstance inst = generate_instance(cloud, recipe, AlgorithmParams{}, seed);
        py::dict d;
        d["model"] = cloud;
        d["scene"] = inst.scene.cloud;
        d["ground_truth"] = inst.scene.ground_truth;
        d["set"] = inst.correspondences.set;
        d["is_inlier"] = inst.correspondences.is_inlier;
        return d;
      },
      py::arg("model") = "sphere", py::arg("model_points") = 20000, py::arg("n") = 1000, py::arg("inlier_ratio") = 0.3,
      py::arg("noise_pr") = 0.0, py::arg("downsample") = 1.0, py::arg("seed") = 1);

  m.def(
      "run_sweep",
      [](const std::string& axis, const std::vector<double>& levels, const std::vector<std::string>& algorithms,
         std::size_t trials, std::uint64_t seed, std::size_t n, std::size_t model_points, double epsilon_pr) {
        SweepPlan plan;
        plan.axis = parse_sweep_axis(axis);
        plan.levels = levels;
        plan.trials_per_level = trials;
        plan.seed = seed;
        plan.epsilon_pr = epsilon_pr;
        plan.instance.model_points = model_points;
        plan.instance.correspondences.n_total = n;
        std::vector<Algorithm> algos;
        for (const auto& a : algorithms) algos.push_back(parse_algorithm(a));
        std::vector<EvaluationRecord> records;
        {
          py::gil_scoped_release release;
          records = run_sweep(plan, algos);
        }
        py::list out;
        for (const auto& r : records) out.append(record_dict(r));
        return out;
      },
      py::arg("axis"), py::arg("levels"), py::arg("algorithms"), py::arg("trials") = 1, py::arg("seed") = 0,
      py::arg("n") = 1000, py::arg("model_points") = 20000, py::arg("epsilon_pr") = kDefaultEpsilonPr);

  m.def(
      "otsu_threshold",
      [](const std::vector<double>& values) {
        const OtsuResult r = otsu_threshold(values);
        return py::make_tuple(r.threshold, r.degenerate);
      },
      py::arg("values"));

  m.def(
      "principal_eigenvector",
      [](const Eigen::MatrixXd& mat) {
        const EigenPair p = principal_eigenvector(mat);
        return py::make_tuple(p.vector, p.value);
      },
      py::arg("matrix"));
}
