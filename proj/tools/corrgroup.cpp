// corrgroup command-line front end.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrgroup/correspondence.hpp"
#include "corrgroup/error.hpp"
#include "corrgroup/evaluation.hpp"
#include "corrgroup/grouping.hpp"
#include "corrgroup/ply.hpp"
#include "corrgroup/report.hpp"
#include "corrgroup/synthbench.hpp"

namespace fs = std::filesystem;
using namespace corrgroup;

namespace {

// Flat JSON object whose keys are long option names without the dashes. Keys
// apply to the subcommand being run.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config: expected a JSON object");
    std::vector<std::string> parents;
    const auto active = root_->get_subcommands();
    if (!active.empty()) parents.push_back(active.front()->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      item.parents = parents;
      auto push = [&](const nlohmann::json& v) {
        if (v.is_string()) {
          item.inputs.push_back(v.get<std::string>());
        } else if (v.is_number() || v.is_boolean()) {
          item.inputs.push_back(v.dump());
        } else {
          throw CLI::ConversionError("config: unsupported value for '" + key + "'");
        }
      };
      if (value.is_array()) {
        for (const auto& v : value) push(v);
      } else {
        push(value);
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  const CLI::App* root_;
};

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::size_t default_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CORRGROUP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) throw ValidationError("CORRGROUP_THREADS must be a positive integer");
    n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

// start:end:step, inclusive of end when step divides the range; or a comma list.
std::vector<double> parse_levels(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("bad level value '" + s + "' in '" + text + "'");
    }
  };
  std::vector<double> levels;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("levels must look like start:end:step");
    const double start = number(parts[0]), end = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0)) throw ValidationError("level step must be positive");
    if (end < start) throw ValidationError("level end must not precede start");
    const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      // Round away accumulated binary error (0.1 * 3 -> 0.3).
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", start + static_cast<double>(i) * step);
      levels.push_back(std::strtod(buf, nullptr));
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) levels.push_back(number(p));
  }
  return levels;
}

std::vector<Algorithm> selected_algorithms(bool all, const std::vector<std::string>& names) {
  if (all) return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  if (names.empty()) throw ValidationError("choose --algo <name> or --all");
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(parse_algorithm(n));
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ComputationError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw ComputationError("error writing '" + path.string() + "'");
}

struct InstanceOptions {
  InstanceRecipe recipe;
  std::string model = "sphere";
  bool snap = false;

  void add(CLI::App* app) {
    app->add_option("--model", model, "Test model: sphere, torus, plane-with-bumps")->capture_default_str();
    app->add_option("--model-points", recipe.model_points, "Points in the test model")->capture_default_str();
    app->add_option("--model-seed", recipe.model_seed, "Seed of the test model")->capture_default_str();
    auto& c = recipe.correspondences;
    app->add_option("--n", c.n_total, "Number of correspondences")->capture_default_str();
    app->add_option("--inlier-ratio", c.inlier_ratio, "Fraction of inlier correspondences")->capture_default_str();
    app->add_option("--jitter-pr", c.inlier_jitter_pr, "Inlier target jitter radius (pr)")->capture_default_str();
    app->add_option("--outlier-min-pr", c.outlier_min_offset_pr, "Minimum outlier offset (pr)")->capture_default_str();
    app->add_option("--outlier-max-pr", c.outlier_max_offset_pr, "Maximum outlier offset (pr)")->capture_default_str();
    app->add_option("--lrf-noise-deg", c.lrf_noise_deg, "Inlier LRF perturbation (degrees)")->capture_default_str();
    app->add_option("--lrf-support-pr", c.lrf_support_pr, "LRF support radius (pr)")->capture_default_str();
    app->add_option("--noise-pr", recipe.scene.noise_sigma_pr, "Scene Gaussian noise sigma (pr)")->capture_default_str();
    app->add_option("--downsample", recipe.scene.downsample_ratio, "Retained scene fraction")->capture_default_str();
    app->add_flag("--snap", snap, "Snap correspondence targets to the nearest scene point");
  }

  InstanceRecipe resolve() {
    recipe.model_kind = parse_model_kind(model);
    if (snap) recipe.correspondences.target_mode = TargetMode::kSceneSnapped;
    return recipe;
  }
};

struct ParamOptions {
  AlgorithmParams params;
  double t_ss = 0.0;
  CLI::Option* t_ss_opt = nullptr;

  void add(CLI::App* app) {
    t_ss_opt = app->add_option("--t-ss", t_ss, "Similarity threshold (default: Otsu-adaptive)");
    app->add_option("--t-nnsr", params.t_nnsr, "Lowe ratio threshold")->capture_default_str();
    app->add_option("--n-ransac", params.n_ransac, "RANSAC iterations")->capture_default_str();
    app->add_option("--d-ransac-pr", params.d_ransac_pr, "RANSAC inlier distance (pr)")->capture_default_str();
    app->add_option("--t-st", params.t_st, "Spectral rigidity threshold")->capture_default_str();
    app->add_option("--t-gc-pr", params.t_gc_pr, "GC consistency threshold (pr)")->capture_default_str();
    app->add_option("--hough-bin-pr", params.hough_bin_pr, "3DHV bin size (pr)")->capture_default_str();
    app->add_option("--si-kappa", params.si_kappa, "SI voter count")->capture_default_str();
    app->add_option("--si-sigma", params.si_sigma, "SI rigidity threshold")->capture_default_str();
    app->add_option("--si-delta-pr", params.si_delta_pr, "SI transform residual (pr)")->capture_default_str();
  }

  AlgorithmParams resolve(std::uint64_t seed) {
    if (t_ss_opt->count() > 0) params.t_ss = t_ss;
    params.rng_seed = seed;
    params.validate();
    return params;
  }
};

void print_warnings(const std::vector<std::string>& warnings, bool quiet) {
  if (quiet) return;
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void print_table(const std::vector<EvaluationRecord>& records, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %9s %9s %9s %6s %10s %10s\n", "algo", "n_initial", "n_grouped", "n_correct",
                "n_gt", "precision", "recall");
  out << line;
  for (const auto& r : records) {
    auto cell = [](const std::optional<double>& v) {
      char buf[32];
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.4f", *v);
      } else {
        std::snprintf(buf, sizeof(buf), "-");
      }
      return std::string(buf);
    };
    std::snprintf(line, sizeof(line), "%-8s %9zu %9zu %9zu %6zu %10s %10s\n", r.algorithm.c_str(), r.n_initial,
                  r.n_grouped, r.n_correct, r.n_gt_inliers, cell(r.precision).c_str(), cell(r.recall).c_str());
    out << line;
  }
}

void write_indices(const GroupingResult& result, std::ostream& out) {
  for (std::size_t i : result.inlier_indices) out << i << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correspondence grouping toolkit for 3D registration", "corrgroup"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "corrgroup 0.1.0");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of option values for the subcommand; command-line flags take precedence");
  // Lets --config and --quiet follow the subcommand name.
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic model, scene and correspondence set");
  InstanceOptions synth_inst;
  synth_inst.add(synth);
  std::uint64_t synth_seed = 1;
  std::string synth_dir = ".";
  bool synth_binary = false;
  synth->add_option("--seed", synth_seed, "Instance seed")->capture_default_str();
  synth->add_option("-o,--out-dir", synth_dir, "Output directory")->capture_default_str();
  synth->add_flag("--binary", synth_binary, "Write binary little-endian PLY");

  // group
  auto* group = app.add_subcommand("group", "Run grouping algorithm(s) on a correspondence file");
  std::string group_in, group_gt, group_out, group_transform_out, group_source;
  std::vector<std::string> group_algos;
  bool group_all = false;
  double group_eps = kDefaultEpsilonPr;
  std::uint64_t group_seed = 0;
  ParamOptions group_params;
  group->add_option("-i,--in", group_in, "Correspondence file")->required()->check(CLI::ExistingFile);
  auto* g_algo = group->add_option("-a,--algo", group_algos, "Algorithm(s): ss nnsr ransac st gc 3dhv si")->delimiter(',');
  group->add_flag("--all", group_all, "Run all seven algorithms")->excludes(g_algo);
  group->add_option("--gt", group_gt, "Ground-truth transform file (enables scoring)")->check(CLI::ExistingFile);
  group->add_option("--epsilon-pr", group_eps, "Judging threshold (pr)")->capture_default_str();
  group->add_option("--source-cloud", group_source, "Source PLY for the 3DHV centroid")->check(CLI::ExistingFile);
  group->add_option("-o,--out", group_out, "Index output: file for one algorithm, directory for several");
  group->add_option("--transform-out", group_transform_out, "Write the estimated transform (one algorithm)");
  group->add_option("--seed", group_seed, "Algorithm seed")->capture_default_str();
  group_params.add(group);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Precision/recall sweep over one nuisance axis");
  InstanceOptions sweep_inst;
  sweep_inst.add(sweep);
  ParamOptions sweep_params;
  sweep_params.add(sweep);
  std::string sweep_axis, sweep_levels, sweep_csv, sweep_json, sweep_svg, sweep_in, sweep_gt, sweep_source;
  std::vector<std::string> sweep_algos;
  bool sweep_all = false, sweep_time = false;
  std::size_t sweep_trials = 1;
  std::size_t sweep_threads = 0;
  double sweep_eps = kDefaultEpsilonPr;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--axis", sweep_axis, "noise | downsample | inlier-ratio | epsilon | n")->required();
  sweep->add_option("--levels", sweep_levels, "start:end:step or comma list")->required();
  sweep->add_option("--trials", sweep_trials, "Trials per level")->capture_default_str();
  auto* s_algo = sweep->add_option("-a,--algo", sweep_algos, "Algorithm(s)")->delimiter(',');
  sweep->add_flag("--all", sweep_all, "Run all seven algorithms")->excludes(s_algo);
  sweep->add_option("--epsilon-pr", sweep_eps, "Judging threshold (pr) for non-epsilon axes")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "Base seed")->capture_default_str();
  sweep->add_option("--threads", sweep_threads, "Worker threads (default: all cores, capped by CORRGROUP_THREADS)");
  sweep->add_option("--csv", sweep_csv, "CSV output path (default: stdout)");
  sweep->add_option("--json", sweep_json, "JSON output path");
  sweep->add_option("--svg", sweep_svg, "SVG chart output path");
  sweep->add_flag("--record-time", sweep_time, "Fill wall_time_ns (makes output run-dependent)");
  sweep->add_option("--in", sweep_in, "Fixed correspondence file (epsilon axis only)")->check(CLI::ExistingFile);
  sweep->add_option("--gt", sweep_gt, "Ground truth for --in")->check(CLI::ExistingFile);
  sweep->add_option("--source-cloud", sweep_source, "Source PLY for --in (3DHV)")->check(CLI::ExistingFile);

  // bench
  auto* bench = app.add_subcommand("bench", "Serial wall-clock timing per algorithm and set size");
  InstanceOptions bench_inst;
  bench_inst.add(bench);
  ParamOptions bench_params;
  bench_params.add(bench);
  std::vector<std::size_t> bench_sizes;
  std::size_t bench_repeats = 10;
  std::vector<std::string> bench_algos;
  bool bench_all = false;
  std::uint64_t bench_seed = 0;
  std::string bench_csv;
  bench->add_option("--sizes", bench_sizes, "Comma-separated set sizes")->required()->delimiter(',');
  bench->add_option("--repeats", bench_repeats, "Timed runs per size")->capture_default_str();
  auto* b_algo = bench->add_option("-a,--algo", bench_algos, "Algorithm(s)")->delimiter(',');
  bench->add_flag("--all", bench_all, "Time all seven algorithms")->excludes(b_algo);
  bench->add_option("--seed", bench_seed, "Base seed")->capture_default_str();
  bench->add_option("--csv", bench_csv, "CSV output path (default: stdout)");

  // resolution
  auto* resolution = app.add_subcommand("resolution", "Point-cloud resolution of a PLY file");
  std::string res_in;
  std::size_t res_cap = 0;
  std::uint64_t res_seed = 0;
  resolution->add_option("-i,--in", res_in, "PLY file")->required()->check(CLI::ExistingFile);
  resolution->add_option("--subsample", res_cap, "Estimate from at most this many query points (0 = exact)");
  resolution->add_option("--seed", res_seed, "Subsampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      const InstanceRecipe recipe = synth_inst.resolve();
      recipe.scene.validate();
      print_warnings(recipe.correspondences.validate(), quiet);
      const PointCloud model = build_model(recipe);
      const BenchmarkInstance inst = generate_instance(model, recipe, AlgorithmParams{}, synth_seed);

      const fs::path dir(synth_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw ComputationError("cannot create '" + dir.string() + "': " + ec.message());
      const PlyFormat format = synth_binary ? PlyFormat::kBinaryLittleEndian : PlyFormat::kAscii;
      write_ply(dir / "model.ply", model, format);
      write_ply(dir / "scene.ply", inst.scene.cloud, format);
      save_correspondences(inst.correspondences.set, dir / "corr.txt");
      save_transform(inst.scene.ground_truth, dir / "gt.txt");

      const auto inliers = std::count(inst.correspondences.is_inlier.begin(), inst.correspondences.is_inlier.end(), true);
      std::cout << "n=" << inst.correspondences.set.size() << " pr=" << real(model.resolution())
                << " true_inliers=" << inliers << " scene_points=" << inst.scene.cloud.size() << '\n';
      std::cout << "wrote " << (dir / "model.ply").string() << ' ' << (dir / "scene.ply").string() << ' '
                << (dir / "corr.txt").string() << ' ' << (dir / "gt.txt").string() << '\n';
      return 0;
    }

    if (group->parsed()) {
      const auto algos = selected_algorithms(group_all, group_algos);
      const AlgorithmParams params = group_params.resolve(group_seed);
      CorrespondenceSet set = load_correspondences(group_in);
      if (!group_gt.empty()) set.ground_truth = load_transform(group_gt);
      std::optional<PointCloud> source;
      if (!group_source.empty()) source = read_ply(group_source);
      if (!group_transform_out.empty() && algos.size() != 1) {
        throw ValidationError("--transform-out needs exactly one algorithm");
      }

      std::vector<EvaluationRecord> records;
      for (Algorithm a : algos) {
        GroupingResult result;
        try {
          result = run_grouping(a, set, params, source ? &*source : nullptr);
        } catch (const ValidationError& e) {
          throw ValidationError(std::string(algorithm_name(a)) + ": " + e.what());
        }
        if (algos.size() == 1 && !group_out.empty()) {
          auto out = open_output(group_out);
          write_indices(result, out);
          finish(out, group_out);
        } else if (!group_out.empty()) {
          std::error_code ec;
          fs::create_directories(group_out, ec);
          if (ec) throw ComputationError("cannot create '" + group_out + "': " + ec.message());
          const fs::path path = fs::path(group_out) / (std::string(algorithm_name(a)) + ".txt");
          auto out = open_output(path);
          write_indices(result, out);
          finish(out, path);
        } else if (algos.size() == 1 && !set.ground_truth) {
          write_indices(result, std::cout);
        }
        if (!group_transform_out.empty()) {
          if (!result.transform) throw ValidationError(std::string(algorithm_name(a)) + " does not estimate a transform");
          save_transform(*result.transform, group_transform_out);
        }
        if (set.ground_truth) {
          EvaluationRecord rec = score(result, set, group_eps);
          rec.algorithm = std::string(algorithm_name(a));
          records.push_back(std::move(rec));
        } else if (algos.size() > 1) {
          std::cout << algorithm_name(a) << ": " << result.inlier_indices.size() << " grouped\n";
        }
      }
      if (!records.empty()) print_table(records, std::cout);
      return 0;
    }

    if (sweep->parsed()) {
      const auto algos = selected_algorithms(sweep_all, sweep_algos);
      const SweepAxis axis = parse_sweep_axis(sweep_axis);
      const std::vector<double> levels = parse_levels(sweep_levels);
      std::vector<EvaluationRecord> records;

      if (!sweep_in.empty()) {
        if (axis != SweepAxis::kEpsilon) throw ValidationError("--in is only valid with --axis epsilon");
        CorrespondenceSet set = load_correspondences(sweep_in);
        if (sweep_gt.empty()) throw ValidationError("--in needs --gt");
        set.ground_truth = load_transform(sweep_gt);
        std::optional<PointCloud> source;
        if (!sweep_source.empty()) source = read_ply(sweep_source);
        records = sweep_epsilon_on_set(set, levels, algos, sweep_params.resolve(sweep_seed), source ? &*source : nullptr);
      } else {
        // The swept quantity must not also be pinned by its own flag.
        const char* pinned = nullptr;
        switch (axis) {
          case SweepAxis::kNoiseSigma: pinned = "--noise-pr"; break;
          case SweepAxis::kDownsampleRatio: pinned = "--downsample"; break;
          case SweepAxis::kInlierRatio: pinned = "--inlier-ratio"; break;
          case SweepAxis::kEpsilon: pinned = "--epsilon-pr"; break;
          case SweepAxis::kNCorrespondences: pinned = "--n"; break;
        }
        if (sweep->count(pinned) > 0) {
          throw ValidationError(std::string("--axis ") + sweep_axis + " conflicts with " + pinned);
        }
        SweepPlan plan;
        plan.axis = axis;
        plan.levels = levels;
        plan.trials_per_level = sweep_trials;
        plan.instance = sweep_inst.resolve();
        plan.params = sweep_params.resolve(0);
        plan.epsilon_pr = sweep_eps;
        plan.seed = sweep_seed;
        plan.threads = sweep_threads > 0 ? std::min(sweep_threads, default_threads()) : default_threads();
        plan.record_timing = sweep_time;
        plan.validate();
        print_warnings(plan.instance.correspondences.validate(sweep_eps), quiet);
        records = run_sweep(plan, algos);
      }

      if (sweep_csv.empty()) {
        write_records_csv(records, std::cout);
      } else {
        auto out = open_output(sweep_csv);
        write_records_csv(records, out);
        finish(out, sweep_csv);
      }
      if (!sweep_json.empty()) {
        auto out = open_output(sweep_json);
        write_records_json(records, out);
        finish(out, sweep_json);
      }
      if (!sweep_svg.empty()) {
        auto out = open_output(sweep_svg);
        write_sweep_svg(records, out);
        finish(out, sweep_svg);
      }
      return 0;
    }

    if (bench->parsed()) {
      BenchPlan plan;
      plan.sizes = bench_sizes;
      plan.repeats = bench_repeats;
      plan.instance = bench_inst.resolve();
      plan.params = bench_params.resolve(0);
      plan.seed = bench_seed;
      const auto rows = time_algorithms(plan, selected_algorithms(bench_all, bench_algos));
      if (bench_csv.empty()) {
        write_timing_csv(rows, std::cout);
      } else {
        auto out = open_output(bench_csv);
        write_timing_csv(rows, out);
        finish(out, bench_csv);
      }
      return 0;
    }

    if (resolution->parsed()) {
      const PointCloud cloud = read_ply(res_in);
      ResolutionOptions opts;
      if (res_cap > 0) opts.subsample_cap = res_cap;
      opts.seed = res_seed;
      const ResolutionEstimate est = estimate_resolution(cloud, opts);
      std::cout << "points=" << cloud.size() << " pr=" << real(est.value) << " queries=" << est.queries
                << (est.subsampled ? " (subsampled)" : "") << '\n';
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
