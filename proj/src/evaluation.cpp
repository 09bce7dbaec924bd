#include "corrgroup/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "corrgroup/error.hpp"

namespace corrgroup {

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Seed streams within one trial.
enum : std::uint64_t { kStreamPose = 1, kStreamScene = 2, kStreamCorr = 3, kStreamAlgo = 4 };

std::uint64_t timed_run(Algorithm a, const CorrespondenceSet& set, const AlgorithmParams& params, const PointCloud* model,
                        GroupingResult& result) {
  const auto start = std::chrono::steady_clock::now();
  result = run_grouping(a, set, params, model);
  const auto stop = std::chrono::steady_clock::now();
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(ns));
}

std::string context(Algorithm a, double level, std::size_t trial) {
  return "algorithm " + std::string(algorithm_name(a)) + ", level " + format_real(level) + ", trial " +
         std::to_string(trial) + ": ";
}

template <typename Job>
void run_jobs(std::size_t count, std::size_t threads, Job job) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr first_error;
  std::size_t first_error_job = count;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = 0;
        {
          std::lock_guard lock(mutex);
          if (next == count) return;
          i = next++;
        }
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          // Report the error of the earliest job so failures are reproducible.
          if (i < first_error_job) {
            first_error_job = i;
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

bool judge(const Correspondence& c, const RigidTransform& gt, double epsilon) {
  return (gt(c.source_point) - c.target_point).norm() <= epsilon;
}

EvaluationRecord score(const GroupingResult& result, const CorrespondenceSet& set, double epsilon_pr) {
  if (!set.ground_truth) throw ValidationError("scoring requires a ground-truth transform");
  if (!(epsilon_pr > 0.0)) throw ValidationError("epsilon must be positive");
  const double epsilon = epsilon_pr * set.source_resolution_pr;

  std::vector<bool> correct(set.size());
  EvaluationRecord rec;
  rec.epsilon_pr = epsilon_pr;
  rec.n_initial = set.size();
  for (std::size_t i = 0; i < set.size(); ++i) {
    correct[i] = judge(set[i], *set.ground_truth, epsilon);
    if (correct[i]) ++rec.n_gt_inliers;
  }

  std::vector<bool> seen(set.size(), false);
  for (std::size_t idx : result.inlier_indices) {
    if (idx >= set.size()) throw ValidationError("grouping result index out of range");
    if (seen[idx]) throw ValidationError("grouping result has duplicate indices");
    seen[idx] = true;
    ++rec.n_grouped;
    if (correct[idx]) ++rec.n_correct;
  }
  if (rec.n_grouped > 0) rec.precision = static_cast<double>(rec.n_correct) / static_cast<double>(rec.n_grouped);
  if (rec.n_gt_inliers > 0) rec.recall = static_cast<double>(rec.n_correct) / static_cast<double>(rec.n_gt_inliers);
  return rec;
}

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNoiseSigma:
      return "noise_sigma_pr";
    case SweepAxis::kDownsampleRatio:
      return "downsample_ratio";
    case SweepAxis::kInlierRatio:
      return "inlier_ratio";
    case SweepAxis::kEpsilon:
      return "epsilon_pr";
    case SweepAxis::kNCorrespondences:
      return "n_correspondences";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "noise" || name == "noise_sigma_pr") return SweepAxis::kNoiseSigma;
  if (name == "downsample" || name == "downsample_ratio") return SweepAxis::kDownsampleRatio;
  if (name == "inlier-ratio" || name == "inlier_ratio") return SweepAxis::kInlierRatio;
  if (name == "epsilon" || name == "epsilon_pr") return SweepAxis::kEpsilon;
  if (name == "n" || name == "n_correspondences") return SweepAxis::kNCorrespondences;
  throw ValidationError("unknown sweep axis '" + std::string(name) + "'");
}

void SweepPlan::validate() const {
  if (levels.size() < 2) throw ValidationError("a sweep needs at least 2 levels");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) throw ValidationError("sweep levels must be strictly increasing");
  }
  if (trials_per_level == 0) throw ValidationError("trials_per_level must be positive");
  if (!(epsilon_pr > 0.0)) throw ValidationError("epsilon must be positive");
  params.validate();
  instance.scene.validate();
  instance.correspondences.validate(epsilon_pr);
  for (double level : levels) {
    switch (axis) {
      case SweepAxis::kNoiseSigma:
        if (level < 0.0) throw ValidationError("noise levels must be >= 0");
        break;
      case SweepAxis::kDownsampleRatio:
        if (!(level > 0.0 && level <= 1.0)) throw ValidationError("downsample levels must lie in (0, 1]");
        break;
      case SweepAxis::kInlierRatio:
        if (!(level >= 0.0 && level <= 1.0)) throw ValidationError("inlier-ratio levels must lie in [0, 1]");
        break;
      case SweepAxis::kEpsilon:
        if (!(level > 0.0)) throw ValidationError("epsilon levels must be positive");
        break;
      case SweepAxis::kNCorrespondences:
        if (!(level >= 1.0) || level != std::floor(level)) throw ValidationError("n levels must be positive integers");
        if (static_cast<std::size_t>(level) > instance.model_points) {
          throw ValidationError("n level exceeds the model size");
        }
        break;
    }
  }
  if (instance.correspondences.n_total > instance.model_points) throw ValidationError("n_total exceeds the model size");
}

PointCloud build_model(const InstanceRecipe& recipe) {
  return make_test_model(recipe.model_kind, recipe.model_points, recipe.model_seed).with_resolution();
}

BenchmarkInstance generate_instance(const PointCloud& model, const InstanceRecipe& recipe, const AlgorithmParams& params,
                                    std::uint64_t seed) {
  SceneRecipe scene_recipe = recipe.scene;
  scene_recipe.rotation_seed = derive_seed(seed, kStreamPose);
  scene_recipe.rng_seed = derive_seed(seed, kStreamScene);
  CorrespondenceRecipe corr_recipe = recipe.correspondences;
  corr_recipe.rng_seed = derive_seed(seed, kStreamCorr);

  BenchmarkInstance inst;
  inst.scene = generate_scene(model, scene_recipe);
  inst.correspondences = generate_correspondences(model, inst.scene.cloud, inst.scene.ground_truth, corr_recipe);
  inst.params = params;
  inst.params.rng_seed = derive_seed(seed, kStreamAlgo);
  return inst;
}

std::vector<EvaluationRecord> sweep_epsilon_on_set(const CorrespondenceSet& set, std::span<const double> levels,
                                                   std::span<const Algorithm> algorithms, const AlgorithmParams& params,
                                                   const PointCloud* source_cloud) {
  if (!set.ground_truth) throw ValidationError("scoring requires a ground-truth transform");
  if (levels.size() < 2) throw ValidationError("a sweep needs at least 2 levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0)) throw ValidationError("epsilon levels must be positive");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw ValidationError("sweep levels must be strictly increasing");
  }
  std::vector<EvaluationRecord> records(levels.size() * algorithms.size());
  for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
    const Algorithm a = algorithms[ai];
    GroupingResult result;
    try {
      result = run_grouping(a, set, params, source_cloud);
    } catch (const ValidationError& e) {
      throw ValidationError("algorithm " + std::string(algorithm_name(a)) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ComputationError("algorithm " + std::string(algorithm_name(a)) + ": " + e.what());
    }
    for (std::size_t l = 0; l < levels.size(); ++l) {
      EvaluationRecord rec = score(result, set, levels[l]);
      rec.algorithm = std::string(algorithm_name(a));
      rec.params = params;
      rec.axis = std::string(sweep_axis_name(SweepAxis::kEpsilon));
      rec.level = levels[l];
      rec.nuisance[rec.axis] = format_real(levels[l]);
      records[l * algorithms.size() + ai] = std::move(rec);
    }
  }
  return records;
}

std::vector<EvaluationRecord> run_sweep(const SweepPlan& plan, std::span<const Algorithm> algorithms) {
  plan.validate();
  const PointCloud model = build_model(plan.instance);
  const std::size_t n_levels = plan.levels.size();
  const std::size_t n_trials = plan.trials_per_level;
  const std::size_t n_algos = algorithms.size();
  const bool epsilon_axis = plan.axis == SweepAxis::kEpsilon;

  std::vector<EvaluationRecord> records(n_levels * n_trials * n_algos);
  auto slot = [&](std::size_t level, std::size_t trial, std::size_t algo) -> EvaluationRecord& {
    return records[(level * n_trials + trial) * n_algos + algo];
  };

  auto fill = [&](EvaluationRecord rec, std::size_t level, std::size_t trial, std::size_t algo, std::uint64_t ns,
                  const AlgorithmParams& params) {
    rec.algorithm = std::string(algorithm_name(algorithms[algo]));
    rec.params = params;
    rec.axis = std::string(sweep_axis_name(plan.axis));
    rec.level = plan.levels[level];
    rec.trial = trial;
    rec.wall_time_ns = plan.record_timing ? ns : 0;
    rec.nuisance[rec.axis] = format_real(rec.level);
    slot(level, trial, algo) = std::move(rec);
  };

  // Epsilon sweeps group each trial once and score it at every level.
  const std::size_t n_jobs = epsilon_axis ? n_trials : n_levels * n_trials;
  run_jobs(n_jobs, plan.threads, [&](std::size_t job) {
    const std::size_t level = epsilon_axis ? 0 : job / n_trials;
    const std::size_t trial = epsilon_axis ? job : job % n_trials;
    const double value = plan.levels[level];

    InstanceRecipe recipe = plan.instance;
    switch (plan.axis) {
      case SweepAxis::kNoiseSigma:
        recipe.scene.noise_sigma_pr = value;
        recipe.correspondences.target_mode = TargetMode::kSceneSnapped;
        break;
      case SweepAxis::kDownsampleRatio:
        recipe.scene.downsample_ratio = value;
        recipe.correspondences.target_mode = TargetMode::kSceneSnapped;
        break;
      case SweepAxis::kInlierRatio:
        recipe.correspondences.inlier_ratio = value;
        break;
      case SweepAxis::kNCorrespondences:
        recipe.correspondences.n_total = static_cast<std::size_t>(value);
        break;
      case SweepAxis::kEpsilon:
        break;
    }

    const std::uint64_t trial_seed = derive_seed(plan.seed, level, trial);
    BenchmarkInstance inst;
    try {
      inst = generate_instance(model, recipe, plan.params, trial_seed);
    } catch (const ValidationError& e) {
      throw ValidationError("instance generation, level " + format_real(value) + ", trial " + std::to_string(trial) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ComputationError("instance generation, level " + format_real(value) + ", trial " + std::to_string(trial) + ": " + e.what());
    }

    for (std::size_t a = 0; a < n_algos; ++a) {
      GroupingResult result;
      std::uint64_t ns = 0;
      try {
        ns = timed_run(algorithms[a], inst.correspondences.set, inst.params, &model, result);
      } catch (const ValidationError& e) {
        throw ValidationError(context(algorithms[a], value, trial) + e.what());
      } catch (const std::exception& e) {
        throw ComputationError(context(algorithms[a], value, trial) + e.what());
      }
      if (epsilon_axis) {
        for (std::size_t l = 0; l < n_levels; ++l) fill(score(result, inst.correspondences.set, plan.levels[l]), l, trial, a, ns, inst.params);
      } else {
        fill(score(result, inst.correspondences.set, plan.epsilon_pr), level, trial, a, ns, inst.params);
      }
    }
  });
  return records;
}

void BenchPlan::validate() const {
  if (sizes.empty()) throw ValidationError("bench needs at least one size");
  if (repeats == 0) throw ValidationError("repeats must be >= 1");
  for (std::size_t n : sizes) {
    if (n < 3) throw ValidationError("bench sizes must be >= 3");
    if (n > instance.model_points) throw ValidationError("bench size exceeds the model size");
  }
  params.validate();
  instance.scene.validate();
  instance.correspondences.validate();
}

std::vector<TimingRow> time_algorithms(const BenchPlan& plan, std::span<const Algorithm> algorithms) {
  plan.validate();
  const PointCloud model = build_model(plan.instance);
  std::vector<TimingRow> rows;
  for (std::size_t size_idx = 0; size_idx < plan.sizes.size(); ++size_idx) {
    InstanceRecipe recipe = plan.instance;
    recipe.correspondences.n_total = plan.sizes[size_idx];
    std::vector<BenchmarkInstance> instances;
    instances.reserve(plan.repeats);
    for (std::size_t r = 0; r < plan.repeats; ++r) {
      instances.push_back(generate_instance(model, recipe, plan.params, derive_seed(plan.seed, plan.sizes[size_idx], r)));
    }

    for (Algorithm a : algorithms) {
      GroupingResult result;
      timed_run(a, instances.front().correspondences.set, instances.front().params, &model, result);  // warm-up

      TimingRow row;
      row.algorithm = std::string(algorithm_name(a));
      row.n = plan.sizes[size_idx];
      row.repeats = plan.repeats;
      row.min_wall_time_ns = UINT64_MAX;
      double total = 0.0;
      for (const auto& inst : instances) {
        const std::uint64_t ns = timed_run(a, inst.correspondences.set, inst.params, &model, result);
        total += static_cast<double>(ns);
        row.min_wall_time_ns = std::min(row.min_wall_time_ns, ns);
        row.max_wall_time_ns = std::max(row.max_wall_time_ns, ns);
      }
      row.mean_wall_time_ns = total / static_cast<double>(plan.repeats);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace corrgroup
