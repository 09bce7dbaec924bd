#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corrgroup/correspondence.hpp"
#include "corrgroup/grouping.hpp"
#include "corrgroup/params.hpp"
#include "corrgroup/synthbench.hpp"

namespace corrgroup {

inline constexpr double kDefaultEpsilonPr = 4.0;

struct EvaluationRecord {
  std::string algorithm;
  AlgorithmParams params;
  std::string axis;
  double level = 0.0;
  std::size_t trial = 0;
  double epsilon_pr = kDefaultEpsilonPr;
  /// Unset when undefined (empty grouped set / no ground-truth inliers).
  std::optional<double> precision;
  std::optional<double> recall;
  std::size_t n_initial = 0;
  std::size_t n_grouped = 0;
  std::size_t n_correct = 0;
  std::size_t n_gt_inliers = 0;
  std::uint64_t wall_time_ns = 0;
  std::map<std::string, std::string> nuisance;
};

/// Ground-truth test: |R p + t - p'| <= epsilon (inclusive).
bool judge(const Correspondence& c, const RigidTransform& gt, double epsilon);

/// Precision/recall of `result` against the set's ground truth at
/// epsilon_pr * pr. Throws ValidationError without ground truth or on
/// out-of-range indices.
EvaluationRecord score(const GroupingResult& result, const CorrespondenceSet& set, double epsilon_pr = kDefaultEpsilonPr);

enum class SweepAxis { kNoiseSigma, kDownsampleRatio, kInlierRatio, kEpsilon, kNCorrespondences };

/// Canonical names: noise_sigma_pr, downsample_ratio, inlier_ratio,
/// epsilon_pr, n_correspondences. Parsing also accepts the CLI short forms
/// noise, downsample, inlier-ratio, epsilon, n.
std::string_view sweep_axis_name(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// Shared description of how benchmark instances are synthesized.
struct InstanceRecipe {
  ModelKind model_kind = ModelKind::kSphere;
  std::size_t model_points = 20000;
  std::uint64_t model_seed = 1;
  SceneRecipe scene;
  CorrespondenceRecipe correspondences;
};

struct SweepPlan {
  SweepAxis axis = SweepAxis::kInlierRatio;
  std::vector<double> levels;
  std::size_t trials_per_level = 1;
  InstanceRecipe instance;
  AlgorithmParams params;
  double epsilon_pr = kDefaultEpsilonPr;
  std::uint64_t seed = 0;
  /// Worker threads for independent trials; results never depend on it.
  std::size_t threads = 1;
  /// Wall time is recorded only on request so that sweep output stays
  /// byte-reproducible by default.
  bool record_timing = false;

  void validate() const;
};

/// One record per (level, trial, algorithm), emitted in that nested order.
/// Instance seeds derive from (seed, level index, trial index); on the
/// epsilon axis they ignore the level, so every level scores the same sets.
/// Scene-nuisance axes (noise, downsample) snap targets to the scene.
std::vector<EvaluationRecord> run_sweep(const SweepPlan& plan, std::span<const Algorithm> algorithms);

struct BenchPlan {
  std::vector<std::size_t> sizes;
  std::size_t repeats = 10;
  InstanceRecipe instance;
  AlgorithmParams params;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TimingRow {
  std::string algorithm;
  std::size_t n = 0;
  std::size_t repeats = 0;
  double mean_wall_time_ns = 0.0;
  std::uint64_t min_wall_time_ns = 0;
  std::uint64_t max_wall_time_ns = 0;
};

/// Serial timing of the grouping call only; one discarded warm-up per
/// (algorithm, size), then `repeats` independently seeded sets.
std::vector<TimingRow> time_algorithms(const BenchPlan& plan, std::span<const Algorithm> algorithms);

/// Builds the model (with cached resolution) described by `recipe`.
PointCloud build_model(const InstanceRecipe& recipe);

struct BenchmarkInstance {
  Scene scene;
  GeneratedCorrespondences correspondences;
  AlgorithmParams params;
};

/// One synthetic trial. The seeds inside `recipe` and `params` are replaced by
/// streams derived from `seed` (pose, scene noise, correspondences, algorithm).
BenchmarkInstance generate_instance(const PointCloud& model, const InstanceRecipe& recipe, const AlgorithmParams& params,
                                    std::uint64_t seed);

/// Groups a fixed set once per algorithm and scores it at each epsilon level.
/// Records use axis epsilon_pr and trial 0.
std::vector<EvaluationRecord> sweep_epsilon_on_set(const CorrespondenceSet& set, std::span<const double> levels,
                                                   std::span<const Algorithm> algorithms, const AlgorithmParams& params,
                                                   const PointCloud* source_cloud = nullptr);

}  // namespace corrgroup
