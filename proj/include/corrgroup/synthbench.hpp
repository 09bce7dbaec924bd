#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "corrgroup/correspondence.hpp"
#include "corrgroup/geom3d.hpp"

namespace corrgroup {

enum class ModelKind { kSphere, kTorus, kPlaneWithBumps };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Deterministic procedural test shape. Sphere: unit radius. Torus: radii
/// 1 and 0.35. Plane-with-bumps: z-height field over [-1, 1]^2.
PointCloud make_test_model(ModelKind kind, std::size_t n_points, std::uint64_t seed);

struct SceneRecipe {
  std::uint64_t rotation_seed = 1;
  double noise_sigma_pr = 0.0;   ///< per-axis Gaussian sigma, in model pr
  double downsample_ratio = 1.0; ///< retained fraction, exact count
  std::uint64_t rng_seed = 1;

  void validate() const;
  bool operator==(const SceneRecipe&) const = default;
};

struct Scene {
  PointCloud cloud;
  RigidTransform ground_truth;
};

/// Rotated and translated copy of `model`, then noise, then random retention.
Scene generate_scene(const PointCloud& model, const SceneRecipe& recipe);

struct SimilarityModel {
  double inlier_low = 0.5;
  double inlier_high = 1.0;
  double outlier_low = 0.0;
  double outlier_high = 0.85;

  bool operator==(const SimilarityModel&) const = default;
};

enum class TargetMode {
  kSynthetic,     ///< targets placed exactly at gt(p) + jitter / offset
  kSceneSnapped,  ///< synthetic target then snapped to the nearest scene point
};

struct CorrespondenceRecipe {
  std::size_t n_total = 1000;
  double inlier_ratio = 0.3;
  double inlier_jitter_pr = 1.0;
  double outlier_min_offset_pr = 10.0;
  double outlier_max_offset_pr = 60.0;
  double lrf_noise_deg = 0.0;
  double lrf_support_pr = 15.0;
  SimilarityModel similarity;
  TargetMode target_mode = TargetMode::kSynthetic;
  std::uint64_t rng_seed = 1;

  /// Throws ValidationError for out-of-range fields. Returns advisory
  /// warnings (e.g. outlier offsets too close to the judging threshold).
  std::vector<std::string> validate(double judging_epsilon_pr = 4.0) const;
  std::size_t inlier_count() const;

  bool operator==(const CorrespondenceRecipe&) const = default;
};

struct GeneratedCorrespondences {
  CorrespondenceSet set;
  /// Generator-side labels, parallel to set.items.
  std::vector<bool> is_inlier;
};

/// Samples distinct model keypoints (those with a well-defined LRF) and builds
/// exactly round(inlier_ratio * n_total) inliers; items are shuffled and the
/// ground truth is attached. `scene` is only consulted in kSceneSnapped mode.
GeneratedCorrespondences generate_correspondences(const PointCloud& model, const PointCloud& scene,
                                                  const RigidTransform& gt, const CorrespondenceRecipe& recipe);

// Flat JSON objects with the field names above (similarity nested, target_mode
// "synthetic" | "scene-snapped"). Unknown keys are rejected; missing keys keep defaults.
std::string scene_recipe_to_json(const SceneRecipe& recipe);
SceneRecipe scene_recipe_from_json(const std::string& text);
std::string correspondence_recipe_to_json(const CorrespondenceRecipe& recipe);
CorrespondenceRecipe correspondence_recipe_from_json(const std::string& text);

/// Uniformly distributed rotation (unit-quaternion method).
Eigen::Matrix3d random_rotation(std::uint64_t seed);

/// 64-bit seed mixing (splitmix64 finalizer over the combined words).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace corrgroup
