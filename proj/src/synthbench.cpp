#include "corrgroup/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "corrgroup/error.hpp"
#include "corrgroup/neighbor_index.hpp"

namespace corrgroup {

namespace {

using Rng = std::mt19937_64;

Eigen::Vector3d random_unit_vector(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

Eigen::Matrix3d random_rotation(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    if (q.norm() > 1e-12) return q.normalized().toRotationMatrix();
  }
}

double uniform(Rng& rng, double lo, double hi) {
  // Degenerate bands are allowed; draw anyway to keep the stream aligned.
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return lo + (hi - lo) * dist(rng);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSphere:
      return "sphere";
    case ModelKind::kTorus:
      return "torus";
    case ModelKind::kPlaneWithBumps:
      return "plane-with-bumps";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kSphere, ModelKind::kTorus, ModelKind::kPlaneWithBumps}) {
    if (model_kind_name(k) == name) return k;
  }
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  Rng rng(seed);
  return random_rotation(rng);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

PointCloud make_test_model(ModelKind kind, std::size_t n_points, std::uint64_t seed) {
  if (n_points < 100) throw ValidationError("test models need at least 100 points");
  Rng rng(seed);
  Points pts;
  pts.reserve(n_points);

  switch (kind) {
    case ModelKind::kSphere: {
      for (std::size_t i = 0; i < n_points; ++i) pts.push_back(random_unit_vector(rng));
      break;
    }
    case ModelKind::kTorus: {
      constexpr double kMajor = 1.0;
      constexpr double kMinor = 0.35;
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> accept(0.0, 1.0);
      while (pts.size() < n_points) {
        const double theta = angle(rng);  // around the tube
        const double phi = angle(rng);    // around the axis
        // Area element is proportional to (R + r cos theta).
        if (accept(rng) * (kMajor + kMinor) > kMajor + kMinor * std::cos(theta)) continue;
        const double ring = kMajor + kMinor * std::cos(theta);
        pts.emplace_back(ring * std::cos(phi), ring * std::sin(phi), kMinor * std::sin(theta));
      }
      break;
    }
    case ModelKind::kPlaneWithBumps: {
      struct Bump {
        Eigen::Vector2d center;
        double height;
        double width;
      };
      std::vector<Bump> bumps;
      for (int k = 0; k < 6; ++k) {
        bumps.push_back({Eigen::Vector2d(uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8)), uniform(rng, -0.3, 0.3),
                         uniform(rng, 0.1, 0.3)});
      }
      for (std::size_t i = 0; i < n_points; ++i) {
        const Eigen::Vector2d xy(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
        double z = 0.0;
        for (const auto& b : bumps) z += b.height * std::exp(-(xy - b.center).squaredNorm() / (2.0 * b.width * b.width));
        pts.emplace_back(xy.x(), xy.y(), z);
      }
      break;
    }
  }
  return PointCloud(std::move(pts));
}

void SceneRecipe::validate() const {
  if (!(noise_sigma_pr >= 0.0) || !std::isfinite(noise_sigma_pr)) throw ValidationError("noise_sigma_pr must be >= 0");
  if (!(downsample_ratio > 0.0 && downsample_ratio <= 1.0)) throw ValidationError("downsample_ratio must lie in (0, 1]");
}

Scene generate_scene(const PointCloud& model, const SceneRecipe& recipe) {
  recipe.validate();
  if (model.size() < 2) throw ValidationError("scene generation needs a model with >= 2 points");

  Scene scene;
  {
    Rng pose_rng(recipe.rotation_seed);
    scene.ground_truth.rotation = random_rotation(pose_rng);
    const Point3 c = model.centroid();
    double extent = 0.0;
    for (const auto& p : model.points()) extent = std::max(extent, (p - c).norm());
    for (int a = 0; a < 3; ++a) scene.ground_truth.translation[a] = uniform(pose_rng, -extent, extent);
  }

  Points pts = apply_transform(scene.ground_truth, model).points();
  Rng rng(recipe.rng_seed);
  if (recipe.noise_sigma_pr > 0.0) {
    std::normal_distribution<double> noise(0.0, recipe.noise_sigma_pr * model.resolution());
    for (auto& p : pts) {
      p.x() += noise(rng);
      p.y() += noise(rng);
      p.z() += noise(rng);
    }
  }

  if (recipe.downsample_ratio < 1.0) {
    const auto keep = static_cast<std::size_t>(std::llround(recipe.downsample_ratio * static_cast<double>(pts.size())));
    if (keep < 2) throw ValidationError("downsampling leaves fewer than 2 points");
    Points kept;
    kept.reserve(keep);
    std::sample(pts.begin(), pts.end(), std::back_inserter(kept), keep, rng);
    pts = std::move(kept);
  }
  scene.cloud = PointCloud(std::move(pts));
  return scene;
}

std::size_t CorrespondenceRecipe::inlier_count() const {
  return static_cast<std::size_t>(std::llround(inlier_ratio * static_cast<double>(n_total)));
}

std::vector<std::string> CorrespondenceRecipe::validate(double judging_epsilon_pr) const {
  auto band = [](double lo, double hi, const char* what) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw ValidationError(std::string(what) + " band must satisfy 0 <= low <= high <= 1");
  };
  if (n_total == 0) throw ValidationError("n_total must be positive");
  if (!(inlier_ratio >= 0.0 && inlier_ratio <= 1.0)) throw ValidationError("inlier_ratio must lie in [0, 1]");
  if (!(inlier_jitter_pr >= 0.0)) throw ValidationError("inlier_jitter_pr must be >= 0");
  if (!(outlier_min_offset_pr > 0.0)) throw ValidationError("outlier_min_offset_pr must be > 0");
  if (!(outlier_max_offset_pr >= outlier_min_offset_pr)) throw ValidationError("outlier_max_offset_pr must be >= outlier_min_offset_pr");
  if (!(lrf_noise_deg >= 0.0 && lrf_noise_deg <= 180.0)) throw ValidationError("lrf_noise_deg must lie in [0, 180]");
  if (!(lrf_support_pr > 0.0)) throw ValidationError("lrf_support_pr must be > 0");
  band(similarity.inlier_low, similarity.inlier_high, "inlier similarity");
  band(similarity.outlier_low, similarity.outlier_high, "outlier similarity");

  std::vector<std::string> warnings;
  if (!(outlier_min_offset_pr > 2.0 * judging_epsilon_pr)) {
    warnings.push_back("outlier_min_offset_pr is not above twice the judging threshold; outliers may be judged correct");
  }
  if (!(inlier_jitter_pr < judging_epsilon_pr)) {
    warnings.push_back("inlier_jitter_pr reaches the judging threshold; inliers may be judged incorrect");
  }
  return warnings;
}

GeneratedCorrespondences generate_correspondences(const PointCloud& model, const PointCloud& scene,
                                                  const RigidTransform& gt, const CorrespondenceRecipe& recipe) {
  recipe.validate();
  const std::size_t n = recipe.n_total;
  if (model.size() < n) throw ValidationError("model has fewer points than n_total");

  const double pr = model.resolution();
  Rng rng(recipe.rng_seed);

  std::vector<std::size_t> candidates(model.size());
  std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  std::shuffle(candidates.begin(), candidates.end(), rng);

  const NeighborIndex model_index(model);
  const double support = recipe.lrf_support_pr * pr;
  std::vector<std::pair<std::size_t, LocalReferenceFrame>> keypoints;
  keypoints.reserve(n);
  for (std::size_t idx : candidates) {
    if (keypoints.size() == n) break;
    try {
      keypoints.emplace_back(idx, estimate_lrf(model_index, model[idx], support));
    } catch (const ComputationError&) {
      // Keypoints without a repeatable frame are not used.
    }
  }
  if (keypoints.size() < n) throw ComputationError("not enough model points with a well-defined LRF");

  std::optional<NeighborIndex> scene_index;
  if (recipe.target_mode == TargetMode::kSceneSnapped) {
    if (scene.empty()) throw ValidationError("scene-snapped targets need a non-empty scene");
    scene_index.emplace(scene);
  }

  const std::size_t n_in = recipe.inlier_count();
  const double max_noise_angle = recipe.lrf_noise_deg * std::numbers::pi / 180.0;
  const SimilarityModel& sm = recipe.similarity;

  GeneratedCorrespondences out;
  out.set.items.reserve(n);
  out.is_inlier.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool inlier = k < n_in;
    const auto& [idx, lrf] = keypoints[k];
    Correspondence c;
    c.source_point = model[idx];
    c.source_lrf = lrf;

    const Eigen::Vector3d dir = random_unit_vector(rng);
    const double u = uniform(rng, 0.0, 1.0);
    LocalReferenceFrame target_frame;
    if (inlier) {
      const double radius = recipe.inlier_jitter_pr * pr * std::cbrt(u);
      c.target_point = gt(c.source_point) + radius * dir;
      const Eigen::Vector3d axis = random_unit_vector(rng);
      const double angle = uniform(rng, 0.0, max_noise_angle);
      const Eigen::Matrix3d perturb = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
      target_frame.axes = lrf.axes * gt.rotation.transpose() * perturb.transpose();
    } else {
      const double norm = (recipe.outlier_min_offset_pr + u * (recipe.outlier_max_offset_pr - recipe.outlier_min_offset_pr)) * pr;
      c.target_point = gt(c.source_point) + norm * dir;
      target_frame.axes = random_rotation(rng);
    }
    c.target_lrf = target_frame;
    if (scene_index) c.target_point = scene_index->points()[scene_index->knn(c.target_point, 1).front().index];

    const double lo = inlier ? sm.inlier_low : sm.outlier_low;
    const double hi = inlier ? sm.inlier_high : sm.outlier_high;
    c.similarity = uniform(rng, lo, hi);
    const double distinctiveness = uniform(rng, lo, hi);
    c.nn_distance = 1.0 - c.similarity;
    c.second_nn_distance = c.nn_distance / std::max(1.0 - distinctiveness, 0.05);

    out.set.items.push_back(std::move(c));
    out.is_inlier.push_back(inlier);
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  GeneratedCorrespondences shuffled;
  shuffled.set.items.reserve(n);
  shuffled.is_inlier.reserve(n);
  for (std::size_t p : perm) {
    shuffled.set.items.push_back(std::move(out.set.items[p]));
    shuffled.is_inlier.push_back(out.is_inlier[p]);
  }
  shuffled.set.source_resolution_pr = pr;
  shuffled.set.ground_truth = gt;
  return shuffled;
}

}  // namespace corrgroup
