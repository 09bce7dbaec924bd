#include "corrgroup/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "corrgroup/error.hpp"
#include "corrgroup/neighbor_index.hpp"
#include "corrgroup/numeric.hpp"

namespace corrgroup {

namespace {

double lowe_score(const Correspondence& c) {
  if (c.second_nn_distance == 0.0) return -std::numeric_limits<double>::infinity();
  return 1.0 - c.nn_distance / c.second_nn_distance;
}

bool passes_ratio(const Correspondence& c, double t_nnsr) {
  return c.second_nn_distance > 0.0 && lowe_score(c) >= t_nnsr;
}

void require_lrfs(const CorrespondenceSet& set, const char* who) {
  if (!set.all_have_lrfs()) throw ValidationError(std::string("LRF required for ") + who);
}

std::vector<std::size_t> consensus(const CorrespondenceSet& set, const RigidTransform& t, double threshold) {
  const double t2 = threshold * threshold;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if ((t(set[i].source_point) - set[i].target_point).squaredNorm() < t2) out.push_back(i);
  }
  return out;
}

RigidTransform fit_subset(const CorrespondenceSet& set, const std::vector<std::size_t>& idx) {
  Points src;
  Points dst;
  src.reserve(idx.size());
  dst.reserve(idx.size());
  for (std::size_t i : idx) {
    src.push_back(set[i].source_point);
    dst.push_back(set[i].target_point);
  }
  return estimate_rigid_transform(src, dst);
}

bool shares_keypoint(const Correspondence& a, const Correspondence& b) {
  return a.source_point == b.source_point || a.target_point == b.target_point;
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kSS:
      return "ss";
    case Algorithm::kNNSR:
      return "nnsr";
    case Algorithm::kRANSAC:
      return "ransac";
    case Algorithm::kST:
      return "st";
    case Algorithm::kGC:
      return "gc";
    case Algorithm::kHough3D:
      return "3dhv";
    case Algorithm::kSI:
      return "si";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (algorithm_name(a) == name) return a;
  }
  throw ValidationError("unknown algorithm '" + std::string(name) + "'");
}

bool requires_lrfs(Algorithm a) { return a == Algorithm::kHough3D || a == Algorithm::kSI; }

GroupingResult group_ss(const CorrespondenceSet& set, const AlgorithmParams& params) {
  GroupingResult out;
  if (set.empty()) return out;

  std::vector<double> sims;
  sims.reserve(set.size());
  for (const auto& c : set.items) sims.push_back(c.similarity);

  bool keep_all = false;
  double threshold = 0.0;
  if (params.t_ss) {
    threshold = *params.t_ss;
  } else {
    const OtsuResult otsu = otsu_threshold(sims);
    keep_all = otsu.degenerate;
    threshold = otsu.threshold;
  }

  std::vector<double> scores;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (keep_all || sims[i] >= threshold) {
      out.inlier_indices.push_back(i);
      scores.push_back(sims[i]);
    }
  }
  out.scores = std::move(scores);
  return out;
}

GroupingResult group_nnsr(const CorrespondenceSet& set, const AlgorithmParams& params) {
  GroupingResult out;
  std::vector<double> scores;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (passes_ratio(set[i], params.t_nnsr)) {
      out.inlier_indices.push_back(i);
      scores.push_back(lowe_score(set[i]));
    }
  }
  out.scores = std::move(scores);
  return out;
}

GroupingResult group_ransac(const CorrespondenceSet& set, const AlgorithmParams& params) {
  const std::size_t n = set.size();
  if (n < 3) throw ValidationError("too few correspondences");
  const double threshold = params.d_ransac_pr * set.source_resolution_pr;
  const double threshold2 = threshold * threshold;

  Points src(n);
  Points dst(n);
  for (std::size_t i = 0; i < n; ++i) {
    src[i] = set[i].source_point;
    dst[i] = set[i].target_point;
  }

  std::mt19937_64 rng(params.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::size_t best_count = 0;
  std::optional<RigidTransform> best;
  std::array<Point3, 3> sample_src;
  std::array<Point3, 3> sample_dst;
  for (std::uint64_t iter = 0; iter < params.n_ransac; ++iter) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    std::size_t c = pick(rng);
    while (c == a || c == b) c = pick(rng);
    sample_src = {src[a], src[b], src[c]};
    sample_dst = {dst[a], dst[b], dst[c]};

    RigidTransform t;
    try {
      t = estimate_rigid_transform(sample_src, sample_dst);
    } catch (const ComputationError&) {
      continue;
    }

    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((t.rotation * src[i] + t.translation - dst[i]).squaredNorm() < threshold2) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = t;
    }
  }

  GroupingResult out;
  if (!best) return out;

  RigidTransform final_t = *best;
  const auto initial = consensus(set, *best, threshold);
  if (initial.size() >= 3) {
    try {
      final_t = fit_subset(set, initial);
    } catch (const ComputationError&) {
      final_t = *best;
    }
  }
  out.inlier_indices = consensus(set, final_t, threshold);
  out.transform = final_t;
  return out;
}

GroupingResult group_st(const CorrespondenceSet& set, const AlgorithmParams& params) {
  const std::size_t n = set.size();
  GroupingResult out;
  if (n == 0) return out;
  if (n == 1) {
    out.inlier_indices = {0};
    out.scores = std::vector<double>{1.0};
    return out;
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = rigidity_score(set[i], set[j]);
      if (r >= params.t_st) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
      }
    }
  }

  std::vector<std::pair<std::size_t, double>> accepted;
  std::vector<Eigen::Index> active(n);
  std::iota(active.begin(), active.end(), Eigen::Index{0});
  while (!active.empty()) {
    if (active.size() == 1) {
      // A lone survivor is compatible with every accepted correspondence.
      accepted.emplace_back(static_cast<std::size_t>(active.front()), 0.0);
      break;
    }
    const Eigen::MatrixXd sub = m(active, active);
    const EigenPair eig = principal_eigenvector(sub);
    Eigen::Index best = 0;
    const double peak = eig.vector.maxCoeff(&best);
    if (!(peak > 1e-12)) break;

    const Eigen::Index chosen = active[static_cast<std::size_t>(best)];
    accepted.emplace_back(static_cast<std::size_t>(chosen), peak);

    std::vector<Eigen::Index> survivors;
    survivors.reserve(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Eigen::Index j = active[k];
      if (j == chosen || m(chosen, j) == 0.0) continue;
      if (shares_keypoint(set[static_cast<std::size_t>(chosen)], set[static_cast<std::size_t>(j)])) continue;
      survivors.push_back(j);
    }
    active = std::move(survivors);
  }

  std::sort(accepted.begin(), accepted.end());
  std::vector<double> scores;
  for (const auto& [idx, score] : accepted) {
    out.inlier_indices.push_back(idx);
    scores.push_back(score);
  }
  out.scores = std::move(scores);
  return out;
}

GroupingResult group_gc(const CorrespondenceSet& set, const AlgorithmParams& params) {
  const std::size_t n = set.size();
  GroupingResult out;
  if (n == 0) return out;
  const double t_gc = params.t_gc_pr * set.source_resolution_pr;

  std::vector<std::vector<bool>> compatible(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool ok = distance_compatibility(set[i], set[j], t_gc).compatible;
      compatible[i][j] = ok;
      compatible[j][i] = ok;
    }
  }

  std::size_t best_seed = 0;
  std::size_t best_size = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto size = static_cast<std::size_t>(1 + std::count(compatible[i].begin(), compatible[i].end(), true));
    if (size > best_size) {
      best_size = size;
      best_seed = i;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == best_seed || compatible[best_seed][j]) out.inlier_indices.push_back(j);
  }
  return out;
}

Eigen::Vector3d hough_vote(const Correspondence& c, const Point3& source_centroid) {
  const Eigen::Vector3d global_src = source_centroid - c.source_point;
  const Eigen::Vector3d local = c.source_lrf->axes * global_src;
  return c.target_lrf->axes.transpose() * local + c.target_point;
}

GroupingResult group_3dhv(const CorrespondenceSet& set, const AlgorithmParams& params, const PointCloud& source_cloud) {
  if (source_cloud.empty()) throw ValidationError("3DHV needs a non-empty source cloud");
  return group_3dhv(set, params, source_cloud.centroid());
}

GroupingResult group_3dhv(const CorrespondenceSet& set, const AlgorithmParams& params, const Point3& source_centroid) {
  require_lrfs(set, "3DHV");
  GroupingResult out;
  if (set.empty()) return out;

  HoughAccumulator acc(params.hough_bin_pr * set.source_resolution_pr);
  for (std::size_t i = 0; i < set.size(); ++i) acc.vote(hough_vote(set[i], source_centroid), i);
  auto [key, votes] = acc.peak();
  std::sort(votes.begin(), votes.end());
  out.scores = std::vector<double>(votes.size(), static_cast<double>(votes.size()));
  out.inlier_indices = std::move(votes);
  return out;
}

std::vector<double> si_scores(const CorrespondenceSet& set, const AlgorithmParams& params) {
  require_lrfs(set, "SI");
  const std::size_t n = set.size();
  std::vector<double> scores(n, 0.0);
  if (n == 0) return scores;

  const std::size_t kappa = std::min<std::size_t>(params.si_kappa, n - 1);
  const double delta = params.si_delta_pr * set.source_resolution_pr;
  const double sigma = params.si_sigma;

  std::vector<bool> in_ratio(n);
  std::vector<double> lowe(n);
  Points sources(n);
  for (std::size_t i = 0; i < n; ++i) {
    in_ratio[i] = passes_ratio(set[i], params.t_nnsr);
    lowe[i] = lowe_score(set[i]);
    sources[i] = set[i].source_point;
  }

  std::vector<std::size_t> global(n);
  std::iota(global.begin(), global.end(), std::size_t{0});
  std::stable_sort(global.begin(), global.end(), [&](std::size_t a, std::size_t b) { return lowe[a] > lowe[b]; });
  global.resize(kappa);

  const NeighborIndex index(std::move(sources));
  for (std::size_t i = 0; i < n; ++i) {
    const Correspondence& c = set[i];

    std::size_t local_voters = 0;
    std::size_t local_votes = 0;
    std::size_t taken = 0;
    for (const auto& nb : index.knn(c.source_point, kappa + 1)) {
      if (nb.index == i) continue;
      if (taken++ == kappa) break;
      if (!in_ratio[nb.index]) continue;
      ++local_voters;
      if (rigidity_score(c, set[nb.index]) > sigma) ++local_votes;
    }

    const Eigen::Matrix3d rot = c.target_lrf->axes.transpose() * c.source_lrf->axes;
    std::size_t global_voters = 0;
    std::size_t global_votes = 0;
    for (std::size_t g : global) {
      if (g == i) continue;
      ++global_voters;
      const Correspondence& v = set[g];
      if (rigidity_score(c, v) <= sigma) continue;
      const Eigen::Vector3d mapped = rot * (v.source_point - c.source_point) + c.target_point;
      if ((mapped - v.target_point).norm() < delta) ++global_votes;
    }

    const std::size_t denom = local_voters + global_voters;
    scores[i] = denom == 0 ? 0.0 : static_cast<double>(local_votes + global_votes) / static_cast<double>(denom);
  }
  return scores;
}

GroupingResult group_si(const CorrespondenceSet& set, const AlgorithmParams& params) {
  const std::vector<double> s = si_scores(set, params);
  GroupingResult out;
  if (s.empty()) return out;

  const OtsuResult otsu = otsu_threshold(s);
  std::vector<double> kept;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (otsu.degenerate || s[i] >= otsu.threshold) {
      out.inlier_indices.push_back(i);
      kept.push_back(s[i]);
    }
  }
  out.scores = std::move(kept);
  return out;
}

GroupingResult run_grouping(Algorithm algorithm, const CorrespondenceSet& set, const AlgorithmParams& params,
                            const PointCloud* source_cloud) {
  switch (algorithm) {
    case Algorithm::kSS:
      return group_ss(set, params);
    case Algorithm::kNNSR:
      return group_nnsr(set, params);
    case Algorithm::kRANSAC:
      return group_ransac(set, params);
    case Algorithm::kST:
      return group_st(set, params);
    case Algorithm::kGC:
      return group_gc(set, params);
    case Algorithm::kHough3D: {
      if (source_cloud != nullptr) return group_3dhv(set, params, *source_cloud);
      Point3 centroid = Point3::Zero();
      for (const auto& c : set.items) centroid += c.source_point;
      if (!set.empty()) centroid /= static_cast<double>(set.size());
      return group_3dhv(set, params, centroid);
    }
    case Algorithm::kSI:
      return group_si(set, params);
  }
  throw ValidationError("unknown algorithm");
}

}  // namespace corrgroup
