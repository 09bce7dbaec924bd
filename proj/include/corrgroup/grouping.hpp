#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "corrgroup/correspondence.hpp"
#include "corrgroup/geom3d.hpp"
#include "corrgroup/params.hpp"

namespace corrgroup {

enum class Algorithm { kSS, kNNSR, kRANSAC, kST, kGC, kHough3D, kSI };

inline constexpr std::array<Algorithm, 7> kAllAlgorithms = {Algorithm::kSS,  Algorithm::kNNSR,    Algorithm::kRANSAC,
                                                            Algorithm::kST,  Algorithm::kGC,      Algorithm::kHough3D,
                                                            Algorithm::kSI};

/// Lower-case short names: ss, nnsr, ransac, st, gc, 3dhv, si.
std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
bool requires_lrfs(Algorithm a);

/// Similarity score thresholding (Otsu-adaptive when params.t_ss is unset).
GroupingResult group_ss(const CorrespondenceSet& set, const AlgorithmParams& params);

/// Lowe ratio test: keep when 1 - nn / second_nn >= t_nnsr.
GroupingResult group_nnsr(const CorrespondenceSet& set, const AlgorithmParams& params);

/// Three-point RANSAC with least-squares refit of the best consensus set.
GroupingResult group_ransac(const CorrespondenceSet& set, const AlgorithmParams& params);

/// Spectral technique: greedy selection on the principal eigenvector of the
/// thresholded rigidity matrix, recomputed on the survivors each round.
GroupingResult group_st(const CorrespondenceSet& set, const AlgorithmParams& params);

/// Geometric consistency: largest distance-compatible cluster over all seeds.
GroupingResult group_gc(const CorrespondenceSet& set, const AlgorithmParams& params);

/// LRF-based 3D Hough voting for the source centroid.
GroupingResult group_3dhv(const CorrespondenceSet& set, const AlgorithmParams& params, const Point3& source_centroid);
GroupingResult group_3dhv(const CorrespondenceSet& set, const AlgorithmParams& params, const PointCloud& source_cloud);

/// Search of inliers: local + global rigidity voting, Otsu-thresholded.
GroupingResult group_si(const CorrespondenceSet& set, const AlgorithmParams& params);

/// Dispatches by algorithm. 3DHV uses `source_cloud` when given, otherwise
/// the centroid of the correspondence source points.
GroupingResult run_grouping(Algorithm algorithm, const CorrespondenceSet& set, const AlgorithmParams& params,
                            const PointCloud* source_cloud = nullptr);

/// The vote location of a single correspondence for 3DHV (exposed for tests).
Eigen::Vector3d hough_vote(const Correspondence& c, const Point3& source_centroid);

/// Per-correspondence SI score s(c) in [0, 1] (exposed for tests).
std::vector<double> si_scores(const CorrespondenceSet& set, const AlgorithmParams& params);

}  // namespace corrgroup
