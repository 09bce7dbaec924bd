// Hand-built correspondence sets with known ground truth.
#pragma once

#include <random>
#include <vector>

#include "corrgroup/correspondence.hpp"
#include "corrgroup/synthbench.hpp"

namespace fixture {

using namespace corrgroup;

struct Labeled {
  CorrespondenceSet set;
  std::vector<bool> inlier;
};

inline Correspondence make_item(const Point3& p, const Point3& q, double sim = 0.5) {
  Correspondence c;
  c.source_point = p;
  c.target_point = q;
  c.similarity = sim;
  c.nn_distance = 1.0 - sim;
  c.second_nn_distance = 1.0;
  return c;
}

// Exact inliers (target = gt(p), target frame = source frame rotated by gt)
// followed by outliers whose targets are at least `min_offset_pr` pr away
// from gt(p) and whose target frames are random. Source points are uniform
// in a cube of side 2; pr is fixed to 0.01.
inline Labeled exact_set(std::size_t n_in, std::size_t n_out, std::uint64_t seed, double min_offset_pr = 10.0,
                         double max_offset_pr = 60.0, bool lrfs = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> offset(min_offset_pr, max_offset_pr);
  std::normal_distribution<double> gauss;
  Labeled out;
  out.set.source_resolution_pr = 0.01;
  const RigidTransform gt{random_rotation(derive_seed(seed, 1)), Eigen::Vector3d(u(rng), u(rng), u(rng))};
  out.set.ground_truth = gt;
  for (std::size_t i = 0; i < n_in + n_out; ++i) {
    const Point3 p(u(rng), u(rng), u(rng));
    const bool is_in = i < n_in;
    Point3 q = gt(p);
    if (!is_in) {
      Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
      q += dir.normalized() * offset(rng) * out.set.source_resolution_pr;
    }
    Correspondence c = make_item(p, q, is_in ? 0.9 : 0.3);
    if (lrfs) {
      const Eigen::Matrix3d src = random_rotation(derive_seed(seed, 2, i));
      c.source_lrf = LocalReferenceFrame{src};
      c.target_lrf = LocalReferenceFrame{is_in ? Eigen::Matrix3d(src * gt.rotation.transpose())
                                               : random_rotation(derive_seed(seed, 3, i))};
    }
    out.set.items.push_back(c);
    out.inlier.push_back(is_in);
  }
  return out;
}

inline std::vector<std::size_t> true_indices(const Labeled& l) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < l.inlier.size(); ++i)
    if (l.inlier[i]) idx.push_back(i);
  return idx;
}

}  // namespace fixture
