#include "corrgroup/geom3d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "corrgroup/error.hpp"
#include "corrgroup/neighbor_index.hpp"

namespace corrgroup {

PointCloud::PointCloud(Points points) : points_(std::move(points)) {}

PointCloud PointCloud::with_resolution() const {
  PointCloud out = *this;
  out.resolution_ = compute_resolution(*this);
  return out;
}

double PointCloud::resolution() const { return resolution_ ? *resolution_ : compute_resolution(*this); }

Point3 PointCloud::centroid() const {
  Point3 sum = Point3::Zero();
  for (const auto& p : points_) sum += p;
  return points_.empty() ? sum : Point3(sum / static_cast<double>(points_.size()));
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  RigidTransform out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

bool RigidTransform::is_proper(double tol) const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  return (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

double rotation_frobenius_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) { return (a - b).norm(); }

bool LocalReferenceFrame::is_valid(double tol) const {
  const Eigen::Matrix3d gram = axes * axes.transpose();
  return (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol && std::abs(axes.determinant() - 1.0) <= tol;
}

namespace {

double nearest_other_distance(const NeighborIndex& index, std::size_t i) {
  for (const auto& n : index.knn(index.points()[i], 2)) {
    if (n.index != i) return n.distance;
  }
  return 0.0;
}

}  // namespace

double compute_resolution(const PointCloud& cloud) { return estimate_resolution(cloud, {}).value; }

ResolutionEstimate estimate_resolution(const PointCloud& cloud, const ResolutionOptions& options) {
  const std::size_t n = cloud.size();
  if (n < 2) throw ValidationError("insufficient points for resolution");

  std::vector<std::size_t> queries(n);
  std::iota(queries.begin(), queries.end(), std::size_t{0});
  ResolutionEstimate est;
  if (options.subsample_cap && *options.subsample_cap > 0 && n > *options.subsample_cap) {
    std::vector<std::size_t> picked;
    picked.reserve(*options.subsample_cap);
    std::mt19937_64 rng(options.seed);
    std::sample(queries.begin(), queries.end(), std::back_inserter(picked), *options.subsample_cap, rng);
    queries = std::move(picked);
    est.subsampled = true;
  }

  const NeighborIndex index(cloud);
  double sum = 0.0;
  for (std::size_t i : queries) sum += nearest_other_distance(index, i);
  est.queries = queries.size();
  est.value = sum / static_cast<double>(queries.size());
  return est;
}

PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud) {
  Points out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points()) out.push_back(t(p));
  return PointCloud(std::move(out));
}

RigidTransform estimate_rigid_transform(std::span<const Point3> source, std::span<const Point3> target) {
  if (source.size() != target.size()) throw ValidationError("point count mismatch in rigid fit");
  if (source.size() < 3) throw ValidationError("rigid fit needs at least 3 point pairs");

  const double n = static_cast<double>(source.size());
  Point3 cs = Point3::Zero();
  Point3 ct = Point3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    cs += source[i];
    ct += target[i];
  }
  cs /= n;
  ct /= n;

  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) h += (source[i] - cs) * (target[i] - ct).transpose();

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  // Rank 2 is enough to fix a proper rotation; rank <= 1 leaves a free axis.
  if (!(sv[0] > 0.0) || sv[1] < 1e-9 * sv[0]) throw ComputationError("degenerate sample");

  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = ct - t.rotation * cs;
  return t;
}

LocalReferenceFrame estimate_lrf(const PointCloud& cloud, const Point3& center, double support_radius) {
  return estimate_lrf(NeighborIndex(cloud), center, support_radius);
}

LocalReferenceFrame estimate_lrf(const NeighborIndex& index, const Point3& center, double support_radius) {
  if (!(support_radius > 0)) throw ValidationError("support radius must be positive");
  const auto support = index.radius_search(center, support_radius);
  if (support.size() < 5) throw ComputationError("insufficient support");

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double weight_sum = 0.0;
  for (const auto& n : support) {
    const double w = support_radius - n.distance;
    const Eigen::Vector3d d = index.points()[n.index] - center;
    cov += w * d * d.transpose();
    weight_sum += w;
  }
  if (!(weight_sum > 0)) throw ComputationError("ambiguous frame");
  cov /= weight_sum;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
  if (!(lambda[1] > 0) || lambda[0] / lambda[1] > 0.99 || lambda[1] / lambda[2] > 0.99) {
    throw ComputationError("ambiguous frame");
  }

  auto orient = [&](Eigen::Vector3d axis) {
    std::size_t negative = 0;
    for (const auto& n : support) {
      if ((index.points()[n.index] - center).dot(axis) < 0.0) ++negative;
    }
    if (2 * negative > support.size()) axis = -axis;
    return axis;
  };
  const Eigen::Vector3d x = orient(eig.eigenvectors().col(2));
  const Eigen::Vector3d z = orient(eig.eigenvectors().col(0));
  const Eigen::Vector3d y = z.cross(x);

  LocalReferenceFrame frame;
  frame.axes.row(0) = x.transpose();
  frame.axes.row(1) = y.transpose();
  frame.axes.row(2) = z.transpose();
  return frame;
}

}  // namespace corrgroup
