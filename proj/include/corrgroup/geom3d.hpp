#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace corrgroup {

using Point3 = Eigen::Vector3d;
using Points = std::vector<Point3>;

/// An ordered set of 3D points, optionally carrying its cached resolution
/// (mean nearest-neighbor distance, the "pr" length unit used everywhere
/// thresholds are expressed relative to sampling density).
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(Points points);

  const Points& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

  std::optional<double> cached_resolution() const { return resolution_; }

  /// Copy of this cloud with the exact resolution computed and cached.
  PointCloud with_resolution() const;

  /// Resolution, computing it when not cached.
  double resolution() const;

  Point3 centroid() const;

 private:
  Points points_;
  std::optional<double> resolution_;
};

/// Rigid motion in column-vector convention: p_out = rotation * p + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  Point3 operator()(const Point3& p) const { return rotation * p + translation; }

  RigidTransform inverse() const;
  /// (*this) after `other`: p -> this(other(p)).
  RigidTransform compose(const RigidTransform& other) const;

  /// True when rotation is orthonormal with det +1 within `tol`.
  bool is_proper(double tol = 1e-9) const;
};

/// Rotation-matrix distance used for transform recovery checks.
double rotation_frobenius_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// Rows are the x, y, z unit axes of the frame, so `axes * v` expresses a
/// global vector v in local coordinates.
struct LocalReferenceFrame {
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();

  bool is_valid(double tol = 1e-9) const;
};

struct ResolutionOptions {
  /// When set and the cloud is larger, the mean is taken over this many
  /// uniformly chosen query points (neighbors still searched in the full cloud).
  std::optional<std::size_t> subsample_cap;
  std::uint64_t seed = 0;
};

struct ResolutionEstimate {
  double value = 0.0;
  bool subsampled = false;
  std::size_t queries = 0;
};

/// Mean over all points of the distance to the nearest distinct neighbor.
/// Throws ValidationError("insufficient points for resolution") for < 2 points.
double compute_resolution(const PointCloud& cloud);
ResolutionEstimate estimate_resolution(const PointCloud& cloud, const ResolutionOptions& options);

PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud);

/// Least-squares rigid transform (Kabsch) taking `source` onto `target`.
/// Throws ComputationError("degenerate sample") when the point sets do not
/// pin down a rotation, ValidationError on size mismatch or < 3 points.
RigidTransform estimate_rigid_transform(std::span<const Point3> source, std::span<const Point3> target);

class NeighborIndex;

/// Covariance-based LRF on the points within `support_radius` of `center`.
/// Weight of a support point is (support_radius - distance). Axis z is the
/// least-variance direction, x the greatest, y = z cross x; x and z are
/// flipped to agree with the majority of support offsets.
LocalReferenceFrame estimate_lrf(const PointCloud& cloud, const Point3& center, double support_radius);
LocalReferenceFrame estimate_lrf(const NeighborIndex& index, const Point3& center, double support_radius);

}  // namespace corrgroup
