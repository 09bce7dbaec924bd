#include <doctest.h>

#include <Eigen/Geometry>
#include <random>

#include "corrgroup/error.hpp"
#include "corrgroup/geom3d.hpp"
#include "corrgroup/neighbor_index.hpp"
#include "corrgroup/synthbench.hpp"
#include "oracles.hpp"

using namespace corrgroup;

namespace {

Eigen::Matrix3d rot_z(double angle) { return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix(); }

Points random_points(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Points pts(n);
  for (auto& p : pts) p = Point3(u(rng), u(rng), u(rng));
  return pts;
}

// Anisotropic elliptic paraboloid patch: distinct variances along all axes.
PointCloud anisotropic_patch() {
  Points pts;
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      const double x = 0.05 * i, y = 0.03 * j;
      pts.emplace_back(x, y, 0.4 * x * x + 0.1 * y * y + 0.02 * x);
    }
  }
  return PointCloud(pts);
}

}  // namespace

TEST_CASE("resolution of a unit grid is the spacing") {
  Points pts;
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      for (int z = 0; z < 5; ++z) pts.emplace_back(x, y, z);
  CHECK(compute_resolution(PointCloud(pts)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("resolution of two points is their distance") {
  CHECK(compute_resolution(PointCloud({Point3(0, 0, 0), Point3(0, 3, 0)})) == 3.0);
}

TEST_CASE("resolution matches brute force on a sphere") {
  const PointCloud sphere = make_test_model(ModelKind::kSphere, 1000, 5);
  CHECK(std::abs(compute_resolution(sphere) - oracle::resolution(sphere.points())) <= 1e-12);
  CHECK(sphere.with_resolution().cached_resolution().has_value());
}

TEST_CASE("resolution needs two points") {
  CHECK_THROWS_WITH_AS(compute_resolution(PointCloud({Point3(1, 2, 3)})), "insufficient points for resolution",
                       ValidationError);
  CHECK_THROWS_AS(compute_resolution(PointCloud()), ValidationError);
}

TEST_CASE("subsampled resolution estimate") {
  const PointCloud sphere = make_test_model(ModelKind::kSphere, 2000, 2);
  ResolutionOptions opts;
  const auto exact = estimate_resolution(sphere, opts);
  CHECK_FALSE(exact.subsampled);
  CHECK(exact.value == compute_resolution(sphere));
  opts.subsample_cap = 500;
  opts.seed = 3;
  const auto est = estimate_resolution(sphere, opts);
  CHECK(est.subsampled);
  CHECK(est.queries == 500);
  CHECK(est.value == doctest::Approx(exact.value).epsilon(0.1));
  CHECK(estimate_resolution(sphere, opts).value == est.value);
}

TEST_CASE("apply_transform basics") {
  const PointCloud cloud({Point3(1, 2, 3), Point3(1, 0, 0)});
  const PointCloud same = apply_transform(RigidTransform::identity(), cloud);
  CHECK(same[0] == cloud[0]);
  RigidTransform shift;
  shift.translation = Eigen::Vector3d(0, 0, 5);
  CHECK(apply_transform(shift, cloud)[0] == Point3(1, 2, 8));
  RigidTransform rz{rot_z(M_PI / 2), Eigen::Vector3d::Zero()};
  CHECK((apply_transform(rz, cloud)[1] - Point3(0, 1, 0)).norm() <= 1e-12);
}

TEST_CASE("apply_transform preserves pairwise distances") {
  const Points pts = random_points(50, 9);
  const RigidTransform t{random_rotation(4), Eigen::Vector3d(1, -2, 0.5)};
  const PointCloud moved = apply_transform(t, PointCloud(pts));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      CHECK(std::abs((pts[i] - pts[j]).norm() - (moved[i] - moved[j]).norm()) <= 1e-9);
}

TEST_CASE("transform algebra") {
  const RigidTransform a{random_rotation(1), Eigen::Vector3d(1, 2, 3)};
  const RigidTransform b{random_rotation(2), Eigen::Vector3d(-1, 0, 4)};
  const Point3 p(0.3, -0.7, 2.0);
  CHECK((a.compose(b)(p) - a(b(p))).norm() <= 1e-12);
  CHECK((a.inverse()(a(p)) - p).norm() <= 1e-12);
  CHECK(a.is_proper());
  RigidTransform reflect;
  reflect.rotation(2, 2) = -1;
  CHECK_FALSE(reflect.is_proper());
  CHECK(rotation_frobenius_distance(a.rotation, a.rotation) == 0.0);
}

TEST_CASE("rigid fit of identical sets is the identity") {
  const Points pts = random_points(10, 1);
  const RigidTransform t = estimate_rigid_transform(pts, pts);
  CHECK((t.rotation - Eigen::Matrix3d::Identity()).norm() <= 1e-9);
  CHECK(t.translation.norm() <= 1e-9);
}

TEST_CASE("rigid fit recovers a known transform") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Points src = random_points(3 + seed, seed + 100);
    const RigidTransform truth{random_rotation(seed), Eigen::Vector3d(seed * 0.1, -1.0, 2.0)};
    Points dst;
    for (const auto& p : src) dst.push_back(truth(p));
    const RigidTransform t = estimate_rigid_transform(src, dst);
    CHECK((t.rotation - truth.rotation).norm() <= 1e-9);
    CHECK((t.translation - truth.translation).norm() <= 1e-9);
    CHECK(t.is_proper());
  }
}

TEST_CASE("rigid fit never returns a reflection") {
  const Points src = random_points(8, 3);
  Points dst;
  for (const auto& p : src) dst.emplace_back(p.x(), p.y(), -p.z());
  const RigidTransform t = estimate_rigid_transform(src, dst);
  CHECK(t.rotation.determinant() == doctest::Approx(1.0));
}

TEST_CASE("rigid fit errors") {
  const Points line = {Point3(0, 0, 0), Point3(1, 1, 1), Point3(2, 2, 2)};
  CHECK_THROWS_WITH_AS(estimate_rigid_transform(line, line), "degenerate sample", ComputationError);
  const Points two = {Point3(0, 0, 0), Point3(1, 0, 0)};
  CHECK_THROWS_AS(estimate_rigid_transform(two, two), ValidationError);
  const Points three = random_points(3, 1);
  const Points four = random_points(4, 1);
  CHECK_THROWS_AS(estimate_rigid_transform(three, four), ValidationError);
}

TEST_CASE("LRF of a planar disc has its z axis along the normal") {
  Points pts;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  while (pts.size() < 400) {
    const double x = u(rng), y = 0.6 * u(rng);
    if (x * x + y * y <= 1) pts.emplace_back(x, y, 0);
  }
  const LocalReferenceFrame f = estimate_lrf(PointCloud(pts), Point3::Zero(), 1.0);
  CHECK(f.is_valid());
  CHECK(std::abs(std::abs(f.axes.row(2).dot(Eigen::RowVector3d(0, 0, 1))) - 1.0) <= 1e-6);
}

TEST_CASE("LRF is repeatable under rigid motion") {
  const PointCloud patch = anisotropic_patch();
  const Point3 center(0.0, 0.0, 0.0);
  const LocalReferenceFrame f = estimate_lrf(patch, center, 0.8);
  CHECK(f.is_valid());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RigidTransform q{random_rotation(seed), Eigen::Vector3d(1, 2, -3)};
    const LocalReferenceFrame g = estimate_lrf(apply_transform(q, patch), q(center), 0.8);
    // Rows transform as axes: g = f * q^T.
    CHECK((g.axes - f.axes * q.rotation.transpose()).norm() <= 1e-6);
  }
  const NeighborIndex index(patch);
  CHECK((estimate_lrf(index, center, 0.8).axes - f.axes).norm() <= 1e-15);
}

TEST_CASE("LRF errors") {
  const PointCloud few({Point3(0, 0, 0), Point3(0.1, 0, 0), Point3(0, 0.1, 0)});
  CHECK_THROWS_WITH_AS(estimate_lrf(few, Point3::Zero(), 1.0), "insufficient support", ComputationError);
  // Octahedron vertices around their center have an isotropic scatter.
  const PointCloud octa({Point3(1, 0, 0), Point3(-1, 0, 0), Point3(0, 1, 0), Point3(0, -1, 0), Point3(0, 0, 1),
                         Point3(0, 0, -1)});
  CHECK_THROWS_WITH_AS(estimate_lrf(octa, Point3::Zero(), 2.0), "ambiguous frame", ComputationError);
  CHECK_THROWS_AS(estimate_lrf(octa, Point3::Zero(), 0.0), ValidationError);
}
