#include <doctest.h>

#include <random>

#include "corrgroup/neighbor_index.hpp"
#include "oracles.hpp"

using namespace corrgroup;

namespace {

Points cloud(std::size_t n, std::uint64_t seed, bool lattice = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> g(-3, 3);
  Points pts(n);
  for (auto& p : pts) p = lattice ? Point3(g(rng), g(rng), g(rng)) : Point3(u(rng), u(rng), u(rng));
  return pts;
}

void check_same(const std::vector<Neighbor>& got, const std::vector<std::pair<std::size_t, double>>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].index == want[i].first);
    CHECK(got[i].distance == want[i].second);
  }
}

}  // namespace

TEST_CASE("knn at an existing point returns it") {
  const Points pts = cloud(100, 1);
  const NeighborIndex index(pts);
  const auto r = index.knn(pts[17], 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0].index == 17);
  CHECK(r[0].distance == 0.0);
}

TEST_CASE("radius below every distance is empty") {
  const Points pts = cloud(100, 2);
  CHECK(NeighborIndex(pts).radius_search(Point3(5, 5, 5), 0.5).empty());
}

TEST_CASE("k beyond the size returns everything") {
  const Points pts = cloud(20, 3);
  CHECK(NeighborIndex(pts).knn(Point3::Zero(), 100).size() == 20);
  CHECK(NeighborIndex().knn(Point3::Zero(), 3).empty());
}

TEST_CASE("knn and radius match a linear scan") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Points pts = cloud(500, seed);
    const NeighborIndex index(pts);
    const Points queries = cloud(50, seed + 1000);
    for (const auto& q : queries) {
      check_same(index.knn(q, 10), oracle::knn(pts, q, 10));
      check_same(index.radius_search(q, 0.3), oracle::radius(pts, q, 0.3));
    }
  }
}

TEST_CASE("ties are broken by index") {
  // Many duplicates on a small lattice.
  const Points pts = cloud(600, 7, true);
  const NeighborIndex index(pts);
  for (const auto& q : cloud(40, 8, true)) {
    check_same(index.knn(q, 25), oracle::knn(pts, q, 25));
    check_same(index.radius_search(q, 1.0), oracle::radius(pts, q, 1.0));
  }
}
