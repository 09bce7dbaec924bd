#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "corrgroup/geom3d.hpp"

namespace corrgroup {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Static kd-tree over a point set. Results are exactly those of a linear
/// scan: ordered by ascending distance, ties broken by point index.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  explicit NeighborIndex(Points points);
  explicit NeighborIndex(const PointCloud& cloud) : NeighborIndex(cloud.points()) {}

  std::size_t size() const { return points_.size(); }
  const Points& points() const { return points_; }

  /// The k nearest points (all points when k exceeds the size).
  std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;

  /// All points with distance <= radius.
  std::vector<Neighbor> radius_search(const Point3& query, double radius) const;

 private:
  struct Node {
    // Leaf when split_dim < 0; children stored at left/right.
    std::int32_t split_dim = -1;
    double split_value = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  Points points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace corrgroup
