#include "corrgroup/neighbor_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

namespace corrgroup {

namespace {

constexpr std::uint32_t kLeafSize = 16;

using Candidate = std::pair<double, std::size_t>;  // (squared distance, index)

std::vector<Neighbor> to_neighbors(std::vector<Candidate> found) {
  std::sort(found.begin(), found.end());
  std::vector<Neighbor> out;
  out.reserve(found.size());
  for (const auto& [d2, idx] : found) out.push_back({idx, std::sqrt(d2)});
  return out;
}

}  // namespace

NeighborIndex::NeighborIndex(Points points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0U);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::uint32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int dim = 0;
  (hi - lo).maxCoeff(&dim);
  if (hi[dim] == lo[dim]) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][dim] < points_[b][dim]; });
  const double split = points_[order_[mid]][dim];

  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.split_dim = dim;
  node.split_value = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<Neighbor> NeighborIndex::knn(const Point3& query, std::size_t k) const {
  if (k == 0 || points_.empty()) return {};
  k = std::min(k, points_.size());

  std::priority_queue<Candidate> heap;  // max-heap on (d2, index)
  auto worst = [&] { return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().first; };

  auto visit = [&](auto&& self, std::uint32_t id) -> void {
    const Node& node = nodes_[id];
    if (node.split_dim < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        const Candidate c{(points_[idx] - query).squaredNorm(), idx};
        if (heap.size() < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double diff = query[node.split_dim] - node.split_value;
    const std::uint32_t near_child = diff < 0 ? node.left : node.right;
    const std::uint32_t far_child = diff < 0 ? node.right : node.left;
    self(self, near_child);
    if (diff * diff <= worst()) self(self, far_child);
  };
  visit(visit, 0);

  std::vector<Candidate> found;
  found.reserve(heap.size());
  while (!heap.empty()) {
    found.push_back(heap.top());
    heap.pop();
  }
  return to_neighbors(std::move(found));
}

std::vector<Neighbor> NeighborIndex::radius_search(const Point3& query, double radius) const {
  if (points_.empty() || !(radius > 0)) return {};
  const double r2 = radius * radius;
  std::vector<Candidate> found;

  auto visit = [&](auto&& self, std::uint32_t id) -> void {
    const Node& node = nodes_[id];
    if (node.split_dim < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = (points_[idx] - query).squaredNorm();
        if (d2 <= r2) found.emplace_back(d2, idx);
      }
      return;
    }
    const double diff = query[node.split_dim] - node.split_value;
    const std::uint32_t near_child = diff < 0 ? node.left : node.right;
    const std::uint32_t far_child = diff < 0 ? node.right : node.left;
    self(self, near_child);
    if (diff * diff <= r2) self(self, far_child);
  };
  visit(visit, 0);
  return to_neighbors(std::move(found));
}

}  // namespace corrgroup
