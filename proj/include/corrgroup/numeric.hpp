#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace corrgroup {

struct OtsuResult {
  double threshold = 0.0;
  /// All values equal: no split exists and `threshold` is that value.
  bool degenerate = false;
};

inline constexpr std::size_t kOtsuBins = 256;

/// Otsu's threshold over a 256-bin histogram spanning [min, max]. The
/// returned value is the bin edge e_k maximizing inter-class variance, with
/// class "high" being exactly the values v >= e_k. Ties pick the lowest edge.
OtsuResult otsu_threshold(std::span<const double> values);

/// Histogram bin of `v` for the Otsu binning of [lo, hi] (number of interior
/// edges <= v). Exposed so callers and tests share the exact discretization.
std::size_t otsu_bin(double v, double lo, double hi);
double otsu_edge(std::size_t k, double lo, double hi);

struct EigenPair {
  Eigen::VectorXd vector;
  double value = 0.0;
  std::size_t iterations = 0;
};

/// Principal eigenvector of a symmetric non-negative matrix by power
/// iteration from the uniform vector. The iteration runs on M + sI with
/// s = half the uniform Rayleigh quotient, which leaves eigenvectors intact
/// and keeps bipartite spectra (eigenvalue -lambda_max) from oscillating.
/// Converged when successive unit iterates differ by < 1e-10 (max-norm).
/// The zero matrix yields the zero vector and eigenvalue 0.
EigenPair principal_eigenvector(const Eigen::MatrixXd& m, double tolerance = 1e-10, std::size_t max_iterations = 10000);

using BinKey = std::array<std::int64_t, 3>;

/// Sparse 3D vote accumulator with cubic bins of side `bin_side`.
class HoughAccumulator {
 public:
  explicit HoughAccumulator(double bin_side);

  double bin_side() const { return bin_side_; }
  BinKey bin_of(const Eigen::Vector3d& v) const;
  void vote(const Eigen::Vector3d& v, std::size_t index);

  const std::map<BinKey, std::vector<std::size_t>>& bins() const { return bins_; }

  /// Bin with the most votes; ties resolved by the lexicographically smallest
  /// key. Empty accumulator returns an empty vote list.
  std::pair<BinKey, std::vector<std::size_t>> peak() const;

 private:
  double bin_side_;
  std::map<BinKey, std::vector<std::size_t>> bins_;
};

}  // namespace corrgroup
