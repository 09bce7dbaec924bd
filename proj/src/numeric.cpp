#include "corrgroup/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "corrgroup/error.hpp"

namespace corrgroup {

double otsu_edge(std::size_t k, double lo, double hi) {
  return lo + static_cast<double>(k) * ((hi - lo) / static_cast<double>(kOtsuBins));
}

std::size_t otsu_bin(double v, double lo, double hi) {
  // Binary search over the interior edges e_1..e_255 so that
  // bin(v) >= k  <=>  v >= e_k holds exactly.
  std::size_t first = 1;
  std::size_t count = kOtsuBins - 1;
  while (count > 0) {
    const std::size_t step = count / 2;
    const std::size_t k = first + step;
    if (otsu_edge(k, lo, hi) <= v) {
      first = k + 1;
      count -= step + 1;
    } else {
      count = step;
    }
  }
  return first - 1;
}

OtsuResult otsu_threshold(std::span<const double> values) {
  if (values.empty()) throw ValidationError("otsu_threshold: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("otsu_threshold: non-finite input");
  if (lo == hi) return {lo, true};

  std::array<double, kOtsuBins> hist{};
  for (double v : values) hist[otsu_bin(v, lo, hi)] += 1.0;

  const double width = (hi - lo) / static_cast<double>(kOtsuBins);
  const double n = static_cast<double>(values.size());
  double total_moment = 0.0;
  for (std::size_t b = 0; b < kOtsuBins; ++b) total_moment += hist[b] * (lo + (static_cast<double>(b) + 0.5) * width);

  double w0 = 0.0;
  double m0 = 0.0;
  double best = -1.0;
  std::size_t best_k = 1;
  for (std::size_t k = 1; k < kOtsuBins; ++k) {
    w0 += hist[k - 1];
    m0 += hist[k - 1] * (lo + (static_cast<double>(k - 1) + 0.5) * width);
    const double w1 = n - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = m0 / w0;
    const double mu1 = (total_moment - m0) / w1;
    const double between = (w0 / n) * (w1 / n) * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return {otsu_edge(best_k, lo, hi), false};
}

EigenPair principal_eigenvector(const Eigen::MatrixXd& m, double tolerance, std::size_t max_iterations) {
  if (m.rows() != m.cols()) throw ValidationError("principal_eigenvector: matrix must be square");
  const auto n = m.rows();
  EigenPair out;
  if (n == 0) {
    out.vector = Eigen::VectorXd();
    return out;
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw ValidationError("principal_eigenvector: matrix is not symmetric");
  if (m.minCoeff() < 0.0) throw ValidationError("principal_eigenvector: matrix has negative entries");

  const double rayleigh_uniform = m.sum() / static_cast<double>(n);
  if (rayleigh_uniform == 0.0) {
    out.vector = Eigen::VectorXd::Zero(n);
    return out;
  }
  const double shift = 0.5 * rayleigh_uniform;

  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd next(n);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    next.noalias() = m * v;
    next += shift * v;
    next /= next.norm();
    const double change = (next - v).cwiseAbs().maxCoeff();
    v.swap(next);
    if (change < tolerance) {
      out.vector = v;
      out.value = v.dot(m * v);
      out.iterations = it;
      return out;
    }
  }
  throw ComputationError("eigen non-convergence");
}

HoughAccumulator::HoughAccumulator(double bin_side) : bin_side_(bin_side) {
  if (!(bin_side > 0.0) || !std::isfinite(bin_side)) throw ValidationError("Hough bin side must be positive");
}

BinKey HoughAccumulator::bin_of(const Eigen::Vector3d& v) const {
  BinKey key{};
  for (int a = 0; a < 3; ++a) key[a] = static_cast<std::int64_t>(std::floor(v[a] / bin_side_));
  return key;
}

void HoughAccumulator::vote(const Eigen::Vector3d& v, std::size_t index) { bins_[bin_of(v)].push_back(index); }

std::pair<BinKey, std::vector<std::size_t>> HoughAccumulator::peak() const {
  const std::pair<const BinKey, std::vector<std::size_t>>* best = nullptr;
  for (const auto& entry : bins_) {
    if (best == nullptr || entry.second.size() > best->second.size()) best = &entry;
  }
  if (best == nullptr) return {};
  return {best->first, best->second};
}

}  // namespace corrgroup
