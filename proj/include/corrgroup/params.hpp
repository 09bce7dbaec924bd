#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace corrgroup {

/// Grouping parameters. Lengths suffixed `_pr` are multiples of the source
/// resolution. Defaults follow the reference evaluation settings.
struct AlgorithmParams {
  std::optional<double> t_ss;  ///< absent = Otsu-adaptive
  double t_nnsr = 0.8;
  std::uint64_t n_ransac = 10000;
  double d_ransac_pr = 5.0;
  double t_st = 0.6;
  double t_gc_pr = 3.0;
  double hough_bin_pr = 5.0;
  std::uint64_t si_kappa = 250;
  double si_sigma = 0.9;
  double si_delta_pr = 5.0;
  std::uint64_t rng_seed = 0;

  /// Throws ValidationError when a field is out of range.
  void validate() const;

  bool operator==(const AlgorithmParams&) const = default;
};

/// Flat JSON object with exactly the field names above; unknown keys are
/// rejected and missing keys keep their defaults. `t_ss: null` means adaptive.
std::string params_to_json(const AlgorithmParams& params);
AlgorithmParams params_from_json(const std::string& text);

}  // namespace corrgroup
