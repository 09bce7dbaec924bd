#include "corrgroup/params.hpp"

#include <cmath>

#include "corrgroup/error.hpp"
#include "json.hpp"

namespace corrgroup {

using nlohmann::json;

void AlgorithmParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
  };
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(name) + " must lie in [0, 1]");
  };
  if (t_ss) positive(*t_ss, "t_ss");
  positive(t_nnsr, "t_nnsr");
  unit(t_nnsr, "t_nnsr");
  if (n_ransac == 0) throw ValidationError("n_ransac must be positive");
  positive(d_ransac_pr, "d_ransac_pr");
  positive(t_st, "t_st");
  unit(t_st, "t_st");
  positive(t_gc_pr, "t_gc_pr");
  positive(hough_bin_pr, "hough_bin_pr");
  if (si_kappa == 0) throw ValidationError("si_kappa must be positive");
  positive(si_sigma, "si_sigma");
  unit(si_sigma, "si_sigma");
  positive(si_delta_pr, "si_delta_pr");
}

std::string params_to_json(const AlgorithmParams& p) {
  json j;
  j["t_ss"] = p.t_ss ? json(*p.t_ss) : json(nullptr);
  j["t_nnsr"] = p.t_nnsr;
  j["n_ransac"] = p.n_ransac;
  j["d_ransac_pr"] = p.d_ransac_pr;
  j["t_st"] = p.t_st;
  j["t_gc_pr"] = p.t_gc_pr;
  j["hough_bin_pr"] = p.hough_bin_pr;
  j["si_kappa"] = p.si_kappa;
  j["si_sigma"] = p.si_sigma;
  j["si_delta_pr"] = p.si_delta_pr;
  j["rng_seed"] = p.rng_seed;
  return j.dump();
}

AlgorithmParams params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("params: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("params: expected a JSON object");

  AlgorithmParams p;
  auto real = [](const json& v, const std::string& key) {
    if (!v.is_number()) throw ValidationError("params: '" + key + "' must be a number");
    return v.get<double>();
  };
  auto count = [](const json& v, const std::string& key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError("params: '" + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "t_ss") {
      p.t_ss = v.is_null() ? std::nullopt : std::optional<double>(real(v, key));
    } else if (key == "t_nnsr") {
      p.t_nnsr = real(v, key);
    } else if (key == "n_ransac") {
      p.n_ransac = count(v, key);
    } else if (key == "d_ransac_pr") {
      p.d_ransac_pr = real(v, key);
    } else if (key == "t_st") {
      p.t_st = real(v, key);
    } else if (key == "t_gc_pr") {
      p.t_gc_pr = real(v, key);
    } else if (key == "hough_bin_pr") {
      p.hough_bin_pr = real(v, key);
    } else if (key == "si_kappa") {
      p.si_kappa = count(v, key);
    } else if (key == "si_sigma") {
      p.si_sigma = real(v, key);
    } else if (key == "si_delta_pr") {
      p.si_delta_pr = real(v, key);
    } else if (key == "rng_seed") {
      p.rng_seed = count(v, key);
    } else {
      throw ValidationError("params: unknown key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

}  // namespace corrgroup
