#include <functional>
#include <map>

#include "corrgroup/error.hpp"
#include "corrgroup/synthbench.hpp"
#include "json.hpp"

namespace corrgroup {

using nlohmann::json;

namespace {

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  return j;
}

using Setter = std::function<void(const json&)>;

void apply(const json& j, const std::map<std::string, Setter>& setters, const char* what) {
  for (const auto& [key, v] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError(std::string(what) + ": unknown key '" + key + "'");
    try {
      it->second(v);
    } catch (const json::exception&) {
      throw ValidationError(std::string(what) + ": bad value for '" + key + "'");
    }
  }
}

Setter real(double& field) {
  return [&field](const json& v) {
    if (!v.is_number()) throw ValidationError("expected a number");
    field = v.get<double>();
  };
}

template <typename T>
Setter count(T& field) {
  return [&field](const json& v) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError("expected a non-negative integer");
    }
    field = v.get<T>();
  };
}

}  // namespace

std::string scene_recipe_to_json(const SceneRecipe& r) {
  json j;
  j["rotation_seed"] = r.rotation_seed;
  j["noise_sigma_pr"] = r.noise_sigma_pr;
  j["downsample_ratio"] = r.downsample_ratio;
  j["rng_seed"] = r.rng_seed;
  return j.dump();
}

SceneRecipe scene_recipe_from_json(const std::string& text) {
  SceneRecipe r;
  apply(parse_object(text, "scene recipe"),
        {{"rotation_seed", count(r.rotation_seed)},
         {"noise_sigma_pr", real(r.noise_sigma_pr)},
         {"downsample_ratio", real(r.downsample_ratio)},
         {"rng_seed", count(r.rng_seed)}},
        "scene recipe");
  r.validate();
  return r;
}

std::string correspondence_recipe_to_json(const CorrespondenceRecipe& r) {
  json j;
  j["n_total"] = r.n_total;
  j["inlier_ratio"] = r.inlier_ratio;
  j["inlier_jitter_pr"] = r.inlier_jitter_pr;
  j["outlier_min_offset_pr"] = r.outlier_min_offset_pr;
  j["outlier_max_offset_pr"] = r.outlier_max_offset_pr;
  j["lrf_noise_deg"] = r.lrf_noise_deg;
  j["lrf_support_pr"] = r.lrf_support_pr;
  j["similarity"] = {{"inlier_low", r.similarity.inlier_low},
                     {"inlier_high", r.similarity.inlier_high},
                     {"outlier_low", r.similarity.outlier_low},
                     {"outlier_high", r.similarity.outlier_high}};
  j["target_mode"] = r.target_mode == TargetMode::kSceneSnapped ? "scene-snapped" : "synthetic";
  j["rng_seed"] = r.rng_seed;
  return j.dump();
}

CorrespondenceRecipe correspondence_recipe_from_json(const std::string& text) {
  CorrespondenceRecipe r;
  auto similarity = [&r](const json& v) {
    if (!v.is_object()) throw ValidationError("correspondence recipe: 'similarity' must be an object");
    apply(v,
          {{"inlier_low", real(r.similarity.inlier_low)},
           {"inlier_high", real(r.similarity.inlier_high)},
           {"outlier_low", real(r.similarity.outlier_low)},
           {"outlier_high", real(r.similarity.outlier_high)}},
          "correspondence recipe similarity");
  };
  auto mode = [&r](const json& v) {
    const std::string m = v.get<std::string>();
    if (m == "synthetic") {
      r.target_mode = TargetMode::kSynthetic;
    } else if (m == "scene-snapped") {
      r.target_mode = TargetMode::kSceneSnapped;
    } else {
      throw ValidationError("correspondence recipe: unknown target_mode '" + m + "'");
    }
  };
  apply(parse_object(text, "correspondence recipe"),
        {{"n_total", count(r.n_total)},
         {"inlier_ratio", real(r.inlier_ratio)},
         {"inlier_jitter_pr", real(r.inlier_jitter_pr)},
         {"outlier_min_offset_pr", real(r.outlier_min_offset_pr)},
         {"outlier_max_offset_pr", real(r.outlier_max_offset_pr)},
         {"lrf_noise_deg", real(r.lrf_noise_deg)},
         {"lrf_support_pr", real(r.lrf_support_pr)},
         {"similarity", similarity},
         {"target_mode", mode},
         {"rng_seed", count(r.rng_seed)}},
        "correspondence recipe");
  r.validate();
  return r;
}

}  // namespace corrgroup
