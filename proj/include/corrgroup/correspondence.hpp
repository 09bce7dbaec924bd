#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "corrgroup/geom3d.hpp"

namespace corrgroup {

/// A hypothesized match p -> p' with its feature-space evidence.
struct Correspondence {
  Point3 source_point = Point3::Zero();
  Point3 target_point = Point3::Zero();
  /// 1 - L2 feature distance, clamped to [0, 1].
  double similarity = 0.0;
  /// Distance to the nearest and second-nearest target features.
  double nn_distance = 0.0;
  double second_nn_distance = 0.0;
  std::optional<LocalReferenceFrame> source_lrf;
  std::optional<LocalReferenceFrame> target_lrf;

  bool has_lrfs() const { return source_lrf.has_value() && target_lrf.has_value(); }
};

struct CorrespondenceSet {
  std::vector<Correspondence> items;
  double source_resolution_pr = 1.0;
  std::optional<RigidTransform> ground_truth;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  const Correspondence& operator[](std::size_t i) const { return items[i]; }

  bool all_have_lrfs() const;
  /// Throws ValidationError if any record breaks the type invariants.
  void validate() const;
};

struct GroupingResult {
  /// Sorted, unique indices into the input set.
  std::vector<std::size_t> inlier_indices;
  /// Algorithm-specific confidence, parallel to inlier_indices when present.
  std::optional<std::vector<double>> scores;
  std::optional<RigidTransform> transform;

  bool operator==(const GroupingResult& other) const;
};

/// Length-ratio rigidity of a correspondence pair, in [0, 1]. Zero when
/// either segment is degenerate (including both).
double rigidity_score(const Correspondence& c1, const Correspondence& c2);

struct Compatibility {
  double residual = 0.0;
  bool compatible = false;
};

/// | |p1 - p2| - |p1' - p2'| |, compatible when strictly below `t_gc`.
Compatibility distance_compatibility(const Correspondence& c1, const Correspondence& c2, double t_gc);

// Text format: header "#corrgroup v1 n=<count> pr=<value>", then one record
// per line: px py pz qx qy qz similarity nn d2nn [9 source-LRF] [9 target-LRF].
CorrespondenceSet load_correspondences(const std::filesystem::path& path);
CorrespondenceSet read_correspondences(std::istream& in);
void save_correspondences(const CorrespondenceSet& set, const std::filesystem::path& path);
void write_correspondences(const CorrespondenceSet& set, std::ostream& out);

/// Ground-truth sidecar: 12 numbers, row-major rotation then translation.
RigidTransform load_transform(const std::filesystem::path& path);
void save_transform(const RigidTransform& t, const std::filesystem::path& path);

}  // namespace corrgroup
