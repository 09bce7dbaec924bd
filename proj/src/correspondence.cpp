#include "corrgroup/correspondence.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "corrgroup/error.hpp"

namespace corrgroup {

namespace {

constexpr double kLrfTolerance = 1e-6;

std::string line_error(std::size_t line, const std::string& what) { return "line " + std::to_string(line) + ": " + what; }

bool parse_real(const std::string& token, double& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size() && !token.empty() && errno != ERANGE && std::isfinite(out);
}

void put_real(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

void check_record(const Correspondence& c, const std::string& where) {
  auto fail = [&](const std::string& msg) { throw ValidationError(where.empty() ? msg : where + ": " + msg); };
  if (!c.source_point.allFinite() || !c.target_point.allFinite()) fail("non-finite coordinate");
  if (!std::isfinite(c.similarity) || c.similarity < 0.0 || c.similarity > 1.0) fail("similarity outside [0, 1]");
  if (!(c.nn_distance >= 0.0) || !(c.second_nn_distance >= 0.0)) fail("negative feature distance");
  if (c.nn_distance > c.second_nn_distance) fail("nn_distance exceeds second_nn_distance");
  if (c.source_lrf.has_value() != c.target_lrf.has_value()) fail("LRFs must be given for both sides or neither");
  if (c.source_lrf && (!c.source_lrf->is_valid(kLrfTolerance) || !c.target_lrf->is_valid(kLrfTolerance))) {
    fail("LRF is not a right-handed orthonormal frame");
  }
}

}  // namespace

bool CorrespondenceSet::all_have_lrfs() const {
  for (const auto& c : items) {
    if (!c.has_lrfs()) return false;
  }
  return true;
}

void CorrespondenceSet::validate() const {
  if (!(source_resolution_pr > 0.0) || !std::isfinite(source_resolution_pr)) {
    throw ValidationError("source resolution must be positive and finite");
  }
  for (std::size_t i = 0; i < items.size(); ++i) check_record(items[i], "item " + std::to_string(i));
  if (ground_truth && !ground_truth->is_proper(1e-6)) throw ValidationError("ground truth rotation is not proper");
}

bool GroupingResult::operator==(const GroupingResult& other) const {
  if (inlier_indices != other.inlier_indices || scores != other.scores) return false;
  if (transform.has_value() != other.transform.has_value()) return false;
  return !transform ||
         (transform->rotation == other.transform->rotation && transform->translation == other.transform->translation);
}

double rigidity_score(const Correspondence& c1, const Correspondence& c2) {
  const double ds = (c1.source_point - c2.source_point).norm();
  const double dt = (c1.target_point - c2.target_point).norm();
  if (ds == 0.0 || dt == 0.0) return 0.0;
  return std::min(ds / dt, dt / ds);
}

Compatibility distance_compatibility(const Correspondence& c1, const Correspondence& c2, double t_gc) {
  const double ds = (c1.source_point - c2.source_point).norm();
  const double dt = (c1.target_point - c2.target_point).norm();
  Compatibility out;
  out.residual = std::abs(ds - dt);
  out.compatible = out.residual < t_gc;
  return out;
}

CorrespondenceSet load_correspondences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open correspondence file: " + path.string());
  return read_correspondences(in);
}

CorrespondenceSet read_correspondences(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ValidationError(line_error(1, "missing header"));
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t declared = 0;
  double pr = 0.0;
  {
    std::istringstream hs(line);
    std::string magic, version, n_field, pr_field;
    hs >> magic >> version >> n_field >> pr_field;
    if (magic != "#corrgroup" || version != "v1" || n_field.rfind("n=", 0) != 0 || pr_field.rfind("pr=", 0) != 0) {
      throw ValidationError(line_error(1, "expected header '#corrgroup v1 n=<count> pr=<value>'"));
    }
    char* end = nullptr;
    const std::string count_text = n_field.substr(2);
    declared = std::strtoull(count_text.c_str(), &end, 10);
    if (count_text.empty() || *end != '\0') throw ValidationError(line_error(1, "bad record count"));
    if (!parse_real(pr_field.substr(3), pr) || !(pr > 0.0)) throw ValidationError(line_error(1, "bad resolution"));
  }

  CorrespondenceSet set;
  set.source_resolution_pr = pr;
  set.items.reserve(declared);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::istringstream ls(line);
    std::vector<double> v;
    std::string token;
    while (ls >> token) {
      double x = 0.0;
      if (!parse_real(token, x)) throw ValidationError(line_error(line_no, "malformed number '" + token + "'"));
      v.push_back(x);
    }
    if (v.size() != 9 && v.size() != 27) {
      throw ValidationError(line_error(line_no, "expected 9 or 27 fields, got " + std::to_string(v.size())));
    }

    Correspondence c;
    c.source_point = Point3(v[0], v[1], v[2]);
    c.target_point = Point3(v[3], v[4], v[5]);
    c.similarity = v[6];
    c.nn_distance = v[7];
    c.second_nn_distance = v[8];
    if (v.size() == 27) {
      LocalReferenceFrame s;
      LocalReferenceFrame t;
      for (int k = 0; k < 9; ++k) {
        s.axes(k / 3, k % 3) = v[9 + k];
        t.axes(k / 3, k % 3) = v[18 + k];
      }
      c.source_lrf = s;
      c.target_lrf = t;
    }
    check_record(c, "line " + std::to_string(line_no));
    set.items.push_back(std::move(c));
  }
  if (set.items.size() != declared) {
    throw ValidationError("header declares " + std::to_string(declared) + " records, file has " +
                          std::to_string(set.items.size()));
  }
  return set;
}

void save_correspondences(const CorrespondenceSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write correspondence file: " + path.string());
  write_correspondences(set, out);
  if (!out) throw ComputationError("failed writing correspondence file: " + path.string());
}

void write_correspondences(const CorrespondenceSet& set, std::ostream& out) {
  out << "#corrgroup v1 n=" << set.items.size() << " pr=";
  put_real(out, set.source_resolution_pr);
  out << '\n';
  for (const auto& c : set.items) {
    auto put = [&](double v, bool first = false) {
      if (!first) out << ' ';
      put_real(out, v);
    };
    put(c.source_point.x(), true);
    put(c.source_point.y());
    put(c.source_point.z());
    put(c.target_point.x());
    put(c.target_point.y());
    put(c.target_point.z());
    put(c.similarity);
    put(c.nn_distance);
    put(c.second_nn_distance);
    if (c.has_lrfs()) {
      for (int k = 0; k < 9; ++k) put(c.source_lrf->axes(k / 3, k % 3));
      for (int k = 0; k < 9; ++k) put(c.target_lrf->axes(k / 3, k % 3));
    }
    out << '\n';
  }
}

RigidTransform load_transform(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open transform file: " + path.string());
  std::vector<double> v;
  std::string token;
  while (in >> token) {
    double x = 0.0;
    if (!parse_real(token, x)) throw ValidationError("transform file: malformed number '" + token + "'");
    v.push_back(x);
  }
  if (v.size() != 12) throw ValidationError("transform file must hold 12 numbers, got " + std::to_string(v.size()));
  RigidTransform t;
  for (int k = 0; k < 9; ++k) t.rotation(k / 3, k % 3) = v[k];
  t.translation = Eigen::Vector3d(v[9], v[10], v[11]);
  if (!t.is_proper(1e-6)) throw ValidationError("transform file: rotation is not proper");
  return t;
}

void save_transform(const RigidTransform& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write transform file: " + path.string());
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      put_real(out, t.rotation(r, c));
      out << (c == 2 ? '\n' : ' ');
    }
  }
  put_real(out, t.translation.x());
  out << ' ';
  put_real(out, t.translation.y());
  out << ' ';
  put_real(out, t.translation.z());
  out << '\n';
}

}  // namespace corrgroup
