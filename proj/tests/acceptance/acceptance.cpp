// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corrgroup/evaluation.hpp"
#include "corrgroup/grouping.hpp"
#include "corrgroup/numeric.hpp"
#include "corrgroup/report.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace corrgroup;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1: numeric helpers against dense / exhaustive oracles.
Outcome numeric_oracles() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = u(rng);
    const auto r = principal_eigenvector(m);
    const auto [v, value] = oracle::principal(m);
    const double err = std::max((r.vector - v).cwiseAbs().maxCoeff(), std::abs(r.value - value));
    worst = std::max(worst, err);
    if (err > 1e-6) o.fail(fmt("eigen trial %.0f error %.3g", trial, err));
  }
  int otsu_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(std::uniform_int_distribution<std::size_t>(1, 400)(rng));
    const int kind = trial % 3;
    for (auto& x : v) {
      if (kind == 0) x = u(rng);
      else if (kind == 1) x = u(rng) < 0.4 ? 0.2 + 0.05 * u(rng) : 0.8 + 0.1 * u(rng);
      else x = std::floor(u(rng) * 5) / 5;
    }
    const OtsuResult r = otsu_threshold(v);
    const auto e = oracle::otsu(v);
    if (r.threshold != e.threshold || r.degenerate != e.degenerate) ++otsu_mismatch;
  }
  if (otsu_mismatch) o.fail(fmt("otsu mismatches %.0f", otsu_mismatch));
  if (o.pass) o.detail = fmt("eigen max error %.3g; otsu 100/100 exact", worst);
  return o;
}

// 2: GC equals the all-seed maximal cluster oracle.
Outcome gc_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  int equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const auto n_in = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    const auto l = fixture::exact_set(n_in, n - n_in, derive_seed(500, trial), 1, 8, false);
    const auto got = group_gc(l.set, AlgorithmParams{}).inlier_indices;
    if (got == oracle::gc(l.set.items, 3 * l.set.source_resolution_pr)) ++equal;
  }
  if (equal != 100) o.fail(fmt("%.0f/100 equal", equal));
  else o.detail = "100/100 equal";
  return o;
}

// 3: RANSAC recovery on synthetic sets.
Outcome ransac_recovery() {
  Outcome o;
  InstanceRecipe recipe;
  // A dense model keeps one pr of jitter small against the object extent.
  recipe.model_points = 500000;
  recipe.correspondences.n_total = 500;
  recipe.correspondences.inlier_ratio = 0.2;
  const PointCloud model = build_model(recipe);
  const double pr = *model.cached_resolution();
  double min_p = 1, min_r = 1, max_rot = 0, max_tr = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_instance(model, recipe, AlgorithmParams{}, derive_seed(3000, seed));
    const auto& set = inst.correspondences.set;
    const GroupingResult g = group_ransac(set, inst.params);
    const EvaluationRecord r = score(g, set);
    const double p = r.precision.value_or(0), rc = r.recall.value_or(0);
    min_p = std::min(min_p, p);
    min_r = std::min(min_r, rc);
    if (!g.transform) {
      o.fail(fmt("seed %.0f: no transform", static_cast<double>(seed)));
      continue;
    }
    const double rot = (g.transform->rotation - set.ground_truth->rotation).norm();
    const double tr = (g.transform->translation - set.ground_truth->translation).norm() / pr;
    max_rot = std::max(max_rot, rot);
    max_tr = std::max(max_tr, tr);
    if (p < 0.95 || rc < 0.90) o.fail(fmt("seed %.0f: precision %.3f recall %.3f", static_cast<double>(seed), p, rc));
    if (rot > 1e-3 || tr > 0.5) o.fail(fmt("seed %.0f: rotation %.3g translation %.3g pr", static_cast<double>(seed), rot, tr));
  }
  const std::string summary = fmt("min precision %.3f, min recall %.3f, max rotation err %.3g, max translation %.3g pr",
                                  min_p, min_r, max_rot, max_tr);
  o.detail = o.pass ? summary : o.detail + "; " + summary;
  return o;
}

// 4: 3DHV votes coincide for exact inliers; the peak holds no outlier.
Outcome hough_exactness() {
  Outcome o;
  InstanceRecipe recipe;
  recipe.correspondences.inlier_jitter_pr = 0.0;
  recipe.correspondences.lrf_noise_deg = 0.0;
  const PointCloud model = build_model(recipe);
  const Point3 centroid = model.centroid();
  double spread = 0;
  std::size_t min_peak = SIZE_MAX;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    recipe.correspondences.n_total = 20;
    recipe.correspondences.inlier_ratio = 1.0;
    const auto clean = generate_instance(model, recipe, AlgorithmParams{}, derive_seed(4000, seed));
    const auto& cs = clean.correspondences.set;
    const Eigen::Vector3d first = hough_vote(cs[0], centroid);
    for (const auto& c : cs.items) spread = std::max(spread, (hough_vote(c, centroid) - first).norm());
    if (group_3dhv(cs, clean.params, centroid).inlier_indices.size() != cs.size()) o.fail("clean votes split across bins");

    recipe.correspondences.n_total = 40;
    recipe.correspondences.inlier_ratio = 0.5;
    const auto noisy = generate_instance(model, recipe, AlgorithmParams{}, derive_seed(4100, seed));
    const GroupingResult g = group_3dhv(noisy.correspondences.set, noisy.params, centroid);
    std::size_t inliers = 0;
    for (std::size_t i : g.inlier_indices) {
      if (!noisy.correspondences.is_inlier[i]) o.fail(fmt("seed %.0f: outlier in peak bin", static_cast<double>(seed)));
      else ++inliers;
    }
    min_peak = std::min(min_peak, inliers);
  }
  if (spread > 1e-9) o.fail(fmt("vote spread %.3g", spread));
  const std::string summary = fmt("vote spread %.3g; smallest peak %.0f inliers", spread, static_cast<double>(min_peak));
  o.detail = o.pass ? summary : o.detail + "; " + summary;
  return o;
}

// 5: precision never drops as epsilon loosens.
Outcome epsilon_monotone() {
  Outcome o;
  SweepPlan plan;
  plan.axis = SweepAxis::kEpsilon;
  plan.levels = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  plan.seed = 5;
  const auto records = run_sweep(plan, kAllAlgorithms);
  std::map<std::string, std::vector<std::optional<double>>> by_algo;
  for (const auto& r : records) by_algo[r.algorithm].push_back(r.precision);
  std::string detail;
  for (const auto& [name, ps] : by_algo) {
    for (std::size_t i = 1; i < ps.size(); ++i) {
      if (ps[i].has_value() != ps[i - 1].has_value() || (ps[i] && *ps[i] < *ps[i - 1]))
        o.fail(name + " precision drops at level " + std::to_string(i + 2));
    }
    detail += name + fmt(" %.3f->%.3f ", ps.front().value_or(NAN), ps.back().value_or(NAN));
  }
  o.detail = o.pass ? detail : o.detail + "; " + detail;
  return o;
}

// 6: mean precision and recall at ratio 0.9 exceed those at 0.1.
Outcome degradation_trend() {
  Outcome o;
  SweepPlan plan;
  plan.axis = SweepAxis::kInlierRatio;
  plan.levels = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  plan.trials_per_level = 20;
    plan.seed = 6;
  const auto records = run_sweep(plan, kAllAlgorithms);
  std::string detail, failed;
  for (Metric m : {Metric::kPrecision, Metric::kRecall}) {
    const char* metric = m == Metric::kPrecision ? "precision" : "recall";
    for (const Series& s : aggregate(records, m)) {
      const auto lo = s.points.front().mean, hi = s.points.back().mean;
      detail += s.algorithm + " " + metric + fmt(" %.4f@0.1 %.4f@0.9; ", lo.value_or(NAN), hi.value_or(NAN));
      if (!lo || !hi || !(*hi > *lo)) failed += (failed.empty() ? "" : ", ") + s.algorithm + " " + metric;
    }
  }
  if (!failed.empty()) o.fail("not exceeding: " + failed);
  o.detail = o.pass ? detail : o.detail + " | " + detail;
  return o;
}

// 7: ST and RANSAC are the slow ones.
Outcome timing_ordering() {
  Outcome o;
  BenchPlan plan;
  plan.sizes = {2000};
  plan.repeats = 10;
  plan.seed = 7;
  const auto rows = time_algorithms(plan, kAllAlgorithms);
  std::ostringstream table;
  write_timing_csv(rows, table);
  std::printf("%s", table.str().c_str());
  std::map<std::string, double> mean;
  for (const auto& r : rows) mean[r.algorithm] = r.mean_wall_time_ns;
  if (!(mean["st"] > 2 * mean["nnsr"])) o.fail("st not above 2x nnsr");
  if (!(mean["ransac"] > 2 * mean["nnsr"])) o.fail("ransac not above 2x nnsr");
  const std::string summary = fmt("st %.3g ms, ransac %.3g ms, nnsr %.3g ms", mean["st"] / 1e6, mean["ransac"] / 1e6,
                                  mean["nnsr"] / 1e6);
  o.detail = o.pass ? summary : o.detail + "; " + summary;
  return o;
}

// 8: judge boundary and precision/recall identities on hand-built sets.
Outcome arithmetic() {
  Outcome o;
  using fixture::make_item;
  const RigidTransform id;
  if (!judge(make_item({0, 0, 0}, {0, 2, 0}), id, 2.0)) o.fail("judge excludes the boundary");
  if (judge(make_item({0, 0, 0}, {0, 2, 0}), id, std::nextafter(2.0, 0.0))) o.fail("judge accepts beyond epsilon");
  if (!judge(make_item({1, 1, 1}, {1, 1, 1}), id, 1e-300)) o.fail("judge rejects an exact match");

  // 20 ground-truth inliers (residual 0) and 20 outliers (residual 10, pr 1).
  CorrespondenceSet set;
  set.source_resolution_pr = 1.0;
  set.ground_truth = id;
  for (int i = 0; i < 40; ++i) set.items.push_back(make_item(Point3(i, 0, 0), Point3(i, i < 20 ? 0 : 10, 0)));
  auto result = [](std::vector<std::size_t> idx) {
    GroupingResult g;
    g.inlier_indices = std::move(idx);
    return g;
  };
  const auto r = score(result({0, 1, 2, 3, 4, 20, 21, 22, 23, 24}), set, 4.0);
  if (r.n_gt_inliers != 20 || r.n_correct != 5 || *r.precision != 0.5 || *r.recall != 0.25) o.fail("10/5/20 arithmetic");
  const auto empty = score(result({}), set, 4.0);
  if (empty.precision || !empty.recall || *empty.recall != 0.0) o.fail("empty grouping flags");
  std::vector<std::size_t> truth(20);
  for (std::size_t i = 0; i < 20; ++i) truth[i] = i;
  const auto full = score(result(truth), set, 4.0);
  if (*full.precision != 1.0 || *full.recall != 1.0) o.fail("exact grouping is not 1/1");
  CorrespondenceSet none = set;
  none.items.resize(20);
  for (auto& c : none.items) c.target_point.y() = 10;
  const auto no_gt = score(result({0}), none, 4.0);
  if (no_gt.recall || !no_gt.precision || *no_gt.precision != 0.0) o.fail("no ground truth flags");
  for (const auto& rec : {r, full}) {
    if (*rec.precision * static_cast<double>(rec.n_grouped) != static_cast<double>(rec.n_correct) ||
        *rec.recall * static_cast<double>(rec.n_gt_inliers) != static_cast<double>(rec.n_correct))
      o.fail("identity violated");
  }
  if (o.pass) o.detail = "boundary, 10/5/20, empty, exact and no-ground-truth cases hold";
  return o;
}

// 9: identical seeds give byte-identical CSV.
Outcome determinism() {
  Outcome o;
  auto sweep_csv = [](SweepAxis axis, std::vector<double> levels, std::size_t threads) {
    SweepPlan plan;
    plan.axis = axis;
    plan.levels = std::move(levels);
    plan.trials_per_level = 2;
    plan.instance.model_points = 5000;
    plan.instance.correspondences.n_total = 200;
    plan.seed = 9;
    plan.threads = threads;
    std::ostringstream out;
    write_records_csv(run_sweep(plan, kAllAlgorithms), out);
    return out.str();
  };
  std::size_t sweeps = 0;
  const std::pair<SweepAxis, std::vector<double>> axes[] = {
      {SweepAxis::kInlierRatio, {0.2, 0.6}}, {SweepAxis::kNoiseSigma, {0.0, 0.5}},
      {SweepAxis::kDownsampleRatio, {0.5, 1.0}}, {SweepAxis::kEpsilon, {2, 6}},
      {SweepAxis::kNCorrespondences, {100, 200}}};
  for (const auto& [axis, levels] : axes) {
    const std::string a = sweep_csv(axis, levels, 1);
    if (a != sweep_csv(axis, levels, 1) || a != sweep_csv(axis, levels, 3))
      o.fail(std::string("sweep over ") + std::string(sweep_axis_name(axis)) + " differs");
    ++sweeps;
  }
  InstanceRecipe recipe;
  const PointCloud model = build_model(recipe);
  const auto inst = generate_instance(model, recipe, AlgorithmParams{}, 99);
  auto group_csv = [&](Algorithm a) {
    GroupingResult g = run_grouping(a, inst.correspondences.set, inst.params, &model);
    std::ostringstream out;
    for (std::size_t i : g.inlier_indices) out << i << '\n';
    EvaluationRecord r = score(g, inst.correspondences.set);
    r.algorithm = std::string(algorithm_name(a));
    write_records_csv(std::vector<EvaluationRecord>{r}, out);
    return out.str();
  };
  for (Algorithm a : kAllAlgorithms)
    if (group_csv(a) != group_csv(a)) o.fail(std::string(algorithm_name(a)) + " grouping differs");
  if (o.pass) o.detail = fmt("%.0f sweep axes and 7 grouping runs byte-identical", static_cast<double>(sweeps));
  return o;
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0 means unbounded
  };
  const Criterion criteria[] = {
      {"oracle equivalence of numeric helpers", numeric_oracles, 5},
      {"oracle equivalence of GC", gc_oracle, 5},
      {"RANSAC recovery", ransac_recovery, 60},
      {"3DHV exactness", hough_exactness, 0},
      {"precision monotone in epsilon", epsilon_monotone, 0},
      {"degradation with inlier ratio", degradation_trend, 0},
      {"timing ordering", timing_ordering, 600},
      {"precision and recall arithmetic", arithmetic, 0},
      {"determinism", determinism, 0},
  };
  int failures = 0;
  std::vector<bool> selected(std::size(criteria), argc < 2);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k >= 1 && k <= static_cast<int>(selected.size())) selected[static_cast<std::size_t>(k - 1)] = true;
  }
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    if (!selected[i]) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].budget_s > 0 && secs > criteria[i].budget_s) out.fail(fmt("over the %.0f s budget", criteria[i].budget_s));
    std::printf("%s criterion %zu: %s (%.1f s): %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
