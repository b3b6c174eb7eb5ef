#include <cmath>
#include <sstream>

#include "doctest.h"
#include "uidla/genealogy.hpp"
#include "uidla/processes.hpp"
#include "uidla/stats.hpp"

using namespace uidla;

namespace {

// Oracle: exact root-degree law of the random recursive tree on n vertices,
// by dynamic programming over attachment steps.
std::vector<double> rrt_root_degree_law(int n) {
  std::vector<double> p{1.0};  // degree 0 with 1 vertex
  for (int size = 1; size < n; ++size) {
    std::vector<double> next(p.size() + 1, 0.0);
    double attach = 1.0 / double(size);
    for (size_t d = 0; d < p.size(); ++d) {
      next[d + 1] += p[d] * attach;
      next[d] += p[d] * (1.0 - attach);
    }
    p = std::move(next);
  }
  return p;
}

// Direct sampler of the random recursive tree with geometric edge weights;
// used for tail statistics where simulating walks would be pointless.
int64_t rrt_max_reaching(int n, GeomConvention conv, RngStream& rng) {
  std::vector<int64_t> reach(size_t(n), 0);
  int64_t best = 0;
  for (int v = 1; v < n; ++v) {
    size_t parent = size_t(rng.below(uint64_t(v)));
    reach[size_t(v)] = reach[parent] + int64_t(sample_geom(conv, rng));
    best = std::max(best, reach[size_t(v)]);
  }
  return best;
}

}  // namespace

TEST_CASE("geometric weight conventions have the right pmf and mean") {
  CHECK(geom_pmf(GeomConvention::ParamHalf, 0) == doctest::Approx(0.5));
  CHECK(geom_pmf(GeomConvention::ParamHalf, 1) == doctest::Approx(0.25));
  CHECK(geom_pmf(GeomConvention::ParamHalf, 2) == doctest::Approx(0.125));
  CHECK(geom_mean(GeomConvention::ParamHalf) == 1.0);
  CHECK(geom_pmf(GeomConvention::MeanHalf, 0) == doctest::Approx(2.0 / 3));
  CHECK(geom_mean(GeomConvention::MeanHalf) == 0.5);

  RngStream rng(113, 0);
  const uint64_t n = 100'000;
  for (GeomConvention conv : {GeomConvention::ParamHalf, GeomConvention::MeanHalf}) {
    double sum = 0.0, sumsq = 0.0;
    for (uint64_t i = 0; i < n; ++i) {
      double x = double(sample_geom(conv, rng));
      sum += x;
      sumsq += x * x;
    }
    double mean = sum / double(n);
    double sd = std::sqrt(std::max(0.0, sumsq / double(n) - mean * mean));
    CHECK(std::fabs(mean - geom_mean(conv)) <= 4.0 * sd / std::sqrt(double(n)));
  }
}

TEST_CASE("single-edge forest weight law") {
  const uint64_t runs = 50'000;
  std::vector<uint64_t> counts(4, 0);  // weights 0, 1, 2, >= 3
  for (uint64_t i = 0; i < runs; ++i) {
    Forest f(1);
    size_t child = f.add_child(0);
    RngStream rng(127, i);
    f.assign_edge_weights(GeomConvention::ParamHalf, rng);
    int64_t w = f.edge_weight(child);
    counts[size_t(std::min<int64_t>(w, 3))] += 1;
  }
  std::vector<double> probs{0.5, 0.25, 0.125, 0.125};
  CHECK(chi_square_gof_pvalue(counts, probs) >= 1e-3);
}

TEST_CASE("forest bookkeeping, reaching times and dumps") {
  Forest f(1);
  size_t a = f.add_child(0);
  size_t b = f.add_child(a);
  size_t c = f.add_child(b);
  CHECK(f.root_count() == 1);
  CHECK(f.depth(c) == 3);
  CHECK_THROWS(f.reaching_times());  // weights not yet assigned

  RngStream rng(131, 0);
  f.assign_edge_weights(GeomConvention::ParamHalf, rng);
  CHECK_THROWS(f.assign_edge_weights(GeomConvention::ParamHalf, rng));

  f.set_edge_weight(a, 1);
  f.set_edge_weight(b, 0);
  f.set_edge_weight(c, 2);
  std::vector<int64_t> t = f.reaching_times();
  CHECK(t[0] == 0);  // root
  CHECK(t[a] == 1);
  CHECK(t[b] == 1);
  CHECK(t[c] == 3);  // chain weights (1, 0, 2)
  CHECK(f.max_reaching_time() == 3);
  for (size_t v = 0; v < f.size(); ++v) {
    if (!f.is_root(v)) CHECK(t[v] >= t[size_t(f.parent(v))]);
  }

  // Star with weights {0, 3, 1}.
  Forest star(1);
  size_t s1 = star.add_child(0), s2 = star.add_child(0), s3 = star.add_child(0);
  RngStream rng2(131, 1);
  star.assign_edge_weights(GeomConvention::ParamHalf, rng2);
  star.set_edge_weight(s1, 0);
  star.set_edge_weight(s2, 3);
  star.set_edge_weight(s3, 1);
  CHECK(star.max_reaching_time() == 3);

  // Roots-only forest.
  Forest roots(4);
  RngStream rng3(131, 2);
  roots.assign_edge_weights(GeomConvention::ParamHalf, rng3);
  CHECK(roots.max_reaching_time() == 0);

  std::ostringstream csv;
  f.dump_csv(csv, 1);
  CHECK(csv.str().rfind("index,parent_index,site_coords,edge_weight,depth,"
                        "reaching_time\n", 0) == 0);
}

TEST_CASE("uidla genealogy is a random recursive tree (root degree law)") {
  const int n = 50;            // tree vertices
  const uint64_t reps = 10'000;
  std::vector<double> law = rrt_root_degree_law(n);
  std::vector<uint64_t> counts(law.size(), 0);
  for (uint64_t i = 0; i < reps; ++i) {
    Aggregate start(2);
    start.insert(Point{});
    UidlaResult r = run_uidla(start, n - 1, StreamFamily{137, i});
    ++counts[size_t(r.forest.degree(0))];
  }
  CHECK(chi_square_gof_pvalue(counts, law) >= 1e-3);
}

TEST_CASE("reaching-time tail fraction does not grow with n") {
  const std::vector<int> ns{100, 1000, 10'000};
  const uint64_t reps = 2000;
  std::vector<double> exceed_fraction;
  for (size_t ni = 0; ni < ns.size(); ++ni) {
    std::vector<double> maxima;
    for (uint64_t i = 0; i < reps; ++i) {
      RngStream rng(139, ni * reps + i);
      maxima.push_back(double(rrt_max_reaching(ns[ni], GeomConvention::ParamHalf, rng)));
    }
    double mean = summarize(maxima).mean;
    uint64_t exceed = 0;
    for (double m : maxima) exceed += m > 3.0 * mean ? 1 : 0;
    exceed_fraction.push_back(double(exceed) / double(reps));
  }
  CHECK(exceed_fraction[1] <= exceed_fraction[0] + 0.01);
  CHECK(exceed_fraction[2] <= exceed_fraction[1] + 0.01);
}

TEST_CASE("yule tree basics and stopping rules") {
  RngStream rng(149, 0);
  YuleTree t0 = grow_yule(YuleStop{0, 0.0}, rng);
  CHECK(t0.size() == 1);
  CHECK(t0.level_counts()[0] == 1);

  YuleTree tn = grow_yule(YuleStop{25, -1.0}, rng);
  CHECK(tn.size() == 25);
  for (size_t v = 1; v < tn.size(); ++v) {
    CHECK(tn.birth_time[v] > tn.birth_time[v - 1]);
    CHECK(tn.parent[v] >= 0);
    CHECK(tn.depth[v] == tn.depth[size_t(tn.parent[v])] + 1);
  }
  CHECK_THROWS(grow_yule(YuleStop{0, -1.0}, rng));
  CHECK_THROWS(grow_yule(YuleStop{5, 1.0}, rng));
}

TEST_CASE("yule tree expectations: total size and level counts") {
  const uint64_t reps = 10'000;
  double size_sum = 0, size_sumsq = 0;
  double lvl2_sum = 0, lvl2_sumsq = 0;
  for (uint64_t i = 0; i < reps; ++i) {
    RngStream rng(151, i);
    YuleTree t = grow_yule(YuleStop{0, 2.0}, rng);
    double s = double(t.size());
    size_sum += s;
    size_sumsq += s * s;
    RngStream rng2(157, i);
    YuleTree t1 = grow_yule(YuleStop{0, 1.0}, rng2);
    std::vector<uint64_t> lv = t1.level_counts();
    double x = lv.size() > 2 ? double(lv[2]) : 0.0;
    lvl2_sum += x;
    lvl2_sumsq += x * x;
  }
  double mean_size = size_sum / double(reps);
  double sd_size = std::sqrt(std::max(0.0, size_sumsq / double(reps) - mean_size * mean_size));
  // E[size at t] = e^t.
  CHECK(std::fabs(mean_size - std::exp(2.0)) <=
        4.0 * sd_size / std::sqrt(double(reps)));

  double mean2 = lvl2_sum / double(reps);
  double sd2 = std::sqrt(std::max(0.0, lvl2_sumsq / double(reps) - mean2 * mean2));
  // E[X_1(2)] = 1/2! = 0.5.
  CHECK(std::fabs(mean2 - 0.5) <= 4.0 * sd2 / std::sqrt(double(reps)));
}
