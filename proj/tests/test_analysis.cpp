#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "uidla/analysis.hpp"
#include "uidla/processes.hpp"

using namespace uidla;

TEST_CASE("ball_radius_equiv inverts exact ball volumes") {
  for (int n = 1; n <= 15; ++n) {
    CHECK(ball_radius_equiv(2, ball_volume(2, n)) == doctest::Approx(double(n)));
  }
  CHECK(ball_radius_equiv(2, 1) == doctest::Approx(0.0));
  CHECK_THROWS(ball_radius_equiv(2, 0));
}

TEST_CASE("shape report of an exact ball") {
  Aggregate a = make_ball_aggregate(2, 5);
  ShapeReport r = shape_report(a);
  CHECK(r.n_sites == ball_volume(2, 5));
  CHECK(r.ball_radius_equiv == doctest::Approx(5.0));
  CHECK(r.inradius == doctest::Approx(5.0));
  CHECK(r.outradius == doctest::Approx(5.0));
  CHECK(r.symdiff_count == 0);
  CHECK(r.intersection_count == r.n_sites);
}

TEST_CASE("shape report of a ball plus one protruding site") {
  Aggregate a = make_ball_aggregate(2, 5);
  a.insert(Point{6, 0});
  ShapeReport r = shape_report(a);
  // 82 sites: the largest ball with volume <= 82 is still B[5].
  CHECK(r.ball_radius_equiv == doctest::Approx(5.0));
  CHECK(r.symdiff_count == 1);  // the protrusion only
  CHECK(r.outradius == doctest::Approx(6.0));

  // Cross-check the symdiff identity |A delta B| = |A| + |B| - 2|A inter B|
  // against direct set arithmetic.
  uint64_t direct = 0;
  const int64_t req2 = radius_sq_threshold(r.ball_radius_equiv);
  std::set<Point> in_a(a.sites().begin(), a.sites().end());
  for (const Point& p : a.sites()) {
    if (p.norm2() > req2) ++direct;
  }
  for (const Point& p : ball_points(2, r.ball_radius_equiv)) {
    if (!in_a.count(p)) ++direct;
  }
  CHECK(direct == r.symdiff_count);
  CHECK(r.symdiff_count ==
        r.n_sites + r.ball_volume_equiv - 2 * r.intersection_count);
}

TEST_CASE("shape report symdiff identity holds on a random aggregate") {
  Aggregate start(2);
  start.insert(Point{});
  Aggregate a = run_uidla(start, 400, StreamFamily{233, 0}).aggregate;
  ShapeReport r = shape_report(a);
  CHECK(r.inradius <= r.outradius);
  CHECK(r.symdiff_count ==
        r.n_sites + r.ball_volume_equiv - 2 * r.intersection_count);
  uint64_t occ = 0;
  for (uint64_t c : r.annulus_occupancy) occ += c;
  CHECK(occ == r.n_sites);
  std::ostringstream csv;
  write_shape_report_csv(csv, r);
  CHECK(csv.str().rfind("n_sites,", 0) == 0);
}

TEST_CASE("annulus indexing honors half-open boundaries") {
  AnnulusSpec spec{4.0, 2.0, 3};
  CHECK(spec.index_of(Point{3, 0}) == -1);
  CHECK(spec.index_of(Point{4, 0}) == -1);   // |p| = m belongs inside
  CHECK(spec.index_of(Point{5, 0}) == 0);
  CHECK(spec.index_of(Point{6, 0}) == 0);    // boundary belongs to annulus 0
  CHECK(spec.index_of(Point{7, 0}) == 1);
  CHECK(spec.index_of(Point{11, 0}) == 3);   // clamped at count
  CHECK(AnnulusSpec::preset_width(2, 100.0) ==
        doctest::Approx(std::pow(100.0, 1.0 - 1.0 / 8.0)));
}

TEST_CASE("annulus probe: empty exterior means zero crossings") {
  Aggregate empty(2);
  AnnulusSpec spec{5.0, 2.0, 4};
  RngStream rng(239, 0);
  std::vector<Point> starts = sample_ball_points(2, 5.0, 16, rng);
  AnnulusCrossingReport rep = annulus_crossing_probe(empty, spec, starts, 2000, rng);
  CHECK(rep.max_index_histogram[0] == 2000);
  for (int k = 0; k < spec.count; ++k) CHECK(rep.crossed_counts[size_t(k)] == 0);
  CHECK(rep.tail(1) == 0.0);
}

TEST_CASE("annulus probe: a fully occupied first annulus is always crossed") {
  const double m = 5.0, w = 3.0;
  Aggregate s(2);
  const int64_t lo2 = radius_sq_threshold(m), hi2 = radius_sq_threshold(m + w);
  for (const Point& p : ball_points(2, m + w)) {
    if (p.norm2() > lo2 && p.norm2() <= hi2) s.insert(p);
  }
  AnnulusSpec spec{m, w, 3};
  RngStream rng(241, 0);
  std::vector<Point> starts = sample_ball_points(2, m, 16, rng);
  AnnulusCrossingReport rep = annulus_crossing_probe(s, spec, starts, 500, rng);
  CHECK(rep.crossed_frequency(0) == doctest::Approx(1.0));
}

TEST_CASE("sampled ball points live in the ball") {
  RngStream rng(251, 0);
  std::vector<Point> pts = sample_ball_points(3, 6.0, 500, rng);
  CHECK(pts.size() == 500);
  for (const Point& p : pts) CHECK(p.norm2() <= 36);
}

TEST_CASE("fluctuation table: schema, undefined stddev, ordering guard") {
  StreamFamily fam{257, 0};
  std::vector<FluctuationRow> rows =
      fluctuation_scaling(ProcessKind::Idla, 2, {4.0, 6.0}, 1, fam);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].particles == ball_volume(2, 4));
  CHECK(std::isnan(rows[0].sd_out_excess));
  std::ostringstream csv;
  write_fluctuation_csv(csv, rows);
  CHECK(csv.str().find("undefined") != std::string::npos);
  CHECK(csv.str().rfind("n,particles,replicas,", 0) == 0);

  CHECK_THROWS(fluctuation_scaling(ProcessKind::Idla, 2, {6.0, 4.0}, 1, fam));
  CHECK_THROWS(fluctuation_scaling(ProcessKind::Subset, 2, {4.0}, 1, fam));
}

TEST_CASE("fluctuation table: relative error shrinks for idla") {
  StreamFamily fam{263, 0};
  std::vector<FluctuationRow> rows =
      fluctuation_scaling(ProcessKind::Uidla, 2, {8.0, 16.0}, 3, fam);
  REQUIRE(rows.size() == 2);
  // Boundary excess grows much slower than the radius.
  CHECK(rows[1].mean_out_excess / 16.0 <= rows[0].mean_out_excess / 8.0 + 0.05);
  CHECK(rows[0].replicas == 3);
}
