#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"

using namespace uidla;

namespace {

// Brute-force oracle: enumerate the bounding box once at the largest radius
// and count points per squared-radius threshold.
std::vector<uint64_t> brute_force_volumes(int dim, int max_n) {
  std::vector<uint64_t> counts(size_t(max_n) + 1, 0);
  // Simple odometer over the box [-max_n, max_n]^dim.
  std::vector<int> c(size_t(dim), -max_n);
  while (true) {
    int64_t n2 = 0;
    for (int v : c) n2 += int64_t(v) * v;
    for (int n = 0; n <= max_n; ++n) {
      if (n2 <= int64_t(n) * n) ++counts[size_t(n)];
    }
    int axis = dim - 1;
    while (axis >= 0 && c[size_t(axis)] == max_n) {
      c[size_t(axis)] = -max_n;
      --axis;
    }
    if (axis < 0) break;
    ++c[size_t(axis)];
  }
  return counts;
}

}  // namespace

TEST_CASE("ball volume matches hand values") {
  CHECK(ball_volume(1, 3) == 7);
  CHECK(ball_volume(2, 1) == 5);
  CHECK(ball_volume(2, 2) == 13);
  CHECK(ball_volume(3, 1) == 7);
  CHECK(ball_volume(2, 0) == 1);
}

TEST_CASE("ball volume equals brute-force enumeration up to n = 20, d <= 4") {
  for (int dim = 1; dim <= 4; ++dim) {
    int max_n = dim == 4 ? 12 : 20;
    std::vector<uint64_t> oracle = brute_force_volumes(dim, max_n);
    uint64_t prev = 0;
    for (int n = 0; n <= max_n; ++n) {
      uint64_t v = ball_volume(dim, n);
      CHECK(v == oracle[size_t(n)]);
      CHECK(v >= prev);  // monotone in n
      prev = v;
    }
  }
}

TEST_CASE("make_ball_aggregate produces exactly the ball") {
  CHECK(make_ball_aggregate(2, 0).size() == 1);
  CHECK(make_ball_aggregate(2, 1).size() == ball_volume(2, 1));
  CHECK(make_ball_aggregate(3, 1).size() == 7);
  Aggregate a = make_ball_aggregate(2, 4);
  CHECK(a.size() == ball_volume(2, 4));
  for (const Point& p : a.sites()) CHECK(p.norm2() <= 16);
  CHECK(a.contains(Point{4, 0}));
  CHECK(!a.contains(Point{4, 1}));
}

TEST_CASE("shape radii of exact balls and near-balls") {
  Aggregate ball = make_ball_aggregate(2, 2);
  ShapeRadii r = shape_radii(ball);
  CHECK(r.inradius == doctest::Approx(2.0));
  CHECK(r.outradius == doctest::Approx(2.0));

  Aggregate two(2);
  two.insert(Point{0, 0});
  two.insert(Point{1, 0});
  r = shape_radii(two);
  CHECK(r.outradius == doctest::Approx(1.0));
  CHECK(r.inradius == doctest::Approx(0.0));  // (0,1) missing

  Aggregate dented(2);
  for (const Point& p : ball_points(2, 5)) {
    if (!(p == Point{5, 0})) dented.insert(p);
  }
  r = shape_radii(dented);
  CHECK(r.outradius == doctest::Approx(5.0));
  CHECK(r.inradius < 5.0);

  Aggregate empty(2);
  CHECK_THROWS(shape_radii(empty));
}

TEST_CASE("inradius tracks incremental growth") {
  Aggregate a(2);
  a.insert(Point{0, 0});
  CHECK(a.inradius() == doctest::Approx(0.0));
  for (const Point& p : ball_points_by_norm(2, 1)) a.insert(p);
  CHECK(a.inradius() == doctest::Approx(1.0));
  for (const Point& p : ball_points_by_norm(2, 3)) a.insert(p);
  CHECK(a.inradius() == doctest::Approx(3.0));

  Aggregate no_origin(2);
  no_origin.insert(Point{1, 0});
  CHECK(no_origin.inradius() == doctest::Approx(-1.0));
}

TEST_CASE("aggregate membership, insertion order and size bookkeeping") {
  Aggregate a(3);
  CHECK(a.insert(Point{0, 0, 0}));
  CHECK(a.insert(Point{1, 0, 0}));
  CHECK(!a.insert(Point{0, 0, 0}));  // duplicate
  CHECK(a.size() == 2);
  CHECK(a.site(0) == Point{0, 0, 0});
  CHECK(a.site(1) == Point{1, 0, 0});
  CHECK(a.contains(Point{1, 0, 0}));
  CHECK(!a.contains(Point{-1, 0, 0}));

  // Larger churn keeps the table consistent.
  Aggregate b(2);
  for (const Point& p : ball_points(2, 12)) CHECK(b.insert(p));
  CHECK(b.size() == ball_volume(2, 12));
  for (const Point& p : ball_points(2, 12)) CHECK(b.contains(p));
  CHECK(b.max_norm2() == 144);
}

TEST_CASE("coordinates outside the supported box are fatal") {
  Aggregate a(2);
  CHECK_THROWS(a.insert(Point{kCoordBound + 1, 0}));
  CHECK_THROWS(a.insert(Point{0, 0, 1}));  // beyond dim
}

TEST_CASE("uniform sampling is uniform within 3 sigma on a 5-site aggregate") {
  Aggregate a(2);
  a.insert(Point{0, 0});
  a.insert(Point{1, 0});
  a.insert(Point{0, 1});
  a.insert(Point{-1, 0});
  a.insert(Point{0, -1});
  RngStream rng(7, 0);
  const uint64_t draws = 100'000;
  std::map<size_t, uint64_t> counts;
  for (uint64_t i = 0; i < draws; ++i) ++counts[a.uniform_index(rng)];
  const double p = 0.2;
  const double sigma = std::sqrt(p * (1 - p) * double(draws));
  for (size_t i = 0; i < 5; ++i) {
    CHECK(std::fabs(double(counts[i]) - p * double(draws)) <= 3.0 * sigma);
  }
}

TEST_CASE("snapshot round-trips bit-exactly") {
  Aggregate a(3);
  a.insert(Point{0, 0, 0});
  a.insert(Point{-4, 2, 7});
  a.insert(Point{1, -1, 0});
  std::ostringstream first;
  a.save_snapshot(first);

  std::istringstream in(first.str());
  Aggregate b = Aggregate::load_snapshot(in);
  CHECK(b.dim() == 3);
  CHECK(b.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a.site(i) == b.site(i));

  std::ostringstream second;
  b.save_snapshot(second);
  CHECK(first.str() == second.str());
}

TEST_CASE("snapshot rejects malformed input") {
  std::istringstream bad_header("hello\n");
  CHECK_THROWS(Aggregate::load_snapshot(bad_header));
  std::istringstream truncated("d=2 n_sites=3\n0 0\n");
  CHECK_THROWS(Aggregate::load_snapshot(truncated));
  std::istringstream dup("d=2 n_sites=2\n0 0\n0 0\n");
  CHECK_THROWS(Aggregate::load_snapshot(dup));
}

TEST_CASE("ball membership uses the Euclidean norm around its center") {
  Ball b{Point{1, 0}, 2.0};
  CHECK(b.contains(Point{1, 0}));
  CHECK(b.contains(Point{3, 0}));
  CHECK(b.contains(Point{2, 1}));   // distance sqrt(2)
  CHECK(!b.contains(Point{3, 1}));  // distance sqrt(5)
  CHECK(!b.contains(Point{-2, 0}));
}

TEST_CASE("radius threshold is exact at integer radii") {
  CHECK(radius_sq_threshold(0) == 0);
  CHECK(radius_sq_threshold(1) == 1);
  CHECK(radius_sq_threshold(7) == 49);
  CHECK(radius_sq_threshold(1.5) == 2);
  CHECK(isqrt64(0) == 0);
  CHECK(isqrt64(15) == 3);
  CHECK(isqrt64(16) == 4);
  CHECK(isqrt64(int64_t(1) << 40) == (int64_t(1) << 20));
}
