#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace uidla {

// Coordinates are hard-bounded per axis; a walk or insertion outside this box
// indicates a broken configuration and is treated as fatal.
inline constexpr int32_t kCoordBound = 1 << 20;

inline constexpr int kMaxDim = 4;

/// A point of Z^d, d <= 4. Unused axes are held at zero so that equality,
/// hashing and norms are dimension-agnostic.
struct Point {
  std::array<int32_t, kMaxDim> c{0, 0, 0, 0};

  Point() = default;
  Point(int32_t x) : c{x, 0, 0, 0} {}
  Point(int32_t x, int32_t y) : c{x, y, 0, 0} {}
  Point(int32_t x, int32_t y, int32_t z) : c{x, y, z, 0} {}
  Point(int32_t x, int32_t y, int32_t z, int32_t w) : c{x, y, z, w} {}

  int32_t operator[](int i) const { return c[i]; }
  int32_t& operator[](int i) { return c[i]; }

  bool operator==(const Point& o) const { return c == o.c; }
  bool operator!=(const Point& o) const { return c != o.c; }
  // Lexicographic; gives deterministic orderings for enumeration and tests.
  bool operator<(const Point& o) const { return c < o.c; }

  int64_t norm2() const {
    int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += int64_t(c[i]) * c[i];
    return s;
  }

  Point neighbor(int axis, int dir) const {
    Point p = *this;
    p.c[axis] += dir;
    return p;
  }
};

inline Point origin() { return Point{}; }

uint64_t hash_point(const Point& p);

std::string format_point(const Point& p, int dim, char sep = ' ');

/// Largest s with s*s <= v.
int64_t isqrt64(int64_t v);

/// Squared-radius threshold for Euclidean ball membership |p| <= n:
/// membership is norm2(p) <= threshold. Exact for integer radii.
int64_t radius_sq_threshold(double radius);

/// Euclidean lattice ball {p : |p - center| <= radius}.
struct Ball {
  Point center;
  double radius = 0.0;

  bool contains(const Point& p) const {
    Point d;
    for (int i = 0; i < kMaxDim; ++i) d.c[i] = p.c[i] - center.c[i];
    return d.norm2() <= radius_sq_threshold(radius);
  }
};

/// Exact number of lattice points p in Z^d with |p| <= radius.
/// Computed by nested shell counting; overflow of the count is fatal.
uint64_t ball_volume(int dim, double radius);

/// All points of B[radius] in Z^d, lexicographic order.
std::vector<Point> ball_points(int dim, double radius);

/// Points sorted by (norm2, lexicographic); used for inradius bookkeeping.
std::vector<Point> ball_points_by_norm(int dim, double radius);

class RngStream;

/// A finite occupied subset of Z^d with O(1) membership, O(1) uniform
/// sampling, insertion-order bookkeeping and cached radius extremes.
///
/// Storage is an open-addressing table of indices into the append-only
/// site array, keyed by the packed coordinates of each site.
class Aggregate {
 public:
  explicit Aggregate(int dim);

  int dim() const { return dim_; }
  size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }

  bool contains(const Point& p) const;

  /// Inserts p if absent. Returns true when the site was new.
  bool insert(const Point& p);

  /// Site by insertion index (0-based).
  const Point& site(size_t i) const { return order_[i]; }
  const std::vector<Point>& sites() const { return order_; }

  /// Uniformly random occupied site. Draws exactly one bounded variate.
  const Point& uniform_site(RngStream& rng) const;
  size_t uniform_index(RngStream& rng) const;

  /// max |p| over occupied sites; -1 for the empty aggregate.
  double outradius() const;
  int64_t max_norm2() const { return max_norm2_; }

  /// Largest r with B[r] fully occupied, resolved as sqrt(m-1) where m is
  /// the smallest norm2 among unoccupied points; -1 if the origin itself
  /// is unoccupied. Lazily and incrementally maintained.
  double inradius() const;
  /// Smallest norm2 among unoccupied lattice points (the quantity behind
  /// inradius); 0 if the origin is unoccupied.
  int64_t min_unoccupied_norm2() const;

  /// Writes the snapshot text format: header "d=<d> n_sites=<k>", then one
  /// site per line in insertion order. Round-trips bit-exactly.
  void save_snapshot(std::ostream& out) const;
  void save_snapshot_file(const std::string& path) const;
  static Aggregate load_snapshot(std::istream& in);
  static Aggregate load_snapshot_file(const std::string& path);

 private:
  void grow_table();
  size_t slot_for(const Point& p) const;

  int dim_;
  std::vector<Point> order_;
  std::vector<uint32_t> slots_;  // index into order_, or kEmptySlot
  uint64_t slot_mask_ = 0;
  int64_t max_norm2_ = -1;

  // Frontier scan state for the incremental inradius.
  mutable std::vector<Point> by_norm_;   // all points sorted by norm2
  mutable size_t scan_cursor_ = 0;       // first index not known occupied
  mutable int generated_radius_ = -1;    // by_norm_ covers B[generated_radius_]
};

/// (inradius, outradius) of a nonempty aggregate, relative to the origin.
struct ShapeRadii {
  double inradius = -1.0;
  double outradius = -1.0;
};
ShapeRadii shape_radii(const Aggregate& a);

/// Aggregate whose sites are exactly B[radius] in Z^d.
Aggregate make_ball_aggregate(int dim, double radius);

}  // namespace uidla
