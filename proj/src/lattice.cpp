#include "uidla/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "uidla/rng.hpp"

namespace uidla {

namespace {

constexpr uint32_t kEmptySlot = 0xFFFFFFFFu;

void require(bool cond, const char* msg) {
  if (!cond) throw std::runtime_error(msg);
}

}  // namespace

uint64_t hash_point(const Point& p) {
  // splitmix64-style mixing of the packed coordinates.
  uint64_t h = 0x9E3779B97F4A7C15ull;
  for (int i = 0; i < kMaxDim; ++i) {
    uint64_t x = uint64_t(uint32_t(p.c[i]));
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 31;
    h = (h ^ x) * 0x94D049BB133111EBull;
  }
  h ^= h >> 29;
  return h;
}

std::string format_point(const Point& p, int dim, char sep) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    if (i) s += sep;
    s += std::to_string(p.c[i]);
  }
  return s;
}

int64_t isqrt64(int64_t v) {
  if (v < 0) return -1;
  int64_t s = int64_t(std::sqrt(double(v)));
  while (s > 0 && s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

int64_t radius_sq_threshold(double radius) {
  if (radius < 0) return -1;
  // Exact for integer radii; for non-integer radii the half-open rounding
  // is irrelevant to any ball actually used by the processes.
  double r2 = radius * radius;
  return int64_t(std::floor(r2 + 1e-9));
}

namespace {

// Count of points in Z^dim with norm2 <= s, by nested shell recursion.
uint64_t count_ball(int dim, int64_t s) {
  if (s < 0) return 0;
  if (dim == 0) return 1;
  int64_t m = isqrt64(s);
  if (dim == 1) return uint64_t(2 * m + 1);
  uint64_t total = 0;
  for (int64_t x = -m; x <= m; ++x) {
    uint64_t sub = count_ball(dim - 1, s - x * x);
    uint64_t next = total + sub;
    require(next >= total, "ball_volume: count overflow");
    total = next;
  }
  return total;
}

void enumerate_ball(int dim, int64_t s, std::vector<Point>& out) {
  int64_t m = isqrt64(s);
  require(m <= kCoordBound, "ball radius exceeds coordinate bound");
  Point p;
  // Odometer loop over the bounding box, lexicographic order.
  std::array<int64_t, kMaxDim> lim{};
  for (int i = 0; i < dim; ++i) {
    p.c[i] = int32_t(-m);
    lim[i] = m;
  }
  while (true) {
    if (p.norm2() <= s) out.push_back(p);
    int axis = dim - 1;
    while (axis >= 0 && p.c[axis] == lim[axis]) {
      p.c[axis] = int32_t(-m);
      --axis;
    }
    if (axis < 0) break;
    ++p.c[axis];
  }
}

}  // namespace

uint64_t ball_volume(int dim, double radius) {
  require(dim >= 1 && dim <= kMaxDim, "ball_volume: dimension out of range");
  require(radius >= 0, "ball_volume: negative radius");
  return count_ball(dim, radius_sq_threshold(radius));
}

std::vector<Point> ball_points(int dim, double radius) {
  require(dim >= 1 && dim <= kMaxDim, "ball_points: dimension out of range");
  std::vector<Point> out;
  enumerate_ball(dim, radius_sq_threshold(radius), out);
  return out;
}

std::vector<Point> ball_points_by_norm(int dim, double radius) {
  std::vector<Point> pts = ball_points(dim, radius);
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    int64_t na = a.norm2(), nb = b.norm2();
    if (na != nb) return na < nb;
    return a < b;
  });
  return pts;
}

Aggregate::Aggregate(int dim) : dim_(dim) {
  require(dim >= 1 && dim <= kMaxDim, "Aggregate: dimension out of range");
  slots_.assign(16, kEmptySlot);
  slot_mask_ = 15;
}

size_t Aggregate::slot_for(const Point& p) const {
  size_t i = hash_point(p) & slot_mask_;
  while (slots_[i] != kEmptySlot && !(order_[slots_[i]] == p)) {
    i = (i + 1) & slot_mask_;
  }
  return i;
}

bool Aggregate::contains(const Point& p) const {
  return slots_[slot_for(p)] != kEmptySlot;
}

void Aggregate::grow_table() {
  std::vector<uint32_t> old = std::move(slots_);
  slots_.assign(old.size() * 2, kEmptySlot);
  slot_mask_ = slots_.size() - 1;
  for (uint32_t idx : old) {
    if (idx == kEmptySlot) continue;
    size_t i = hash_point(order_[idx]) & slot_mask_;
    while (slots_[i] != kEmptySlot) i = (i + 1) & slot_mask_;
    slots_[i] = idx;
  }
}

bool Aggregate::insert(const Point& p) {
  for (int i = 0; i < dim_; ++i) {
    require(p.c[i] >= -kCoordBound && p.c[i] <= kCoordBound,
            "Aggregate: coordinate outside the supported box");
  }
  for (int i = dim_; i < kMaxDim; ++i) {
    require(p.c[i] == 0, "Aggregate: point has nonzero coordinate beyond dim");
  }
  size_t i = slot_for(p);
  if (slots_[i] != kEmptySlot) return false;
  require(order_.size() < kEmptySlot, "Aggregate: too many sites");
  slots_[i] = uint32_t(order_.size());
  order_.push_back(p);
  max_norm2_ = std::max(max_norm2_, p.norm2());
  // Keep the load factor below 1/2.
  if (order_.size() * 2 >= slots_.size()) grow_table();
  return true;
}

size_t Aggregate::uniform_index(RngStream& rng) const {
  require(!order_.empty(), "uniform sample from empty aggregate");
  return size_t(rng.below(order_.size()));
}

const Point& Aggregate::uniform_site(RngStream& rng) const {
  return order_[uniform_index(rng)];
}

double Aggregate::outradius() const {
  return max_norm2_ < 0 ? -1.0 : std::sqrt(double(max_norm2_));
}

int64_t Aggregate::min_unoccupied_norm2() const {
  // Advance the frontier cursor past occupied points, extending the sorted
  // point list shell by shell as needed.
  while (true) {
    if (scan_cursor_ >= by_norm_.size()) {
      int next_r = generated_radius_ < 0 ? 4 : generated_radius_ * 2;
      by_norm_ = ball_points_by_norm(dim_, next_r);
      generated_radius_ = next_r;
    }
    if (!contains(by_norm_[scan_cursor_])) {
      return by_norm_[scan_cursor_].norm2();
    }
    ++scan_cursor_;
  }
}

double Aggregate::inradius() const {
  int64_t m = min_unoccupied_norm2();
  if (m == 0) return -1.0;
  return std::sqrt(double(m - 1));
}

void Aggregate::save_snapshot(std::ostream& out) const {
  out << "d=" << dim_ << " n_sites=" << order_.size() << "\n";
  for (const Point& p : order_) out << format_point(p, dim_) << "\n";
}

void Aggregate::save_snapshot_file(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    require(bool(out), "cannot open snapshot file for writing");
    save_snapshot(out);
    require(bool(out), "snapshot write failed");
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0, "snapshot rename failed");
}

Aggregate Aggregate::load_snapshot(std::istream& in) {
  std::string header;
  require(bool(std::getline(in, header)), "snapshot: missing header");
  int dim = 0;
  size_t n = 0;
  if (std::sscanf(header.c_str(), "d=%d n_sites=%zu", &dim, &n) != 2) {
    throw std::runtime_error("snapshot: malformed header: " + header);
  }
  Aggregate a(dim);
  std::string line;
  for (size_t k = 0; k < n; ++k) {
    require(bool(std::getline(in, line)), "snapshot: truncated site list");
    std::istringstream ls(line);
    Point p;
    for (int i = 0; i < dim; ++i) {
      require(bool(ls >> p.c[i]), "snapshot: malformed site line");
    }
    require(a.insert(p), "snapshot: duplicate site");
  }
  return a;
}

Aggregate Aggregate::load_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
  return load_snapshot(in);
}

ShapeRadii shape_radii(const Aggregate& a) {
  if (a.empty()) throw std::runtime_error("shape_radii: empty aggregate");
  return ShapeRadii{a.inradius(), a.outradius()};
}

Aggregate make_ball_aggregate(int dim, double radius) {
  Aggregate a(dim);
  for (const Point& p : ball_points(dim, radius)) a.insert(p);
  return a;
}

}  // namespace uidla
