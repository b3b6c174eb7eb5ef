#include "uidla/exit_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

namespace uidla {

namespace {

constexpr uint32_t kCacheVersion = 1;
constexpr char kCacheMagic[8] = {'U', 'I', 'D', 'L', 'A', 'K', 'R', 'N'};

uint64_t fnv1a(const unsigned char* data, size_t n) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

// Solves A X = B in place by LU with partial pivoting. A is n x n row-major,
// B is n x m row-major; B is overwritten with the solution.
void solve_dense(std::vector<double>& a, std::vector<double>& b, size_t n,
                 size_t m) {
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    double best = std::fabs(a[col * n + col]);
    for (size_t r = col + 1; r < n; ++r) {
      double v = std::fabs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw std::runtime_error("exit kernel: singular system");
    if (piv != col) {
      for (size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
      for (size_t j = 0; j < m; ++j) std::swap(b[col * m + j], b[piv * m + j]);
    }
    double d = a[col * n + col];
    for (size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / d;
      if (f == 0.0) continue;
      a[r * n + col] = 0.0;
      for (size_t j = col + 1; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      for (size_t j = 0; j < m; ++j) b[r * m + j] -= f * b[col * m + j];
    }
  }
  for (size_t col = n; col-- > 0;) {
    double d = a[col * n + col];
    for (size_t j = 0; j < m; ++j) {
      double s = b[col * m + j];
      for (size_t k = col + 1; k < n; ++k) s -= a[col * n + k] * b[k * m + j];
      b[col * m + j] = s / d;
    }
  }
}

}  // namespace

ExitKernel ExitKernel::build(int dim, int radius) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::runtime_error("exit kernel: dimension out of range");
  }
  if (radius < 1 || radius > kMaxRadius) {
    throw std::runtime_error("exit kernel: radius out of supported range");
  }
  ExitKernel k;
  k.dim_ = dim;
  k.radius_ = radius;
  k.interiors_ = ball_points(dim, radius);
  const size_t n = k.interiors_.size();
  if (n > 5000) throw std::runtime_error("exit kernel: ball too large");

  std::unordered_map<uint64_t, uint32_t> interior_of;
  interior_of.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    interior_of.emplace(hash_point(k.interiors_[i]), uint32_t(i));
    if (k.interiors_[i] == Point{}) k.center_idx_ = i;
  }
  k.interior_lookup_ = interior_of;

  const int64_t r2 = radius_sq_threshold(radius);
  std::set<Point> exit_set;
  for (const Point& p : k.interiors_) {
    for (int axis = 0; axis < dim; ++axis) {
      for (int dir : {-1, 1}) {
        Point q = p.neighbor(axis, dir);
        if (q.norm2() > r2) exit_set.insert(q);
      }
    }
  }
  k.exits_.assign(exit_set.begin(), exit_set.end());
  const size_t m = k.exits_.size();
  std::unordered_map<uint64_t, uint32_t> exit_of;
  for (size_t j = 0; j < m; ++j) exit_of.emplace(hash_point(k.exits_[j]), uint32_t(j));

  // (I - P) h_y = q_y with q_y(x) = P(x steps to y) for each exit y.
  std::vector<double> a(n * n, 0.0);
  std::vector<double> b(n * m, 0.0);
  const double step_p = 1.0 / (2.0 * dim);
  for (size_t i = 0; i < n; ++i) {
    a[i * n + i] = 1.0;
    for (int axis = 0; axis < dim; ++axis) {
      for (int dir : {-1, 1}) {
        Point q = k.interiors_[i].neighbor(axis, dir);
        if (q.norm2() <= r2) {
          a[i * n + interior_of.at(hash_point(q))] -= step_p;
        } else {
          b[i * m + exit_of.at(hash_point(q))] += step_p;
        }
      }
    }
  }
  std::vector<double> a_copy = a;
  std::vector<double> b_copy = b;
  solve_dense(a, b, n, m);
  k.table_ = std::move(b);

  // Residual of the original system, max over all entries.
  double res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      double s = -b_copy[i * m + j];
      for (size_t t = 0; t < n; ++t) s += a_copy[i * n + t] * k.table_[t * m + j];
      res = std::max(res, std::fabs(s));
    }
  }
  k.max_residual_ = res;
  if (res > 1e-12) throw std::runtime_error("exit kernel: residual too large");

  k.build_alias_tables();
  return k;
}

size_t ExitKernel::interior_index(const Point& offset) const {
  auto it = interior_lookup_.find(hash_point(offset));
  if (it == interior_lookup_.end() || !(interiors_[it->second] == offset)) {
    throw std::runtime_error("exit kernel: offset is not interior");
  }
  return it->second;
}

void ExitKernel::build_alias_tables() {
  const size_t n = interiors_.size();
  const size_t m = exits_.size();
  alias_prob_.assign(n * m, 1.0);
  alias_idx_.assign(n * m, 0);
  std::vector<double> scaled(m);
  std::vector<uint32_t> small, large;
  for (size_t i = 0; i < n; ++i) {
    double* ap = &alias_prob_[i * m];
    uint32_t* ai = &alias_idx_[i * m];
    small.clear();
    large.clear();
    for (size_t j = 0; j < m; ++j) {
      scaled[j] = table_[i * m + j] * double(m);
      (scaled[j] < 1.0 ? small : large).push_back(uint32_t(j));
    }
    while (!small.empty() && !large.empty()) {
      uint32_t s = small.back(), l = large.back();
      small.pop_back();
      ap[s] = scaled[s];
      ai[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (uint32_t j : small) ap[j] = 1.0;
    for (uint32_t j : large) ap[j] = 1.0;
  }
}

Point ExitKernel::sample_exit(size_t interior_idx, RngStream& rng) const {
  const size_t m = exits_.size();
  size_t j = size_t(rng.below(m));
  const size_t base = interior_idx * m;
  if (rng.uniform() >= alias_prob_[base + j]) j = alias_idx_[base + j];
  return exits_[j];
}

void ExitKernel::save(const std::string& path) const {
  std::vector<unsigned char> payload;
  auto put_u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; ++i) payload.push_back((unsigned char)(v >> (8 * i)));
  };
  auto put_u64 = [&](uint64_t v) {
    for (int i = 0; i < 8; ++i) payload.push_back((unsigned char)(v >> (8 * i)));
  };
  auto put_point = [&](const Point& p) {
    for (int i = 0; i < kMaxDim; ++i) put_u32(uint32_t(p.c[i]));
  };
  put_u32(kCacheVersion);
  put_u32(uint32_t(dim_));
  put_u32(uint32_t(radius_));
  put_u64(interiors_.size());
  put_u64(exits_.size());
  for (const Point& p : interiors_) put_point(p);
  for (const Point& p : exits_) put_point(p);
  for (double v : table_) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(bits);
  }
  uint64_t checksum = fnv1a(payload.data(), payload.size());

  std::string tmp = path + ".tmp";
  std::ofstream out(tmp, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open kernel cache for writing");
  out.write(kCacheMagic, 8);
  out.write(reinterpret_cast<const char*>(payload.data()), payload.size());
  out.write(reinterpret_cast<const char*>(&checksum), 8);
  out.close();
  if (!out || std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("kernel cache write failed");
  }
}

bool ExitKernel::load(const std::string& path, ExitKernel& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 16 || std::memcmp(raw.data(), kCacheMagic, 8) != 0) return false;
  size_t payload_len = raw.size() - 16;
  const unsigned char* payload = raw.data() + 8;
  uint64_t stored;
  std::memcpy(&stored, raw.data() + 8 + payload_len, 8);
  if (fnv1a(payload, payload_len) != stored) return false;

  size_t pos = 0;
  auto get_u32 = [&]() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(payload[pos++]) << (8 * i);
    return v;
  };
  auto get_u64 = [&]() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(payload[pos++]) << (8 * i);
    return v;
  };
  if (payload_len < 28) return false;
  if (get_u32() != kCacheVersion) return false;
  ExitKernel k;
  k.dim_ = int(get_u32());
  k.radius_ = int(get_u32());
  if (k.dim_ < 1 || k.dim_ > kMaxDim || k.radius_ < 1 || k.radius_ > kMaxRadius) {
    return false;
  }
  uint64_t n = get_u64(), m = get_u64();
  if (payload_len != 28 + (n + m) * 16 + n * m * 8) return false;
  auto get_point = [&]() {
    Point p;
    for (int i = 0; i < kMaxDim; ++i) p.c[i] = int32_t(get_u32());
    return p;
  };
  k.interiors_.resize(n);
  for (auto& p : k.interiors_) p = get_point();
  k.exits_.resize(m);
  for (auto& p : k.exits_) p = get_point();
  k.table_.resize(size_t(n) * m);
  for (double& v : k.table_) {
    uint64_t bits = get_u64();
    std::memcpy(&v, &bits, 8);
  }
  for (size_t i = 0; i < n; ++i) {
    k.interior_lookup_.emplace(hash_point(k.interiors_[i]), uint32_t(i));
    if (k.interiors_[i] == Point{}) k.center_idx_ = i;
  }
  k.build_alias_tables();
  out = std::move(k);
  return true;
}

ExitKernel ExitKernel::cached(int dim, int radius, const std::string& path) {
  ExitKernel k;
  if (load(path, k) && k.dim() == dim && k.radius() == radius) return k;
  k = build(dim, radius);
  k.save(path);
  return k;
}

KernelBank::KernelBank(int dim, int max_radius) {
  for (int r = 1; r <= max_radius; ++r) kernels_.push_back(ExitKernel::build(dim, r));
}

int default_kernel_radius(int dim) { return dim <= 2 ? 4 : 3; }

}  // namespace uidla
