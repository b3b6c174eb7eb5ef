#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"

namespace uidla {

/// Exact first-exit distribution of simple random walk from the lattice ball
/// B[radius], for every interior start offset. Row i holds P(exit at
/// exits()[j] | start interiors()[i]); rows sum to 1 within 1e-12.
///
/// Immutable once built; safe to share read-only across threads.
class ExitKernel {
 public:
  static constexpr int kMaxRadius = 8;

  /// Empty kernel; fill via load() or assignment.
  ExitKernel() = default;

  /// Solves the discrete Dirichlet problem (I - P) h = boundary-hit
  /// indicators by dense LU with partial pivoting. Refuses radius > 8.
  static ExitKernel build(int dim, int radius);

  int dim() const { return dim_; }
  int radius() const { return radius_; }

  const std::vector<Point>& interiors() const { return interiors_; }
  const std::vector<Point>& exits() const { return exits_; }
  size_t interior_index(const Point& offset) const;

  double probability(size_t interior_idx, size_t exit_idx) const {
    return table_[interior_idx * exits_.size() + exit_idx];
  }
  const std::vector<double>& table() const { return table_; }

  /// Exit offset sampled from the exact distribution for the given start
  /// offset (alias method, one or two variates).
  Point sample_exit(size_t interior_idx, RngStream& rng) const;
  Point sample_exit_from_center(RngStream& rng) const {
    return sample_exit(center_idx_, rng);
  }

  double max_residual() const { return max_residual_; }

  /// Versioned binary cache with checksum. load() returns false on missing
  /// file, version mismatch, or corrupt payload; callers then rebuild.
  void save(const std::string& path) const;
  static bool load(const std::string& path, ExitKernel& out);

  /// Cache-or-build convenience: loads path if valid, else builds and saves.
  static ExitKernel cached(int dim, int radius, const std::string& path);

 private:
  void build_alias_tables();

  int dim_ = 0;
  int radius_ = 0;
  size_t center_idx_ = 0;
  std::vector<Point> interiors_;
  std::vector<Point> exits_;
  std::vector<double> table_;  // interiors x exits, row-major
  double max_residual_ = 0.0;
  std::unordered_map<uint64_t, uint32_t> interior_lookup_;

  // Walker alias tables, one row per interior start.
  std::vector<double> alias_prob_;
  std::vector<uint32_t> alias_idx_;
};

/// Set of kernels for radii 1..max_radius, used for graded acceleration.
class KernelBank {
 public:
  KernelBank() = default;
  KernelBank(int dim, int max_radius);

  int max_radius() const { return int(kernels_.size()); }
  const ExitKernel& kernel(int radius) const { return kernels_[radius - 1]; }
  bool empty() const { return kernels_.empty(); }

 private:
  std::vector<ExitKernel> kernels_;
};

/// Default acceleration radius: 4 in d<=2, 3 in d>=3 (table size vs speedup).
int default_kernel_radius(int dim);

}  // namespace uidla
