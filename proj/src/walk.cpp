#include "uidla/walk.hpp"

#include <stdexcept>

namespace uidla {

namespace {

void check_bound(const Point& p, int axis) {
  if (p.c[axis] < -kCoordBound || p.c[axis] > kCoordBound) {
    throw std::runtime_error("walk left the supported coordinate box");
  }
}

// Largest kernel radius rho <= bank size such that B[pos, rho] is contained
// in S, or 0 when no jump is safe. Scans offsets of the biggest kernel ball
// in increasing norm order and stops at the first missing site, so probes
// near the aggregate boundary are cheap.
int usable_jump_radius(const Point& pos, const Aggregate& S,
                       const KernelBank& bank, int64_t inradius_floor_norm2) {
  const int rmax = bank.max_radius();
  // Inscribed-ball fast path: |pos| + r <= inradius, checked conservatively
  // in integer arithmetic (isqrt rounds the cross term up).
  int64_t n2 = pos.norm2();
  int64_t s = isqrt64(n2);
  for (int r = rmax; r >= 1; --r) {
    if (n2 + 2 * int64_t(r) * (s + 1) + int64_t(r) * r <= inradius_floor_norm2) {
      return r;
    }
  }
  // Probe: offsets of B[rmax] sorted by norm2 (first entry is the origin).
  static thread_local std::vector<Point> probe_offsets;
  static thread_local int probe_dim = 0, probe_r = 0;
  if (probe_dim != S.dim() || probe_r != rmax) {
    probe_offsets = ball_points_by_norm(S.dim(), rmax);
    probe_dim = S.dim();
    probe_r = rmax;
  }
  int64_t missing_norm2 = -1;
  for (size_t i = 1; i < probe_offsets.size(); ++i) {
    Point q = pos;
    for (int a = 0; a < probe_dim; ++a) q.c[a] += probe_offsets[i].c[a];
    if (!S.contains(q)) {
      missing_norm2 = probe_offsets[i].norm2();
      break;
    }
  }
  if (missing_norm2 < 0) return rmax;
  // Need rho < |missing offset|, i.e. rho^2 <= missing_norm2 - 1.
  int rho = int(isqrt64(missing_norm2 - 1));
  return rho > rmax ? rmax : rho;
}

}  // namespace

Point srw_step(const Point& p, int dim, RngStream& rng) {
  uint64_t d = rng.below(uint64_t(2 * dim));
  Point q = p.neighbor(int(d >> 1), (d & 1) ? 1 : -1);
  check_bound(q, int(d >> 1));
  return q;
}

void srw_step_inplace(WalkState& w, int dim, RngStream& rng) {
  w.position = srw_step(w.position, dim, rng);
  ++w.step_count;
}

Point walk_until_exit(const Point& start, const Aggregate& S, RngStream& rng,
                      const WalkOptions& opts) {
  WalkState state;
  return walk_until_exit(start, S, rng, opts, state);
}

Point walk_until_exit(const Point& start, const Aggregate& S, RngStream& rng,
                      const WalkOptions& opts, WalkState& state_out) {
  WalkState w;
  w.position = start;
  const int dim = S.dim();
  const bool accel = opts.kernels != nullptr && !opts.kernels->empty() &&
                     !opts.step_accounting;
  int64_t inradius_floor_norm2 = -1;
  if (accel) {
    // min_unoccupied_norm2 is m, so every point with norm2 <= m-1 is in S.
    inradius_floor_norm2 = S.min_unoccupied_norm2() - 1;
  }

  while (S.contains(w.position)) {
    if (accel) {
      int rho = usable_jump_radius(w.position, S, *opts.kernels,
                                   inradius_floor_norm2);
      if (rho >= 1) {
        Point offset = opts.kernels->kernel(rho).sample_exit_from_center(rng);
        for (int a = 0; a < dim; ++a) {
          w.position.c[a] += offset.c[a];
          check_bound(w.position, a);
        }
        ++w.step_count;
        w.steps_exact = false;
        continue;
      }
    }
    w.position = srw_step(w.position, dim, rng);
    ++w.step_count;
    if (w.step_count > kWalkStepBudget) {
      throw std::runtime_error("walk exceeded step budget (pathological set?)");
    }
  }
  state_out = w;
  return w.position;
}

}  // namespace uidla
