#pragma once

#include <cstdint>

#include "uidla/exit_kernel.hpp"
#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"

namespace uidla {

inline constexpr uint64_t kWalkStepBudget = 10'000'000'000ull;

struct WalkState {
  Point position;
  // Elementary steps simulated. Exact only while steps_exact holds; with
  // acceleration each kernel jump counts as one macro-step and the flag
  // drops to false.
  uint64_t step_count = 0;
  bool steps_exact = true;
};

/// One elementary step: each of the 2*dim neighbors with probability 1/(2d).
Point srw_step(const Point& p, int dim, RngStream& rng);
void srw_step_inplace(WalkState& w, int dim, RngStream& rng);

/// Acceleration policy for walk_until_exit.
///
/// When a kernel bank is present, a jump of radius rho replaces the walk
/// segment up to its first exit from B[position, rho]; the jump fires only
/// when B[position, rho] is confirmed inside the aggregate, either via the
/// aggregate's inscribed ball or by probing offsets in increasing norm
/// order. Exit laws are identical to step-by-step simulation.
///
/// step_accounting forces elementary stepping so that step counts stay
/// exact.
struct WalkOptions {
  const KernelBank* kernels = nullptr;
  bool step_accounting = false;
};

/// First position of the walk from `start` that is not in S (the walk's own
/// value at its exit time). If start is not in S, returns start unchanged.
/// Aborts after kWalkStepBudget elementary steps or jumps.
Point walk_until_exit(const Point& start, const Aggregate& S, RngStream& rng,
                      const WalkOptions& opts = {});

/// As above but also reports the step counter.
Point walk_until_exit(const Point& start, const Aggregate& S, RngStream& rng,
                      const WalkOptions& opts, WalkState& state_out);

/// Unaccelerated walk until the first position where `inside` is false.
/// Used by the colored couplings, whose membership sets are composite.
template <typename Pred>
Point walk_until_exit_if(const Point& start, int dim, Pred&& inside,
                         RngStream& rng) {
  Point pos = start;
  uint64_t steps = 0;
  while (inside(pos)) {
    pos = srw_step(pos, dim, rng);
    if (++steps > kWalkStepBudget) {
      throw std::runtime_error("walk exceeded step budget (pathological set?)");
    }
  }
  return pos;
}

}  // namespace uidla
