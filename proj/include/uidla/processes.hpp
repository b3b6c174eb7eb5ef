#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uidla/genealogy.hpp"
#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"
#include "uidla/walk.hpp"

namespace uidla {

/// Per-step observer, called after each site addition with the current
/// aggregate and the number of additions so far. Used for stats streaming.
using StepObserver = std::function<void(const Aggregate&, uint64_t)>;

/// One-particle update: the walk from `start` runs until it leaves S and
/// its exit site joins the aggregate. A start outside S settles there
/// immediately. Returns the added site.
Point add_particle(Aggregate& S, const Point& start, RngStream& rng,
                   const WalkOptions& opts = {});

/// Aggregate grown from S0 by launching one particle per entry of `starts`,
/// in order. Particle k draws from streams.particle(k).
Aggregate run_idla(const Aggregate& S0, const std::vector<Point>& starts,
               const StreamFamily& streams, const WalkOptions& opts = {},
               const StepObserver& observe = nullptr);

/// Multiset of k copies of the same start (usually the origin).
std::vector<Point> repeated_starts(const Point& p, uint64_t k);

struct UidlaResult {
  Aggregate aggregate;
  Forest forest;
};

/// Uniform-start aggregate: k particles, each born on a uniformly random
/// occupied site of the current aggregate. The forest records one edge per
/// particle from the start site's index to the new site's index; the |S0|
/// initial sites are the roots.
UidlaResult run_uidla(const Aggregate& S0, uint64_t k, const StreamFamily& streams,
                  const WalkOptions& opts = {},
                  const StepObserver& observe = nullptr);

/// Trace of a subset growing inside a host of size m: at tick n the subset
/// E_n gains a uniform-start particle with probability |E_n| / (m + n),
/// drawn exactly as a rational Bernoulli independent of the walks.
Aggregate run_subset_uidla(const Aggregate& E, uint64_t m, uint64_t k_ticks,
                       const StreamFamily& streams, const WalkOptions& opts = {},
                       const StepObserver& observe = nullptr);

/// Exact per-tick acceptance probability |E_n| / (m + n).
double subset_acceptance_probability(uint64_t subset_size, uint64_t m, uint64_t n);

/// Richardson growth: k sites added one at a time, each chosen among vacant
/// boundary sites with probability proportional to its count of occupied
/// neighbors (the embedded jump chain of the exponential-clock dynamics).
Aggregate run_richardson(const Aggregate& S0, uint64_t k, const StreamFamily& streams,
                     const StepObserver& observe = nullptr);

/// Midpoints M_0..M_k of the d=1 uniform-start process grown from {0}.
/// Positions live on integers and half-integers; increments are +-1/2.
std::vector<double> uidla_1d_middle(uint64_t k, const StreamFamily& streams);

}  // namespace uidla
