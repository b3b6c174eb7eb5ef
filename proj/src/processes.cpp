#include "uidla/processes.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace uidla {

Point add_particle(Aggregate& S, const Point& start, RngStream& rng,
                   const WalkOptions& opts) {
  Point settled = walk_until_exit(start, S, rng, opts);
  bool fresh = S.insert(settled);
  if (!fresh) throw std::logic_error("add_particle: exit site already occupied");
  return settled;
}

Aggregate run_idla(const Aggregate& S0, const std::vector<Point>& starts,
               const StreamFamily& streams, const WalkOptions& opts,
               const StepObserver& observe) {
  Aggregate S = S0;
  uint64_t k = 0;
  for (const Point& x : starts) {
    RngStream rng = streams.particle(k);
    add_particle(S, x, rng, opts);
    ++k;
    if (observe) observe(S, k);
  }
  return S;
}

std::vector<Point> repeated_starts(const Point& p, uint64_t k) {
  return std::vector<Point>(size_t(k), p);
}

UidlaResult run_uidla(const Aggregate& S0, uint64_t k, const StreamFamily& streams,
                  const WalkOptions& opts, const StepObserver& observe) {
  if (S0.empty()) throw std::runtime_error("uidla: initial aggregate is empty");
  UidlaResult r{S0, Forest(S0.size())};
  for (size_t i = 0; i < S0.size(); ++i) r.forest.set_site(i, S0.site(i));
  for (uint64_t j = 0; j < k; ++j) {
    RngStream rng = streams.particle(j);
    size_t start_idx = r.aggregate.uniform_index(rng);
    Point settled = add_particle(r.aggregate, r.aggregate.site(start_idx), rng, opts);
    size_t v = r.forest.add_child(start_idx);
    r.forest.set_site(v, settled);
    if (observe) observe(r.aggregate, j + 1);
  }
  return r;
}

double subset_acceptance_probability(uint64_t subset_size, uint64_t m, uint64_t n) {
  return double(subset_size) / double(m + n);
}

Aggregate run_subset_uidla(const Aggregate& E, uint64_t m, uint64_t k_ticks,
                       const StreamFamily& streams, const WalkOptions& opts,
                       const StepObserver& observe) {
  if (E.empty()) throw std::runtime_error("subset_uidla: empty subset");
  if (m < E.size()) throw std::runtime_error("subset_uidla: host smaller than subset");
  Aggregate S = E;
  for (uint64_t n = 0; n < k_ticks; ++n) {
    RngStream rng = streams.particle(n);
    // Accept with probability |E_n| / (m + n), exactly.
    if (!rng.bernoulli_ratio(S.size(), m + n)) {
      if (observe) observe(S, n + 1);
      continue;
    }
    add_particle(S, S.uniform_site(rng), rng, opts);
    if (observe) observe(S, n + 1);
  }
  return S;
}

namespace {

// Vacant boundary sites weighted by their occupied-neighbor counts. A site
// with weight w occupies w slots, so a uniform slot is a weight-proportional
// site.
class WeightedBoundary {
 public:
  explicit WeightedBoundary(const Aggregate& S) : dim_(S.dim()) {
    for (const Point& p : S.sites()) {
      for (int a = 0; a < dim_; ++a) {
        for (int dir : {-1, 1}) {
          Point q = p.neighbor(a, dir);
          if (!S.contains(q)) add_slot(q);
        }
      }
    }
  }

  const Point& sample(RngStream& rng) const {
    return slots_[size_t(rng.below(slots_.size()))];
  }

  uint64_t total_weight() const { return slots_.size(); }

  /// Called after `p` joined the aggregate: removes its slots and credits
  /// each still-vacant neighbor with one new slot.
  void on_occupied(const Point& p, const Aggregate& S) {
    auto it = slot_index_.find(hash_point(p));
    if (it != slot_index_.end()) {
      std::vector<uint32_t> mine = it->second;
      slot_index_.erase(it);
      // Remove from the back so earlier removals do not invalidate later ones.
      std::sort(mine.begin(), mine.end(), std::greater<uint32_t>());
      for (uint32_t idx : mine) remove_slot(idx);
    }
    for (int a = 0; a < dim_; ++a) {
      for (int dir : {-1, 1}) {
        Point q = p.neighbor(a, dir);
        if (!S.contains(q)) add_slot(q);
      }
    }
  }

 private:
  void add_slot(const Point& q) {
    slot_index_[hash_point(q)].push_back(uint32_t(slots_.size()));
    slots_.push_back(q);
  }

  void remove_slot(uint32_t idx) {
    uint32_t last = uint32_t(slots_.size() - 1);
    if (idx != last) {
      Point moved = slots_[last];
      slots_[idx] = moved;
      auto& lst = slot_index_[hash_point(moved)];
      for (uint32_t& v : lst) {
        if (v == last) {
          v = idx;
          break;
        }
      }
    }
    slots_.pop_back();
  }

  int dim_;
  std::vector<Point> slots_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> slot_index_;
};

}  // namespace

Aggregate run_richardson(const Aggregate& S0, uint64_t k, const StreamFamily& streams,
                     const StepObserver& observe) {
  if (S0.empty()) throw std::runtime_error("richardson: initial aggregate is empty");
  Aggregate S = S0;
  WeightedBoundary boundary(S);
  for (uint64_t j = 0; j < k; ++j) {
    if (boundary.total_weight() == 0) {
      throw std::logic_error("richardson: empty boundary");
    }
    RngStream rng = streams.particle(j);
    Point chosen = boundary.sample(rng);
    if (!S.insert(chosen)) {
      throw std::logic_error("richardson: sampled an occupied site");
    }
    boundary.on_occupied(chosen, S);
    if (observe) observe(S, j + 1);
  }
  return S;
}

std::vector<double> uidla_1d_middle(uint64_t k, const StreamFamily& streams) {
  Aggregate start(1);
  start.insert(Point{0});
  std::vector<double> mid;
  mid.reserve(size_t(k) + 1);
  mid.push_back(0.0);
  // d=1 aggregates are intervals; track endpoints incrementally.
  int32_t lo = 0, hi = 0;
  Aggregate S = start;
  for (uint64_t j = 0; j < k; ++j) {
    RngStream rng = streams.particle(j);
    Point settled = add_particle(S, S.uniform_site(rng), rng, {});
    lo = std::min(lo, settled.c[0]);
    hi = std::max(hi, settled.c[0]);
    mid.push_back(0.5 * (double(lo) + double(hi)));
  }
  return mid;
}

}  // namespace uidla
