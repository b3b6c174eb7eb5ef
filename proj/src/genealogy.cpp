#include "uidla/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace uidla {

double geom_mean(GeomConvention c) {
  return c == GeomConvention::ParamHalf ? 1.0 : 0.5;
}

double geom_pmf(GeomConvention c, uint64_t j) {
  if (c == GeomConvention::ParamHalf) return std::pow(0.5, double(j + 1));
  return (2.0 / 3.0) * std::pow(1.0 / 3.0, double(j));
}

uint64_t sample_geom(GeomConvention c, RngStream& rng) {
  if (c == GeomConvention::ParamHalf) return rng.geometric_failures(1, 2);
  return rng.geometric_failures(2, 3);
}

Forest::Forest(size_t n_roots)
    : roots_(n_roots),
      parent_(n_roots, kNoParent),
      depth_(n_roots, 0),
      edge_weight_(n_roots, kWeightUnset),
      site_(n_roots) {}

size_t Forest::add_child(size_t parent_idx) {
  if (parent_idx >= parent_.size()) {
    throw std::runtime_error("forest: parent index out of range");
  }
  parent_.push_back(int64_t(parent_idx));
  depth_.push_back(depth_[parent_idx] + 1);
  edge_weight_.push_back(kWeightUnset);
  site_.emplace_back();
  return parent_.size() - 1;
}

void Forest::set_site(size_t v, const Point& p) { site_[v] = p; }

std::vector<uint64_t> Forest::level_counts() const {
  std::vector<uint64_t> counts;
  for (uint32_t d : depth_) {
    if (d >= counts.size()) counts.resize(d + 1, 0);
    ++counts[d];
  }
  return counts;
}

uint64_t Forest::degree(size_t v) const {
  uint64_t deg = 0;
  for (int64_t p : parent_) {
    if (p == int64_t(v)) ++deg;
  }
  return deg;
}

void Forest::assign_edge_weights(GeomConvention convention, RngStream& rng) {
  if (weights_assigned_) {
    throw std::runtime_error("forest: weights already assigned");
  }
  for (size_t v = 0; v < parent_.size(); ++v) {
    if (parent_[v] != kNoParent) {
      edge_weight_[v] = int64_t(sample_geom(convention, rng));
    }
  }
  weights_assigned_ = true;
}

void Forest::set_edge_weight(size_t v, int64_t w) {
  if (!weights_assigned_) {
    throw std::runtime_error("forest: assign weights before overriding");
  }
  if (parent_[v] == kNoParent) {
    throw std::runtime_error("forest: roots carry no edge weight");
  }
  edge_weight_[v] = w;
}

std::vector<int64_t> Forest::reaching_times() const {
  if (!weights_assigned_) {
    throw std::runtime_error("forest: reaching times need assigned weights");
  }
  std::vector<int64_t> t(parent_.size(), 0);
  // Parents precede children in index order.
  for (size_t v = 0; v < parent_.size(); ++v) {
    if (parent_[v] != kNoParent) t[v] = t[size_t(parent_[v])] + edge_weight_[v];
  }
  return t;
}

int64_t Forest::max_reaching_time() const {
  if (parent_.empty()) return 0;
  std::vector<int64_t> t = reaching_times();
  return *std::max_element(t.begin(), t.end());
}

void Forest::dump_csv(std::ostream& out, int dim) const {
  out << "index,parent_index,site_coords,edge_weight,depth,reaching_time\n";
  std::vector<int64_t> t;
  if (weights_assigned_) {
    t = reaching_times();
  } else {
    t.assign(parent_.size(), -1);
    for (size_t v = 0; v < parent_.size(); ++v) {
      if (parent_[v] == kNoParent) t[v] = 0;
    }
  }
  for (size_t v = 0; v < parent_.size(); ++v) {
    out << v << ',' << parent_[v] << ',' << format_point(site_[v], dim, ';')
        << ',' << edge_weight_[v] << ',' << depth_[v] << ',' << t[v] << '\n';
  }
}

std::vector<uint64_t> YuleTree::level_counts() const {
  std::vector<uint64_t> counts;
  for (uint32_t d : depth) {
    if (d >= counts.size()) counts.resize(d + 1, 0);
    ++counts[d];
  }
  return counts;
}

YuleTree grow_yule(const YuleStop& stop, RngStream& rng) {
  const bool by_size = stop.n_target > 0;
  const bool by_time = stop.t_target >= 0.0;
  if (by_size == by_time) {
    throw std::runtime_error("grow_yule: set exactly one stopping rule");
  }
  YuleTree t;
  t.birth_time.push_back(0.0);
  t.parent.push_back(-1);
  t.depth.push_back(0);
  double now = 0.0;
  while (true) {
    if (by_size && t.size() >= stop.n_target) {
      t.final_time = now;
      return t;
    }
    // Every vertex births at rate 1, so the next event is Exp(size).
    double gap;
    do {
      gap = rng.exponential(1.0 / double(t.size()));
    } while (gap <= 0.0);
    now += gap;
    if (by_time && now > stop.t_target) {
      t.final_time = stop.t_target;
      return t;
    }
    size_t parent = size_t(rng.below(t.size()));
    t.birth_time.push_back(now);
    t.parent.push_back(int64_t(parent));
    t.depth.push_back(t.depth[parent] + 1);
  }
}

}  // namespace uidla
