#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"

namespace uidla {

inline constexpr int64_t kNoParent = -1;
inline constexpr int64_t kWeightUnset = -1;

/// Convention for the per-edge geometric weights. Both live on {0, 1, 2, ...}:
///   ParamHalf: success probability 1/2 (mean 1), P(X = j) = 2^-(j+1).
///   MeanHalf:  mean 1/2 (success probability 2/3), P(X = j) = (2/3)(1/3)^j.
enum class GeomConvention { ParamHalf, MeanHalf };

double geom_mean(GeomConvention c);
double geom_pmf(GeomConvention c, uint64_t j);
uint64_t sample_geom(GeomConvention c, RngStream& rng);

/// Rooted forest over particle indices. Vertex i was created at step i;
/// every non-root vertex has a parent with a smaller index. A side table
/// maps each index to its lattice site.
class Forest {
 public:
  Forest() = default;

  /// Forest of n_roots isolated roots.
  explicit Forest(size_t n_roots);

  size_t size() const { return parent_.size(); }
  size_t root_count() const { return roots_; }

  /// Appends a vertex whose parent is `parent_idx` (must be < current size).
  size_t add_child(size_t parent_idx);

  int64_t parent(size_t v) const { return parent_[v]; }
  uint32_t depth(size_t v) const { return depth_[v]; }
  bool is_root(size_t v) const { return parent_[v] == kNoParent; }

  /// Graph-distance depth profile: count of vertices per depth.
  std::vector<uint64_t> level_counts() const;

  /// Number of children of v.
  uint64_t degree(size_t v) const;

  const std::vector<Point>& site_of() const { return site_; }
  void set_site(size_t v, const Point& p);

  bool weights_assigned() const { return weights_assigned_; }
  int64_t edge_weight(size_t v) const { return edge_weight_[v]; }

  /// Draws an independent geometric weight for every edge. Weights must be
  /// unassigned.
  void assign_edge_weights(GeomConvention convention, RngStream& rng);

  /// Overrides one edge weight (weights must already be assigned); used when
  /// reconstructing a forest from a dump.
  void set_edge_weight(size_t v, int64_t w);

  /// Passage time from each vertex's root: sum of edge weights along the
  /// unique root path. Roots have reaching time 0. Requires weights.
  std::vector<int64_t> reaching_times() const;
  int64_t max_reaching_time() const;

  /// CSV dump: index,parent_index,site_coords,edge_weight,depth,reaching_time.
  /// Site coordinates are ';'-joined. Unassigned weights print as -1 and
  /// reaching times as 0 for roots / -1 otherwise.
  void dump_csv(std::ostream& out, int dim) const;

 private:
  size_t roots_ = 0;
  std::vector<int64_t> parent_;
  std::vector<uint32_t> depth_;
  std::vector<int64_t> edge_weight_;
  std::vector<Point> site_;
  bool weights_assigned_ = false;
};

/// Continuous-time recursive tree: every vertex spawns children at unit
/// exponential rate, starting from a single root at time 0.
struct YuleTree {
  std::vector<double> birth_time;  // birth_time[0] = 0
  std::vector<int64_t> parent;     // parent[0] = -1
  std::vector<uint32_t> depth;
  double final_time = 0.0;

  size_t size() const { return birth_time.size(); }
  /// X_t(k): number of vertices at graph distance k from the root.
  std::vector<uint64_t> level_counts() const;
};

struct YuleStop {
  // Exactly one of the two stopping rules must be set.
  uint64_t n_target = 0;   // stop when the tree has n_target vertices
  double t_target = -1.0;  // stop at time t_target
};

YuleTree grow_yule(const YuleStop& stop, RngStream& rng);

}  // namespace uidla
