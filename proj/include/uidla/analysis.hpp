#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"
#include "uidla/walk.hpp"

namespace uidla {

/// Shape statistics of an aggregate against its volume-equivalent ball.
struct ShapeReport {
  uint64_t n_sites = 0;
  double ball_radius_equiv = 0.0;  // largest r = sqrt(int) with b_r <= n_sites
  double inradius = -1.0;
  double outradius = -1.0;
  uint64_t symdiff_count = 0;      // |A delta B[ball_radius_equiv]|
  uint64_t intersection_count = 0; // |A intersect B[ball_radius_equiv]|
  uint64_t ball_volume_equiv = 0;  // |B[ball_radius_equiv]|
  // occupancy[j] = occupied sites with |p| in [j, j+1)
  std::vector<uint64_t> annulus_occupancy;
};

ShapeReport shape_report(const Aggregate& a);

/// Largest radius of the form sqrt(integer) whose ball volume does not
/// exceed n_sites; found by bisection on the squared radius.
double ball_radius_equiv(int dim, uint64_t n_sites);

void write_shape_report_csv(std::ostream& out, const ShapeReport& r);

/// Consecutive annuli R_k = {p : m + k w < |p| <= m + (k+1) w}, k < count.
struct AnnulusSpec {
  double inner_radius = 0.0;  // m
  double width = 0.0;         // w
  int count = 0;              // K

  /// Annulus index of p, or -1 inside B[m]; indices at or beyond count
  /// clamp to count.
  int index_of(const Point& p) const;

  /// Width preset beta * n^(1 - 1/(4 d)) used by the crossing analysis.
  static double preset_width(int dim, double n, double beta = 1.0);
};

struct AnnulusCrossingReport {
  uint64_t n_walks = 0;
  // histogram over the maximal annulus index entered per walk (size count+2:
  // index 0 .. count, plus none_reached in slot... none tracked separately).
  std::vector<uint64_t> max_index_histogram;
  // crossed_counts[k] = walks whose max entered index is at least k+1,
  // i.e. walks that fully traversed annulus k.
  std::vector<uint64_t> crossed_counts;

  double crossed_frequency(int k) const {
    return double(crossed_counts[size_t(k)]) / double(n_walks);
  }
  /// P(max entered index >= j).
  double tail(int j) const;
};

/// Monte Carlo crossing statistics: each walk runs from one of `starts`
/// (cycled) until it leaves S union B[m]; the maximal annulus index entered
/// during the walk (including its settling position) is recorded.
AnnulusCrossingReport annulus_crossing_probe(const Aggregate& S,
                                             const AnnulusSpec& spec,
                                             const std::vector<Point>& starts,
                                             uint64_t n_walks, RngStream& rng);

/// Uniformly random points of B[radius], drawn by rejection in the box.
std::vector<Point> sample_ball_points(int dim, double radius, uint64_t count,
                                      RngStream& rng);

enum class ProcessKind { Idla, Uidla, Subset, Richardson };

struct FluctuationRow {
  double n = 0.0;             // target radius
  uint64_t particles = 0;     // b_n
  uint64_t replicas = 0;
  double mean_out_excess = 0.0;    // mean of (outradius - n)
  double sd_out_excess = 0.0;      // NaN when replicas < 2
  double mean_in_deficit = 0.0;    // mean of (n - inradius)
  double sd_in_deficit = 0.0;      // NaN when replicas < 2
};

/// Grows `replicas` aggregates per radius to volume b_n and summarizes the
/// boundary excess/deficit. Processes grow from {0} (uidla, richardson) or
/// from scratch (idla).
std::vector<FluctuationRow> fluctuation_scaling(ProcessKind process, int dim,
                                                const std::vector<double>& radii,
                                                uint64_t replicas,
                                                const StreamFamily& streams,
                                                const WalkOptions& opts = {});

void write_fluctuation_csv(std::ostream& out,
                           const std::vector<FluctuationRow>& rows);

}  // namespace uidla
