#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "uidla/lattice.hpp"
#include "uidla/rng.hpp"
#include "uidla/walk.hpp"

namespace uidla {

/// Monte Carlo estimate of the harmonic measure h_y(x): the probability
/// that a walk from x first leaves A at y.
struct HarmonicMeasureEstimate {
  Point start;
  uint64_t n_samples = 0;
  std::map<Point, uint64_t> exit_counts;

  double estimate(const Point& y) const {
    auto it = exit_counts.find(y);
    return it == exit_counts.end() ? 0.0
                                   : double(it->second) / double(n_samples);
  }
};

HarmonicMeasureEstimate estimate_harmonic_measure(const Aggregate& A,
                                                  const Point& x,
                                                  uint64_t n_samples,
                                                  RngStream& rng,
                                                  const WalkOptions& opts = {});

/// Empirical lower bound on the Harnack-type ratio h_y(x) / h_y(0) over
/// x in B[n/2] and exit points y of B[n]. Exit points whose origin-walk
/// count falls below min_count are excluded and reported.
struct HarnackScanResult {
  double min_ratio = 0.0;
  Point argmin_start;
  Point argmin_exit;
  uint64_t excluded_exits = 0;  // exits skipped for insufficient counts
  uint64_t considered_exits = 0;
};

HarnackScanResult harnack_ratio_scan(int dim, int n, uint64_t n_samples,
                                     RngStream& rng, uint64_t min_count = 50);

/// Paired growth with killing: E receives one particle per step; with
/// probability eta the step's particle survives for F too, in which case a
/// single walk from the origin settles F at its exit from F and then keeps
/// walking to settle E at its exit from E. Killed steps settle E with a
/// walk from the step's own start. The shared continuation keeps F inside E
/// at every step (asserted); kappa counts survivors and is Binomial(k, eta).
struct KilledCouplingResult {
  Aggregate e_final;
  Aggregate f_final;
  uint64_t kappa = 0;
};

KilledCouplingResult coupled_domination_run(int dim, int ball_radius,
                                            const std::vector<Point>& starts,
                                            double eta,
                                            const StreamFamily& streams,
                                            const WalkOptions& opts = {});

/// Divisible sandpile state over a dense box.
class SandpileState {
 public:
  SandpileState(int dim, int box_radius);

  int dim() const { return dim_; }
  int box_radius() const { return box_radius_; }

  double mass(const Point& p) const;
  double odometer(const Point& p) const;
  double total_mass() const;

  /// Max |x| over sites with mass > eps; -1 if none.
  double support_outradius(double eps = 1e-9) const;
  /// Largest r with mass >= 1 - eps on all of B[r]; -1 if not even at 0.
  double full_mass_inradius(double eps = 1e-6) const;

  /// Sum of m(x) h(x) for a caller-supplied test function.
  template <typename H>
  double quadrature(H&& h) const {
    double s = 0.0;
    for (size_t i = 0; i < mass_.size(); ++i) {
      if (mass_[i] != 0.0) s += mass_[i] * h(point_at(i));
    }
    return s;
  }

  // Internal accessors used by the relaxation.
  size_t cell_count() const { return mass_.size(); }
  Point point_at(size_t flat) const;
  size_t flat_index(const Point& p) const;
  std::vector<double>& mass_data() { return mass_; }
  std::vector<double>& odometer_data() { return odometer_; }
  const std::vector<double>& mass_data() const { return mass_; }

 private:
  int dim_;
  int box_radius_;
  int side_;
  std::vector<double> mass_;
  std::vector<double> odometer_;
};

/// Relaxes an initial point mass M at the origin: every site with mass
/// above 1 keeps 1 and splits the excess equally among its 2d neighbors,
/// until the largest excess falls below tol. Aborts after 10^7 sweeps.
SandpileState sandpile_relax(int dim, double initial_mass, double tol = 1e-8);

/// Monte Carlo estimate of sum_y |h_y(0) - avg_{x in B[n]} h_y(x)| for
/// A = B[n], using n_samples walks from the origin and n_samples walks
/// from uniformly drawn starts.
double averaging_defect(int dim, int n, uint64_t n_samples, RngStream& rng);

enum class Color : uint8_t { Blue, Red, Black };

/// Colored growth over an aggregate started from F with E blue and F\E red.
/// Per step a uniform site of the aggregate launches a particle:
///   - from blue: walk to the exit of the blue set; the landing site turns
///     blue; a particle previously there wakes up and continues by color;
///   - a woken red walks to the exit of red-union-blue; its landing turns
///     red, waking any black particle there;
///   - from red or black (or woken black): walk to the exit of the whole
///     aggregate; the landing site turns black.
/// The blue set is then distributed like the subset process on E in a host
/// of size |F|, and blue-union-red like launching F\E onto that subset.
struct TricolorResult {
  Aggregate aggregate;          // all occupied sites
  std::unordered_map<uint64_t, Color> color_of;  // keyed by hash_point
  std::vector<Point> blue;
  std::vector<Point> red_blue;  // blue plus red
  uint64_t n_blue = 0, n_red = 0, n_black = 0;
};

TricolorResult tricolor_run(const Aggregate& E, const Aggregate& F, uint64_t k,
                            const StreamFamily& streams);

}  // namespace uidla
