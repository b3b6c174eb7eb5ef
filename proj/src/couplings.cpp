#include "uidla/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uidla/processes.hpp"

namespace uidla {

HarmonicMeasureEstimate estimate_harmonic_measure(const Aggregate& A,
                                                  const Point& x,
                                                  uint64_t n_samples,
                                                  RngStream& rng,
                                                  const WalkOptions& opts) {
  if (n_samples == 0) {
    throw std::runtime_error("estimate_harmonic_measure: zero samples");
  }
  HarmonicMeasureEstimate est;
  est.start = x;
  est.n_samples = n_samples;
  for (uint64_t i = 0; i < n_samples; ++i) {
    Point y = walk_until_exit(x, A, rng, opts);
    ++est.exit_counts[y];
  }
  return est;
}

HarnackScanResult harnack_ratio_scan(int dim, int n, uint64_t n_samples,
                                     RngStream& rng, uint64_t min_count) {
  if (n > 15) throw std::runtime_error("harnack_ratio_scan: radius too large");
  Aggregate A = make_ball_aggregate(dim, n);
  HarmonicMeasureEstimate at_origin =
      estimate_harmonic_measure(A, Point{}, n_samples, rng);

  HarnackScanResult res;
  res.min_ratio = std::numeric_limits<double>::infinity();
  for (const Point& x : ball_points(dim, n / 2.0)) {
    HarmonicMeasureEstimate at_x = estimate_harmonic_measure(A, x, n_samples, rng);
    for (const auto& [y, count0] : at_origin.exit_counts) {
      if (count0 < min_count) {
        ++res.excluded_exits;
        continue;
      }
      ++res.considered_exits;
      double ratio = at_x.estimate(y) / at_origin.estimate(y);
      if (ratio < res.min_ratio) {
        res.min_ratio = ratio;
        res.argmin_start = x;
        res.argmin_exit = y;
      }
    }
  }
  if (!std::isfinite(res.min_ratio)) {
    throw std::runtime_error("harnack_ratio_scan: no exit reached min_count");
  }
  return res;
}

KilledCouplingResult coupled_domination_run(int dim, int ball_radius,
                                            const std::vector<Point>& starts,
                                            double eta,
                                            const StreamFamily& streams,
                                            const WalkOptions& opts) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::runtime_error("coupled_domination_run: eta must be in [0, 1]");
  }
  const int64_t half_r2 = radius_sq_threshold(ball_radius / 2.0);
  for (const Point& x : starts) {
    if (x.norm2() > half_r2) {
      throw std::runtime_error("coupled_domination_run: start outside B[n/2]");
    }
  }
  KilledCouplingResult out{make_ball_aggregate(dim, ball_radius),
                           make_ball_aggregate(dim, ball_radius), 0};
  uint64_t step = 0;
  for (const Point& x : starts) {
    RngStream rng = streams.particle(step++);
    // Survival decided before (hence independently of) the step's walk.
    bool survive = rng.bernoulli(eta);
    if (!survive) {
      add_particle(out.e_final, x, rng, opts);
      continue;
    }
    ++out.kappa;
    // One walk from the origin settles F at its exit from F, then keeps
    // walking (strong Markov) until it also exits E. The prefix up to the
    // F-exit stays inside F, hence inside E, so E's settled site is the
    // walk's genuine first exit from E.
    Point f_site = walk_until_exit(Point{}, out.f_final, rng, opts);
    if (!out.f_final.insert(f_site)) {
      throw std::logic_error("coupled_domination_run: F exit site occupied");
    }
    Point e_site = walk_until_exit(f_site, out.e_final, rng, opts);
    if (!out.e_final.insert(e_site)) {
      throw std::logic_error("coupled_domination_run: E exit site occupied");
    }
    if (!out.e_final.contains(f_site)) {
      throw std::logic_error("coupled_domination_run: containment violated");
    }
  }
  return out;
}

SandpileState::SandpileState(int dim, int box_radius)
    : dim_(dim), box_radius_(box_radius), side_(2 * box_radius + 1) {
  size_t cells = 1;
  for (int i = 0; i < dim_; ++i) cells *= size_t(side_);
  mass_.assign(cells, 0.0);
  odometer_.assign(cells, 0.0);
}

size_t SandpileState::flat_index(const Point& p) const {
  size_t idx = 0;
  for (int i = 0; i < dim_; ++i) {
    int v = p.c[i] + box_radius_;
    if (v < 0 || v >= side_) throw std::runtime_error("sandpile: point outside box");
    idx = idx * size_t(side_) + size_t(v);
  }
  return idx;
}

Point SandpileState::point_at(size_t flat) const {
  Point p;
  for (int i = dim_ - 1; i >= 0; --i) {
    p.c[i] = int32_t(flat % size_t(side_)) - box_radius_;
    flat /= size_t(side_);
  }
  return p;
}

double SandpileState::mass(const Point& p) const { return mass_[flat_index(p)]; }
double SandpileState::odometer(const Point& p) const {
  return odometer_[flat_index(p)];
}

double SandpileState::total_mass() const {
  double s = 0.0;
  for (double v : mass_) s += v;
  return s;
}

double SandpileState::support_outradius(double eps) const {
  int64_t best = -1;
  for (size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] > eps) best = std::max(best, point_at(i).norm2());
  }
  return best < 0 ? -1.0 : std::sqrt(double(best));
}

double SandpileState::full_mass_inradius(double eps) const {
  int64_t min_deficient = -1;
  for (size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] < 1.0 - eps) {
      int64_t n2 = point_at(i).norm2();
      if (min_deficient < 0 || n2 < min_deficient) min_deficient = n2;
    }
  }
  if (min_deficient == 0) return -1.0;
  if (min_deficient < 0) return double(box_radius_);
  return std::sqrt(double(min_deficient - 1));
}

SandpileState sandpile_relax(int dim, double initial_mass, double tol) {
  if (initial_mass <= 0) throw std::runtime_error("sandpile_relax: mass must be positive");
  if (dim < 1 || dim > kMaxDim) throw std::runtime_error("sandpile_relax: bad dimension");

  // Generous box: the occupied cluster has volume about the initial mass.
  static const double unit_ball_vol[kMaxDim + 1] = {0.0, 2.0, 3.14159265358979,
                                                    4.18879020478639, 4.93480220054468};
  int box = int(std::ceil(std::pow(initial_mass / unit_ball_vol[dim], 1.0 / dim))) + 6;

  while (true) {
    SandpileState s(dim, box);
    auto& m = s.mass_data();
    auto& u = s.odometer_data();
    m[s.flat_index(Point{})] = initial_mass;

    // Precomputed neighbor strides of the dense box.
    std::vector<int64_t> stride(dim);
    stride[dim - 1] = 1;
    for (int i = dim - 2; i >= 0; --i) {
      stride[i] = stride[i + 1] * (2 * box + 1);
    }

    const double share = 1.0 / (2.0 * dim);
    uint64_t sweeps = 0;
    bool overflowed = false;
    while (true) {
      double max_excess = 0.0;
      // Interior sweep; boundary cells of the box must stay below 1.
      for (size_t i = 0; i < m.size(); ++i) {
        double excess = m[i] - 1.0;
        if (excess <= 0.0) continue;
        Point p = s.point_at(i);
        bool at_edge = false;
        for (int a = 0; a < dim; ++a) {
          if (std::abs(p.c[a]) >= box) at_edge = true;
        }
        if (at_edge) {
          overflowed = true;
          break;
        }
        m[i] = 1.0;
        u[i] += excess;
        double piece = excess * share;
        for (int a = 0; a < dim; ++a) {
          m[i + size_t(stride[a])] += piece;
          m[i - size_t(stride[a])] += piece;
        }
        max_excess = std::max(max_excess, excess);
      }
      if (overflowed) break;
      ++sweeps;
      if (max_excess < tol) return s;
      if (sweeps > 10'000'000ull) {
        throw std::runtime_error("sandpile_relax: did not converge");
      }
    }
    box *= 2;  // box was too small; retry
  }
}

double averaging_defect(int dim, int n, uint64_t n_samples, RngStream& rng) {
  if (n > 12) throw std::runtime_error("averaging_defect: radius too large");
  Aggregate A = make_ball_aggregate(dim, n);
  const std::vector<Point> pts = ball_points(dim, n);

  std::map<Point, int64_t> diff;  // count_from_origin - count_from_uniform
  for (uint64_t i = 0; i < n_samples; ++i) {
    ++diff[walk_until_exit(Point{}, A, rng)];
  }
  for (uint64_t i = 0; i < n_samples; ++i) {
    const Point& x = pts[size_t(rng.below(pts.size()))];
    --diff[walk_until_exit(x, A, rng)];
  }
  double defect = 0.0;
  for (const auto& [y, d] : diff) {
    defect += std::fabs(double(d)) / double(n_samples);
  }
  return defect;
}

TricolorResult tricolor_run(const Aggregate& E, const Aggregate& F, uint64_t k,
                            const StreamFamily& streams) {
  const int dim = F.dim();
  if (E.dim() != dim) throw std::runtime_error("tricolor_run: dimension mismatch");
  for (const Point& p : E.sites()) {
    if (!F.contains(p)) throw std::runtime_error("tricolor_run: E must lie inside F");
  }

  TricolorResult st{F, {}, {}, {}, 0, 0, 0};
  for (const Point& p : F.sites()) {
    bool is_blue = E.contains(p);
    st.color_of.emplace(hash_point(p), is_blue ? Color::Blue : Color::Red);
    is_blue ? ++st.n_blue : ++st.n_red;
  }

  auto color_at = [&st](const Point& p) { return st.color_of.at(hash_point(p)); };
  auto is_color = [&st](const Point& p, Color c) {
    auto it = st.color_of.find(hash_point(p));
    return it != st.color_of.end() && it->second == c;
  };
  auto occupy = [&st](const Point& p, Color c) {
    if (!st.aggregate.insert(p)) {
      throw std::logic_error("tricolor_run: landing site already occupied");
    }
    st.color_of.emplace(hash_point(p), c);
  };
  auto recolor = [&st](const Point& p, Color c) { st.color_of[hash_point(p)] = c; };
  auto bump = [&st](Color c, int64_t d) {
    if (c == Color::Blue) st.n_blue += d;
    else if (c == Color::Red) st.n_red += d;
    else st.n_black += d;
  };

  for (uint64_t step = 0; step < k; ++step) {
    RngStream rng = streams.particle(step);
    Point x = st.aggregate.uniform_site(rng);
    Color c = color_at(x);

    int chain = 0;
    if (c == Color::Blue) {
      // Walk to the exit of the blue set; the landing site becomes blue.
      Point z = walk_until_exit_if(
          x, dim, [&](const Point& p) { return is_color(p, Color::Blue); }, rng);
      ++chain;
      if (!st.aggregate.contains(z)) {
        occupy(z, Color::Blue);
        bump(Color::Blue, 1);
        continue;
      }
      Color woken = color_at(z);
      recolor(z, Color::Blue);
      bump(Color::Blue, 1);
      bump(woken, -1);
      if (woken == Color::Red) {
        // The displaced red walks to the exit of red-union-blue.
        Point z2 = walk_until_exit_if(
            z, dim,
            [&](const Point& p) {
              return is_color(p, Color::Blue) || is_color(p, Color::Red);
            },
            rng);
        ++chain;
        if (!st.aggregate.contains(z2)) {
          occupy(z2, Color::Red);
          bump(Color::Red, 1);
          continue;
        }
        Color woken2 = color_at(z2);
        if (woken2 != Color::Black) {
          throw std::logic_error("tricolor_run: red landed on non-black site");
        }
        recolor(z2, Color::Red);
        bump(Color::Red, 1);
        bump(Color::Black, -1);
        // The displaced black walks to the exit of everything.
        Point z3 = walk_until_exit_if(
            z2, dim, [&](const Point& p) { return st.aggregate.contains(p); },
            rng);
        ++chain;
        occupy(z3, Color::Black);
        bump(Color::Black, 1);
      } else {
        // A woken black keeps the black rule: exit the entire aggregate.
        Point z3 = walk_until_exit_if(
            z, dim, [&](const Point& p) { return st.aggregate.contains(p); },
            rng);
        ++chain;
        occupy(z3, Color::Black);
        bump(Color::Black, 1);
      }
    } else {
      // Starting from red or black spawns a black particle.
      Point z = walk_until_exit_if(
          x, dim, [&](const Point& p) { return st.aggregate.contains(p); }, rng);
      ++chain;
      occupy(z, Color::Black);
      bump(Color::Black, 1);
    }
    if (uint64_t(chain) > st.aggregate.size()) {
      throw std::logic_error("tricolor_run: wake-up chain too long");
    }
  }

  for (const Point& p : st.aggregate.sites()) {
    Color c = color_at(p);
    if (c == Color::Blue) {
      st.blue.push_back(p);
      st.red_blue.push_back(p);
    } else if (c == Color::Red) {
      st.red_blue.push_back(p);
    }
  }
  return st;
}

}  // namespace uidla
