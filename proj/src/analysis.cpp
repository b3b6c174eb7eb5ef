#include "uidla/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "uidla/processes.hpp"
#include "uidla/stats.hpp"

namespace uidla {

double ball_radius_equiv(int dim, uint64_t n_sites) {
  if (n_sites == 0) throw std::runtime_error("ball_radius_equiv: empty set");
  // Bisect on the squared radius: vol(sqrt(s)) is monotone in s.
  int64_t lo = 0;  // vol(0) = 1 <= n_sites
  int64_t hi = 1;
  while (ball_volume(dim, std::sqrt(double(hi))) <= n_sites) {
    hi *= 2;
    if (hi > int64_t(1) << 44) throw std::runtime_error("ball_radius_equiv: too large");
  }
  while (lo + 1 < hi) {
    int64_t mid = lo + (hi - lo) / 2;
    if (ball_volume(dim, std::sqrt(double(mid))) <= n_sites) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(double(lo));
}

ShapeReport shape_report(const Aggregate& a) {
  if (a.empty()) throw std::runtime_error("shape_report: empty aggregate");
  ShapeReport r;
  r.n_sites = a.size();
  r.ball_radius_equiv = ball_radius_equiv(a.dim(), a.size());
  r.inradius = a.inradius();
  r.outradius = a.outradius();
  r.ball_volume_equiv = ball_volume(a.dim(), r.ball_radius_equiv);

  const int64_t req2 = radius_sq_threshold(r.ball_radius_equiv);
  uint64_t inter = 0;
  size_t max_shell = size_t(std::floor(r.outradius)) + 1;
  r.annulus_occupancy.assign(max_shell, 0);
  for (const Point& p : a.sites()) {
    int64_t n2 = p.norm2();
    if (n2 <= req2) ++inter;
    ++r.annulus_occupancy[size_t(isqrt64(n2))];
  }
  r.intersection_count = inter;
  r.symdiff_count = (r.n_sites - inter) + (r.ball_volume_equiv - inter);
  return r;
}

void write_shape_report_csv(std::ostream& out, const ShapeReport& r) {
  out << "n_sites,ball_radius_equiv,inradius,outradius,symdiff_count,"
         "intersection_count,ball_volume_equiv\n";
  out << r.n_sites << ',' << format_sig9(r.ball_radius_equiv) << ','
      << format_sig9(r.inradius) << ',' << format_sig9(r.outradius) << ','
      << r.symdiff_count << ',' << r.intersection_count << ','
      << r.ball_volume_equiv << "\n";
  out << "shell,occupied\n";
  for (size_t j = 0; j < r.annulus_occupancy.size(); ++j) {
    out << j << ',' << r.annulus_occupancy[j] << "\n";
  }
}

int AnnulusSpec::index_of(const Point& p) const {
  double d = std::sqrt(double(p.norm2()));
  if (d <= inner_radius) return -1;
  int k = int(std::floor((d - inner_radius) / width));
  // Boundary |p| = m + (k+1) w belongs to annulus k.
  if (k > 0 && d <= inner_radius + double(k) * width) --k;
  return k >= count ? count : k;
}

double AnnulusSpec::preset_width(int dim, double n, double beta) {
  return beta * std::pow(n, 1.0 - 1.0 / (4.0 * dim));
}

double AnnulusCrossingReport::tail(int j) const {
  uint64_t c = 0;
  for (size_t i = size_t(j); i < max_index_histogram.size(); ++i) {
    c += max_index_histogram[i];
  }
  return double(c) / double(n_walks);
}

AnnulusCrossingReport annulus_crossing_probe(const Aggregate& S,
                                             const AnnulusSpec& spec,
                                             const std::vector<Point>& starts,
                                             uint64_t n_walks, RngStream& rng) {
  if (starts.empty()) throw std::runtime_error("annulus probe: no starts");
  if (spec.count < 1 || spec.width <= 0) {
    throw std::runtime_error("annulus probe: bad annulus spec");
  }
  const int dim = S.dim();
  const int64_t inner2 = radius_sq_threshold(spec.inner_radius);

  AnnulusCrossingReport rep;
  rep.n_walks = n_walks;
  rep.max_index_histogram.assign(size_t(spec.count) + 1, 0);
  rep.crossed_counts.assign(size_t(spec.count), 0);

  for (uint64_t w = 0; w < n_walks; ++w) {
    Point pos = starts[size_t(w % starts.size())];
    int max_idx = -1;  // -1: never left B[m]
    auto note = [&](const Point& p) {
      if (p.norm2() > inner2) max_idx = std::max(max_idx, spec.index_of(p));
    };
    note(pos);
    while (pos.norm2() <= inner2 || S.contains(pos)) {
      pos = srw_step(pos, dim, rng);
      note(pos);
    }
    if (max_idx < 0) max_idx = 0;  // settled exactly on leaving; annulus 0
    ++rep.max_index_histogram[size_t(max_idx)];
    for (int k = 0; k < max_idx && k < spec.count; ++k) {
      ++rep.crossed_counts[size_t(k)];
    }
  }
  return rep;
}

std::vector<Point> sample_ball_points(int dim, double radius, uint64_t count,
                                      RngStream& rng) {
  const int64_t r2 = radius_sq_threshold(radius);
  const int64_t m = isqrt64(r2);
  std::vector<Point> out;
  out.reserve(size_t(count));
  while (out.size() < count) {
    Point p;
    for (int a = 0; a < dim; ++a) {
      p.c[a] = int32_t(int64_t(rng.below(uint64_t(2 * m + 1))) - m);
    }
    if (p.norm2() <= r2) out.push_back(p);
  }
  return out;
}

std::vector<FluctuationRow> fluctuation_scaling(ProcessKind process, int dim,
                                                const std::vector<double>& radii,
                                                uint64_t replicas,
                                                const StreamFamily& streams,
                                                const WalkOptions& opts) {
  for (size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] <= radii[i - 1]) {
      throw std::runtime_error("fluctuation_scaling: radii must be ascending");
    }
  }
  if (process == ProcessKind::Subset) {
    throw std::runtime_error("fluctuation_scaling: subset process unsupported");
  }

  std::vector<FluctuationRow> rows;
  for (size_t ri = 0; ri < radii.size(); ++ri) {
    const double n = radii[ri];
    const uint64_t target = ball_volume(dim, n);
    std::vector<double> out_excess, in_deficit;
    for (uint64_t rep = 0; rep < replicas; ++rep) {
      // Stream replica namespaced by both radius index and replica.
      StreamFamily fam = streams.with_replica(streams.replica +
                                              uint64_t(ri) * replicas + rep + 1);
      Aggregate seeded(dim);
      seeded.insert(Point{});
      Aggregate final_agg(dim);
      switch (process) {
        case ProcessKind::Idla:
          final_agg = run_idla(Aggregate(dim), repeated_starts(Point{}, target), fam, opts);
          break;
        case ProcessKind::Uidla:
          final_agg = run_uidla(seeded, target - 1, fam, opts).aggregate;
          break;
        case ProcessKind::Richardson:
          final_agg = run_richardson(seeded, target - 1, fam);
          break;
        case ProcessKind::Subset:
          break;
      }
      out_excess.push_back(final_agg.outradius() - n);
      in_deficit.push_back(n - final_agg.inradius());
    }
    Summary so = summarize(out_excess);
    Summary si = summarize(in_deficit);
    FluctuationRow row;
    row.n = n;
    row.particles = target;
    row.replicas = replicas;
    row.mean_out_excess = so.mean;
    row.mean_in_deficit = si.mean;
    const double undefined = std::numeric_limits<double>::quiet_NaN();
    row.sd_out_excess = replicas > 1 ? so.stddev : undefined;
    row.sd_in_deficit = replicas > 1 ? si.stddev : undefined;
    rows.push_back(row);
  }
  return rows;
}

void write_fluctuation_csv(std::ostream& out,
                           const std::vector<FluctuationRow>& rows) {
  out << "n,particles,replicas,mean_out_excess,sd_out_excess,"
         "mean_in_deficit,sd_in_deficit\n";
  for (const FluctuationRow& r : rows) {
    out << format_sig9(r.n) << ',' << r.particles << ',' << r.replicas << ','
        << format_sig9(r.mean_out_excess) << ','
        << (std::isnan(r.sd_out_excess) ? "undefined" : format_sig9(r.sd_out_excess))
        << ',' << format_sig9(r.mean_in_deficit) << ','
        << (std::isnan(r.sd_in_deficit) ? "undefined" : format_sig9(r.sd_in_deficit))
        << "\n";
  }
}

}  // namespace uidla
