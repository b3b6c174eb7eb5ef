#include "uidla/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uidla {

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::runtime_error("gamma_q: bad arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double stat, double df) {
  return gamma_q(df / 2.0, stat / 2.0);
}

namespace {

// Pools trailing low-expectation bins together until every kept bin has
// expected count >= min_expected. Bins are pooled in increasing expectation
// order into a single overflow bin.
void pool_bins(std::vector<double>& expected, std::vector<double>& observed,
               double min_expected) {
  std::vector<size_t> idx(expected.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return expected[a] > expected[b]; });
  std::vector<double> e2, o2;
  double pool_e = 0.0, pool_o = 0.0;
  for (size_t i : idx) {
    if (expected[i] >= min_expected) {
      e2.push_back(expected[i]);
      o2.push_back(observed[i]);
    } else {
      pool_e += expected[i];
      pool_o += observed[i];
    }
  }
  if (pool_e > 0.0) {
    e2.push_back(pool_e);
    o2.push_back(pool_o);
  }
  expected = std::move(e2);
  observed = std::move(o2);
}

}  // namespace

double chi_square_gof_pvalue(const std::vector<uint64_t>& observed,
                             const std::vector<double>& probabilities,
                             double min_expected) {
  if (observed.size() != probabilities.size()) {
    throw std::runtime_error("chi_square_gof: size mismatch");
  }
  uint64_t total = 0;
  for (uint64_t o : observed) total += o;
  if (total == 0) throw std::runtime_error("chi_square_gof: no observations");

  std::vector<double> e, o;
  for (size_t i = 0; i < observed.size(); ++i) {
    e.push_back(probabilities[i] * double(total));
    o.push_back(double(observed[i]));
  }
  pool_bins(e, o, min_expected);
  if (e.size() < 2) return 1.0;
  double stat = 0.0;
  for (size_t i = 0; i < e.size(); ++i) {
    double d = o[i] - e[i];
    stat += d * d / e[i];
  }
  return chi_square_sf(stat, double(e.size() - 1));
}

double chi_square_two_sample_pvalue(const std::vector<uint64_t>& a,
                                    const std::vector<uint64_t>& b,
                                    double min_expected) {
  if (a.size() != b.size()) {
    throw std::runtime_error("chi_square_two_sample: size mismatch");
  }
  double na = 0, nb = 0;
  for (uint64_t v : a) na += double(v);
  for (uint64_t v : b) nb += double(v);
  if (na == 0 || nb == 0) throw std::runtime_error("chi_square_two_sample: empty sample");

  // Pool rare outcomes by pooled expectation, then form the 2 x K table.
  std::vector<double> pooled_e, oa, ob;
  for (size_t i = 0; i < a.size(); ++i) {
    pooled_e.push_back(double(a[i] + b[i]) * std::min(na, nb) / (na + nb));
    oa.push_back(double(a[i]));
  }
  // Reuse pool_bins on sample a's layout, mirroring merges onto sample b.
  std::vector<size_t> idx(a.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t x, size_t y) { return pooled_e[x] > pooled_e[y]; });
  std::vector<double> ka, kb;
  double pa = 0, pb = 0;
  for (size_t i : idx) {
    if (pooled_e[i] >= min_expected) {
      ka.push_back(double(a[i]));
      kb.push_back(double(b[i]));
    } else {
      pa += double(a[i]);
      pb += double(b[i]);
    }
  }
  if (pa + pb > 0) {
    ka.push_back(pa);
    kb.push_back(pb);
  }
  size_t k = ka.size();
  if (k < 2) return 1.0;
  double stat = 0.0;
  for (size_t i = 0; i < k; ++i) {
    double col = ka[i] + kb[i];
    double ea = col * na / (na + nb);
    double eb = col * nb / (na + nb);
    if (ea > 0) stat += (ka[i] - ea) * (ka[i] - ea) / ea;
    if (eb > 0) stat += (kb[i] - eb) * (kb[i] - eb) / eb;
  }
  return chi_square_sf(stat, double(k - 1));
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.n = xs.size();
  s.min = s.max = xs[0];
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / double(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / double(s.n - 1));
  }
  return s;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::runtime_error("median: empty");
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash_file: cannot open " + path);
  uint64_t h = 0xCBF29CE484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= (unsigned char)buf[i];
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

std::string format_sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::string(buf);
}

}  // namespace uidla
