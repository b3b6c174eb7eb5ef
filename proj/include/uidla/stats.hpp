#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uidla {

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution with df degrees of
/// freedom: P(X >= stat).
double chi_square_sf(double stat, double df);

/// Goodness-of-fit p-value of observed counts against given probabilities.
/// Expected counts below min_expected are pooled into the smallest bins'
/// neighbor to keep the approximation honest.
double chi_square_gof_pvalue(const std::vector<uint64_t>& observed,
                             const std::vector<double>& probabilities,
                             double min_expected = 5.0);

/// Two-sample chi-square homogeneity test over a shared outcome space.
double chi_square_two_sample_pvalue(const std::vector<uint64_t>& a,
                                    const std::vector<uint64_t>& b,
                                    double min_expected = 5.0);

struct Summary {
  uint64_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
};
Summary summarize(const std::vector<double>& xs);

double median(std::vector<double> xs);

/// FNV-1a over a file's bytes; used for determinism checks.
uint64_t hash_file(const std::string& path);

std::string format_sig9(double v);

}  // namespace uidla
