#ifndef RITOR_UTIL_HPP
#define RITOR_UTIL_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace ritor {

/// Index-parallel loop; results must be written to disjoint slots so the
/// outcome is independent of scheduling.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

/// Pairwise (cascade) summation; deterministic for a fixed element order,
/// independent of how the elements were produced.
double pairwise_sum(const std::vector<double>& x);

/// First four standardized sample moments with standard errors.
struct Moments {
  long n = 0;
  double mean = 0.0, var = 0.0, skew = 0.0, kurt_excess = 0.0;
  double se_mean = 0.0, se_var = 0.0, se_skew = 0.0, se_kurt = 0.0;
};
Moments compute_moments(const std::vector<double>& x);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Wilson score interval for a binomial proportion (z = 1.96 by default).
struct WilsonCI {
  double p_hat, lo, hi;
};
WilsonCI wilson_interval(long successes, long n, double z = 1.96);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace ritor

#endif
