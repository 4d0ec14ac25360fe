#include "ritor/util.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ritor {

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next(0);
  std::exception_ptr error;
  std::mutex err_mx;
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mx);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<long>(threads, n);
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {
double pairwise_range(const std::vector<double>& x, size_t lo, size_t hi) {
  const size_t n = hi - lo;
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += x[i];
    return s;
  }
  const size_t mid = lo + n / 2;
  return pairwise_range(x, lo, mid) + pairwise_range(x, mid, hi);
}
}  // namespace

double pairwise_sum(const std::vector<double>& x) {
  return x.empty() ? 0.0 : pairwise_range(x, 0, x.size());
}

Moments compute_moments(const std::vector<double>& x) {
  Moments m;
  m.n = static_cast<long>(x.size());
  if (m.n == 0) return m;
  const double n = static_cast<double>(m.n);
  m.mean = pairwise_sum(x) / n;
  std::vector<double> p2(x.size()), p3(x.size()), p4(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double c = x[i] - m.mean;
    p2[i] = c * c;
    p3[i] = c * c * c;
    p4[i] = c * c * c * c;
  }
  const double m2 = pairwise_sum(p2) / n;
  const double m3 = pairwise_sum(p3) / n;
  const double m4 = pairwise_sum(p4) / n;
  m.var = (m.n > 1) ? m2 * n / (n - 1.0) : 0.0;
  const double sd = std::sqrt(m2);
  if (sd > 0.0) {
    m.skew = m3 / (sd * sd * sd);
    m.kurt_excess = m4 / (m2 * m2) - 3.0;
  }
  m.se_mean = std::sqrt(m.var / n);
  m.se_var = (m.n > 1) ? std::sqrt(std::max(0.0, m4 - m2 * m2) / n) : 0.0;
  // normal-theory standard errors, appropriate for Gaussianity checks
  m.se_skew = std::sqrt(6.0 / n);
  m.se_kurt = std::sqrt(24.0 / n);
  return m;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope: need >= 2 matched points");
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

WilsonCI wilson_interval(long successes, long n, double z) {
  WilsonCI ci{0.0, 0.0, 1.0};
  if (n <= 0) return ci;
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  ci.p_hat = p;
  ci.lo = std::max(0.0, center - half);
  ci.hi = std::min(1.0, center + half);
  return ci;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const size_t na = a.size(), nb = b.size();
  size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < na && ib < nb) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < na && a[ia] <= x) ++ia;
    while (ib < nb && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(double(ia) / na - double(ib) / nb));
  }
  return d;
}

}  // namespace ritor
