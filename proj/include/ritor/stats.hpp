#ifndef RITOR_STATS_HPP
#define RITOR_STATS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ritor/perturbation.hpp"
#include "ritor/util.hpp"

namespace ritor {

/// Per-(probe, component) moments of the random torus ensemble.
struct EnsembleSummary {
  long n_samples = 0;
  long n_failed = 0;
  std::vector<Eigen::VectorXd> probes;
  std::vector<std::vector<Moments>> moments;  // [probe][component]
};

/// K_eps = K0 + eps K1 + ... sampled over realizations; seeds are
/// counter-derived per sample and the reduction is pairwise, so results are
/// independent of the thread count.
EnsembleSummary mc_torus_moments(const Expansion& ex, int order, double eps,
                                 const std::vector<Eigen::VectorXd>& probes,
                                 long n_samples, std::uint64_t seed, int threads);

struct LyapunovReport {
  double eps = 0.0;
  int n_steps = 0;
  long n_samples = 0;
  std::vector<double> base;         // theta-averaged log |diag Lambda0|, sorted desc
  std::vector<double> direct_mean;  // orthonormalized-cocycle averages
  std::vector<double> direct_se;
  std::vector<double> pert_mean;    // base + eps * <Lambda1 relative correction>
  std::vector<double> pert_se;
};

/// Direct column: QR-orthonormalized cocycle averages of the transfer
/// matrices along torus orbits. Perturbative column: spectrum of Lambda0
/// plus the first-order Lambda1 correction (order >= 1 bundles).
LyapunovReport lyapunov_spectrum(const Expansion& ex, double eps, int n_steps,
                                 long n_samples, std::uint64_t seed, int order,
                                 int threads);

/// Manifold in the original SDE coordinates: K + eps zeta(Phi_t omega).
FourierTorus pullback_to_sde(const FourierTorus& K, const NoiseRealization& w,
                             double eps, double t);

struct ExitRow {
  double level;
  long exits;
  long n;
  WilsonCI ci;
};

/// Euler-Maruyama estimate of P[sup_{|z0| <= R} sup_{t <= T} |z_t(z0)| >= level]:
/// per noise realization the sup over the start ball is approximated from
/// below by a pooled set of starts, `n_starts` uniform in the ball plus one
/// on the boundary (so levels <= R exit with probability one). Blow-ups
/// count as exits at every level.
std::vector<ExitRow> exit_probability(const ModelParams& p,
                                      const std::vector<double>& levels, double R,
                                      double T, long n_samples, double eps,
                                      std::uint64_t seed, double h, int threads,
                                      int n_starts = 4);

struct ErgodicResult {
  double orbit_avg = 0.0;
  double orbit_se = 0.0;
  double product_avg = 0.0;
  double product_se = 0.0;
  double deviation = 0.0;  // |difference| / combined SE
};

/// Orbit averages of a named observable under (theta, omega) ->
/// (theta+alpha, Phi_1 omega) against the product-measure Monte Carlo
/// average. Observables: "const", "cos", "cos_zeta", "cos_tanh_zeta".
ErgodicResult ergodic_average_test(const ModelParams& p, const std::string& observable,
                                   long n_orbit, long n_samples, std::uint64_t seed,
                                   double h, int threads);

}  // namespace ritor

#endif
