#ifndef RITOR_PERTURBATION_HPP
#define RITOR_PERTURBATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ritor/cohomology.hpp"
#include "ritor/torus_solver.hpp"

namespace ritor {

/// Noise-expansion coefficients of one realization, stored as Fourier tori:
/// K[k-1] holds K_k for k = 1..order.
struct ExpansionBundle {
  int order = 0;
  std::uint64_t seed = 0;
  std::vector<FourierTorus> K;
  std::vector<double> coho_tail;  // certified tail bound per order
};

/// First-order reducibility correction at the requested points.
struct LambdaFirst {
  std::vector<Eigen::MatrixXd> Q1;       // SS and UU blocks identically zero
  std::vector<Eigen::MatrixXd> Lambda1;  // block diagonal by construction
  std::vector<Eigen::MatrixXd> Etilde;   // frame-conjugated forcing (diagnostics)
};

/// Per-realization expansion machinery over a solved deterministic torus.
/// All evaluations are pure in (realization, base shift, theta), so
/// ensemble loops parallelize over realizations without shared state.
class Expansion {
 public:
  Expansion(DeterministicTorus torus, SolverOptions opts);

  const DeterministicTorus& torus() const { return torus_; }
  const SolverOptions& options() const { return opts_; }

  /// Noise horizon (time units each side of 0) that covers the series
  /// depths plus `extra` whole-unit shifts. Order-k coefficients nest k
  /// levels of series, so the horizon scales with the order.
  double horizon(int extra = 2, int order = 1) const;
  NoiseRealization sample_noise(std::uint64_t seed, double extra_forward = 2,
                                double extra_backward = 0, int order = 1) const;

  /// K_k(theta, Phi_base omega) for each theta in `targets` (targets given
  /// in the coordinates of the shifted realization).
  std::vector<Eigen::VectorXd> coeff_at(const NoiseRealization& w, int base,
                                        const std::vector<Eigen::VectorXd>& targets,
                                        int k, CohoReport* rep = nullptr) const;

  /// K0(theta) + sum_{k<=order} eps^k K_k(theta, Phi_base omega).
  Eigen::VectorXd truncated_at(const NoiseRealization& w, int base,
                               const Eigen::VectorXd& theta, int order,
                               double eps) const;

  /// The expansion remainder R_{k-1}(theta, Phi_depth omega).
  Eigen::VectorXd remainder_at(const NoiseRealization& w, int depth,
                               const Eigen::VectorXd& theta, int k) const;

  /// Coefficients on the solver grid, analyzed into Fourier tori.
  ExpansionBundle bundle_on_grid(const NoiseRealization& w, int order) const;

  /// (Q1, Lambda1) from the first-order reducibility equation; SS/UU blocks
  /// of Q1 are chosen zero, Lambda1 = blockdiag of the conjugated forcing.
  LambdaFirst lambda_first(const NoiseRealization& w, int base,
                           const std::vector<Eigen::VectorXd>& targets) const;

  /// sup over probes of |F_eps(Ktr(theta), theta, omega) - Ktr(theta+alpha)|
  /// for the order-l truncation Ktr (the shifted side is evaluated with
  /// Phi_1 omega).
  double defect(const NoiseRealization& w, double eps, int order,
                const std::vector<Eigen::VectorXd>& probes) const;

  /// K_1 values along the skew-product orbit (theta0 + j alpha, Phi_j omega)
  /// for j = 0..n_steps, sharing remainder slices across the orbit.
  std::vector<Eigen::VectorXd> k1_along_orbit(const NoiseRealization& w,
                                              const Eigen::VectorXd& theta0,
                                              int n_steps) const;

  int cells_per_unit() const { return cells_per_unit_; }
  int max_order() const { return max_order_; }

 private:
  DeterministicTorus torus_;
  SolverOptions opts_;
  FourierTorus lamS_, lamU_;
  CohoMargins margins_;
  int cells_per_unit_;
  int max_order_ = 3;  // smoothness budget; config-gated
};

/// Defect table of one bundle across an epsilon grid plus the fitted
/// log-log slope.
struct DefectTable {
  std::vector<double> eps;
  std::vector<double> defect;
  double slope = 0.0;
};

DefectTable expansion_defect(const Expansion& ex, const NoiseRealization& w, int order,
                             const std::vector<double>& eps_grid,
                             const std::vector<Eigen::VectorXd>& probes);

}  // namespace ritor

#endif
