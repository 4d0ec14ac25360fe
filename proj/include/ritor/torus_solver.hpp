#ifndef RITOR_TORUS_SOLVER_HPP
#define RITOR_TORUS_SOLVER_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ritor/cohomology.hpp"
#include "ritor/flow.hpp"
#include "ritor/fourier.hpp"
#include "ritor/model.hpp"
#include "ritor/noise.hpp"

namespace ritor {

/// Solver could not certify a result (hyperbolicity margin, conditioning,
/// Fourier tail, or convergence failure).
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  std::vector<int> modes{16};
  std::vector<int> grid{64};
  double step = 1.0 / 64;
  double tol_inv = 1e-9;
  double tol_red = 1e-9;
  double tol_coh = 1e-6;
  double cond_max = 1e6;
  int max_newton = 25;
  int n_max = 60;        // cohomological truncation depth (auto-raised)
  int threads = 1;
  int r_monitor = 0;     // derivative orders tracked in sup-norm diagnostics
  int max_order = 3;     // smoothness budget for the noise expansion
  double tail_rule = 1e-8;  // certification requires tail <= rule * max|coeff|

  TorusGrid make_grid(int m) const;
  std::vector<int> modes_for(int m) const;
  FlowOptions flow() const { return FlowOptions{step, 1e8, false}; }
  CohoOptions coho() const { return CohoOptions{n_max, tol_coh, true, 600}; }
};

/// Frame P(theta) and block-diagonal Lambda(theta) solving the reducibility
/// equation P(theta+alpha)^{-1} M0(theta) P(theta) = Lambda(theta), with the
/// stable/unstable split and certified contraction margins.
struct AdaptedFrame {
  FourierTorus P;       // (2d)^2 components
  FourierTorus Lambda;  // (2d)^2 components, block diagonal
  int dS = 0, dU = 0;
  double lamS_hat = 0.0;   // sup |Lambda^S|
  double lamU_hat = 0.0;   // sup |(Lambda^U)^{-1}|
  double cond_P = 0.0;     // max condition number of P over the grid
  double red_residual = 0.0;
  bool certified = false;

  CohoMargins margins() const { return CohoMargins{lamS_hat, lamU_hat}; }
  FourierTorus lamS_block() const;
  FourierTorus lamU_block() const;
  Eigen::MatrixXd P_at(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd Lambda_at(const Eigen::VectorXd& theta) const;
};

struct DeterministicTorus {
  ModelParams params;
  FourierTorus K;
  AdaptedFrame frame;
  double residual = 0.0;       // sup-norm invariance defect
  double residual_cr = 0.0;    // C^r defect diagnostic (r = r_monitor)
  int newton_iters = 0;
  std::vector<double> residual_history;
};

/// Certified hyperbolicity numbers: the block margins and the resolvent
/// bound c_H <= [(1-lamS)^{-1} + lamU (1-lamU)^{-1} + 1] * cond(P).
struct HyperbolicityMargins {
  double lamS_hat, lamU_hat, c_H_hat;
};

/// Newton solve of F0(K(theta), theta) = K(theta + alpha) at eps = 0 from
/// the initial guess K_init (pass a zero torus for the small-forcing basin).
DeterministicTorus solve_k0(const ModelParams& p, const FourierTorus& K_init,
                            const SolverOptions& opts);

/// Reducibility of the deterministic transfer matrix along K0: eigen-frame
/// initialization from the grid-averaged matrix, then block-diagonalizing
/// fixed-point refinement with the SS/UU corrections chosen zero.
AdaptedFrame solve_reducibility(const ModelParams& p, const FourierTorus& K0,
                                const SolverOptions& opts);

HyperbolicityMargins hyperbolicity_margin(const AdaptedFrame& frame, int n_probe = 256);

struct ResidualReport {
  double sup = 0.0;     // max over grid (and realizations)
  double cr_sup = 0.0;  // C^r sup-norm of the defect function (deterministic only)
};

/// Invariance defect of a fixed torus K: max over the evaluation grid (and
/// over the supplied realizations when eps > 0) of
/// |F_eps(K(theta), theta, omega) - K(theta + alpha)|.
ResidualReport invariance_residual(const ModelParams& p, const FourierTorus& K, double eps,
                                   const std::vector<NoiseRealization>& omegas,
                                   const SolverOptions& opts);

/// Zero torus (the saddle seed for small forcing).
FourierTorus zero_torus(const ModelParams& p, const SolverOptions& opts);

/// A noise realization that an eps = 0 flow can carry (never consulted).
NoiseRealization dummy_noise(const ModelParams& p, double step);

}  // namespace ritor

#endif
