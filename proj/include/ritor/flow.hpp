#ifndef RITOR_FLOW_HPP
#define RITOR_FLOW_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ritor/model.hpp"
#include "ritor/noise.hpp"

namespace ritor {

struct FlowOptions {
  double step = 1.0 / 64;      // fixed RK4 step per unit time
  double blowup_radius = 1e8;  // abort threshold on |z|
  bool cut = false;            // integrate the cut-off drift
};

/// Integration left the configured radius; carries the exit time so callers
/// can suggest enabling the cut-off system.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double t, double radius);
  double exit_time;
};

/// Time-t1 map of the pathwise RDE
///   dZ/dt = A Z + B(Z + eps*zeta(Phi_t omega), theta(t)) + eps (A+I) zeta(Phi_t omega)
/// with theta(t) = theta0 + alpha_map * t; zeta is sampled on the
/// realization grid and interpolated linearly at stage times.
Eigen::VectorXd time_one_map(const ModelParams& p, const Eigen::VectorXd& z0,
                             const Eigen::VectorXd& theta0, const NoiseRealization& w,
                             double eps, const FlowOptions& opts, double t_span = 1.0);

struct VariationalResult {
  Eigen::VectorXd z;  // state at t_span
  Eigen::MatrixXd M;  // d z(t_span) / d z0
};

/// State plus the matrix variational equation dM/dt = D_z(rhs) M, M(0) = I.
VariationalResult variational_flow(const ModelParams& p, const Eigen::VectorXd& z0,
                                   const Eigen::VectorXd& theta0, const NoiseRealization& w,
                                   double eps, const FlowOptions& opts, double t_span = 1.0);

/// Raw epsilon-derivatives of the flow at eps = 0:
/// deriv[k-1] = d^k Z / d eps^k (t_span), k = 1..order.
struct DerivStack {
  Eigen::VectorXd z;                     // deterministic flow (order 0)
  std::vector<Eigen::VectorXd> deriv;
};

/// Integrates the derivative hierarchy: order 0 is the deterministic flow,
/// order 1 is forced by D_zB(Z0)*zeta + (A+I)*zeta, order k >= 2 by
/// Bell-polynomial combinations of the lower orders with the first argument
/// shifted by zeta. `seeds`, when given, supplies initial values for the
/// derivative orders (seeds[k-1] = Y_k(0)); default zero.
DerivStack epsilon_derivatives(const ModelParams& p, const Eigen::VectorXd& z0,
                               const Eigen::VectorXd& theta0, const NoiseRealization& w,
                               int order, const FlowOptions& opts,
                               const std::vector<Eigen::VectorXd>* seeds = nullptr);

/// The K_k-independent remainder of the order-k expansion of the invariance
/// equation: seeds the hierarchy with j! K_j (j < k), zero at order k, and
/// returns Y_k(1)/k!. K_lower = {K_0(theta), ..., K_{k-1}(theta)}.
Eigen::VectorXd remainder_term(const ModelParams& p,
                               const std::vector<Eigen::VectorXd>& K_lower,
                               const Eigen::VectorXd& theta, const NoiseRealization& w,
                               int k, const FlowOptions& opts);

struct EpsVariationalResult {
  Eigen::VectorXd z;   // deterministic state at time 1
  Eigen::VectorXd y1;  // pure first eps-derivative (zero initial data)
  Eigen::MatrixXd M;   // deterministic variational matrix
  Eigen::MatrixXd E;   // D_z^2 F [k1_dir, .] + D_eps D_z F   (at eps = 0)
};

/// First-order derivative of the transfer matrix along the expansion:
/// integrates dE/dt = (A + D_zB(Z0)) E + D_z^2 B(Z0)[M k1_dir + Y1 + zeta, .] M.
EpsVariationalResult epsilon_variational(const ModelParams& p, const Eigen::VectorXd& z0,
                                         const Eigen::VectorXd& theta0,
                                         const NoiseRealization& w,
                                         const Eigen::VectorXd& k1_dir,
                                         const FlowOptions& opts);

/// Partial (exponential) Bell polynomial B_{k,r}(x_1, ..., x_{k-r+1})
/// by the standard recursion.
double bell_partial(int k, int r, const std::vector<double>& x);

}  // namespace ritor

#endif
