#ifndef RITOR_MODEL_HPP
#define RITOR_MODEL_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace ritor {

/// Langevin data: state z = (x, v) in R^{2d}, quartic potential
/// U(y) = -y^2/2 - delta*y^4/4 acting coordinatewise on y = x - E(theta),
/// dissipation gamma, and m quasi-periodic forcing channels
/// amp_i * sin(2*pi*theta_i) with phase convention
/// theta_i = (alpha_i t + beta_i)/(2*pi) mod 1.
struct ModelParams {
  int d = 1;
  int m = 1;
  double gamma = 1.0;
  double delta = -1.0;
  Eigen::VectorXd amp;    // size m
  Eigen::VectorXd alpha;  // rad / time, size m
  Eigen::VectorXd beta;   // rad, size m
  std::optional<double> n_cut;
  /// channel -> coordinate map; entry -1 broadcasts the channel into every
  /// coordinate (the default).
  std::vector<int> channel_map;

  static ModelParams reference(double amplitude);  // d=1 double well, golden rotation

  /// Throws on hard constraint violations; appends near-resonance warnings.
  void validate(std::vector<std::string>* warnings = nullptr) const;

  Eigen::MatrixXd A() const;            // [[0, I], [I, -gamma I]]
  Eigen::VectorXd alpha_map() const;    // per-axis rotation alpha/(2*pi) mod 1
  Eigen::VectorXd theta0() const;       // beta/(2*pi) mod 1
};

/// Forcing value E(theta) in R^d.
Eigen::VectorXd forcing_E(const ModelParams& p, const Eigen::VectorXd& theta);

/// Full drift (v, -gamma v + (x-E) + delta (x-E)^3); the cut variant swaps in
/// the smooth cut-off dissipation and potential.
Eigen::VectorXd drift(const ModelParams& p, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& theta, bool cut = false);

/// State Jacobian [[0, I], [I + 3 delta diag((x-E)^2), -gamma I]].
Eigen::MatrixXd drift_jacobian(const ModelParams& p, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& theta);

/// Nonlinear part B with drift = A z + B(z, theta); B has zero position block.
Eigen::VectorXd bfield(const ModelParams& p, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& theta);

/// Lyapunov energy |v|^2/2 + U(x-E) + gamma <x,v>/2 + gamma^2 |x|^2/4 + C.
/// Requires C > -inf U = -1/(4 delta) (delta < 0).
double lyapunov_H(const ModelParams& p, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& theta, double C);

/// Quintic smoothstep cut-off: 1 on |x| <= n, 0 on |x| >= 2n, C^2 monotone.
double chi_cut(double x, double n);

}  // namespace ritor

#endif
