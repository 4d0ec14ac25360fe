#ifndef RITOR_COHOMOLOGY_HPP
#define RITOR_COHOMOLOGY_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ritor/fourier.hpp"

namespace ritor {

/// sup-norm contraction rates of the adapted blocks:
/// lamS = sup |Lambda^S|, lamU = sup |(Lambda^U)^{-1}|; both must be < 1.
struct CohoMargins {
  double lamS = 0.0;
  double lamU = 0.0;
  bool contracting() const { return lamS < 1.0 && lamU < 1.0; }
};

struct CohoOptions {
  int n_max = 60;        // initial truncation depth
  double tol = 1e-6;     // certified tail bound target
  bool auto_raise = true;
  int hard_cap = 600;    // absolute depth ceiling when auto-raising
};

/// Right-hand side supplier: value of the (frame-transformed) section at
/// (theta + depth*alpha, Phi_depth omega). Deterministic data simply ignores
/// the depth's omega shift.
using VecRhs = std::function<Eigen::VectorXd(int depth, const Eigen::VectorXd& theta)>;
using MatRhs = std::function<Eigen::MatrixXd(int depth, const Eigen::VectorXd& theta)>;

struct CohoReport {
  double tail_s = 0.0, tail_u = 0.0;
  int depth_s = 0, depth_u = 0;
  bool certified = false;
};

/// Solve Lambda(theta) u(theta, w) - u(theta+alpha, Phi_1 w) = -r(theta, w)
/// at the given target points; Lambda = blockdiag(Lambda^S, Lambda^U) given
/// as matrix-valued Fourier tori (dS x dS resp. dU x dU). The stable block
/// sums the forward contracting series, the unstable block the backward
/// series of inverse factors. Tail bounds lam^{N+1} |r|_inf / (1 - lam) are
/// reported; the result is certified only when both fall below tol.
std::vector<Eigen::VectorXd> coho_solve_vec(
    const FourierTorus& LamS, const FourierTorus& LamU, const CohoMargins& margins,
    const VecRhs& rhs, const std::vector<Eigen::VectorXd>& targets,
    const Eigen::VectorXd& alpha, const CohoOptions& opts, CohoReport* report = nullptr);

/// Sylvester-type block equations for the frame corrections:
///   SU:  Lambda^S Q - (Q o T) Lambda^U = -E     (series over depth < 0)
///   US:  Lambda^U Q - (Q o T) Lambda^S = -E     (series over depth >= 0)
/// rhs supplies E at (theta + depth*alpha, Phi_depth omega).
std::vector<Eigen::MatrixXd> coho_solve_su(
    const FourierTorus& LamS, const FourierTorus& LamU, const CohoMargins& margins,
    const MatRhs& rhs, const std::vector<Eigen::VectorXd>& targets,
    const Eigen::VectorXd& alpha, const CohoOptions& opts, CohoReport* report = nullptr);

std::vector<Eigen::MatrixXd> coho_solve_us(
    const FourierTorus& LamS, const FourierTorus& LamU, const CohoMargins& margins,
    const MatRhs& rhs, const std::vector<Eigen::VectorXd>& targets,
    const Eigen::VectorXd& alpha, const CohoOptions& opts, CohoReport* report = nullptr);

}  // namespace ritor

#endif
