#include "ritor/cohomology.hpp"

#include <cmath>
#include <stdexcept>

namespace ritor {

namespace {

int block_rows(const FourierTorus& Lam) {
  const int r = static_cast<int>(std::lround(std::sqrt(double(Lam.d_out()))));
  if (r * r != Lam.d_out())
    throw std::invalid_argument("cohomology: Lambda torus is not square matrix-valued");
  return r;
}

void check_margins(const CohoMargins& m) {
  if (!m.contracting())
    throw std::invalid_argument("cohomology: margins not certified (lamS or lamU >= 1)");
}

double tail_bound(double lam, int depth, double rsup) {
  return std::pow(lam, depth + 1) * rsup / (1.0 - lam);
}

}  // namespace

std::vector<Eigen::VectorXd> coho_solve_vec(
    const FourierTorus& LamS, const FourierTorus& LamU, const CohoMargins& margins,
    const VecRhs& rhs, const std::vector<Eigen::VectorXd>& targets,
    const Eigen::VectorXd& alpha, const CohoOptions& opts, CohoReport* report) {
  check_margins(margins);
  const int dS = block_rows(LamS);
  const int dU = block_rows(LamU);
  const size_t nt = targets.size();
  CohoReport rep;

  std::vector<Eigen::VectorXd> out(nt, Eigen::VectorXd::Zero(dS + dU));
  const int cap = opts.auto_raise ? opts.hard_cap : opts.n_max;
  const int min_depth = 2;  // let the running sup of |r| stabilize

  // stable block: K^S(th) = sum_N [prod_{j=1..N} Lam^S(th - j a)] R^S(th-(N+1)a)
  {
    std::vector<Eigen::MatrixXd> L(nt, Eigen::MatrixXd::Identity(dS, dS));
    double rsup = 0.0;
    for (int N = 0;; ++N) {
      for (size_t i = 0; i < nt; ++i) {
        const Eigen::VectorXd th_rot = targets[i] - (N + 1) * alpha;
        const Eigen::VectorXd r = rhs(-(N + 1), th_rot);
        out[i].head(dS) += L[i] * r.head(dS);
        rsup = std::max(rsup, r.head(dS).cwiseAbs().maxCoeff());
      }
      rep.tail_s = tail_bound(margins.lamS, N, rsup);
      rep.depth_s = N;
      if (N >= min_depth && rep.tail_s <= opts.tol) break;
      if (N >= cap) break;
      // extend the running products by Lambda^S(th - (N+1) a)
      for (size_t i = 0; i < nt; ++i)
        L[i] = L[i] * synth_matrix(LamS, targets[i] - (N + 1) * alpha, dS, dS);
    }
  }

  // unstable block: K^U(th) = -sum_N [prod_{j=0..N} Lam^U(th + j a)^{-1}] R^U(th + N a)
  {
    std::vector<Eigen::MatrixXd> L(nt);
    for (size_t i = 0; i < nt; ++i)
      L[i] = synth_matrix(LamU, targets[i], dU, dU).inverse();
    double rsup = 0.0;
    for (int N = 0;; ++N) {
      for (size_t i = 0; i < nt; ++i) {
        const Eigen::VectorXd th_rot = targets[i] + N * alpha;
        const Eigen::VectorXd r = rhs(N, th_rot);
        out[i].tail(dU) -= L[i] * r.tail(dU);
        rsup = std::max(rsup, r.tail(dU).cwiseAbs().maxCoeff());
      }
      rep.tail_u = tail_bound(margins.lamU, N, rsup);
      rep.depth_u = N;
      if (N >= min_depth && rep.tail_u <= opts.tol) break;
      if (N >= cap) break;
      for (size_t i = 0; i < nt; ++i) {
        const Eigen::VectorXd th_next = targets[i] + (N + 1) * alpha;
        L[i] = L[i] * synth_matrix(LamU, th_next, dU, dU).inverse();
      }
    }
  }

  rep.certified = (rep.tail_s <= opts.tol && rep.tail_u <= opts.tol);
  if (report) *report = rep;
  if (!rep.certified && !opts.auto_raise)
    return out;  // caller inspects the report
  if (!rep.certified)
    throw std::runtime_error("cohomological series: tail bound above tolerance at hard cap");
  return out;
}

std::vector<Eigen::MatrixXd> coho_solve_su(
    const FourierTorus& LamS, const FourierTorus& LamU, const CohoMargins& margins,
    const MatRhs& rhs, const std::vector<Eigen::VectorXd>& targets,
    const Eigen::VectorXd& alpha, const CohoOptions& opts, CohoReport* report) {
  check_margins(margins);
  const int dS = block_rows(LamS);
  const int dU = block_rows(LamU);
  const size_t nt = targets.size();
  CohoReport rep;
  const double rate = margins.lamS * margins.lamU;

  // Q(th) = sum_N [prod_{j=1..N} Lam^S(th-j a)] E(th-(N+1)a)
  //                [Lam^U(th-(N+1)a)^{-1} ... Lam^U(th-a)^{-1}]
  std::vector<Eigen::MatrixXd> out(nt, Eigen::MatrixXd::Zero(dS, dU));
  std::vector<Eigen::MatrixXd> L(nt, Eigen::MatrixXd::Identity(dS, dS));
  std::vector<Eigen::MatrixXd> R(nt, Eigen::MatrixXd::Identity(dU, dU));
  const int cap = opts.auto_raise ? opts.hard_cap : opts.n_max;
  double esup = 0.0;
  for (int N = 0;; ++N) {
    for (size_t i = 0; i < nt; ++i) {
      const Eigen::VectorXd th_in = targets[i] - (N + 1) * alpha;
      R[i] = synth_matrix(LamU, th_in, dU, dU).inverse() * R[i];
      const Eigen::MatrixXd E = rhs(-(N + 1), th_in);
      out[i] += L[i] * E * R[i];
      esup = std::max(esup, E.cwiseAbs().maxCoeff());
    }
    rep.tail_s = margins.lamU * std::pow(rate, N + 1) * esup / (1.0 - rate);
    rep.depth_s = N;
    if (N >= 2 && rep.tail_s <= opts.tol) {
      rep.certified = true;
      break;
    }
    if (N >= cap) break;
    for (size_t i = 0; i < nt; ++i)
      L[i] = L[i] * synth_matrix(LamS, targets[i] - (N + 1) * alpha, dS, dS);
  }
  if (report) *report = rep;
  if (!rep.certified && opts.auto_raise)
    throw std::runtime_error("SU Sylvester series: tail bound above tolerance at hard cap");
  return out;
}

std::vector<Eigen::MatrixXd> coho_solve_us(
    const FourierTorus& LamS, const FourierTorus& LamU, const CohoMargins& margins,
    const MatRhs& rhs, const std::vector<Eigen::VectorXd>& targets,
    const Eigen::VectorXd& alpha, const CohoOptions& opts, CohoReport* report) {
  check_margins(margins);
  const int dS = block_rows(LamS);
  const int dU = block_rows(LamU);
  const size_t nt = targets.size();
  CohoReport rep;
  const double rate = margins.lamS * margins.lamU;

  // Q(th) = -sum_N [Lam^U(th)^{-1}...Lam^U(th+N a)^{-1}] E(th+N a)
  //                 [Lam^S(th+(N-1)a) ... Lam^S(th)]
  std::vector<Eigen::MatrixXd> out(nt, Eigen::MatrixXd::Zero(dU, dS));
  std::vector<Eigen::MatrixXd> L(nt);
  std::vector<Eigen::MatrixXd> R(nt, Eigen::MatrixXd::Identity(dS, dS));
  for (size_t i = 0; i < nt; ++i)
    L[i] = synth_matrix(LamU, targets[i], dU, dU).inverse();
  const int cap = opts.auto_raise ? opts.hard_cap : opts.n_max;
  double esup = 0.0;
  for (int N = 0;; ++N) {
    for (size_t i = 0; i < nt; ++i) {
      const Eigen::VectorXd th_rot = targets[i] + N * alpha;
      const Eigen::MatrixXd E = rhs(N, th_rot);
      out[i] -= L[i] * E * R[i];
      esup = std::max(esup, E.cwiseAbs().maxCoeff());
    }
    rep.tail_u = margins.lamU * std::pow(rate, N + 1) * esup / (1.0 - rate);
    rep.depth_u = N;
    if (N >= 2 && rep.tail_u <= opts.tol) {
      rep.certified = true;
      break;
    }
    if (N >= cap) break;
    for (size_t i = 0; i < nt; ++i) {
      const Eigen::VectorXd th_rot = targets[i] + N * alpha;
      L[i] = L[i] * synth_matrix(LamU, th_rot + alpha, dU, dU).inverse();
      R[i] = synth_matrix(LamS, th_rot, dS, dS) * R[i];
    }
  }
  if (report) *report = rep;
  if (!rep.certified && opts.auto_raise)
    throw std::runtime_error("US Sylvester series: tail bound above tolerance at hard cap");
  return out;
}

}  // namespace ritor
