#include "ritor/perturbation.hpp"

#include <cmath>
#include <sstream>

#include "ritor/util.hpp"

namespace ritor {

Expansion::Expansion(DeterministicTorus torus, SolverOptions opts)
    : torus_(std::move(torus)), opts_(std::move(opts)) {
  if (!torus_.frame.certified)
    throw CertificationError("Expansion: requires a certified adapted frame");
  lamS_ = torus_.frame.lamS_block();
  lamU_ = torus_.frame.lamU_block();
  margins_ = torus_.frame.margins();
  const double cells = 1.0 / opts_.step;
  cells_per_unit_ = static_cast<int>(std::llround(cells));
  if (std::abs(cells - cells_per_unit_) > 1e-9)
    throw std::invalid_argument("Expansion: 1/step must be an integer cell count");
}

double Expansion::horizon(int extra, int order) const {
  return std::max(1, order) * (opts_.n_max + 2) + extra;
}

NoiseRealization Expansion::sample_noise(std::uint64_t seed, double extra_forward,
                                         double extra_backward, int order) const {
  const double back = horizon(0, order) + extra_backward;
  const double fwd = horizon(0, order) + extra_forward;
  return NoiseRealization::sample(seed, opts_.step, -back, fwd, torus_.params.d);
}

Eigen::VectorXd Expansion::remainder_at(const NoiseRealization& w, int depth,
                                        const Eigen::VectorXd& theta, int k) const {
  std::vector<Eigen::VectorXd> lower(k);
  lower[0] = torus_.K.synthesize(theta);
  for (int j = 1; j < k; ++j)
    lower[j] = coeff_at(w, depth, {theta}, j)[0];
  const NoiseRealization wj = w.shifted_cells(static_cast<long>(depth) * cells_per_unit_);
  return remainder_term(torus_.params, lower, theta, wj, k, opts_.flow());
}

std::vector<Eigen::VectorXd> Expansion::coeff_at(const NoiseRealization& w, int base,
                                                 const std::vector<Eigen::VectorXd>& targets,
                                                 int k, CohoReport* rep) const {
  if (k == 0) {
    std::vector<Eigen::VectorXd> out(targets.size());
    for (size_t i = 0; i < targets.size(); ++i) out[i] = torus_.K.synthesize(targets[i]);
    return out;
  }
  if (k < 0 || k > max_order_) {
    std::ostringstream os;
    os << "coeff_at: order " << k << " exceeds the smoothness budget " << max_order_;
    throw std::invalid_argument(os.str());
  }
  const Eigen::VectorXd alpha = torus_.params.alpha_map();
  const int n = 2 * torus_.params.d;

  auto rhs = [&](int depth, const Eigen::VectorXd& th) -> Eigen::VectorXd {
    const Eigen::VectorXd R = remainder_at(w, base + depth, th, k);
    return torus_.frame.P_at(th + alpha).partialPivLu().solve(R);
  };

  CohoReport local;
  auto Kt = coho_solve_vec(lamS_, lamU_, margins_, rhs, targets, alpha, opts_.coho(),
                           &local);
  if (rep) *rep = local;
  std::vector<Eigen::VectorXd> out(targets.size(), Eigen::VectorXd::Zero(n));
  for (size_t i = 0; i < targets.size(); ++i)
    out[i] = torus_.frame.P_at(targets[i]) * Kt[i];
  return out;
}

Eigen::VectorXd Expansion::truncated_at(const NoiseRealization& w, int base,
                                        const Eigen::VectorXd& theta, int order,
                                        double eps) const {
  Eigen::VectorXd z = torus_.K.synthesize(theta);
  double scale = 1.0;
  for (int k = 1; k <= order; ++k) {
    scale *= eps;
    if (scale == 0.0) break;
    z += scale * coeff_at(w, base, {theta}, k)[0];
  }
  return z;
}

ExpansionBundle Expansion::bundle_on_grid(const NoiseRealization& w, int order) const {
  const TorusGrid grid = opts_.make_grid(torus_.params.m);
  const auto modes = opts_.modes_for(torus_.params.m);
  std::vector<Eigen::VectorXd> targets(grid.size());
  for (long i = 0; i < grid.size(); ++i) targets[i] = grid.node(i);

  ExpansionBundle b;
  b.order = order;
  b.seed = w.seed();
  for (int k = 1; k <= order; ++k) {
    CohoReport rep;
    auto vals = coeff_at(w, 0, targets, k, &rep);
    b.K.push_back(FourierTorus::analyze(grid, vals, modes));
    b.coho_tail.push_back(std::max(rep.tail_s, rep.tail_u));
  }
  return b;
}

LambdaFirst Expansion::lambda_first(const NoiseRealization& w, int base,
                                    const std::vector<Eigen::VectorXd>& targets) const {
  const ModelParams& p = torus_.params;
  const int n = 2 * p.d;
  const int dS = torus_.frame.dS, dU = torus_.frame.dU;
  const Eigen::VectorXd alpha = p.alpha_map();
  const FlowOptions fopt = opts_.flow();

  // frame-conjugated forcing P(th+a)^{-1} [D_z^2 F K1 + D_eps D_z F] P(th)
  auto etilde = [&](int depth, const Eigen::VectorXd& th) -> Eigen::MatrixXd {
    const int q = base + depth;
    const Eigen::VectorXd k1 = coeff_at(w, q, {th}, 1)[0];
    const NoiseRealization wq = w.shifted_cells(static_cast<long>(q) * cells_per_unit_);
    const auto ev = epsilon_variational(p, torus_.K.synthesize(th), th, wq, k1, fopt);
    return torus_.frame.P_at(th + alpha).partialPivLu().solve(ev.E *
                                                              torus_.frame.P_at(th));
  };

  LambdaFirst out;
  const size_t nt = targets.size();
  out.Etilde.resize(nt);
  out.Lambda1.resize(nt);
  for (size_t i = 0; i < nt; ++i) {
    out.Etilde[i] = etilde(0, targets[i]);
    Eigen::MatrixXd L1 = Eigen::MatrixXd::Zero(n, n);
    L1.topLeftCorner(dS, dS) = out.Etilde[i].topLeftCorner(dS, dS);
    L1.bottomRightCorner(dU, dU) = out.Etilde[i].bottomRightCorner(dU, dU);
    out.Lambda1[i] = L1;
  }

  CohoOptions copt = opts_.coho();
  auto Qsu = coho_solve_su(
      lamS_, lamU_, margins_,
      [&](int depth, const Eigen::VectorXd& th) {
        return etilde(depth, th).topRightCorner(dS, dU).eval();
      },
      targets, alpha, copt);
  auto Qus = coho_solve_us(
      lamS_, lamU_, margins_,
      [&](int depth, const Eigen::VectorXd& th) -> Eigen::MatrixXd {
        if (depth == 0) {
          // reuse the depth-0 forcing computed for Lambda1
          for (size_t i = 0; i < nt; ++i)
            if ((th - targets[i]).cwiseAbs().maxCoeff() < 1e-15)
              return out.Etilde[i].bottomLeftCorner(dU, dS).eval();
        }
        return etilde(depth, th).bottomLeftCorner(dU, dS).eval();
      },
      targets, alpha, copt);

  out.Q1.resize(nt);
  for (size_t i = 0; i < nt; ++i) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    Q.topRightCorner(dS, dU) = Qsu[i];
    Q.bottomLeftCorner(dU, dS) = Qus[i];
    out.Q1[i] = Q;
  }
  return out;
}

double Expansion::defect(const NoiseRealization& w, double eps, int order,
                         const std::vector<Eigen::VectorXd>& probes) const {
  const ModelParams& p = torus_.params;
  const Eigen::VectorXd alpha = p.alpha_map();
  const FlowOptions fopt = opts_.flow();
  double worst = 0.0;
  for (const auto& th : probes) {
    const Eigen::VectorXd z0 = truncated_at(w, 0, th, order, eps);
    const Eigen::VectorXd z1 = time_one_map(p, z0, th, w, eps, fopt);
    const Eigen::VectorXd target = truncated_at(w, 1, th + alpha, order, eps);
    worst = std::max(worst, (z1 - target).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<Eigen::VectorXd> Expansion::k1_along_orbit(const NoiseRealization& w,
                                                       const Eigen::VectorXd& theta0,
                                                       int n_steps) const {
  // Shared-slice evaluation: the remainder and frame data at orbit point j
  // are reused by every series that touches depth j.
  const ModelParams& p = torus_.params;
  const Eigen::VectorXd alpha = p.alpha_map();
  const int n = 2 * p.d;
  const int dS = torus_.frame.dS, dU = torus_.frame.dU;

  // pilot slice at depth 0 bounds |R~| to size the series depth
  const auto pilot = remainder_at(w, 0, theta0, 1);
  const double rsup0 = std::max(1e-12, pilot.cwiseAbs().maxCoeff() * 3.0);
  auto need = [&](double lam) {
    return std::min<int>(opts_.n_max,
        std::max<int>(4, static_cast<int>(std::ceil(
            std::log(opts_.tol_coh * (1.0 - lam) / rsup0) / std::log(lam))) + 2));
  };
  const int NS = need(margins_.lamS), NU = need(margins_.lamU);

  const int j_lo = -(NS + 1);
  const int j_hi = n_steps + NU;
  const int count = j_hi - j_lo + 1;

  std::vector<Eigen::VectorXd> rtil(count);     // P(th+a)^{-1} R0 at depth j
  std::vector<Eigen::MatrixXd> lamS_o(count), lamUinv_o(count);
  for (int j = j_lo; j <= j_hi; ++j) {
    const Eigen::VectorXd th = theta0 + j * alpha;
    const Eigen::VectorXd R = remainder_at(w, j, th, 1);
    rtil[j - j_lo] = torus_.frame.P_at(th + alpha).partialPivLu().solve(R);
    const Eigen::MatrixXd L = torus_.frame.Lambda_at(th);
    lamS_o[j - j_lo] = L.topLeftCorner(dS, dS);
    lamUinv_o[j - j_lo] = L.bottomRightCorner(dU, dU).inverse();
  }

  std::vector<Eigen::VectorXd> out(n_steps + 1, Eigen::VectorXd::Zero(n));
  for (int j = 0; j <= n_steps; ++j) {
    Eigen::VectorXd kt = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(dS, dS);
    for (int N = 0; N <= NS; ++N) {
      kt.head(dS) += L * rtil[j - (N + 1) - j_lo].head(dS);
      L = L * lamS_o[j - (N + 1) - j_lo];
    }
    Eigen::MatrixXd Lu = lamUinv_o[j - j_lo];
    for (int N = 0; N <= NU; ++N) {
      kt.tail(dU) -= Lu * rtil[j + N - j_lo].tail(dU);
      if (N < NU) Lu = Lu * lamUinv_o[j + N + 1 - j_lo];
    }
    out[j] = torus_.frame.P_at(theta0 + j * alpha) * kt;
  }
  return out;
}

DefectTable expansion_defect(const Expansion& ex, const NoiseRealization& w, int order,
                             const std::vector<double>& eps_grid,
                             const std::vector<Eigen::VectorXd>& probes) {
  DefectTable t;
  t.eps = eps_grid;
  for (double e : eps_grid) t.defect.push_back(ex.defect(w, e, order, probes));
  std::vector<double> xs, ys;
  for (size_t i = 0; i < t.eps.size(); ++i) {
    if (t.eps[i] > 0.0 && t.defect[i] > 0.0) {
      xs.push_back(t.eps[i]);
      ys.push_back(t.defect[i]);
    }
  }
  if (xs.size() >= 2) t.slope = loglog_slope(xs, ys);
  return t;
}

}  // namespace ritor
