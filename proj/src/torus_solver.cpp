#include "ritor/torus_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ritor/util.hpp"

namespace ritor {

namespace {

FourierTorus extract_block(const FourierTorus& mat, int n, int row0, int col0, int r,
                           int c) {
  // component (i,j) of the full n x n matrix lives at flat i*n + j
  FourierTorus out(mat.m(), r * c, mat.modes());
  for (long f = 0; f < mat.n_modes(); ++f) {
    const auto k = mat.mode_at(f);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        out.set_coeff(k, i * c + j, mat.coeff(k, (row0 + i) * n + (col0 + j)));
  }
  return out;
}

double op_norm(const Eigen::MatrixXd& M) {
  return M.jacobiSvd().singularValues()(0);
}

double cond2(const Eigen::MatrixXd& M) {
  const auto sv = M.jacobiSvd().singularValues();
  return sv(0) / sv(sv.size() - 1);
}

void check_tail(const FourierTorus& t, double rule, const char* what) {
  const double mx = t.max_coeff();
  if (mx > 0.0 && t.tail_magnitude() > rule * mx) {
    std::ostringstream os;
    os << what << ": Fourier tail " << t.tail_magnitude() << " exceeds " << rule
       << " * max|coeff| = " << rule * mx << "; raise the mode truncation";
    throw CertificationError(os.str());
  }
}

}  // namespace

TorusGrid SolverOptions::make_grid(int m) const {
  std::vector<int> dims = grid;
  if (static_cast<int>(dims.size()) == 1 && m > 1) dims.assign(m, dims[0]);
  return TorusGrid(m, dims);
}

std::vector<int> SolverOptions::modes_for(int m) const {
  std::vector<int> md = modes;
  if (static_cast<int>(md.size()) == 1 && m > 1) md.assign(m, md[0]);
  return md;
}

FourierTorus AdaptedFrame::lamS_block() const {
  const int n = dS + dU;
  return extract_block(Lambda, n, 0, 0, dS, dS);
}

FourierTorus AdaptedFrame::lamU_block() const {
  const int n = dS + dU;
  return extract_block(Lambda, n, dS, dS, dU, dU);
}

Eigen::MatrixXd AdaptedFrame::P_at(const Eigen::VectorXd& theta) const {
  const int n = dS + dU;
  return synth_matrix(P, theta, n, n);
}

Eigen::MatrixXd AdaptedFrame::Lambda_at(const Eigen::VectorXd& theta) const {
  const int n = dS + dU;
  return synth_matrix(Lambda, theta, n, n);
}

FourierTorus zero_torus(const ModelParams& p, const SolverOptions& opts) {
  return FourierTorus(p.m, 2 * p.d, opts.modes_for(p.m));
}

NoiseRealization dummy_noise(const ModelParams& p, double step) {
  return NoiseRealization::sample(0, step, -step, step, p.d);
}

AdaptedFrame solve_reducibility(const ModelParams& p, const FourierTorus& K0,
                                const SolverOptions& opts) {
  const int n = 2 * p.d;
  const TorusGrid grid = opts.make_grid(p.m);
  const auto modes = opts.modes_for(p.m);
  const Eigen::VectorXd alpha = p.alpha_map();
  const FlowOptions fopt = opts.flow();
  const NoiseRealization dummy = dummy_noise(p, opts.step);
  const long ng = grid.size();

  // transfer matrices M0(theta) = D_z F0(K0(theta), theta) on the grid
  std::vector<Eigen::MatrixXd> M0(ng);
  parallel_for(ng, opts.threads, [&](long i) {
    const Eigen::VectorXd th = grid.node(i);
    M0[i] = variational_flow(p, K0.synthesize(th), th, dummy, 0.0, fopt).M;
  });

  // eigen-frame of the grid-averaged matrix seeds P
  Eigen::MatrixXd Mbar = Eigen::MatrixXd::Zero(n, n);
  for (const auto& M : M0) Mbar += M;
  Mbar /= static_cast<double>(ng);

  Eigen::EigenSolver<Eigen::MatrixXd> es(Mbar);
  if (es.info() != Eigen::Success)
    throw CertificationError("reducibility: eigen-decomposition of the averaged matrix failed");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const auto evals = es.eigenvalues();
  const auto evecs = es.eigenvectors();
  for (int i = 0; i < n; ++i)
    if (std::abs(evals(i).imag()) > 1e-9 * (1.0 + std::abs(evals(i).real())))
      throw CertificationError("reducibility: complex mean spectrum, no real splitting");
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(evals(a)) < std::abs(evals(b));
  });
  for (int i = 0; i + 1 < n; ++i) {
    const double gap =
        std::abs(std::abs(evals(order[i])) - std::abs(evals(order[i + 1])));
    if (gap < 1e-8)
      throw CertificationError("reducibility: eigenvalue collision (|gap| < 1e-8)");
  }
  int dS = 0;
  for (int i = 0; i < n; ++i) {
    const double mod = std::abs(evals(i));
    if (std::abs(mod - 1.0) < 1e-8)
      throw CertificationError("reducibility: eigenvalue on the unit circle, not hyperbolic");
    if (mod < 1.0) ++dS;
  }
  const int dU = n - dS;
  if (dS == 0 || dU == 0)
    throw CertificationError("reducibility: trivial splitting (no stable or no unstable bundle)");

  Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(n, n);
  for (int c = 0; c < n; ++c) {
    Eigen::VectorXd v = evecs.col(order[c]).real();
    v.normalize();
    int imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    P0.col(c) = v;
  }

  // fixed-point refinement: conjugate, keep diagonal blocks as Lambda, kill
  // the off-diagonal blocks through the Sylvester series (SS/UU corrections
  // zero)
  std::vector<Eigen::MatrixXd> Pg(ng, P0);
  FourierTorus P_ft = analyze_matrix(grid, Pg, modes);
  AdaptedFrame frame;
  frame.dS = dS;
  frame.dU = dU;

  const int max_red_iters = 40;
  double res = 0.0;
  for (int it = 0;; ++it) {
    // C(theta) = P(theta+alpha)^{-1} M0(theta) P(theta)
    std::vector<Eigen::MatrixXd> C(ng), Lg(ng);
    res = 0.0;
    for (long i = 0; i < ng; ++i) {
      const Eigen::VectorXd th = grid.node(i);
      const Eigen::MatrixXd Pn = synth_matrix(P_ft, th + alpha, n, n);
      C[i] = Pn.partialPivLu().solve(M0[i] * synth_matrix(P_ft, th, n, n));
      Lg[i] = Eigen::MatrixXd::Zero(n, n);
      Lg[i].topLeftCorner(dS, dS) = C[i].topLeftCorner(dS, dS);
      Lg[i].bottomRightCorner(dU, dU) = C[i].bottomRightCorner(dU, dU);
      const double off = std::max(C[i].topRightCorner(dS, dU).cwiseAbs().maxCoeff(),
                                  C[i].bottomLeftCorner(dU, dS).cwiseAbs().maxCoeff());
      res = std::max(res, off);
    }
    FourierTorus Lam_ft = analyze_matrix(grid, Lg, modes);
    frame.P = P_ft;
    frame.Lambda = Lam_ft;
    if (res <= opts.tol_red || it >= max_red_iters) break;

    const FourierTorus LamS = frame.lamS_block();
    const FourierTorus LamU = frame.lamU_block();
    CohoMargins mg;
    for (long i = 0; i < ng; ++i) {
      mg.lamS = std::max(mg.lamS, op_norm(Lg[i].topLeftCorner(dS, dS)));
      mg.lamU = std::max(mg.lamU, op_norm(Lg[i].bottomRightCorner(dU, dU).inverse()));
    }
    if (!mg.contracting())
      throw CertificationError("reducibility: contraction margins >= 1 during refinement");

    FourierTorus Esu = analyze_matrix(grid, [&] {
      std::vector<Eigen::MatrixXd> e(ng);
      for (long i = 0; i < ng; ++i) e[i] = C[i].topRightCorner(dS, dU).eval();
      return e;
    }(), modes);
    FourierTorus Eus = analyze_matrix(grid, [&] {
      std::vector<Eigen::MatrixXd> e(ng);
      for (long i = 0; i < ng; ++i) e[i] = C[i].bottomLeftCorner(dU, dS).eval();
      return e;
    }(), modes);

    std::vector<Eigen::VectorXd> targets(ng);
    for (long i = 0; i < ng; ++i) targets[i] = grid.node(i);
    CohoOptions copt = opts.coho();
    copt.tol = std::min(opts.tol_coh, std::max(1e-14, 1e-3 * res));
    const auto Qsu = coho_solve_su(
        LamS, LamU, mg,
        [&](int, const Eigen::VectorXd& th) { return synth_matrix(Esu, th, dS, dU); },
        targets, alpha, copt);
    const auto Qus = coho_solve_us(
        LamS, LamU, mg,
        [&](int, const Eigen::VectorXd& th) { return synth_matrix(Eus, th, dU, dS); },
        targets, alpha, copt);

    for (long i = 0; i < ng; ++i) {
      Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
      Q.topRightCorner(dS, dU) = Qsu[i];
      Q.bottomLeftCorner(dU, dS) = Qus[i];
      Pg[i] = synth_matrix(P_ft, grid.node(i), n, n) *
              (Eigen::MatrixXd::Identity(n, n) + Q);
    }
    P_ft = analyze_matrix(grid, Pg, modes);
  }

  frame.red_residual = res;

  // certified margins and conditioning on a doubled probe grid
  std::vector<int> probe_dims = grid.dims;
  for (auto& gdim : probe_dims) gdim *= 2;
  TorusGrid probe(grid.m, probe_dims);
  double lamS = 0.0, lamU = 0.0, cond = 0.0;
  for (long i = 0; i < probe.size(); ++i) {
    const Eigen::VectorXd th = probe.node(i);
    const Eigen::MatrixXd L = synth_matrix(frame.Lambda, th, n, n);
    lamS = std::max(lamS, op_norm(L.topLeftCorner(dS, dS)));
    lamU = std::max(lamU, op_norm(L.bottomRightCorner(dU, dU).inverse()));
    cond = std::max(cond, cond2(synth_matrix(frame.P, th, n, n)));
  }
  frame.lamS_hat = lamS;
  frame.lamU_hat = lamU;
  frame.cond_P = cond;
  frame.certified = (res <= opts.tol_red) && lamS < 1.0 && lamU < 1.0 &&
                    cond <= opts.cond_max;
  if (frame.certified) {
    check_tail(frame.P, opts.tail_rule, "frame P");
    check_tail(frame.Lambda, opts.tail_rule, "frame Lambda");
  }
  return frame;
}

HyperbolicityMargins hyperbolicity_margin(const AdaptedFrame& frame, int n_probe) {
  const int n = frame.dS + frame.dU;
  std::vector<int> dims(frame.Lambda.m(), std::max(4, n_probe));
  for (auto& gdim : dims) if (gdim % 2) ++gdim;
  TorusGrid probe(frame.Lambda.m(), dims);
  double lamS = 0.0, lamU = 0.0, cond = 0.0;
  for (long i = 0; i < probe.size(); ++i) {
    const Eigen::VectorXd th = probe.node(i);
    const Eigen::MatrixXd L = synth_matrix(frame.Lambda, th, n, n);
    lamS = std::max(lamS, op_norm(L.topLeftCorner(frame.dS, frame.dS)));
    lamU = std::max(lamU, op_norm(L.bottomRightCorner(frame.dU, frame.dU).inverse()));
    cond = std::max(cond, cond2(synth_matrix(frame.P, th, n, n)));
  }
  if (lamS >= 1.0 || lamU >= 1.0)
    throw CertificationError("hyperbolicity_margin: margin >= 1, not hyperbolic");
  const double c_H = (1.0 / (1.0 - lamS) + lamU / (1.0 - lamU) + 1.0) * cond;
  return HyperbolicityMargins{lamS, lamU, c_H};
}

DeterministicTorus solve_k0(const ModelParams& p, const FourierTorus& K_init,
                            const SolverOptions& opts) {
  const TorusGrid grid = opts.make_grid(p.m);
  const auto modes = opts.modes_for(p.m);
  const Eigen::VectorXd alpha = p.alpha_map();
  const FlowOptions fopt = opts.flow();
  const NoiseRealization dummy = dummy_noise(p, opts.step);
  const long ng = grid.size();

  DeterministicTorus sol;
  sol.params = p;
  sol.K = K_init;

  std::vector<Eigen::VectorXd> Kg(ng), Eg(ng);
  int grow_streak = 0;
  double prev_res = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= opts.max_newton; ++iter) {
    // defect E(theta) = F0(K(theta), theta) - K(theta + alpha)
    parallel_for(ng, opts.threads, [&](long i) {
      const Eigen::VectorXd th = grid.node(i);
      Kg[i] = sol.K.synthesize(th);
      Eg[i] = time_one_map(p, Kg[i], th, dummy, 0.0, fopt) -
              sol.K.synthesize(th + alpha);
    });
    double res = 0.0;
    for (long i = 0; i < ng; ++i) res = std::max(res, Eg[i].cwiseAbs().maxCoeff());
    sol.residual = res;
    sol.residual_history.push_back(res);
    sol.newton_iters = iter;
    if (res <= opts.tol_inv) break;
    if (iter == opts.max_newton) {
      std::ostringstream os;
      os << "solve_k0: residual " << res << " above tol_inv after " << iter
         << " Newton iterations";
      throw CertificationError(os.str());
    }
    if (res > prev_res) {
      if (++grow_streak >= 3)
        throw CertificationError("solve_k0: residual grew for 3 consecutive steps");
    } else {
      grow_streak = 0;
    }
    prev_res = res;

    AdaptedFrame frame = solve_reducibility(p, sol.K, opts);
    if (!frame.certified) {
      std::ostringstream os;
      os << "solve_k0: frame certification failed during Newton (red_residual "
         << frame.red_residual << ", margins " << frame.lamS_hat << "/" << frame.lamU_hat
         << ", cond " << frame.cond_P << ")";
      throw CertificationError(os.str());
    }

    // linearized equation M0(theta) dK(theta) - dK(theta+alpha) = -E(theta),
    // solved in the adapted frame by the contracting series
    std::vector<Eigen::VectorXd> Et(ng);
    for (long i = 0; i < ng; ++i) {
      const Eigen::VectorXd th = grid.node(i);
      Et[i] = frame.P_at(th + alpha).partialPivLu().solve(Eg[i]);
    }
    FourierTorus Et_ft = FourierTorus::analyze(grid, Et, modes);

    std::vector<Eigen::VectorXd> targets(ng);
    for (long i = 0; i < ng; ++i) targets[i] = grid.node(i);
    CohoOptions copt = opts.coho();
    copt.tol = std::min(opts.tol_coh, std::max(1e-14, 1e-2 * res * res));
    const auto Kt = coho_solve_vec(
        frame.lamS_block(), frame.lamU_block(), frame.margins(),
        [&](int, const Eigen::VectorXd& th) { return Et_ft.synthesize(th); },
        targets, alpha, copt);

    for (long i = 0; i < ng; ++i)
      Kg[i] += frame.P_at(grid.node(i)) * Kt[i];
    sol.K = FourierTorus::analyze(grid, Kg, modes);
  }

  check_tail(sol.K, opts.tail_rule, "K0");
  sol.frame = solve_reducibility(p, sol.K, opts);
  if (!sol.frame.certified)
    throw CertificationError("solve_k0: converged torus has a non-certified frame");
  if (opts.r_monitor > 0) {
    FourierTorus defect = FourierTorus::analyze(grid, Eg, modes);
    sol.residual_cr = defect.sup_norm_cr(opts.r_monitor);
  } else {
    sol.residual_cr = sol.residual;
  }
  return sol;
}

ResidualReport invariance_residual(const ModelParams& p, const FourierTorus& K, double eps,
                                   const std::vector<NoiseRealization>& omegas,
                                   const SolverOptions& opts) {
  const TorusGrid grid = opts.make_grid(p.m);
  const Eigen::VectorXd alpha = p.alpha_map();
  const FlowOptions fopt = opts.flow();
  const long ng = grid.size();
  ResidualReport rep;

  std::vector<NoiseRealization> ws = omegas;
  if (eps == 0.0 || ws.empty()) ws = {dummy_noise(p, opts.step)};

  std::vector<Eigen::VectorXd> defect(ng);
  for (const auto& w : ws) {
    parallel_for(ng, opts.threads, [&](long i) {
      const Eigen::VectorXd th = grid.node(i);
      defect[i] = time_one_map(p, K.synthesize(th), th, w, eps, fopt) -
                  K.synthesize(th + alpha);
    });
    for (long i = 0; i < ng; ++i)
      rep.sup = std::max(rep.sup, defect[i].cwiseAbs().maxCoeff());
  }
  if (opts.r_monitor > 0 && ws.size() == 1) {
    FourierTorus dft = FourierTorus::analyze(grid, defect, opts.modes_for(p.m));
    rep.cr_sup = dft.sup_norm_cr(opts.r_monitor);
  } else {
    rep.cr_sup = rep.sup;
  }
  return rep;
}

}  // namespace ritor
