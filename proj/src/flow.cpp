#include "ritor/flow.hpp"

#include <cmath>
#include <sstream>

namespace ritor {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// forcing E(theta0 + alpha_map * t) without temporaries
void forcing_into(const ModelParams& p, const Eigen::VectorXd& theta0,
                  const Eigen::VectorXd& alpha_map, double t, Eigen::VectorXd& E) {
  E.setZero();
  for (int i = 0; i < p.m; ++i) {
    const double s = p.amp[i] * std::sin(kTwoPi * (theta0[i] + alpha_map[i] * t));
    const int target = p.channel_map.empty() ? -1 : p.channel_map[i];
    if (target < 0)
      E.array() += s;
    else
      E[target] += s;
  }
}

// zeta(Phi_t omega) by linear interpolation of grid nodes, no temporaries
void zeta_into(const NoiseRealization& w, double t, Eigen::VectorXd& out) {
  const double u = t / w.h();
  const double fl = std::floor(u + 1e-12);
  const long i = static_cast<long>(fl);
  const double frac = u - fl;
  if (frac < 1e-12) {
    out = w.zeta_node(i);
  } else {
    out = (1.0 - frac) * w.zeta_node(i) + frac * w.zeta_node(i + 1);
  }
}

long choose_steps(double t_span, double step) {
  const long n = std::max(1L, static_cast<long>(std::llround(t_span / step)));
  return n;
}

struct Binomials {
  // C(n, k) for n <= 8
  double c[9][9];
  Binomials() {
    for (int n = 0; n <= 8; ++n) {
      c[n][0] = 1.0;
      for (int k = 1; k <= n; ++k)
        c[n][k] = (k == n) ? 1.0 : c[n - 1][k - 1] + c[n - 1][k];
      for (int k = n + 1; k <= 8; ++k) c[n][k] = 0.0;
    }
  }
};
const Binomials kBinom;
}  // namespace

BlowupError::BlowupError(double t, double radius)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "flow blow-up: |z| exceeded " << radius << " at t = " << t
           << "; consider enabling the cut-off system (model.n_cut)";
        return os.str();
      }()),
      exit_time(t) {}

double bell_partial(int k, int r, const std::vector<double>& x) {
  if (k == 0 && r == 0) return 1.0;
  if (k <= 0 || r <= 0 || r > k) return 0.0;
  double sum = 0.0;
  const int imax = k - r + 1;
  for (int i = 1; i <= imax; ++i) {
    if (i - 1 >= static_cast<int>(x.size())) break;
    if (x[i - 1] == 0.0) continue;
    sum += kBinom.c[k - 1][i - 1] * x[i - 1] * bell_partial(k - i, r - 1, x);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// time_one_map

Eigen::VectorXd time_one_map(const ModelParams& p, const Eigen::VectorXd& z0,
                             const Eigen::VectorXd& theta0, const NoiseRealization& w,
                             double eps, const FlowOptions& opts, double t_span) {
  const int d = p.d, n = 2 * d;
  const Eigen::VectorXd am = p.alpha_map();
  const long steps = choose_steps(t_span, opts.step);
  const double h = t_span / steps;
  const double guard = p.n_cut ? std::min(opts.blowup_radius, 10.0 * *p.n_cut)
                               : opts.blowup_radius;

  Eigen::VectorXd y = z0, k1(n), k2(n), k3(n), k4(n), tmp(n);
  Eigen::VectorXd E(d), zt(n), shifted(n), theta_t(theta0.size());

  // Pathwise form dZ/dt = f(Z + eps*zeta) + eps*zeta with f the (possibly
  // cut) drift; for the uncut quartic drift this equals
  // A Z + B(Z + eps*zeta) + eps (A+I) zeta.
  auto rhs = [&](double t, const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
    if (eps != 0.0) {
      zeta_into(w, t, zt);
      shifted = z + eps * zt;
    } else {
      shifted = z;
    }
    if (!opts.cut) {
      forcing_into(p, theta0, am, t, E);
      for (int i = 0; i < d; ++i) {
        const double yy = shifted[i] - E[i];
        dz[i] = shifted[d + i];
        dz[d + i] = shifted[i] - p.gamma * shifted[d + i] - E[i] + p.delta * yy * yy * yy;
      }
    } else {
      theta_t = theta0 + am * t;
      dz = drift(p, shifted, theta_t, true);
    }
    if (eps != 0.0) dz += eps * zt;
  };

  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    rhs(t, y, k1);
    tmp = y + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (!y.allFinite() || y.norm() > guard) throw BlowupError(t, guard);
  }
  return y;
}

// ---------------------------------------------------------------------------
// variational flow (state + M) at arbitrary eps

VariationalResult variational_flow(const ModelParams& p, const Eigen::VectorXd& z0,
                                   const Eigen::VectorXd& theta0, const NoiseRealization& w,
                                   double eps, const FlowOptions& opts, double t_span) {
  const int d = p.d, n = 2 * d, nn = n + n * n;
  const Eigen::VectorXd am = p.alpha_map();
  const long steps = choose_steps(t_span, opts.step);
  const double h = t_span / steps;
  const double guard = p.n_cut ? std::min(opts.blowup_radius, 10.0 * *p.n_cut)
                               : opts.blowup_radius;

  Eigen::VectorXd y(nn), k1(nn), k2(nn), k3(nn), k4(nn), tmp(nn);
  y.head(n) = z0;
  Eigen::Map<Eigen::MatrixXd>(y.data() + n, n, n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd E(d), zt(n);

  auto rhs = [&](double t, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    forcing_into(p, theta0, am, t, E);
    if (eps != 0.0) zeta_into(w, t, zt); else zt.setZero();
    const auto z = s.head(n);
    Eigen::Map<const Eigen::MatrixXd> M(s.data() + n, n, n);
    Eigen::Map<Eigen::MatrixXd> dM(ds.data() + n, n, n);
    for (int i = 0; i < d; ++i) {
      const double yy = z[i] + eps * zt[i] - E[i];
      ds[i] = z[d + i] + eps * (zt[i] + zt[d + i]);
      ds[d + i] = z[i] - p.gamma * z[d + i] - E[i] + p.delta * yy * yy * yy +
                  eps * (zt[i] + (1.0 - p.gamma) * zt[d + i]);
      // rows of dM: position row i = velocity row of M; velocity row i
      const double c1 = 1.0 + 3.0 * p.delta * yy * yy;
      dM.row(i) = M.row(d + i);
      dM.row(d + i) = c1 * M.row(i) - p.gamma * M.row(d + i);
    }
  };

  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    rhs(t, y, k1);
    tmp = y + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (!y.allFinite() || y.head(n).norm() > guard) throw BlowupError(t, guard);
  }
  VariationalResult out;
  out.z = y.head(n);
  out.M = Eigen::Map<Eigen::MatrixXd>(y.data() + n, n, n);
  return out;
}

// ---------------------------------------------------------------------------
// epsilon-derivative hierarchy at eps = 0

DerivStack epsilon_derivatives(const ModelParams& p, const Eigen::VectorXd& z0,
                               const Eigen::VectorXd& theta0, const NoiseRealization& w,
                               int order, const FlowOptions& opts,
                               const std::vector<Eigen::VectorXd>* seeds) {
  if (order < 0 || order > 6)
    throw std::invalid_argument("epsilon_derivatives: order must be in [0, 6]");
  const int d = p.d, n = 2 * d;
  const int blocks = order + 1;
  const int dim = blocks * n;
  const Eigen::VectorXd am = p.alpha_map();
  const long steps = choose_steps(1.0, opts.step);
  const double h = 1.0 / steps;
  const double guard = p.n_cut ? std::min(opts.blowup_radius, 10.0 * *p.n_cut)
                               : opts.blowup_radius;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  y.head(n) = z0;
  if (seeds) {
    if (static_cast<int>(seeds->size()) < order - 0 - 1 && order >= 2)
      throw std::invalid_argument("epsilon_derivatives: not enough seeds");
    for (int k = 1; k <= order; ++k)
      if (k - 1 < static_cast<int>(seeds->size())) y.segment(k * n, n) = (*seeds)[k - 1];
  }

  Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  Eigen::VectorXd E(d), zt(n);
  std::vector<double> bx(std::max(1, order));  // per-coordinate Bell arguments

  auto rhs = [&](double t, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    forcing_into(p, theta0, am, t, E);
    if (order >= 1) zeta_into(w, t, zt);
    const auto z = s.head(n);
    for (int i = 0; i < d; ++i) {
      const double yy = z[i] - E[i];
      const double c1 = 1.0 + 3.0 * p.delta * yy * yy;  // jacobian entry (x block)
      // order 0: deterministic drift
      ds[i] = z[d + i];
      ds[d + i] = z[i] - p.gamma * z[d + i] - E[i] + p.delta * yy * yy * yy;
      for (int k = 1; k <= order; ++k) {
        const auto Yk = s.segment(k * n, n);
        double fx = 0.0;  // velocity-row forcing for this coordinate
        if (k == 1) {
          // D_zB(Z0) zeta + (A+I) zeta, and the tangent part below
          fx = 3.0 * p.delta * yy * yy * zt[i] + zt[i] + (1.0 - p.gamma) * zt[d + i];
          ds[k * n + i] = Yk[d + i] + zt[i] + zt[d + i];
        } else {
          // Bell forcing: arguments are the position components of
          // (Y_1 + zeta, Y_2, ..., Y_{k-1})
          for (int j = 1; j < k; ++j) {
            bx[j - 1] = s[j * n + i];
            if (j == 1) bx[0] += zt[i];
          }
          const double c2 = 6.0 * p.delta * yy;
          const double c3 = 6.0 * p.delta;
          if (k >= 2) fx += c2 * bell_partial(k, 2, bx);
          if (k >= 3) fx += c3 * bell_partial(k, 3, bx);
          ds[k * n + i] = Yk[d + i];
        }
        ds[k * n + d + i] = c1 * Yk[i] - p.gamma * Yk[d + i] + fx;
      }
    }
  };

  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    rhs(t, y, k1);
    tmp = y + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (!y.allFinite() || y.head(n).norm() > guard) throw BlowupError(t, guard);
  }

  DerivStack out;
  out.z = y.head(n);
  out.deriv.resize(order);
  for (int k = 1; k <= order; ++k) out.deriv[k - 1] = y.segment(k * n, n);
  return out;
}

Eigen::VectorXd remainder_term(const ModelParams& p,
                               const std::vector<Eigen::VectorXd>& K_lower,
                               const Eigen::VectorXd& theta, const NoiseRealization& w,
                               int k, const FlowOptions& opts) {
  if (k < 1) throw std::invalid_argument("remainder_term: k must be >= 1");
  if (static_cast<int>(K_lower.size()) != k)
    throw std::invalid_argument("remainder_term: need exactly K_0..K_{k-1}");
  std::vector<Eigen::VectorXd> seeds;
  double fact = 1.0;
  for (int j = 1; j < k; ++j) {
    fact *= j;
    seeds.push_back(fact * K_lower[j]);
  }
  seeds.push_back(Eigen::VectorXd::Zero(2 * p.d));  // order k starts at zero
  DerivStack st = epsilon_derivatives(p, K_lower[0], theta, w, k, opts, &seeds);
  double kfact = 1.0;
  for (int j = 2; j <= k; ++j) kfact *= j;
  return st.deriv[k - 1] / kfact;
}

// ---------------------------------------------------------------------------
// first-order derivative of the transfer matrix

EpsVariationalResult epsilon_variational(const ModelParams& p, const Eigen::VectorXd& z0,
                                         const Eigen::VectorXd& theta0,
                                         const NoiseRealization& w,
                                         const Eigen::VectorXd& k1_dir,
                                         const FlowOptions& opts) {
  const int d = p.d, n = 2 * d;
  const int dim = 2 * n + 2 * n * n;  // Z0, Y1, M, E
  const Eigen::VectorXd am = p.alpha_map();
  const long steps = choose_steps(1.0, opts.step);
  const double h = 1.0 / steps;
  const double guard = p.n_cut ? std::min(opts.blowup_radius, 10.0 * *p.n_cut)
                               : opts.blowup_radius;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  y.head(n) = z0;
  Eigen::Map<Eigen::MatrixXd>(y.data() + 2 * n, n, n) = Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  Eigen::VectorXd E(d), zt(n), u(n);

  auto rhs = [&](double t, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    forcing_into(p, theta0, am, t, E);
    zeta_into(w, t, zt);
    const auto z = s.head(n);
    const auto y1 = s.segment(n, n);
    Eigen::Map<const Eigen::MatrixXd> M(s.data() + 2 * n, n, n);
    Eigen::Map<const Eigen::MatrixXd> Em(s.data() + 2 * n + n * n, n, n);
    Eigen::Map<Eigen::MatrixXd> dM(ds.data() + 2 * n, n, n);
    Eigen::Map<Eigen::MatrixXd> dE(ds.data() + 2 * n + n * n, n, n);
    u.noalias() = M * k1_dir;  // direction transported by the variational flow
    for (int i = 0; i < d; ++i) {
      const double yy = z[i] - E[i];
      const double c1 = 1.0 + 3.0 * p.delta * yy * yy;
      const double c2u = 6.0 * p.delta * yy * (u[i] + y1[i] + zt[i]);
      ds[i] = z[d + i];
      ds[d + i] = z[i] - p.gamma * z[d + i] - E[i] + p.delta * yy * yy * yy;
      // pure first derivative, zero initial data
      ds[n + i] = y1[d + i] + zt[i] + zt[d + i];
      ds[n + d + i] = c1 * y1[i] - p.gamma * y1[d + i] +
                      3.0 * p.delta * yy * yy * zt[i] + zt[i] + (1.0 - p.gamma) * zt[d + i];
      dM.row(i) = M.row(d + i);
      dM.row(d + i) = c1 * M.row(i) - p.gamma * M.row(d + i);
      dE.row(i) = Em.row(d + i);
      dE.row(d + i) = c1 * Em.row(i) - p.gamma * Em.row(d + i) + c2u * M.row(i);
    }
  };

  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    rhs(t, y, k1);
    tmp = y + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (!y.allFinite() || y.head(n).norm() > guard) throw BlowupError(t, guard);
  }

  EpsVariationalResult out;
  out.z = y.head(n);
  out.y1 = y.segment(n, n);
  out.M = Eigen::Map<Eigen::MatrixXd>(y.data() + 2 * n, n, n);
  out.E = Eigen::Map<Eigen::MatrixXd>(y.data() + 2 * n + n * n, n, n);
  return out;
}

}  // namespace ritor
