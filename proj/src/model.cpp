#include "ritor/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ritor {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;
  return y;
}

// separable potential per coordinate, U(y) = -y^2/2 - delta y^4/4
double pot(double y, double delta) { return -0.5 * y * y - 0.25 * delta * y * y * y * y; }
double dpot(double y, double delta) { return -y - delta * y * y * y; }

// cut potential U_n(y) = U(y) chi_n(|y|) and its derivative
double chi_cut_d(double x, double n);
}  // namespace

double chi_cut(double x, double n) {
  const double a = std::abs(x);
  if (a <= n) return 1.0;
  if (a >= 2.0 * n) return 0.0;
  const double u = (a - n) / n;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

namespace {
double chi_cut_d(double x, double n) {
  const double a = std::abs(x);
  if (a <= n || a >= 2.0 * n) return 0.0;
  const double u = (a - n) / n;
  const double du = (x >= 0 ? 1.0 : -1.0) / n;
  return -(30.0 * u * u - 60.0 * u * u * u + 30.0 * u * u * u * u) * du;
}
}  // namespace

ModelParams ModelParams::reference(double amplitude) {
  ModelParams p;
  p.d = 1;
  p.m = 1;
  p.gamma = 1.0;
  p.delta = -1.0;
  p.amp = Eigen::VectorXd::Constant(1, amplitude);
  // golden-mean rotation per unit time
  p.alpha = Eigen::VectorXd::Constant(1, kTwoPi * 0.61803398874989484820);
  p.beta = Eigen::VectorXd::Zero(1);
  p.channel_map.assign(1, -1);
  return p;
}

void ModelParams::validate(std::vector<std::string>* warnings) const {
  if (d < 1) throw std::invalid_argument("model.d must be >= 1");
  if (m < 1) throw std::invalid_argument("model.m must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("model.gamma must be > 0");
  if (amp.size() != m || alpha.size() != m || beta.size() != m)
    throw std::invalid_argument("model.amp/alpha/beta must all have m entries");
  if (!channel_map.empty() && static_cast<int>(channel_map.size()) != m)
    throw std::invalid_argument("model.channel_map must have m entries");
  for (int c : channel_map)
    if (c < -1 || c >= d) throw std::invalid_argument("model.channel_map entry out of range");
  if (n_cut && !(*n_cut > 0.0)) throw std::invalid_argument("model.n_cut must be > 0");

  if (!warnings) return;
  // near-resonance courtesy warnings over small integer vectors |p|_1 <= 10;
  // rational independence itself is the user's responsibility
  const Eigen::VectorXd am = alpha_map();
  std::vector<int> pvec(m, -10);
  const long total = [&] {
    long t = 1;
    for (int j = 0; j < m; ++j) t *= 21;
    return t;
  }();
  for (long it = 0; it < total; ++it) {
    long rem = it;
    int l1 = 0;
    bool zero = true;
    double dot_alpha = 0.0, dot_map = 0.0;
    for (int j = 0; j < m; ++j) {
      const int pj = static_cast<int>(rem % 21) - 10;
      rem /= 21;
      l1 += std::abs(pj);
      if (pj != 0) zero = false;
      dot_alpha += pj * alpha[j];
      dot_map += pj * am[j];
    }
    if (zero || l1 > 10) continue;
    if (std::abs(dot_alpha) < 1e-10) {
      std::ostringstream os;
      os << "near-resonant frequencies: |p.alpha| = " << std::abs(dot_alpha)
         << " for a small integer vector p";
      warnings->push_back(os.str());
      break;
    }
    const double frac = std::abs(dot_map - std::round(dot_map));
    if (frac < 1e-10) {
      std::ostringstream os;
      os << "map rotation nearly rational: dist(p.alpha/2pi, Z) = " << frac;
      warnings->push_back(os.str());
      break;
    }
  }
}

Eigen::MatrixXd ModelParams::A() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  a.block(0, d, d, d).setIdentity();
  a.block(d, 0, d, d).setIdentity();
  a.block(d, d, d, d) = -gamma * Eigen::MatrixXd::Identity(d, d);
  return a;
}

Eigen::VectorXd ModelParams::alpha_map() const {
  Eigen::VectorXd am(m);
  for (int j = 0; j < m; ++j) am[j] = wrap01(alpha[j] / kTwoPi);
  return am;
}

Eigen::VectorXd ModelParams::theta0() const {
  Eigen::VectorXd th(m);
  for (int j = 0; j < m; ++j) th[j] = wrap01(beta[j] / kTwoPi);
  return th;
}

Eigen::VectorXd forcing_E(const ModelParams& p, const Eigen::VectorXd& theta) {
  Eigen::VectorXd E = Eigen::VectorXd::Zero(p.d);
  for (int i = 0; i < p.m; ++i) {
    const double s = p.amp[i] * std::sin(kTwoPi * theta[i]);
    const int target = p.channel_map.empty() ? -1 : p.channel_map[i];
    if (target < 0)
      E.array() += s;
    else
      E[target] += s;
  }
  return E;
}

Eigen::VectorXd drift(const ModelParams& p, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& theta, bool cut) {
  if (cut && !p.n_cut)
    throw std::invalid_argument("drift: cut requested but model.n_cut is unset");
  const int d = p.d;
  const Eigen::VectorXd E = forcing_E(p, theta);
  Eigen::VectorXd out(2 * d);
  out.head(d) = z.tail(d);
  for (int i = 0; i < d; ++i) {
    const double y = z[i] - E[i];
    const double v = z[d + i];
    if (!cut) {
      out[d + i] = -p.gamma * v - dpot(y, p.delta);
    } else {
      const double n = *p.n_cut;
      const double dUn = dpot(y, p.delta) * chi_cut(y, n) + pot(y, p.delta) * chi_cut_d(y, n);
      out[d + i] = -p.gamma * chi_cut(v, n) * v - dUn;
    }
  }
  return out;
}

Eigen::MatrixXd drift_jacobian(const ModelParams& p, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& theta) {
  const int d = p.d;
  const Eigen::VectorXd E = forcing_E(p, theta);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  J.block(0, d, d, d).setIdentity();
  for (int i = 0; i < d; ++i) {
    const double y = z[i] - E[i];
    J(d + i, i) = 1.0 + 3.0 * p.delta * y * y;
    J(d + i, d + i) = -p.gamma;
  }
  return J;
}

Eigen::VectorXd bfield(const ModelParams& p, const Eigen::VectorXd& z,
                       const Eigen::VectorXd& theta) {
  const int d = p.d;
  const Eigen::VectorXd E = forcing_E(p, theta);
  Eigen::VectorXd B = Eigen::VectorXd::Zero(2 * d);
  for (int i = 0; i < d; ++i) {
    const double y = z[i] - E[i];
    B[d + i] = -E[i] + p.delta * y * y * y;
  }
  return B;
}

double lyapunov_H(const ModelParams& p, const Eigen::VectorXd& z,
                  const Eigen::VectorXd& theta, double C) {
  if (!(p.delta < 0.0))
    throw std::invalid_argument("lyapunov_H: requires delta < 0 (bounded-below potential)");
  const double inf_U = p.d / (4.0 * p.delta);  // separable wells, one minimum each
  if (!(C > -inf_U)) {
    std::ostringstream os;
    os << "lyapunov_H: offset C = " << C << " must exceed -inf U = " << -inf_U;
    throw std::invalid_argument(os.str());
  }
  const int d = p.d;
  const Eigen::VectorXd E = forcing_E(p, theta);
  const Eigen::VectorXd x = z.head(d), v = z.tail(d);
  double U = 0.0;
  for (int i = 0; i < d; ++i) U += pot(x[i] - E[i], p.delta);
  return 0.5 * v.squaredNorm() + U + 0.5 * p.gamma * x.dot(v) +
         0.25 * p.gamma * p.gamma * x.squaredNorm() + C;
}

}  // namespace ritor
