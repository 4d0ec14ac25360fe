#include "ritor/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ritor/rng.hpp"

namespace ritor {

namespace {
enum Stream : std::uint64_t { kIncrements = 1, kStationaryInit = 2, kBridge = 3 };
}

NoisePath::NoisePath(std::uint64_t seed, double h, double t_min, double t_max, int d,
                     double scale)
    : seed_(seed), h_(h), d_(d) {
  if (!(h > 0.0)) throw std::invalid_argument("NoisePath: h must be > 0");
  if (!(t_min <= 0.0 && 0.0 <= t_max))
    throw std::invalid_argument("NoisePath: interval must contain 0");
  if (d < 1) throw std::invalid_argument("NoisePath: d must be >= 1");
  i_min_ = -static_cast<long>(std::ceil(-t_min / h - 1e-9));
  i_max_ = static_cast<long>(std::ceil(t_max / h - 1e-9));
  if (i_max_ <= i_min_) i_max_ = i_min_ + 1;

  const long n_cells = i_max_ - i_min_;
  const long n_nodes = n_cells + 1;
  inc_.resize(d_, n_cells);
  w_.resize(d_, n_nodes);
  zeta_v_.resize(d_, n_nodes);

  const double sqh = scale * std::sqrt(h_);
  for (long c = 0; c < n_cells; ++c) {
    const std::uint64_t zz = rng::zigzag(i_min_ + c);
    for (int j = 0; j < d_; ++j)
      inc_(j, c) = sqh * rng::gauss(seed_, kIncrements, zz * d_ + j);
  }

  // cumulative sums anchored at W(0) = 0
  const long node0 = -i_min_;  // index of t = 0
  w_.col(node0).setZero();
  for (long n = node0 + 1; n < n_nodes; ++n) w_.col(n) = w_.col(n - 1) + inc_.col(n - 1);
  for (long n = node0 - 1; n >= 0; --n) w_.col(n) = w_.col(n + 1) - inc_.col(n);

  // OU velocity block: stationary start, exact one-step conditional sampling
  const double decay = std::exp(-h_);
  const double beta = (1.0 - decay) / h_;
  const double var_eta = 0.5 * (1.0 - std::exp(-2.0 * h_));
  const double var_bridge = std::max(0.0, var_eta - beta * beta * h_);
  const double sd_bridge = scale * std::sqrt(var_bridge);
  for (int j = 0; j < d_; ++j)
    zeta_v_(j, 0) = scale * std::sqrt(0.5) * rng::gauss(seed_, kStationaryInit, j);
  for (long n = 1; n < n_nodes; ++n) {
    const long cell = n - 1;
    const std::uint64_t zz = rng::zigzag(i_min_ + cell);
    for (int j = 0; j < d_; ++j) {
      const double bridge = sd_bridge * rng::gauss(seed_, kBridge, zz * d_ + j);
      zeta_v_(j, n) = decay * zeta_v_(j, n - 1) + beta * inc_(j, cell) + bridge;
    }
  }
}

Eigen::VectorXd NoisePath::increment(long cell) const {
  if (cell < i_min_ || cell >= i_max_) throw std::out_of_range("NoisePath: cell out of range");
  return inc_.col(cell - i_min_);
}

Eigen::VectorXd NoisePath::W(long node) const {
  if (node < i_min_ || node > i_max_) throw std::out_of_range("NoisePath: node out of range");
  return w_.col(node - i_min_);
}

Eigen::VectorXd NoisePath::zeta(long node) const {
  if (node < i_min_ || node > i_max_) throw std::out_of_range("NoisePath: node out of range");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * d_);
  z.tail(d_) = zeta_v_.col(node - i_min_);
  return z;
}

NoiseRealization NoiseRealization::sample(std::uint64_t seed, double h, double t_min,
                                          double t_max, int d, double scale) {
  return NoiseRealization(
      std::make_shared<const NoisePath>(seed, h, t_min, t_max, d, scale), 0);
}

NoiseRealization NoiseRealization::zero(double h, double t_min, double t_max, int d) {
  return sample(0, h, t_min, t_max, d, 0.0);
}

NoiseRealization NoiseRealization::shifted(double s) const {
  const double cells = s / h();
  const long c = static_cast<long>(std::llround(cells));
  if (std::abs(cells - c) > 1e-9)
    throw std::invalid_argument("shifted: shift must be a multiple of the grid step");
  return shifted_cells(c);
}

NoiseRealization NoiseRealization::shifted_cells(long cells) const {
  const long off = offset_ + cells;
  if (off < path_->i_min() || off > path_->i_max()) {
    std::ostringstream os;
    os << "shifted: shift to offset " << off << " leaves the stored support ["
       << path_->i_min() << ", " << path_->i_max() << "] cells";
    throw std::out_of_range(os.str());
  }
  return NoiseRealization(path_, off);
}

namespace {
long node_of(double t, double h, const char* what) {
  const double n = t / h;
  const long i = static_cast<long>(std::llround(n));
  if (std::abs(n - i) > 1e-9) {
    std::ostringstream os;
    os << what << ": t = " << t << " is not on the grid";
    throw std::invalid_argument(os.str());
  }
  return i;
}
}  // namespace

Eigen::VectorXd NoiseRealization::W(double t) const {
  const long i = node_of(t, h(), "W");
  return path_->W(offset_ + i) - path_->W(offset_);
}

Eigen::VectorXd NoiseRealization::increment(long cell) const {
  return path_->increment(offset_ + cell);
}

Eigen::VectorXd NoiseRealization::zeta_node(long node) const {
  return path_->zeta(offset_ + node);
}

Eigen::VectorXd NoiseRealization::zeta(double t) const {
  const double u = t / h();
  const double fl = std::floor(u + 1e-12);
  const long i = static_cast<long>(fl);
  const double frac = u - fl;
  if (frac < 1e-12) return path_->zeta(offset_ + i);
  return (1.0 - frac) * path_->zeta(offset_ + i) + frac * path_->zeta(offset_ + i + 1);
}

Eigen::VectorXd random_transform(const Eigen::VectorXd& z, const Eigen::VectorXd& zeta,
                                 double eps, bool inverse) {
  return inverse ? (z + eps * zeta).eval() : (z - eps * zeta).eval();
}

}  // namespace ritor
