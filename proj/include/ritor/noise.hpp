#ifndef RITOR_NOISE_HPP
#define RITOR_NOISE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>

namespace ritor {

/// Two-sided discretized Brownian path with its Ornstein-Uhlenbeck samples
/// zeta(Phi_t omega). Immutable bulk storage; shifts are cheap views.
///
/// Grid nodes t_i = i*h for i in [i_min, i_max], anchored W(0) = 0.
/// Increments ~ N(0, h I_d) per cell, all counter-seeded so that a path can
/// be extended or re-created deterministically from (seed, grid).
///
/// zeta solves d zeta = -zeta dt + sigma dW with sigma = (0, I)^T: the
/// position block is identically zero, the velocity block starts from the
/// stationary law N(0, I/2) at t_min and advances by the one-step law
///   zeta_{i+1} = e^{-h} zeta_i + eta_i,
/// where eta_i is sampled exactly given the cell increment: conditional mean
/// (1-e^{-h})/h * dW_i plus an independent remainder of variance
/// (1-e^{-2h})/2 - (1-e^{-h})^2/h. Marginals are exactly stationary and the
/// joint law with the path is the true one.
class NoisePath {
 public:
  /// `scale` multiplies every Gaussian draw (increments, stationary start,
  /// bridge), scaling the pair (W, zeta) jointly and exactly linearly;
  /// scale = 0 gives the zero path with zeta identically 0.
  NoisePath(std::uint64_t seed, double h, double t_min, double t_max, int d,
            double scale = 1.0);

  double h() const { return h_; }
  int d() const { return d_; }
  long i_min() const { return i_min_; }
  long i_max() const { return i_max_; }
  std::uint64_t seed() const { return seed_; }

  Eigen::VectorXd increment(long cell) const;  // cell i covers [i h, (i+1) h]
  Eigen::VectorXd W(long node) const;
  Eigen::VectorXd zeta(long node) const;  // size 2d

 private:
  std::uint64_t seed_;
  double h_;
  int d_;
  long i_min_, i_max_;
  Eigen::MatrixXd inc_;    // d x n_cells
  Eigen::MatrixXd w_;      // d x n_nodes
  Eigen::MatrixXd zeta_v_; // d x n_nodes (velocity block only)
};

/// A point of the sample space together with its Wiener-shift offset:
/// this object represents Phi_{offset*h} omega for a stored path omega.
class NoiseRealization {
 public:
  /// Fresh two-sided path. Requires h > 0 and t_min <= 0 <= t_max.
  static NoiseRealization sample(std::uint64_t seed, double h, double t_min,
                                 double t_max, int d, double scale = 1.0);

  /// The zero path (zero increments, zeta identically zero).
  static NoiseRealization zero(double h, double t_min, double t_max, int d);

  /// Wiener shift by s (must be a multiple of h, shifted support must stay
  /// inside the stored interval): path omega(s + .) - omega(s).
  NoiseRealization shifted(double s) const;
  NoiseRealization shifted_cells(long cells) const;

  double h() const { return path_->h(); }
  int d() const { return path_->d(); }
  double t_min() const { return (path_->i_min() - offset_) * h(); }
  double t_max() const { return (path_->i_max() - offset_) * h(); }
  std::uint64_t seed() const { return path_->seed(); }
  long offset_cells() const { return offset_; }

  /// Path value W_t relative to this realization's origin (t on the grid).
  Eigen::VectorXd W(double t) const;
  /// Increment over relative cell [t, t+h], t = cell*h.
  Eigen::VectorXd increment(long cell) const;
  /// zeta(Phi_t omega), piecewise-linear between grid nodes.
  Eigen::VectorXd zeta(double t) const;
  Eigen::VectorXd zeta_node(long node) const;

 private:
  NoiseRealization(std::shared_ptr<const NoisePath> p, long off)
      : path_(std::move(p)), offset_(off) {}
  std::shared_ptr<const NoisePath> path_;
  long offset_ = 0;  // in cells
};

/// T(z, omega) = z - eps*zeta (forward) or z + eps*zeta (inverse).
Eigen::VectorXd random_transform(const Eigen::VectorXd& z, const Eigen::VectorXd& zeta,
                                 double eps, bool inverse = false);

}  // namespace ritor

#endif
