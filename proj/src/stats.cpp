#include "ritor/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ritor/rng.hpp"

namespace ritor {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
enum Stream : std::uint64_t { kTheta0 = 11, kInitBall = 12, kEmNoise = 13 };
}  // namespace

EnsembleSummary mc_torus_moments(const Expansion& ex, int order, double eps,
                                 const std::vector<Eigen::VectorXd>& probes,
                                 long n_samples, std::uint64_t seed, int threads) {
  const int n = 2 * ex.torus().params.d;
  const size_t np = probes.size();
  EnsembleSummary out;
  out.n_samples = n_samples;
  out.probes = probes;

  // sample values, slot-addressed so the fill order does not matter
  std::vector<std::vector<std::vector<double>>> vals(
      np, std::vector<std::vector<double>>(n, std::vector<double>(n_samples, 0.0)));
  std::vector<char> failed(n_samples, 0);

  parallel_for(n_samples, threads, [&](long s) {
    try {
      const std::uint64_t si = rng::realization_seed(seed, s);
      const NoiseRealization w = ex.sample_noise(si);
      for (size_t pi = 0; pi < np; ++pi) {
        Eigen::VectorXd z = ex.torus().K.synthesize(probes[pi]);
        double scale = 1.0;
        for (int k = 1; k <= order; ++k) {
          scale *= eps;
          z += scale * ex.coeff_at(w, 0, {probes[pi]}, k)[0];
        }
        for (int c = 0; c < n; ++c) vals[pi][c][s] = z[c];
      }
    } catch (const std::exception&) {
      failed[s] = 1;
    }
  });

  for (long s = 0; s < n_samples; ++s) out.n_failed += failed[s];
  if (out.n_failed * 100 > n_samples)
    throw std::runtime_error("mc_torus_moments: more than 1% of samples failed");

  out.moments.resize(np);
  for (size_t pi = 0; pi < np; ++pi) {
    out.moments[pi].resize(n);
    for (int c = 0; c < n; ++c) {
      std::vector<double> good;
      good.reserve(n_samples);
      for (long s = 0; s < n_samples; ++s)
        if (!failed[s]) good.push_back(vals[pi][c][s]);
      out.moments[pi][c] = compute_moments(good);
    }
  }
  return out;
}

LyapunovReport lyapunov_spectrum(const Expansion& ex, double eps, int n_steps,
                                 long n_samples, std::uint64_t seed, int order,
                                 int threads) {
  if (n_steps < 50)
    throw std::invalid_argument("lyapunov_spectrum: n_steps < 50 is unconverged");
  const ModelParams& p = ex.torus().params;
  const int n = 2 * p.d;
  const Eigen::VectorXd alpha = p.alpha_map();
  const FlowOptions fopt = ex.options().flow();
  LyapunovReport rep;
  rep.eps = eps;
  rep.n_steps = n_steps;
  rep.n_samples = n_samples;

  // deterministic base column: theta-average of log |diag Lambda0|
  {
    const TorusGrid grid = ex.options().make_grid(p.m);
    std::vector<double> acc(n, 0.0);
    for (long i = 0; i < grid.size(); ++i) {
      const Eigen::MatrixXd L = ex.torus().frame.Lambda_at(grid.node(i));
      for (int c = 0; c < n; ++c) acc[c] += std::log(std::abs(L(c, c)));
    }
    for (int c = 0; c < n; ++c) acc[c] /= static_cast<double>(grid.size());
    std::sort(acc.begin(), acc.end(), std::greater<double>());
    rep.base = acc;
  }

  std::vector<std::vector<double>> direct(n, std::vector<double>(n_samples, 0.0));
  std::vector<std::vector<double>> pert(n, std::vector<double>(n_samples, 0.0));
  const bool want_pert = eps > 0.0 && order >= 1;

  // burn-in lets the orthonormal frame align before averaging; the
  // alignment transient otherwise enters the mean at O(1/N)
  const int burn = std::min(20, n_steps / 4);

  parallel_for(n_samples, threads, [&](long s) {
    const std::uint64_t si = rng::realization_seed(seed, s);
    const NoiseRealization w = ex.sample_noise(si, n_steps + burn + 2);
    Eigen::VectorXd th0(p.m);
    for (int j = 0; j < p.m; ++j) th0[j] = rng::u01(si, kTheta0, j);

    // starting points on the truncated torus along the orbit
    const int total = n_steps + burn;
    std::vector<Eigen::VectorXd> zs(total + 1);
    if (eps > 0.0 && order >= 1) {
      const auto k1 = ex.k1_along_orbit(w, th0, total);
      for (int j = 0; j <= total; ++j)
        zs[j] = ex.torus().K.synthesize(th0 + j * alpha) + eps * k1[j];
    } else {
      for (int j = 0; j <= total; ++j)
        zs[j] = ex.torus().K.synthesize(th0 + j * alpha);
    }
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd logsum = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n_steps + burn; ++j) {
      const NoiseRealization wj = w.shifted_cells(j * ex.cells_per_unit());
      const Eigen::MatrixXd M =
          variational_flow(p, zs[j], th0 + j * alpha, wj, eps, fopt).M;
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(M * Q);
      Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
      Q = qr.householderQ();
      for (int c = 0; c < n; ++c) {
        if (R(c, c) < 0) {
          Q.col(c) = -Q.col(c);
          R(c, c) = -R(c, c);
        }
        if (!(R(c, c) > 0))
          throw std::runtime_error("lyapunov_spectrum: degenerate orthonormalization");
        if (j >= burn) logsum[c] += std::log(R(c, c));
      }
    }
    std::vector<double> expo(n);
    for (int c = 0; c < n; ++c) expo[c] = logsum[c] / n_steps;
    std::sort(expo.begin(), expo.end(), std::greater<double>());
    for (int c = 0; c < n; ++c) direct[c][s] = expo[c];

    if (want_pert) {
      // theta-averaged relative first-order correction of the block spectrum
      const int n_nodes = 8;
      std::vector<Eigen::VectorXd> nodes(n_nodes, Eigen::VectorXd::Zero(p.m));
      for (int i = 0; i < n_nodes; ++i) nodes[i](0) = static_cast<double>(i) / n_nodes;
      const auto lf = ex.lambda_first(w, 0, nodes);
      std::vector<double> corr(n, 0.0);
      std::vector<double> base_raw(n, 0.0);
      for (int i = 0; i < n_nodes; ++i) {
        const Eigen::MatrixXd L0 = ex.torus().frame.Lambda_at(nodes[i]);
        for (int c = 0; c < n; ++c) {
          base_raw[c] += std::log(std::abs(L0(c, c))) / n_nodes;
          corr[c] += (lf.Lambda1[i](c, c) / L0(c, c)) / n_nodes;
        }
      }
      std::vector<int> ord(n);
      for (int c = 0; c < n; ++c) ord[c] = c;
      std::sort(ord.begin(), ord.end(),
                [&](int a, int b) { return base_raw[a] > base_raw[b]; });
      for (int c = 0; c < n; ++c)
        pert[c][s] = base_raw[ord[c]] + eps * corr[ord[c]];
    }
  });

  rep.direct_mean.resize(n);
  rep.direct_se.resize(n);
  rep.pert_mean.resize(n);
  rep.pert_se.resize(n);
  for (int c = 0; c < n; ++c) {
    const Moments md = compute_moments(direct[c]);
    rep.direct_mean[c] = md.mean;
    rep.direct_se[c] = md.se_mean;
    if (want_pert) {
      const Moments mp = compute_moments(pert[c]);
      rep.pert_mean[c] = mp.mean;
      rep.pert_se[c] = mp.se_mean;
    } else {
      rep.pert_mean[c] = rep.base[c];
      rep.pert_se[c] = 0.0;
    }
  }
  return rep;
}

FourierTorus pullback_to_sde(const FourierTorus& K, const NoiseRealization& w,
                             double eps, double t) {
  FourierTorus out = K;
  const Eigen::VectorXd shift = eps * w.zeta(t);
  const std::vector<int> k0(K.m(), 0);
  for (int c = 0; c < K.d_out(); ++c)
    out.set_coeff(k0, c, out.coeff(k0, c) + shift[c]);
  return out;
}

std::vector<ExitRow> exit_probability(const ModelParams& p,
                                      const std::vector<double>& levels, double R,
                                      double T, long n_samples, double eps,
                                      std::uint64_t seed, double h, int threads,
                                      int n_starts) {
  const int d = p.d, n = 2 * d;
  const long steps = std::max(1L, static_cast<long>(std::llround(T / h)));
  const Eigen::VectorXd am = p.alpha_map();
  const Eigen::VectorXd th0 = p.theta0();
  const double sqh = std::sqrt(h);

  std::vector<std::vector<char>> exited(levels.size(),
                                        std::vector<char>(n_samples, 0));

  parallel_for(n_samples, threads, [&](long s) {
    const std::uint64_t si = rng::realization_seed(seed, s);
    // start set approximating the sup over the ball: n_starts uniform draws
    // plus one boundary point, all driven by the same noise path
    std::vector<Eigen::VectorXd> starts;
    for (int k = 0; k <= n_starts; ++k) {
      Eigen::VectorXd z(n);
      double norm2 = 0.0;
      for (int c = 0; c < n; ++c) {
        z[c] = rng::gauss(si, kInitBall, k * n + c);
        norm2 += z[c] * z[c];
      }
      const double radius =
          (k == 0) ? R : R * std::pow(rng::u01(si, kInitBall, 1000 + k), 1.0 / n);
      starts.push_back(z * (radius / std::sqrt(norm2)));
    }

    double sup = 0.0;
    Eigen::VectorXd th(p.m), dr(n);
    for (auto& z : starts) {
      sup = std::max(sup, z.norm());
      for (long j = 0; j < steps; ++j) {
        th = th0 + am * (j * h);
        dr = drift(p, z, th, false);
        for (int c = 0; c < d; ++c) {
          z[c] += h * dr[c];
          z[d + c] += h * dr[d + c] +
                      eps * sqh * rng::gauss(si, kEmNoise, rng::zigzag(j) * d + c);
        }
        if (!z.allFinite()) {
          sup = std::numeric_limits<double>::infinity();
          break;
        }
        sup = std::max(sup, z.norm());
      }
      if (!std::isfinite(sup)) break;
    }
    for (size_t li = 0; li < levels.size(); ++li)
      if (sup >= levels[li]) exited[li][s] = 1;
  });

  std::vector<ExitRow> rows;
  for (size_t li = 0; li < levels.size(); ++li) {
    ExitRow r;
    r.level = levels[li];
    r.n = n_samples;
    r.exits = 0;
    for (long s = 0; s < n_samples; ++s) r.exits += exited[li][s];
    r.ci = wilson_interval(r.exits, n_samples);
    rows.push_back(r);
  }
  return rows;
}

ErgodicResult ergodic_average_test(const ModelParams& p, const std::string& observable,
                                   long n_orbit, long n_samples, std::uint64_t seed,
                                   double h, int threads) {
  auto g = [&](const Eigen::VectorXd& th, const Eigen::VectorXd& zeta) -> double {
    if (observable == "const") return 1.0;
    const double c = std::cos(kTwoPi * th[0]);
    if (observable == "cos") return c;
    if (observable == "cos_zeta") return c * zeta[p.d];
    if (observable == "cos_tanh_zeta") return c * std::tanh(zeta[p.d]);
    throw std::invalid_argument("ergodic_average_test: unknown observable " + observable);
  };
  const Eigen::VectorXd alpha = p.alpha_map();
  const long cells = static_cast<long>(std::llround(1.0 / h));

  std::vector<double> orbit_means(n_samples, 0.0);
  parallel_for(n_samples, threads, [&](long s) {
    const std::uint64_t si = rng::realization_seed(seed, s);
    const NoiseRealization w =
        NoiseRealization::sample(si, h, -1.0, n_orbit + 1.0, p.d);
    Eigen::VectorXd th(p.m);
    for (int j = 0; j < p.m; ++j) th[j] = rng::u01(si, kTheta0, j);
    std::vector<double> terms(n_orbit);
    for (long j = 0; j < n_orbit; ++j)
      terms[j] = g(th + j * alpha, w.zeta_node(j * cells));
    orbit_means[s] = pairwise_sum(terms) / n_orbit;
  });

  // product-measure Monte Carlo with independent draws
  const long n_mc = std::max<long>(20000, n_samples * 100);
  std::vector<double> mc(n_mc);
  parallel_for(n_mc, threads, [&](long i) {
    Eigen::VectorXd th(p.m);
    for (int j = 0; j < p.m; ++j) th[j] = rng::u01(seed, 21, i * p.m + j);
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(2 * p.d);
    for (int j = 0; j < p.d; ++j)
      zeta[p.d + j] = std::sqrt(0.5) * rng::gauss(seed, 22, i * p.d + j);
    mc[i] = g(th, zeta);
  });

  ErgodicResult r;
  const Moments mo = compute_moments(orbit_means);
  const Moments mm = compute_moments(mc);
  r.orbit_avg = mo.mean;
  r.orbit_se = mo.se_mean;
  r.product_avg = mm.mean;
  r.product_se = mm.se_mean;
  const double comb = std::sqrt(mo.se_mean * mo.se_mean + mm.se_mean * mm.se_mean);
  r.deviation = comb > 0 ? std::abs(mo.mean - mm.mean) / comb : 0.0;
  return r;
}

}  // namespace ritor
