#include <doctest.h>

#include <cmath>

#include "ritor/stats.hpp"

using namespace ritor;

namespace {
struct Fixture {
  ModelParams p = ModelParams::reference(0.1);
  SolverOptions opts;
  DeterministicTorus sol;
  Fixture() {
    opts.modes = {12};
    opts.grid = {48};
    sol = solve_k0(p, zero_torus(p, opts), opts);
  }
};
Fixture& fix() {
  static Fixture f;
  return f;
}
}  // namespace

TEST_CASE("moment helper on a known sample") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const Moments m = compute_moments(x);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.var == doctest::Approx(5.0 / 3.0));
  CHECK(m.skew == doctest::Approx(0.0));
}

TEST_CASE("pairwise sum is order-deterministic and accurate") {
  std::vector<double> x(1000);
  for (size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / (i + 1.0);
  const double a = pairwise_sum(x);
  double ref = 0.0;
  for (double v : x) ref += v;
  CHECK(a == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("mc_torus_moments: eps = 0 collapses to K0; variance scales as eps^2") {
  auto& f = fix();
  Expansion ex(f.sol, f.opts);
  std::vector<Eigen::VectorXd> probes{Eigen::VectorXd::Constant(1, 0.3)};
  const auto s0 = mc_torus_moments(ex, 1, 0.0, probes, 50, 31, 1);
  CHECK(s0.moments[0][0].var == 0.0);
  CHECK(s0.moments[0][0].mean ==
        doctest::Approx(f.sol.K.synthesize(probes[0])[0]).epsilon(1e-12));

  const auto s1 = mc_torus_moments(ex, 1, 0.1, probes, 300, 32, 1);
  const auto s2 = mc_torus_moments(ex, 1, 0.05, probes, 300, 32, 1);
  for (int comp = 0; comp < 2; ++comp) {
    const double ratio = s1.moments[0][comp].var / s2.moments[0][comp].var;
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.3));
    CHECK(std::abs(s1.moments[0][comp].mean - f.sol.K.synthesize(probes[0])[comp]) <=
          3 * s1.moments[0][comp].se_mean);
  }
}

TEST_CASE("lyapunov: reference exponents, trace identity, omega independence") {
  ModelParams p = ModelParams::reference(0.0);
  SolverOptions o = fix().opts;
  const auto sol = solve_k0(p, zero_torus(p, o), o);
  Expansion ex(sol, o);
  CHECK_THROWS_AS(lyapunov_spectrum(ex, 0.0, 10, 2, 1, 0, 1), std::invalid_argument);

  const auto rep = lyapunov_spectrum(ex, 0.0, 100, 3, 91, 0, 1);
  const double lp = (-1 + std::sqrt(5.0)) / 2;
  CHECK(std::abs(rep.direct_mean[0] - lp) <= 1e-6);
  CHECK(std::abs(rep.direct_mean[1] + 1 + lp) <= 1e-6);
  CHECK(rep.direct_mean[0] + rep.direct_mean[1] ==
        doctest::Approx(-p.gamma * p.d).epsilon(1e-6));
  CHECK(rep.direct_mean[0] > rep.direct_mean[1]);  // sorted descending

  const auto rep2 = lyapunov_spectrum(ex, 0.0, 100, 3, 92, 0, 1);
  CHECK(std::abs(rep.direct_mean[0] - rep2.direct_mean[0]) <= 1e-9);
  CHECK(std::abs(rep.direct_mean[1] - rep2.direct_mean[1]) <= 1e-9);
}

TEST_CASE("pullback to SDE coordinates") {
  auto& f = fix();
  const auto w = NoiseRealization::sample(71, f.opts.step, -1, 1, 1);
  const double eps = 0.1;
  const FourierTorus Khat = pullback_to_sde(f.sol.K, w, eps, 0.0);
  const Eigen::VectorXd th = Eigen::VectorXd::Constant(1, 0.2);
  const Eigen::VectorXd diff = Khat.synthesize(th) - f.sol.K.synthesize(th);
  const Eigen::VectorXd zeta = w.zeta(0.0);
  CHECK(std::abs(diff[0] - eps * zeta[0]) < 1e-14);
  CHECK(std::abs(diff[1] - eps * zeta[1]) < 1e-14);
  CHECK(zeta[0] == 0.0);  // position block untouched
  // eps = 0 is the identity
  const FourierTorus same = pullback_to_sde(f.sol.K, w, 0.0, 0.0);
  CHECK((same.synthesize(th) - f.sol.K.synthesize(th)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exit probability: containment, trapping, monotonicity") {
  ModelParams p = ModelParams::reference(0.1);
  // the boundary start already exceeds the level R/2 at t = 0
  const auto rows1 = exit_probability(p, {1.5}, 3.0, 0.5, 200, 0.0, 41, 1.0 / 64, 1);
  CHECK(rows1[0].exits == 200);
  // deterministic trapping inside the wells
  ModelParams q = ModelParams::reference(0.0);
  const auto rows2 = exit_probability(q, {10.0}, 0.5, 10.0, 300, 0.0, 42, 1.0 / 64, 1);
  CHECK(rows2[0].exits == 0);
  // non-increasing levels up to CI overlap
  const auto rows3 =
      exit_probability(p, {2.0, 4.0, 8.0, 16.0}, 3.0, 10.0, 1500, 0.1, 43, 1.0 / 64, 1);
  for (size_t i = 0; i + 1 < rows3.size(); ++i)
    CHECK(rows3[i + 1].ci.lo <= rows3[i].ci.hi);
  CHECK(rows3[0].ci.p_hat > rows3[3].ci.p_hat);
}

TEST_CASE("ergodic averages") {
  ModelParams p = ModelParams::reference(0.1);
  const auto rc = ergodic_average_test(p, "const", 200, 5, 51, 1.0 / 32, 1);
  CHECK(rc.orbit_avg == doctest::Approx(1.0));
  CHECK(rc.deviation == doctest::Approx(0.0));
  const auto rz = ergodic_average_test(p, "cos_tanh_zeta", 1500, 40, 52, 1.0 / 32, 1);
  CHECK(rz.deviation <= 3.0);
  CHECK_THROWS_AS(ergodic_average_test(p, "nope", 100, 2, 53, 1.0 / 32, 1),
                  std::invalid_argument);
}

TEST_CASE("Wilson intervals bracket the point estimate") {
  const auto ci = wilson_interval(7, 100);
  CHECK(ci.lo < 0.07);
  CHECK(ci.hi > 0.07);
  CHECK(ci.lo >= 0.0);
  const auto edge = wilson_interval(0, 50);
  CHECK(edge.lo == 0.0);
  CHECK(edge.hi > 0.0);
}
