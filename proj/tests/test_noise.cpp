#include <doctest.h>

#include <cmath>

#include "ritor/noise.hpp"
#include "ritor/rng.hpp"
#include "ritor/util.hpp"

using namespace ritor;

TEST_CASE("path anchoring, determinism, and grid errors") {
  CHECK_THROWS_AS(NoiseRealization::sample(1, -0.1, -1, 1, 1), std::invalid_argument);
  const auto w = NoiseRealization::sample(17, 1.0 / 32, -2, 2, 2);
  CHECK(w.W(0.0).cwiseAbs().maxCoeff() == 0.0);
  const auto w2 = NoiseRealization::sample(17, 1.0 / 32, -2, 2, 2);
  for (long cell = -64; cell < 64; ++cell)
    CHECK(w.increment(cell) == w2.increment(cell));
  CHECK_THROWS_AS(w.W(0.01), std::invalid_argument);  // off-grid time
}

TEST_CASE("path extension is consistent under counter seeding") {
  const auto w_short = NoiseRealization::sample(23, 1.0 / 64, -1, 1, 1);
  const auto w_long = NoiseRealization::sample(23, 1.0 / 64, -8, 8, 1);
  for (long cell = -64; cell < 64; ++cell)
    CHECK(w_short.increment(cell) == w_long.increment(cell));
  CHECK((w_short.W(1.0) - w_long.W(1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wiener shift: identity, flow property, re-anchoring, range error") {
  const auto w = NoiseRealization::sample(5, 1.0 / 16, -4, 4, 1);
  const auto s0 = w.shifted(0.0);
  CHECK((s0.W(1.0) - w.W(1.0)).cwiseAbs().maxCoeff() == 0.0);
  const auto a = w.shifted(0.5).shifted(1.0);
  const auto b = w.shifted(1.5);
  for (double t : {-1.0, 0.0, 0.5, 2.0})
    CHECK((a.W(t) - b.W(t)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.W(0.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(w.shifted(100.0), std::out_of_range);
  CHECK_THROWS_AS(w.shifted(0.013), std::invalid_argument);  // not a grid multiple
}

TEST_CASE("increments have the right first moments") {
  const long n = 10000;
  const double h = 1.0 / 64;
  std::vector<double> sum(n);
  for (long i = 0; i < n; ++i) {
    const auto w = NoiseRealization::sample(rng::realization_seed(7, i), h, -h, h, 1);
    sum[i] = w.increment(0)[0];
  }
  const Moments m = compute_moments(sum);
  CHECK(std::abs(m.mean) <= 3 * std::sqrt(h / n));
  CHECK(m.var == doctest::Approx(h).epsilon(0.05));
}

TEST_CASE("OU process: degeneracy, stationarity in law, zeta interpolation") {
  const auto w = NoiseRealization::sample(11, 1.0 / 32, -2, 2, 1);
  for (double t : {-1.0, 0.0, 0.75, 1.5})
    CHECK(w.zeta(t)[0] == 0.0);  // position block killed by sigma = (0, I)^T
  // linear interpolation between nodes
  const Eigen::VectorXd mid = w.zeta(1.0 / 64);
  const Eigen::VectorXd avg = 0.5 * (w.zeta(0.0) + w.zeta(1.0 / 32));
  CHECK((mid - avg).cwiseAbs().maxCoeff() < 1e-15);

  const long n = 20000;
  std::vector<double> v0(n);
  for (long i = 0; i < n; ++i) {
    const auto wi =
        NoiseRealization::sample(rng::realization_seed(13, i), 1.0 / 64, -0.5, 0.5, 1);
    v0[i] = wi.zeta(0.25)[1];
  }
  const Moments m = compute_moments(v0);
  CHECK(m.var > 0.485);
  CHECK(m.var < 0.515);
}

TEST_CASE("shifted realization exposes the shifted OU samples") {
  const auto w = NoiseRealization::sample(19, 1.0 / 16, -3, 3, 1);
  const auto s = w.shifted(1.0);
  CHECK((s.zeta(0.5) - w.zeta(1.5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random transform and its inverse") {
  Eigen::VectorXd z(2), zeta(2);
  z << 1.0, 2.0;
  zeta << 0.0, 0.3;
  const Eigen::VectorXd fwd = random_transform(z, zeta, 0.1);
  CHECK(fwd[0] == 1.0);
  CHECK(fwd[1] == doctest::Approx(1.97));
  CHECK((random_transform(fwd, zeta, 0.1, true) - z).cwiseAbs().maxCoeff() == 0.0);
  CHECK((random_transform(z, zeta, 0.0) - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero and scaled paths") {
  const auto w0 = NoiseRealization::zero(1.0 / 32, -1, 1, 1);
  CHECK(w0.W(1.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w0.zeta(0.5).cwiseAbs().maxCoeff() == 0.0);
  const auto w1 = NoiseRealization::sample(31, 1.0 / 32, -1, 1, 1);
  const auto w3 = NoiseRealization::sample(31, 1.0 / 32, -1, 1, 1, 3.0);
  CHECK((w3.W(1.0) - 3.0 * w1.W(1.0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((w3.zeta(0.5) - 3.0 * w1.zeta(0.5)).cwiseAbs().maxCoeff() < 1e-15);
}
