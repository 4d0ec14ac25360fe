#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ritor/fourier.hpp"
#include "ritor/rng.hpp"

using namespace ritor;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

FourierTorus sample_poly(int degree, std::uint64_t seed) {
  FourierTorus t(1, 2, {degree});
  for (int k = 0; k <= degree; ++k) {
    for (int comp = 0; comp < 2; ++comp) {
      const double re = rng::u01(seed, 1, 2 * k + comp) - 0.5;
      const double im = k ? rng::u01(seed, 2, 2 * k + comp) - 0.5 : 0.0;
      t.set_coeff({k}, comp, {re, im});
      if (k) t.set_coeff({-k}, comp, {re, -im});
    }
  }
  return t;
}
}  // namespace

TEST_CASE("analyze: constant function has only the zero mode") {
  TorusGrid grid(1, {8});
  std::vector<Eigen::VectorXd> vals(grid.size(), Eigen::VectorXd::Constant(1, 1.0));
  FourierTorus t = FourierTorus::analyze(grid, vals, {2});
  CHECK(std::abs(t.coeff({0}, 0) - 1.0) < 1e-15);
  CHECK(std::abs(t.coeff({1}, 0)) < 1e-15);
  CHECK(std::abs(t.coeff({2}, 0)) < 1e-15);
}

TEST_CASE("analyze: single harmonic lands on +-1 with weight 1/2") {
  TorusGrid grid(1, {16});
  std::vector<Eigen::VectorXd> vals(grid.size());
  for (long i = 0; i < grid.size(); ++i)
    vals[i] = Eigen::VectorXd::Constant(1, std::cos(kTwoPi * grid.node(i)[0]));
  FourierTorus t = FourierTorus::analyze(grid, vals, {3});
  CHECK(std::abs(t.coeff({1}, 0) - 0.5) < 1e-14);
  CHECK(std::abs(t.coeff({-1}, 0) - 0.5) < 1e-14);
  CHECK(std::abs(t.coeff({0}, 0)) < 1e-15);
  CHECK(std::abs(t.coeff({2}, 0)) < 1e-15);
}

TEST_CASE("analyze rejects non-finite samples naming the node") {
  TorusGrid grid(1, {8});
  std::vector<Eigen::VectorXd> vals(grid.size(), Eigen::VectorXd::Zero(1));
  vals[5][0] = std::nan("");
  CHECK_THROWS_WITH_AS(FourierTorus::analyze(grid, vals, {2}),
                       doctest::Contains("node 5"), std::invalid_argument);
}

TEST_CASE("generate-then-recover: degree-3 polynomial on 16 nodes") {
  FourierTorus gen = sample_poly(3, 42);
  TorusGrid grid(1, {16});
  FourierTorus rec = FourierTorus::analyze(grid, gen.synthesize_grid(grid), {3});
  for (int k = -3; k <= 3; ++k)
    for (int comp = 0; comp < 2; ++comp)
      CHECK(std::abs(rec.coeff({k}, comp) - gen.coeff({k}, comp)) < 1e-12);
}

TEST_CASE("synthesize matches direct mode summation at random points") {
  FourierTorus t = sample_poly(3, 7);
  for (int trial = 0; trial < 100; ++trial) {
    const double th = rng::u01(9, 3, trial);
    Eigen::VectorXcd direct = Eigen::VectorXcd::Zero(2);
    for (int k = -3; k <= 3; ++k)
      for (int comp = 0; comp < 2; ++comp)
        direct[comp] += t.coeff({k}, comp) * std::polar(1.0, kTwoPi * k * th);
    const Eigen::VectorXd v = t.synthesize(Eigen::VectorXd::Constant(1, th));
    CHECK((v - direct.real()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(direct.imag().cwiseAbs().maxCoeff() < 1e-12);  // Hermitian symmetry
  }
}

TEST_CASE("synthesize: cosine vanishes at the quarter period") {
  TorusGrid grid(1, {16});
  std::vector<Eigen::VectorXd> vals(grid.size());
  for (long i = 0; i < grid.size(); ++i)
    vals[i] = Eigen::VectorXd::Constant(1, std::cos(kTwoPi * grid.node(i)[0]));
  FourierTorus t = FourierTorus::analyze(grid, vals, {3});
  CHECK(std::abs(t.synthesize(Eigen::VectorXd::Constant(1, 0.25))[0]) <= 1e-12);
}

TEST_CASE("rotate: quarter shift of cosine gives minus sine") {
  TorusGrid grid(1, {16});
  std::vector<Eigen::VectorXd> vals(grid.size());
  for (long i = 0; i < grid.size(); ++i)
    vals[i] = Eigen::VectorXd::Constant(1, std::cos(kTwoPi * grid.node(i)[0]));
  FourierTorus t = FourierTorus::analyze(grid, vals, {3});
  FourierTorus r = t.rotated(Eigen::VectorXd::Constant(1, 0.25));
  for (long i = 0; i < grid.size(); ++i) {
    const double th = grid.node(i)[0];
    CHECK(std::abs(r.synthesize(grid.node(i))[0] + std::sin(kTwoPi * th)) < 1e-12);
  }
  // identity rotation leaves coefficients untouched
  FourierTorus id = t.rotated(Eigen::VectorXd::Zero(1));
  for (int k = -3; k <= 3; ++k)
    CHECK(std::abs(id.coeff({k}, 0) - t.coeff({k}, 0)) == 0.0);
}

TEST_CASE("derivative is exact on harmonics") {
  FourierTorus t = sample_poly(3, 12);
  FourierTorus d = t.derivative(0);
  const double th = 0.318;
  Eigen::VectorXcd direct = Eigen::VectorXcd::Zero(2);
  for (int k = -3; k <= 3; ++k)
    for (int comp = 0; comp < 2; ++comp)
      direct[comp] += t.coeff({k}, comp) * std::complex<double>(0, kTwoPi * k) *
                      std::polar(1.0, kTwoPi * k * th);
  CHECK((d.synthesize(Eigen::VectorXd::Constant(1, th)) - direct.real())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("sup-norm diagnostic is sub-additive") {
  FourierTorus a = sample_poly(3, 21), b = sample_poly(3, 22);
  FourierTorus sum = a;
  sum += b;
  CHECK(sum.sup_norm() <= a.sup_norm() + b.sup_norm() + 1e-13);
}

TEST_CASE("two-dimensional torus roundtrip and rotation") {
  TorusGrid grid(2, {12, 10});
  std::vector<Eigen::VectorXd> vals(grid.size());
  for (long i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd th = grid.node(i);
    vals[i] = Eigen::VectorXd::Constant(
        1, std::sin(kTwoPi * th[0]) * std::cos(kTwoPi * th[1]) + 0.5 * std::cos(kTwoPi * th[0]));
  }
  FourierTorus t = FourierTorus::analyze(grid, vals, {3, 2});
  double err = 0.0;
  for (long i = 0; i < grid.size(); ++i)
    err = std::max(err, std::abs(t.synthesize(grid.node(i))[0] - vals[i][0]));
  CHECK(err < 1e-12);
  Eigen::VectorXd alpha(2);
  alpha << 0.31, 0.17;
  FourierTorus r = t.rotated(alpha);
  Eigen::VectorXd probe(2);
  probe << 0.4, 0.9;
  CHECK(std::abs(r.synthesize(probe)[0] - t.synthesize(probe + alpha)[0]) < 1e-12);
}

TEST_CASE("file format round-trips bit-faithfully") {
  FourierTorus t = sample_poly(3, 33);
  const auto path = std::filesystem::temp_directory_path() / "ritor_test.torus";
  t.write(path.string());
  FourierTorus r = FourierTorus::read(path.string());
  REQUIRE(r.m() == t.m());
  REQUIRE(r.d_out() == t.d_out());
  for (int k = -3; k <= 3; ++k)
    for (int comp = 0; comp < 2; ++comp)
      CHECK(r.coeff({k}, comp) == t.coeff({k}, comp));
  std::filesystem::remove(path);
}

TEST_CASE("anti-aliasing rule is enforced") {
  TorusGrid grid(1, {8});
  std::vector<Eigen::VectorXd> vals(grid.size(), Eigen::VectorXd::Zero(1));
  CHECK_THROWS_AS(FourierTorus::analyze(grid, vals, {5}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid(1, {7}), std::invalid_argument);  // odd node count
}

TEST_CASE("rotation composition property") {
  FourierTorus t = sample_poly(3, 55);
  Eigen::VectorXd a1 = Eigen::VectorXd::Constant(1, 0.123);
  Eigen::VectorXd a2 = Eigen::VectorXd::Constant(1, 0.456);
  FourierTorus lhs = t.rotated(a1).rotated(a2);
  FourierTorus rhs = t.rotated(a1 + a2);
  for (int k = -3; k <= 3; ++k)
    CHECK(std::abs(lhs.coeff({k}, 0) - rhs.coeff({k}, 0)) < 1e-13);
  FourierTorus back = t.rotated(a1).rotated(-a1);
  for (int k = -3; k <= 3; ++k)
    CHECK(std::abs(back.coeff({k}, 1) - t.coeff({k}, 1)) < 1e-14);
}
