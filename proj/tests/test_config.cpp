#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ritor/config.hpp"

using namespace ritor;
namespace fs = std::filesystem;

namespace {
std::string write_cfg(const std::string& body) {
  static int counter = 0;
  const auto path =
      fs::temp_directory_path() / ("ritor_cfg_" + std::to_string(counter++) + ".cfg");
  std::ofstream os(path);
  os << body;
  return path.string();
}
}  // namespace

TEST_CASE("minimal config gets defaults and validates") {
  const auto path = write_cfg("[model]\nd = 1\ngamma = 1.0\ndelta = -1.0\n");
  const RunConfig cfg = parse_config(path);
  CHECK(cfg.model.d == 1);
  CHECK(cfg.model.amp.size() == 1);
  CHECK(cfg.model.amp[0] == 0.0);
  CHECK(cfg.numerics.step == doctest::Approx(1.0 / 64));
  CHECK(cfg.numerics.tol_inv == 1e-9);
  CHECK(cfg.noise.seed == 12345);
  fs::remove(path);
}

TEST_CASE("negative gamma is rejected naming the constraint") {
  const auto path = write_cfg("[model]\ngamma = -1\n");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("gamma"), ConfigError);
  fs::remove(path);
}

TEST_CASE("anti-aliasing violation is rejected") {
  const auto path = write_cfg(
      "[model]\nd = 1\n[numerics]\nmodes = [5]\ngrid = [8]\n");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("anti-aliasing"),
                       ConfigError);
  fs::remove(path);
}

TEST_CASE("unknown keys are rejected with the key named") {
  const auto path = write_cfg("[model]\ngamma = 1\nbogus_key = 3\n");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("model.bogus_key"),
                       ConfigError);
  fs::remove(path);
}

TEST_CASE("parse errors carry line numbers") {
  const auto path = write_cfg("[model]\ngamma = 1\nthis line has no equals\n");
  CHECK_THROWS_WITH_AS(parse_config(path), doctest::Contains("line 3"), ConfigError);
  fs::remove(path);
}

TEST_CASE("conflicting step keys are rejected; noise.h alone is accepted") {
  const auto a = write_cfg("[numerics]\nh = 0.015625\n[noise]\nh = 0.03125\n");
  CHECK_THROWS_WITH_AS(parse_config(a), doctest::Contains("noise.h"), ConfigError);
  fs::remove(a);
  const auto b = write_cfg("[noise]\nh = 0.03125\n");
  const RunConfig cfg = parse_config(b);
  CHECK(cfg.numerics.step == doctest::Approx(0.03125));
  fs::remove(b);
}

TEST_CASE("arrays, comments, and strings parse") {
  const auto path = write_cfg(
      "# comment\n[model]\nm = 2\nd = 2\namp = [0.1, 0.2]  # inline\n"
      "alpha = [3.88, 2.42]\nbeta = [0, 0]\nchannel_map = [0, 1]\n"
      "[ergodic]\nobservable = \"cos\"\n");
  const RunConfig cfg = parse_config(path);
  CHECK(cfg.model.m == 2);
  CHECK(cfg.model.amp[1] == doctest::Approx(0.2));
  CHECK(cfg.model.channel_map == std::vector<int>{0, 1});
  CHECK(cfg.ergodic.observable == "cos");
  fs::remove(path);
}

TEST_CASE("epsilon must be nonnegative and listed exhaustively with others") {
  const auto path = write_cfg(
      "[model]\ngamma = -2\n[noise]\nepsilon = -0.1\n[numerics]\ntol_inv = -1\n");
  try {
    parse_config(path);
    CHECK(false);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("gamma") != std::string::npos);
    CHECK(msg.find("epsilon") != std::string::npos);
    CHECK(msg.find("tol_inv") != std::string::npos);
  }
  fs::remove(path);
}
