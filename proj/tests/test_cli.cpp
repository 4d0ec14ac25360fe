#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = RITOR_BIN + " "s + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("ritor_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_cfg(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "run.cfg";
  std::ofstream os(p);
  os << body;
  return p;
}

const char* kGoodCfg =
    "[model]\nd = 1\nm = 1\ngamma = 1.0\ndelta = -1.0\namp = [0.1]\n"
    "alpha = [3.8832220774509327]\nbeta = [0.0]\n"
    "[numerics]\nmodes = [12]\ngrid = [48]\nh = 0.015625\n"
    "[noise]\nseed = 777\nepsilon = 0.05\n";

}  // namespace

TEST_CASE("config errors exit with status 2") {
  const auto dir = scratch_dir("badcfg");
  const auto cfg = write_cfg(dir, "[model]\ngamma = -1\n");
  CHECK(run("--config " + cfg.string() + " --out " + (dir / "out").string() +
            " solve-k0") == 2);
  CHECK(run("--config /nonexistent.cfg solve-k0") == 2);
}

TEST_CASE("expand before solve-k0 names the missing artifact") {
  const auto dir = scratch_dir("dep");
  const auto cfg = write_cfg(dir, kGoodCfg);
  const std::string out = (dir / "out").string();
  const std::string cmd = RITOR_BIN + " --config "s + cfg.string() + " --out " + out +
                          " expand --order 1 --samples 2 2> " +
                          (dir / "err.txt").string();
  const int rc = WEXITSTATUS(std::system(cmd.c_str()));
  CHECK(rc == 2);
  const std::string err = slurp(dir / "err.txt");
  CHECK(err.find("K0.torus") != std::string::npos);
}

TEST_CASE("solve-k0 twice produces byte-identical artifacts and a manifest") {
  const auto dir = scratch_dir("repro");
  const auto cfg = write_cfg(dir, kGoodCfg);
  const std::string out1 = (dir / "a").string(), out2 = (dir / "b").string();
  REQUIRE(run("--config " + cfg.string() + " --out " + out1 + " solve-k0") == 0);
  REQUIRE(run("--config " + cfg.string() + " --out " + out2 + " solve-k0") == 0);
  CHECK(slurp(fs::path(out1) / "K0.torus") == slurp(fs::path(out2) / "K0.torus"));
  CHECK(slurp(fs::path(out1) / "P0.torus") == slurp(fs::path(out2) / "P0.torus"));
  CHECK(slurp(fs::path(out1) / "Lambda0.torus") ==
        slurp(fs::path(out2) / "Lambda0.torus"));
  const std::string manifest = slurp(fs::path(out1) / "manifest.json");
  CHECK(manifest.find("\"command\": \"solve-k0\"") != std::string::npos);
  CHECK(manifest.find("\"seed_schedule\"") != std::string::npos);
  const std::string report = slurp(fs::path(out1) / "report.json");
  CHECK(report.find("lambda_S_hat") != std::string::npos);
}

TEST_CASE("pipeline: expand, montecarlo, lyapunov, exit-prob run after solve-k0") {
  const auto dir = scratch_dir("pipe");
  const auto cfg = write_cfg(
      dir, std::string(kGoodCfg) +
               "[montecarlo]\nsamples = 40\nprobes = 4\n"
               "[lyapunov]\nn_steps = 80\nsamples = 3\n"
               "[exitprob]\nsamples = 200\nlevels = [2, 8]\nhorizon = 2.0\n");
  const std::string out = (dir / "out").string();
  REQUIRE(run("--config " + cfg.string() + " --out " + out + " solve-k0") == 0);
  CHECK(run("--config " + cfg.string() + " --out " + out +
            " expand --order 1 --samples 3") == 0);
  CHECK(fs::exists(fs::path(out) / "K1_0.torus"));
  CHECK(fs::exists(fs::path(out) / "Lambda1_0.torus"));
  CHECK(fs::exists(fs::path(out) / "ensemble_summary.csv"));
  CHECK(run("--config " + cfg.string() + " --out " + out + " montecarlo") == 0);
  CHECK(fs::exists(fs::path(out) / "moments.csv"));
  CHECK(run("--config " + cfg.string() + " --out " + out + " lyapunov") == 0);
  CHECK(fs::exists(fs::path(out) / "lyapunov.csv"));
  CHECK(run("--config " + cfg.string() + " --out " + out + " exit-prob") == 0);
  CHECK(fs::exists(fs::path(out) / "exit_prob.csv"));
  const std::string csv = slurp(fs::path(out) / "exit_prob.csv");
  CHECK(csv.find("level,exits,n,p_hat,wilson_lo,wilson_hi") != std::string::npos);
}

TEST_CASE("flow debug subcommand prints the stack") {
  const auto dir = scratch_dir("flowdbg");
  const auto cfg = write_cfg(dir, kGoodCfg);
  const std::string cmd = RITOR_BIN + " --config "s + cfg.string() + " --out " +
                          (dir / "out").string() + " flow --x 0.2 --v 0.1 > " +
                          (dir / "out.txt").string() + " 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string txt = slurp(dir / "out.txt");
  CHECK(txt.find("z1 =") != std::string::npos);
  CHECK(txt.find("M =") != std::string::npos);
  CHECK(txt.find("Z/deps") != std::string::npos);
}

TEST_CASE("seed override changes stochastic outputs but not the torus") {
  const auto dir = scratch_dir("seed");
  const auto cfg = write_cfg(dir, std::string(kGoodCfg) +
                                      "[montecarlo]\nsamples = 30\nprobes = 2\n");
  const std::string out = (dir / "out").string();
  REQUIRE(run("--config " + cfg.string() + " --out " + out + " solve-k0") == 0);
  REQUIRE(run("--config " + cfg.string() + " --out " + out + " montecarlo") == 0);
  const std::string m1 = slurp(fs::path(out) / "moments.csv");
  REQUIRE(run("--config " + cfg.string() + " --out " + out +
              " --seed-override 999 montecarlo") == 0);
  const std::string m2 = slurp(fs::path(out) / "moments.csv");
  CHECK(m1 != m2);
  REQUIRE(run("--config " + cfg.string() + " --out " + out + " montecarlo") == 0);
  CHECK(slurp(fs::path(out) / "moments.csv") == m1);
}
