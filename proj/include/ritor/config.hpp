#ifndef RITOR_CONFIG_HPP
#define RITOR_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ritor/model.hpp"
#include "ritor/torus_solver.hpp"

namespace ritor {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One config drives the whole pipeline; sections share tolerances and seeds.
struct RunConfig {
  ModelParams model;
  SolverOptions numerics;

  struct Noise {
    std::uint64_t seed = 12345;
    double epsilon = 0.05;
    long n_samples = 100;
    double horizon = 4.0;  // forward time units beyond the series depth
  } noise;

  struct Expand {
    int order = 1;
    long samples = 100;
    int write_samples = 4;  // per-sample torus files kept on disk
  } expand;

  struct MonteCarlo {
    int order = 1;
    long samples = 1000;
    int probes = 16;  // equispaced probe nodes per axis
  } montecarlo;

  struct Lyapunov {
    int n_steps = 200;
    long samples = 100;
    int order = 1;
  } lyapunov;

  struct ExitProb {
    double radius = 3.0;
    double horizon = 10.0;
    long samples = 10000;
    std::vector<double> levels{2.0, 4.0, 8.0, 16.0};
  } exitprob;

  struct Ergodic {
    std::string observable = "cos_zeta";
    long n_orbit = 10000;
    long samples = 100;
  } ergodic;

  std::string out_dir = "out";
  bool plot_data = false;
  int threads = 1;

  std::vector<Eigen::VectorXd> probe_thetas() const;  // montecarlo.probes per axis
};

/// Parse and validate the structured plain-text config. Unknown keys are
/// rejected naming the key; violations are listed exhaustively; parse errors
/// carry the line number. Near-resonance warnings are appended to
/// `warnings` when given.
RunConfig parse_config(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace ritor

#endif
