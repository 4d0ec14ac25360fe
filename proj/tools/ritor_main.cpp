// Command-line front end: configuration ingestion, command dispatch,
// persistence of tori and reports, and the reproducibility manifest.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ritor/config.hpp"
#include "ritor/perturbation.hpp"
#include "ritor/rng.hpp"
#include "ritor/stats.hpp"
#include "ritor/verify.hpp"
#include "ritor/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ritor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCertification = 3;
constexpr int kExitBlowup = 4;

struct Cli {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool plot_data = false;
  long seed_override = -1;
};

json config_json(const RunConfig& cfg) {
  json j;
  j["model"] = {{"d", cfg.model.d},
                {"m", cfg.model.m},
                {"gamma", cfg.model.gamma},
                {"delta", cfg.model.delta},
                {"amp", std::vector<double>(cfg.model.amp.data(),
                                            cfg.model.amp.data() + cfg.model.amp.size())},
                {"alpha", std::vector<double>(cfg.model.alpha.data(),
                                              cfg.model.alpha.data() + cfg.model.alpha.size())},
                {"beta", std::vector<double>(cfg.model.beta.data(),
                                             cfg.model.beta.data() + cfg.model.beta.size())}};
  if (cfg.model.n_cut) j["model"]["n_cut"] = *cfg.model.n_cut;
  if (!cfg.model.channel_map.empty()) j["model"]["channel_map"] = cfg.model.channel_map;
  j["numerics"] = {{"modes", cfg.numerics.modes},   {"grid", cfg.numerics.grid},
                   {"h", cfg.numerics.step},        {"tol_inv", cfg.numerics.tol_inv},
                   {"tol_red", cfg.numerics.tol_red}, {"tol_coh", cfg.numerics.tol_coh},
                   {"n_max", cfg.numerics.n_max},   {"max_newton", cfg.numerics.max_newton},
                   {"cond_max", cfg.numerics.cond_max}, {"r", cfg.numerics.r_monitor}};
  j["noise"] = {{"seed", cfg.noise.seed},
                {"epsilon", cfg.noise.epsilon},
                {"n_samples", cfg.noise.n_samples},
                {"horizon", cfg.noise.horizon}};
  j["expand"] = {{"order", cfg.expand.order},
                 {"samples", cfg.expand.samples},
                 {"write_samples", cfg.expand.write_samples}};
  j["montecarlo"] = {{"order", cfg.montecarlo.order},
                     {"samples", cfg.montecarlo.samples},
                     {"probes", cfg.montecarlo.probes}};
  j["lyapunov"] = {{"n_steps", cfg.lyapunov.n_steps},
                   {"samples", cfg.lyapunov.samples},
                   {"order", cfg.lyapunov.order}};
  j["exitprob"] = {{"radius", cfg.exitprob.radius},
                   {"horizon", cfg.exitprob.horizon},
                   {"samples", cfg.exitprob.samples},
                   {"levels", cfg.exitprob.levels}};
  j["ergodic"] = {{"observable", cfg.ergodic.observable},
                  {"n_orbit", cfg.ergodic.n_orbit},
                  {"samples", cfg.ergodic.samples}};
  j["output"] = {{"dir", cfg.out_dir}, {"plot_data", cfg.plot_data}, {"threads", cfg.threads}};
  return j;
}

// gnuplot-ready companion files: whitespace-separated columns, '#' header
void write_plot_data(const fs::path& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  os.precision(12);
  os << "# " << header << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
    os << "\n";
  }
}

void write_manifest(const RunConfig& cfg, const std::string& command, double wall_s,
                    const json& extra) {
  json j;
  j["tool"] = "ritor";
  j["version"] = kVersion;
  j["command"] = command;
  j["wall_time_seconds"] = wall_s;
  j["config"] = config_json(cfg);
  j["seed_schedule"] = {{"master", cfg.noise.seed},
                        {"rule", "sample i uses master ^ splitmix64(i)"}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream os(fs::path(cfg.out_dir) / "manifest.json");
  os << j.dump(2) << "\n";
}

DeterministicTorus load_solution(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  for (const char* name : {"K0.torus", "P0.torus", "Lambda0.torus"}) {
    if (!fs::exists(dir / name))
      throw ConfigError("missing artifact `" + (dir / name).string() +
                        "`; run `ritor solve-k0` first");
  }
  DeterministicTorus sol;
  sol.params = cfg.model;
  sol.K = FourierTorus::read((dir / "K0.torus").string());
  sol.frame.P = FourierTorus::read((dir / "P0.torus").string());
  sol.frame.Lambda = FourierTorus::read((dir / "Lambda0.torus").string());
  sol.frame.dS = cfg.model.d;
  sol.frame.dU = cfg.model.d;
  const auto hm = hyperbolicity_margin(sol.frame);
  sol.frame.lamS_hat = hm.lamS_hat;
  sol.frame.lamU_hat = hm.lamU_hat;
  sol.frame.cond_P = hm.c_H_hat /
                     (1.0 / (1.0 - hm.lamS_hat) + hm.lamU_hat / (1.0 - hm.lamU_hat) + 1.0);
  sol.frame.certified = true;
  SolverOptions o = cfg.numerics;
  o.threads = cfg.threads;
  sol.residual = invariance_residual(cfg.model, sol.K, 0.0, {}, o).sup;
  return sol;
}

int cmd_solve_k0(RunConfig cfg) {
  SolverOptions o = cfg.numerics;
  o.threads = cfg.threads;
  const auto t0 = std::chrono::steady_clock::now();
  DeterministicTorus sol = solve_k0(cfg.model, zero_torus(cfg.model, o), o);
  const auto hm = hyperbolicity_margin(sol.frame);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(cfg.out_dir);
  sol.K.write((dir / "K0.torus").string());
  sol.frame.P.write((dir / "P0.torus").string());
  sol.frame.Lambda.write((dir / "Lambda0.torus").string());

  json rep;
  rep["residual"] = sol.residual;
  rep["residual_cr"] = sol.residual_cr;
  rep["newton_iterations"] = sol.newton_iters;
  rep["residual_history"] = sol.residual_history;
  rep["frame"] = {{"lambda_S_hat", hm.lamS_hat},
                  {"lambda_U_hat", hm.lamU_hat},
                  {"c_H_hat", hm.c_H_hat},
                  {"cond_P", sol.frame.cond_P},
                  {"reducibility_residual", sol.frame.red_residual},
                  {"dS", sol.frame.dS},
                  {"dU", sol.frame.dU},
                  {"certified", sol.frame.certified}};
  rep["note"] = "Q1 gauge: SS and UU frame corrections fixed to zero (non-uniqueness)";
  std::ofstream os(dir / "report.json");
  os << rep.dump(2) << "\n";
  write_manifest(cfg, "solve-k0", wall, {{"artifacts", {"K0.torus", "P0.torus", "Lambda0.torus", "report.json"}}});
  std::cout << "solve-k0: residual " << sol.residual << " after " << sol.newton_iters
            << " Newton iterations; margins (" << hm.lamS_hat << ", " << hm.lamU_hat
            << "), c_H " << hm.c_H_hat << "\n";
  return sol.frame.certified ? kExitOk : kExitCertification;
}

int cmd_reduce(RunConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverOptions o = cfg.numerics;
  o.threads = cfg.threads;
  const fs::path dir(cfg.out_dir);
  if (!fs::exists(dir / "K0.torus"))
    throw ConfigError("missing artifact `" + (dir / "K0.torus").string() +
                      "`; run `ritor solve-k0` first");
  FourierTorus K0 = FourierTorus::read((dir / "K0.torus").string());
  AdaptedFrame frame = solve_reducibility(cfg.model, K0, o);
  const auto hm = hyperbolicity_margin(frame);
  frame.P.write((dir / "P0.torus").string());
  frame.Lambda.write((dir / "Lambda0.torus").string());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "reduce", wall,
                 {{"margins", {hm.lamS_hat, hm.lamU_hat}}, {"c_H", hm.c_H_hat}});
  std::cout << "reduce: residual " << frame.red_residual << ", margins (" << hm.lamS_hat
            << ", " << hm.lamU_hat << "), cond P " << frame.cond_P << "\n";
  return frame.certified ? kExitOk : kExitCertification;
}

int cmd_expand(RunConfig cfg, int order, long samples) {
  const auto t0 = std::chrono::steady_clock::now();
  DeterministicTorus sol = load_solution(cfg);
  SolverOptions o = cfg.numerics;
  o.threads = cfg.threads;
  Expansion ex(sol, o);
  const fs::path dir(cfg.out_dir);

  const TorusGrid grid = o.make_grid(cfg.model.m);
  std::vector<Eigen::VectorXd> probes(grid.size());
  for (long i = 0; i < grid.size(); ++i) probes[i] = grid.node(i);
  const int n = 2 * cfg.model.d;

  std::vector<std::vector<std::vector<double>>> k1vals(
      grid.size(), std::vector<std::vector<double>>(n, std::vector<double>(samples)));
  parallel_for(samples, cfg.threads, [&](long s) {
    const auto w = ex.sample_noise(rng::realization_seed(cfg.noise.seed, s), 2, 0, order);
    ExpansionBundle b = ex.bundle_on_grid(w, order);
    for (long i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd v = b.K[0].synthesize(grid.node(i));
      for (int comp = 0; comp < n; ++comp) k1vals[i][comp][s] = v[comp];
    }
    if (s < cfg.expand.write_samples) {
      for (int k = 1; k <= order; ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "K%d_%ld.torus", k, s);
        b.K[k - 1].write((dir / name).string());
      }
      // first-order reducibility correction on the grid
      const auto lf = ex.lambda_first(w, 0, probes);
      std::vector<Eigen::MatrixXd> l1(grid.size());
      for (long i = 0; i < grid.size(); ++i) l1[i] = lf.Lambda1[i];
      char name[64];
      std::snprintf(name, sizeof name, "Lambda1_%ld.torus", s);
      analyze_matrix(grid, l1, o.modes_for(cfg.model.m)).write((dir / name).string());
    }
  });

  std::ofstream csv(dir / "ensemble_summary.csv");
  csv << "theta,component,mean,var,skew,kurtosis\n";
  csv.precision(12);
  std::vector<std::vector<double>> rows;
  for (long i = 0; i < grid.size(); ++i) {
    for (int comp = 0; comp < n; ++comp) {
      const Moments m = compute_moments(k1vals[i][comp]);
      csv << grid.node(i)[0] << "," << comp << "," << m.mean << "," << m.var << ","
          << m.skew << "," << m.kurt_excess << "\n";
      rows.push_back({grid.node(i)[0], double(comp), m.mean, m.var, m.skew, m.kurt_excess});
    }
  }
  if (cfg.plot_data)
    write_plot_data(dir / "ensemble_summary.dat", "theta component mean var skew kurtosis",
                    rows);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "expand", wall, {{"order", order}, {"samples", samples}});
  std::cout << "expand: order " << order << ", " << samples
            << " samples; ensemble_summary.csv written\n";
  return kExitOk;
}

int cmd_montecarlo(RunConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  DeterministicTorus sol = load_solution(cfg);
  SolverOptions o = cfg.numerics;
  o.threads = cfg.threads;
  Expansion ex(sol, o);
  const auto probes = cfg.probe_thetas();
  const auto summary = mc_torus_moments(ex, cfg.montecarlo.order, cfg.noise.epsilon,
                                        probes, cfg.montecarlo.samples, cfg.noise.seed,
                                        cfg.threads);
  const fs::path dir(cfg.out_dir);
  std::ofstream csv(dir / "moments.csv");
  csv << "theta,component,mean,se_mean,var,se_var,skew,kurtosis,n\n";
  csv.precision(12);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < summary.probes.size(); ++i)
    for (size_t comp = 0; comp < summary.moments[i].size(); ++comp) {
      const Moments& m = summary.moments[i][comp];
      csv << summary.probes[i][0] << "," << comp << "," << m.mean << "," << m.se_mean
          << "," << m.var << "," << m.se_var << "," << m.skew << "," << m.kurt_excess
          << "," << m.n << "\n";
      rows.push_back({summary.probes[i][0], double(comp), m.mean, m.se_mean, m.var,
                      m.se_var, m.skew, m.kurt_excess});
    }
  if (cfg.plot_data)
    write_plot_data(dir / "moments.dat",
                    "theta component mean se_mean var se_var skew kurtosis", rows);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "montecarlo", wall,
                 {{"failed_samples", summary.n_failed}, {"order", cfg.montecarlo.order}});
  std::cout << "montecarlo: " << summary.n_samples << " samples (" << summary.n_failed
            << " failed); moments.csv written\n";
  return kExitOk;
}

int cmd_lyapunov(RunConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  DeterministicTorus sol = load_solution(cfg);
  SolverOptions o = cfg.numerics;
  o.threads = cfg.threads;
  Expansion ex(sol, o);
  const auto rep = lyapunov_spectrum(ex, cfg.noise.epsilon, cfg.lyapunov.n_steps,
                                     cfg.lyapunov.samples, cfg.noise.seed,
                                     cfg.lyapunov.order, cfg.threads);
  const fs::path dir(cfg.out_dir);
  std::ofstream csv(dir / "lyapunov.csv");
  csv << "exponent,base,direct_mean,direct_se,pert_mean,pert_se\n";
  csv.precision(12);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < rep.direct_mean.size(); ++i) {
    csv << i << "," << rep.base[i] << "," << rep.direct_mean[i] << "," << rep.direct_se[i]
        << "," << rep.pert_mean[i] << "," << rep.pert_se[i] << "\n";
    rows.push_back({double(i), rep.base[i], rep.direct_mean[i], rep.direct_se[i],
                    rep.pert_mean[i], rep.pert_se[i]});
  }
  if (cfg.plot_data)
    write_plot_data(dir / "lyapunov.dat",
                    "exponent base direct_mean direct_se pert_mean pert_se", rows);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "lyapunov", wall,
                 {{"n_steps", rep.n_steps}, {"samples", rep.n_samples}});
  std::cout << "lyapunov: exponents (direct)";
  for (double v : rep.direct_mean) std::cout << " " << v;
  std::cout << "; lyapunov.csv written\n";
  return kExitOk;
}

int cmd_exit_prob(RunConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = exit_probability(cfg.model, cfg.exitprob.levels, cfg.exitprob.radius,
                                     cfg.exitprob.horizon, cfg.exitprob.samples,
                                     cfg.noise.epsilon, cfg.noise.seed, cfg.numerics.step,
                                     cfg.threads);
  const fs::path dir(cfg.out_dir);
  std::ofstream csv(dir / "exit_prob.csv");
  csv << "level,exits,n,p_hat,wilson_lo,wilson_hi\n";
  csv.precision(12);
  std::vector<std::vector<double>> prows;
  for (const auto& r : rows) {
    csv << r.level << "," << r.exits << "," << r.n << "," << r.ci.p_hat << "," << r.ci.lo
        << "," << r.ci.hi << "\n";
    prows.push_back({r.level, double(r.exits), double(r.n), r.ci.p_hat, r.ci.lo, r.ci.hi});
  }
  if (cfg.plot_data)
    write_plot_data(dir / "exit_prob.dat", "level exits n p_hat wilson_lo wilson_hi",
                    prows);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, "exit-prob", wall, {{"levels", cfg.exitprob.levels}});
  std::cout << "exit-prob: exceedance table written to exit_prob.csv\n";
  return kExitOk;
}

int cmd_flow_debug(RunConfig cfg, double z0x, double z0v, double theta0,
                   const std::string& dump_path) {
  SolverOptions o = cfg.numerics;
  const int d = cfg.model.d;
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(2 * d);
  z0[0] = z0x;
  z0[d] = z0v;
  Eigen::VectorXd th0 = Eigen::VectorXd::Constant(cfg.model.m, theta0);
  const auto w = NoiseRealization::sample(cfg.noise.seed, o.step, -2.0,
                                          std::max(2.0, cfg.noise.horizon), d);
  if (!dump_path.empty()) {
    std::ofstream csv(dump_path);
    csv.precision(17);
    csv << "t";
    for (int j = 1; j <= d; ++j) csv << ",W_" << j;
    for (int j = 1; j <= 2 * d; ++j) csv << ",zeta_" << j;
    csv << "\n";
    const long lo = static_cast<long>(std::llround(w.t_min() / w.h()));
    const long hi = static_cast<long>(std::llround(w.t_max() / w.h()));
    for (long i = lo; i <= hi; ++i) {
      const double t = i * w.h();
      csv << t;
      const Eigen::VectorXd W = w.W(t), zeta = w.zeta_node(i);
      for (int j = 0; j < d; ++j) csv << "," << W[j];
      for (int j = 0; j < 2 * d; ++j) csv << "," << zeta[j];
      csv << "\n";
    }
    std::cout << "path dump written to " << dump_path << "\n";
  }
  const auto vr = variational_flow(cfg.model, z0, th0, w, cfg.noise.epsilon, o.flow());
  const auto st = epsilon_derivatives(cfg.model, z0, th0, w, 2, o.flow());
  std::cout.precision(12);
  std::cout << "z1 =" << vr.z.transpose() << "\n";
  std::cout << "M =\n" << vr.M << "\n";
  std::cout << "deterministic z1 =" << st.z.transpose() << "\n";
  for (size_t k = 0; k < st.deriv.size(); ++k)
    std::cout << "d^" << k + 1 << "Z/deps^" << k + 1 << " =" << st.deriv[k].transpose()
              << "\n";
  return kExitOk;
}

int cmd_verify(RunConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_verify(cfg);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " — " << r.detail << "\n";
    all = all && r.pass;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json extra;
  extra["checks_passed"] = all;
  write_manifest(cfg, "verify", wall, extra);
  std::cout << (all ? "verify: all invariant suites green" : "verify: FAILURES present")
            << " (" << wall << " s)\n";
  return all ? kExitOk : kExitCertification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random invariant tori for quasi-periodically forced Langevin systems"};
  app.require_subcommand(1);

  Cli cli;
  app.add_option("--config", cli.config_path, "path to the run configuration")
      ->required();
  app.add_option("--out", cli.out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", cli.threads, "worker thread count");
  app.add_flag("--plot-data", cli.plot_data, "emit gnuplot-ready columns");
  app.add_option("--seed-override", cli.seed_override, "override noise.seed");

  auto* sub_solve = app.add_subcommand("solve-k0", "deterministic invariant torus");
  auto* sub_reduce = app.add_subcommand("reduce", "recompute the adapted frame");
  auto* sub_expand = app.add_subcommand("expand", "noise-expansion coefficients");
  int expand_order = -1;
  long expand_samples = -1;
  sub_expand->add_option("--order", expand_order, "expansion order l");
  sub_expand->add_option("--samples", expand_samples, "realization count");
  auto* sub_mc = app.add_subcommand("montecarlo", "random torus moments");
  auto* sub_ly = app.add_subcommand("lyapunov", "Lyapunov exponent columns");
  auto* sub_exit = app.add_subcommand("exit-prob", "exit probability table");
  auto* sub_flow = app.add_subcommand("flow", "debug print of one flow evaluation");
  double fz0x = 0.1, fz0v = 0.0, fth = 0.0;
  std::string fdump;
  sub_flow->add_option("--x", fz0x, "initial position");
  sub_flow->add_option("--v", fz0v, "initial velocity");
  sub_flow->add_option("--theta", fth, "initial phase");
  sub_flow->add_option("--dump-path", fdump, "write the noise path as CSV (t, W, zeta)");
  auto* sub_verify = app.add_subcommand("verify", "run the module invariant suites");

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    std::vector<std::string> warnings;
    cfg = parse_config(cli.config_path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (cli.threads > 0) cfg.threads = cli.threads;
    if (cli.plot_data) cfg.plot_data = true;
    if (cli.seed_override >= 0) cfg.noise.seed = static_cast<std::uint64_t>(cli.seed_override);
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (sub_solve->parsed()) return cmd_solve_k0(cfg);
    if (sub_reduce->parsed()) return cmd_reduce(cfg);
    if (sub_expand->parsed())
      return cmd_expand(cfg, expand_order > 0 ? expand_order : cfg.expand.order,
                        expand_samples > 0 ? expand_samples : cfg.expand.samples);
    if (sub_mc->parsed()) return cmd_montecarlo(cfg);
    if (sub_ly->parsed()) return cmd_lyapunov(cfg);
    if (sub_exit->parsed()) return cmd_exit_prob(cfg);
    if (sub_flow->parsed()) return cmd_flow_debug(cfg, fz0x, fz0v, fth, fdump);
    if (sub_verify->parsed()) return cmd_verify(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BlowupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const CertificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCertification;
  }
  return kExitOk;
}
