// Python bindings for the main operations: model setup, noise sampling, the
// RDE flow, the deterministic torus solve, the epsilon-expansion, and the
// statistics drivers.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ritor/perturbation.hpp"
#include "ritor/stats.hpp"
#include "ritor/torus_solver.hpp"
#include "ritor/version.hpp"

namespace py = pybind11;
using namespace ritor;

namespace {

ModelParams make_model(int d, int m, double gamma, double delta,
                       std::vector<double> amp, std::vector<double> alpha,
                       std::vector<double> beta, py::object n_cut,
                       std::vector<int> channel_map) {
  ModelParams p;
  p.d = d;
  p.m = m;
  p.gamma = gamma;
  p.delta = delta;
  auto fill = [m](std::vector<double>& v) {
    if (v.empty()) v.assign(m, 0.0);
  };
  fill(amp);
  fill(alpha);
  fill(beta);
  p.amp = Eigen::Map<const Eigen::VectorXd>(amp.data(), amp.size());
  p.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
  p.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
  if (!n_cut.is_none()) p.n_cut = n_cut.cast<double>();
  p.channel_map = std::move(channel_map);
  p.validate();
  return p;
}

SolverOptions make_options(std::vector<int> modes, std::vector<int> grid, double h,
                           double tol_inv, double tol_red, double tol_coh, int n_max,
                           int max_newton, int threads) {
  SolverOptions o;
  o.modes = std::move(modes);
  o.grid = std::move(grid);
  o.step = h;
  o.tol_inv = tol_inv;
  o.tol_red = tol_red;
  o.tol_coh = tol_coh;
  o.n_max = n_max;
  o.max_newton = max_newton;
  o.threads = threads;
  return o;
}

}  // namespace

PYBIND11_MODULE(_ritor, m) {
  m.doc() = "random invariant tori for quasi-periodically forced Langevin systems";
  m.attr("__version__") = kVersion;

  py::register_exception<CertificationError>(m, "CertificationError");
  py::register_exception<BlowupError>(m, "BlowupError");

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_model), py::arg("d") = 1, py::arg("m") = 1,
           py::arg("gamma") = 1.0, py::arg("delta") = -1.0,
           py::arg("amp") = std::vector<double>{}, py::arg("alpha") = std::vector<double>{},
           py::arg("beta") = std::vector<double>{}, py::arg("n_cut") = py::none(),
           py::arg("channel_map") = std::vector<int>{})
      .def_static("reference", &ModelParams::reference, py::arg("amplitude"))
      .def_readonly("d", &ModelParams::d)
      .def_readonly("m", &ModelParams::m)
      .def_readonly("gamma", &ModelParams::gamma)
      .def_readonly("delta", &ModelParams::delta)
      .def("A", &ModelParams::A)
      .def("alpha_map", &ModelParams::alpha_map);

  m.def("forcing_E", &forcing_E, py::arg("params"), py::arg("theta"));
  m.def("drift", &drift, py::arg("params"), py::arg("z"), py::arg("theta"),
        py::arg("cut") = false);
  m.def("drift_jacobian", &drift_jacobian, py::arg("params"), py::arg("z"),
        py::arg("theta"));
  m.def("lyapunov_H", &lyapunov_H, py::arg("params"), py::arg("z"), py::arg("theta"),
        py::arg("C"));

  py::class_<TorusGrid>(m, "TorusGrid")
      .def(py::init<int, std::vector<int>>(), py::arg("m"), py::arg("dims"))
      .def_readonly("m", &TorusGrid::m)
      .def_readonly("dims", &TorusGrid::dims)
      .def("size", &TorusGrid::size)
      .def("node", &TorusGrid::node);

  py::class_<FourierTorus>(m, "FourierTorus")
      .def(py::init<int, int, std::vector<int>>(), py::arg("m"), py::arg("d_out"),
           py::arg("modes"))
      .def_static("analyze", &FourierTorus::analyze, py::arg("grid"), py::arg("values"),
                  py::arg("modes"))
      .def_static("read", &FourierTorus::read, py::arg("path"))
      .def("write", &FourierTorus::write, py::arg("path"))
      .def("synthesize", &FourierTorus::synthesize, py::arg("theta"))
      .def("rotated", &FourierTorus::rotated, py::arg("alpha"))
      .def("derivative", &FourierTorus::derivative, py::arg("axis"))
      .def("coeff", &FourierTorus::coeff, py::arg("k"), py::arg("comp"))
      .def("set_coeff", &FourierTorus::set_coeff, py::arg("k"), py::arg("comp"),
           py::arg("value"))
      .def("sup_norm", &FourierTorus::sup_norm, py::arg("refine") = 4)
      .def("tail_magnitude", &FourierTorus::tail_magnitude)
      .def_property_readonly("m", &FourierTorus::m)
      .def_property_readonly("d_out", &FourierTorus::d_out)
      .def_property_readonly("modes", &FourierTorus::modes);

  py::class_<NoiseRealization>(m, "NoiseRealization")
      .def_static("sample", &NoiseRealization::sample, py::arg("seed"), py::arg("h"),
                  py::arg("t_min"), py::arg("t_max"), py::arg("d"),
                  py::arg("scale") = 1.0)
      .def_static("zero", &NoiseRealization::zero, py::arg("h"), py::arg("t_min"),
                  py::arg("t_max"), py::arg("d"))
      .def("shifted", &NoiseRealization::shifted, py::arg("s"))
      .def("W", &NoiseRealization::W, py::arg("t"))
      .def("zeta", &NoiseRealization::zeta, py::arg("t"))
      .def("increment", &NoiseRealization::increment, py::arg("cell"))
      .def_property_readonly("h", &NoiseRealization::h)
      .def_property_readonly("t_min", &NoiseRealization::t_min)
      .def_property_readonly("t_max", &NoiseRealization::t_max);

  m.def("random_transform", &random_transform, py::arg("z"), py::arg("zeta"),
        py::arg("eps"), py::arg("inverse") = false);

  py::class_<FlowOptions>(m, "FlowOptions")
      .def(py::init([](double step) {
             FlowOptions f;
             f.step = step;
             return f;
           }),
           py::arg("step") = 1.0 / 64)
      .def_readwrite("step", &FlowOptions::step);

  m.def("time_one_map", &time_one_map, py::arg("params"), py::arg("z0"),
        py::arg("theta0"), py::arg("noise"), py::arg("eps"),
        py::arg("options") = FlowOptions{}, py::arg("t_span") = 1.0);
  m.def(
      "variational_flow",
      [](const ModelParams& p, const Eigen::VectorXd& z0, const Eigen::VectorXd& th0,
         const NoiseRealization& w, double eps, const FlowOptions& o) {
        const auto r = variational_flow(p, z0, th0, w, eps, o);
        return py::make_tuple(r.z, r.M);
      },
      py::arg("params"), py::arg("z0"), py::arg("theta0"), py::arg("noise"),
      py::arg("eps"), py::arg("options") = FlowOptions{});
  m.def(
      "epsilon_derivatives",
      [](const ModelParams& p, const Eigen::VectorXd& z0, const Eigen::VectorXd& th0,
         const NoiseRealization& w, int order, const FlowOptions& o) {
        const auto st = epsilon_derivatives(p, z0, th0, w, order, o);
        return py::make_tuple(st.z, st.deriv);
      },
      py::arg("params"), py::arg("z0"), py::arg("theta0"), py::arg("noise"),
      py::arg("order"), py::arg("options") = FlowOptions{});

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init(&make_options), py::arg("modes") = std::vector<int>{16},
           py::arg("grid") = std::vector<int>{64}, py::arg("h") = 1.0 / 64,
           py::arg("tol_inv") = 1e-9, py::arg("tol_red") = 1e-9,
           py::arg("tol_coh") = 1e-6, py::arg("n_max") = 60,
           py::arg("max_newton") = 25, py::arg("threads") = 1)
      .def_readwrite("step", &SolverOptions::step)
      .def_readwrite("tol_inv", &SolverOptions::tol_inv);

  py::class_<AdaptedFrame>(m, "AdaptedFrame")
      .def_readonly("P", &AdaptedFrame::P)
      .def_readonly("Lambda", &AdaptedFrame::Lambda)
      .def_readonly("dS", &AdaptedFrame::dS)
      .def_readonly("dU", &AdaptedFrame::dU)
      .def_readonly("lamS_hat", &AdaptedFrame::lamS_hat)
      .def_readonly("lamU_hat", &AdaptedFrame::lamU_hat)
      .def_readonly("cond_P", &AdaptedFrame::cond_P)
      .def_readonly("red_residual", &AdaptedFrame::red_residual)
      .def_readonly("certified", &AdaptedFrame::certified)
      .def("P_at", &AdaptedFrame::P_at)
      .def("Lambda_at", &AdaptedFrame::Lambda_at);

  py::class_<DeterministicTorus>(m, "DeterministicTorus")
      .def_readonly("K", &DeterministicTorus::K)
      .def_readonly("frame", &DeterministicTorus::frame)
      .def_readonly("residual", &DeterministicTorus::residual)
      .def_readonly("newton_iters", &DeterministicTorus::newton_iters);

  m.def("zero_torus", &zero_torus, py::arg("params"), py::arg("options"));
  m.def("solve_k0", &solve_k0, py::arg("params"), py::arg("K_init"), py::arg("options"));
  m.def("solve_reducibility", &solve_reducibility, py::arg("params"), py::arg("K0"),
        py::arg("options"));
  m.def(
      "hyperbolicity_margin",
      [](const AdaptedFrame& f, int n_probe) {
        const auto h = hyperbolicity_margin(f, n_probe);
        return py::make_tuple(h.lamS_hat, h.lamU_hat, h.c_H_hat);
      },
      py::arg("frame"), py::arg("n_probe") = 256);

  py::class_<Expansion>(m, "Expansion")
      .def(py::init<DeterministicTorus, SolverOptions>(), py::arg("torus"),
           py::arg("options"))
      .def("sample_noise", &Expansion::sample_noise, py::arg("seed"),
           py::arg("extra_forward") = 2.0, py::arg("extra_backward") = 0.0,
           py::arg("order") = 1)
      .def("coeff_at",
           [](const Expansion& ex, const NoiseRealization& w, int base,
              const std::vector<Eigen::VectorXd>& targets, int k) {
             return ex.coeff_at(w, base, targets, k);
           },
           py::arg("noise"), py::arg("base"), py::arg("targets"), py::arg("k"))
      .def("truncated_at", &Expansion::truncated_at, py::arg("noise"), py::arg("base"),
           py::arg("theta"), py::arg("order"), py::arg("eps"))
      .def("defect", &Expansion::defect, py::arg("noise"), py::arg("eps"),
           py::arg("order"), py::arg("probes"))
      .def("lambda_first", [](const Expansion& ex, const NoiseRealization& w, int base,
                              const std::vector<Eigen::VectorXd>& targets) {
        const auto lf = ex.lambda_first(w, base, targets);
        return py::make_tuple(lf.Q1, lf.Lambda1);
      });

  py::class_<Moments>(m, "Moments")
      .def_readonly("n", &Moments::n)
      .def_readonly("mean", &Moments::mean)
      .def_readonly("var", &Moments::var)
      .def_readonly("skew", &Moments::skew)
      .def_readonly("kurt_excess", &Moments::kurt_excess)
      .def_readonly("se_mean", &Moments::se_mean)
      .def_readonly("se_skew", &Moments::se_skew)
      .def_readonly("se_kurt", &Moments::se_kurt);

  py::class_<EnsembleSummary>(m, "EnsembleSummary")
      .def_readonly("n_samples", &EnsembleSummary::n_samples)
      .def_readonly("n_failed", &EnsembleSummary::n_failed)
      .def_readonly("probes", &EnsembleSummary::probes)
      .def_readonly("moments", &EnsembleSummary::moments);

  m.def("mc_torus_moments", &mc_torus_moments, py::arg("expansion"), py::arg("order"),
        py::arg("eps"), py::arg("probes"), py::arg("n_samples"), py::arg("seed"),
        py::arg("threads") = 1);

  py::class_<LyapunovReport>(m, "LyapunovReport")
      .def_readonly("eps", &LyapunovReport::eps)
      .def_readonly("n_steps", &LyapunovReport::n_steps)
      .def_readonly("base", &LyapunovReport::base)
      .def_readonly("direct_mean", &LyapunovReport::direct_mean)
      .def_readonly("direct_se", &LyapunovReport::direct_se)
      .def_readonly("pert_mean", &LyapunovReport::pert_mean)
      .def_readonly("pert_se", &LyapunovReport::pert_se);

  m.def("lyapunov_spectrum", &lyapunov_spectrum, py::arg("expansion"), py::arg("eps"),
        py::arg("n_steps"), py::arg("n_samples"), py::arg("seed"), py::arg("order") = 1,
        py::arg("threads") = 1);

  m.def("pullback_to_sde", &pullback_to_sde, py::arg("K"), py::arg("noise"),
        py::arg("eps"), py::arg("t"));

  m.def(
      "exit_probability",
      [](const ModelParams& p, const std::vector<double>& levels, double R, double T,
         long n_samples, double eps, std::uint64_t seed, double h, int threads,
         int n_starts) {
        const auto rows =
            exit_probability(p, levels, R, T, n_samples, eps, seed, h, threads, n_starts);
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["level"] = r.level;
          d["exits"] = r.exits;
          d["n"] = r.n;
          d["p_hat"] = r.ci.p_hat;
          d["wilson_lo"] = r.ci.lo;
          d["wilson_hi"] = r.ci.hi;
          out.append(d);
        }
        return out;
      },
      py::arg("params"), py::arg("levels"), py::arg("R"), py::arg("T"),
      py::arg("n_samples"), py::arg("eps"), py::arg("seed"), py::arg("h") = 1.0 / 64,
      py::arg("threads") = 1, py::arg("n_starts") = 4);

  m.def(
      "ergodic_average_test",
      [](const ModelParams& p, const std::string& obs, long n_orbit, long n_samples,
         std::uint64_t seed, double h, int threads) {
        const auto r = ergodic_average_test(p, obs, n_orbit, n_samples, seed, h, threads);
        py::dict d;
        d["orbit_avg"] = r.orbit_avg;
        d["product_avg"] = r.product_avg;
        d["deviation"] = r.deviation;
        return d;
      },
      py::arg("params"), py::arg("observable"), py::arg("n_orbit"), py::arg("n_samples"),
      py::arg("seed"), py::arg("h") = 1.0 / 64, py::arg("threads") = 1);
}
