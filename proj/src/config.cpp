#include "ritor/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ritor {

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  bool is_array = false;
  std::vector<std::string> items;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const RawValue& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double x = std::stod(v.text, &pos);
    if (pos != v.text.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "line " << v.line << ": key `" << key << "` expects a number, got `" << v.text
       << "`";
    throw ConfigError(os.str());
  }
}

long to_long(const RawValue& v, const std::string& key) {
  const double x = to_double(v, key);
  const long n = static_cast<long>(std::llround(x));
  if (std::abs(x - n) > 1e-9) {
    std::ostringstream os;
    os << "line " << v.line << ": key `" << key << "` expects an integer, got `" << v.text
       << "`";
    throw ConfigError(os.str());
  }
  return n;
}

bool to_bool(const RawValue& v, const std::string& key) {
  if (v.text == "true" || v.text == "1") return true;
  if (v.text == "false" || v.text == "0") return false;
  std::ostringstream os;
  os << "line " << v.line << ": key `" << key << "` expects true/false";
  throw ConfigError(os.str());
}

std::string to_string_val(const RawValue& v) {
  std::string t = v.text;
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
  return t;
}

std::vector<double> to_vec(const RawValue& v, const std::string& key) {
  std::vector<double> out;
  const auto& items = v.is_array ? v.items : std::vector<std::string>{v.text};
  for (const auto& it : items) {
    RawValue e{it, v.line, false, {}};
    out.push_back(to_double(e, key));
  }
  return out;
}

std::vector<int> to_ivec(const RawValue& v, const std::string& key) {
  std::vector<int> out;
  for (double x : to_vec(v, key)) {
    const int n = static_cast<int>(std::llround(x));
    if (std::abs(x - n) > 1e-9) {
      std::ostringstream os;
      os << "line " << v.line << ": key `" << key << "` expects integers";
      throw ConfigError(os.str());
    }
    out.push_back(n);
  }
  return out;
}

std::map<std::string, RawValue> read_keyfile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, RawValue> kv;
  std::string line, section;
  int ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        std::ostringstream os;
        os << "line " << ln << ": unterminated section header";
        throw ConfigError(os.str());
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << ln << ": expected `key = value`";
      throw ConfigError(os.str());
    }
    const std::string key =
        (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    RawValue v;
    v.line = ln;
    v.text = trim(line.substr(eq + 1));
    if (!v.text.empty() && v.text.front() == '[') {
      if (v.text.back() != ']') {
        std::ostringstream os;
        os << "line " << ln << ": unterminated array value for `" << key << "`";
        throw ConfigError(os.str());
      }
      v.is_array = true;
      std::string body = v.text.substr(1, v.text.size() - 2);
      std::string item;
      std::istringstream bs(body);
      while (std::getline(bs, item, ',')) {
        item = trim(item);
        if (!item.empty()) v.items.push_back(item);
      }
    }
    if (kv.count(key)) {
      std::ostringstream os;
      os << "line " << ln << ": duplicate key `" << key << "`";
      throw ConfigError(os.str());
    }
    kv[key] = v;
  }
  return kv;
}

}  // namespace

std::vector<Eigen::VectorXd> RunConfig::probe_thetas() const {
  std::vector<int> dims(model.m, montecarlo.probes);
  for (auto& gd : dims)
    if (gd % 2) ++gd;
  TorusGrid g(model.m, dims);
  std::vector<Eigen::VectorXd> out(g.size());
  for (long i = 0; i < g.size(); ++i) out[i] = g.node(i);
  return out;
}

RunConfig parse_config(const std::string& path, std::vector<std::string>* warnings) {
  auto kv = read_keyfile(path);
  RunConfig cfg;
  std::vector<std::string> errors;

  bool have_numerics_h = false, have_noise_h = false;
  double noise_h = 0.0;

  auto take = [&](const std::string& key, const std::function<void(const RawValue&)>& fn) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    try {
      fn(it->second);
    } catch (const ConfigError& e) {
      errors.push_back(e.what());
    }
    kv.erase(it);
  };

  // model
  take("model.d", [&](const RawValue& v) { cfg.model.d = static_cast<int>(to_long(v, "model.d")); });
  take("model.m", [&](const RawValue& v) { cfg.model.m = static_cast<int>(to_long(v, "model.m")); });
  take("model.gamma", [&](const RawValue& v) { cfg.model.gamma = to_double(v, "model.gamma"); });
  take("model.delta", [&](const RawValue& v) { cfg.model.delta = to_double(v, "model.delta"); });
  take("model.amp", [&](const RawValue& v) {
    const auto a = to_vec(v, "model.amp");
    cfg.model.amp = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  });
  take("model.alpha", [&](const RawValue& v) {
    const auto a = to_vec(v, "model.alpha");
    cfg.model.alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  });
  take("model.beta", [&](const RawValue& v) {
    const auto a = to_vec(v, "model.beta");
    cfg.model.beta = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  });
  take("model.n_cut", [&](const RawValue& v) { cfg.model.n_cut = to_double(v, "model.n_cut"); });
  take("model.channel_map",
       [&](const RawValue& v) { cfg.model.channel_map = to_ivec(v, "model.channel_map"); });

  // numerics
  take("numerics.modes", [&](const RawValue& v) { cfg.numerics.modes = to_ivec(v, "numerics.modes"); });
  take("numerics.grid", [&](const RawValue& v) { cfg.numerics.grid = to_ivec(v, "numerics.grid"); });
  take("numerics.h", [&](const RawValue& v) {
    cfg.numerics.step = to_double(v, "numerics.h");
    have_numerics_h = true;
  });
  take("numerics.tol_inv", [&](const RawValue& v) { cfg.numerics.tol_inv = to_double(v, "numerics.tol_inv"); });
  take("numerics.tol_red", [&](const RawValue& v) { cfg.numerics.tol_red = to_double(v, "numerics.tol_red"); });
  take("numerics.tol_coh", [&](const RawValue& v) { cfg.numerics.tol_coh = to_double(v, "numerics.tol_coh"); });
  take("numerics.n_max", [&](const RawValue& v) { cfg.numerics.n_max = static_cast<int>(to_long(v, "numerics.n_max")); });
  take("numerics.max_newton", [&](const RawValue& v) { cfg.numerics.max_newton = static_cast<int>(to_long(v, "numerics.max_newton")); });
  take("numerics.cond_max", [&](const RawValue& v) { cfg.numerics.cond_max = to_double(v, "numerics.cond_max"); });
  take("numerics.r", [&](const RawValue& v) { cfg.numerics.r_monitor = static_cast<int>(to_long(v, "numerics.r")); });

  // noise
  take("noise.seed", [&](const RawValue& v) { cfg.noise.seed = static_cast<std::uint64_t>(to_long(v, "noise.seed")); });
  take("noise.h", [&](const RawValue& v) {
    noise_h = to_double(v, "noise.h");
    have_noise_h = true;
  });
  take("noise.epsilon", [&](const RawValue& v) { cfg.noise.epsilon = to_double(v, "noise.epsilon"); });
  take("noise.n_samples", [&](const RawValue& v) { cfg.noise.n_samples = to_long(v, "noise.n_samples"); });
  take("noise.horizon", [&](const RawValue& v) { cfg.noise.horizon = to_double(v, "noise.horizon"); });

  // command sections
  take("expand.order", [&](const RawValue& v) { cfg.expand.order = static_cast<int>(to_long(v, "expand.order")); });
  take("expand.samples", [&](const RawValue& v) { cfg.expand.samples = to_long(v, "expand.samples"); });
  take("expand.write_samples", [&](const RawValue& v) { cfg.expand.write_samples = static_cast<int>(to_long(v, "expand.write_samples")); });
  take("montecarlo.order", [&](const RawValue& v) { cfg.montecarlo.order = static_cast<int>(to_long(v, "montecarlo.order")); });
  take("montecarlo.samples", [&](const RawValue& v) { cfg.montecarlo.samples = to_long(v, "montecarlo.samples"); });
  take("montecarlo.probes", [&](const RawValue& v) { cfg.montecarlo.probes = static_cast<int>(to_long(v, "montecarlo.probes")); });
  take("lyapunov.n_steps", [&](const RawValue& v) { cfg.lyapunov.n_steps = static_cast<int>(to_long(v, "lyapunov.n_steps")); });
  take("lyapunov.samples", [&](const RawValue& v) { cfg.lyapunov.samples = to_long(v, "lyapunov.samples"); });
  take("lyapunov.order", [&](const RawValue& v) { cfg.lyapunov.order = static_cast<int>(to_long(v, "lyapunov.order")); });
  take("exitprob.radius", [&](const RawValue& v) { cfg.exitprob.radius = to_double(v, "exitprob.radius"); });
  take("exitprob.horizon", [&](const RawValue& v) { cfg.exitprob.horizon = to_double(v, "exitprob.horizon"); });
  take("exitprob.samples", [&](const RawValue& v) { cfg.exitprob.samples = to_long(v, "exitprob.samples"); });
  take("exitprob.levels", [&](const RawValue& v) { cfg.exitprob.levels = to_vec(v, "exitprob.levels"); });
  take("ergodic.observable", [&](const RawValue& v) { cfg.ergodic.observable = to_string_val(v); });
  take("ergodic.n_orbit", [&](const RawValue& v) { cfg.ergodic.n_orbit = to_long(v, "ergodic.n_orbit"); });
  take("ergodic.samples", [&](const RawValue& v) { cfg.ergodic.samples = to_long(v, "ergodic.samples"); });

  // output
  take("output.dir", [&](const RawValue& v) { cfg.out_dir = to_string_val(v); });
  take("output.plot_data", [&](const RawValue& v) { cfg.plot_data = to_bool(v, "output.plot_data"); });
  take("output.threads", [&](const RawValue& v) { cfg.threads = static_cast<int>(to_long(v, "output.threads")); });

  for (const auto& [key, v] : kv) {
    std::ostringstream os;
    os << "line " << v.line << ": unknown key `" << key << "`";
    errors.push_back(os.str());
  }

  // fill model defaults tied to m
  if (cfg.model.amp.size() == 0) cfg.model.amp = Eigen::VectorXd::Zero(cfg.model.m);
  if (cfg.model.alpha.size() == 0)
    cfg.model.alpha =
        Eigen::VectorXd::Constant(cfg.model.m, 6.283185307179586 * 0.618033988749895);
  if (cfg.model.beta.size() == 0) cfg.model.beta = Eigen::VectorXd::Zero(cfg.model.m);

  if (have_numerics_h && have_noise_h && std::abs(noise_h - cfg.numerics.step) > 1e-15)
    errors.push_back("numerics.h and noise.h disagree; set only one");
  if (!have_numerics_h && have_noise_h) cfg.numerics.step = noise_h;

  // constraint validation, listed exhaustively
  try {
    cfg.model.validate(warnings);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  if (!(cfg.numerics.step > 0)) errors.push_back("numerics.h must be > 0");
  if (!(cfg.numerics.tol_inv > 0)) errors.push_back("numerics.tol_inv must be > 0");
  if (!(cfg.numerics.tol_red > 0)) errors.push_back("numerics.tol_red must be > 0");
  if (!(cfg.numerics.tol_coh > 0)) errors.push_back("numerics.tol_coh must be > 0");
  if (cfg.numerics.n_max < 1) errors.push_back("numerics.n_max must be >= 1");
  if (cfg.numerics.max_newton < 1) errors.push_back("numerics.max_newton must be >= 1");
  if (!(cfg.noise.epsilon >= 0)) errors.push_back("noise.epsilon must be >= 0");
  if (cfg.noise.n_samples < 1) errors.push_back("noise.n_samples must be >= 1");
  {
    const double cells = 1.0 / cfg.numerics.step;
    if (std::abs(cells - std::llround(cells)) > 1e-9)
      errors.push_back("numerics.h must divide the unit map time (1/h integer)");
  }
  try {
    const auto modes = cfg.numerics.modes_for(cfg.model.m);
    const auto grid = cfg.numerics.make_grid(cfg.model.m);
    for (int j = 0; j < cfg.model.m; ++j) {
      if (grid.dims[j] < 2 * modes[j] + 2) {
        std::ostringstream os;
        os << "numerics.grid axis " << j << " = " << grid.dims[j]
           << " violates the anti-aliasing rule (needs >= " << 2 * modes[j] + 2
           << " for modes = " << modes[j] << ")";
        errors.push_back(os.str());
      }
    }
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }

  if (!errors.empty()) {
    std::ostringstream os;
    os << "config validation failed:";
    for (const auto& e : errors) os << "\n  - " << e;
    throw ConfigError(os.str());
  }
  return cfg;
}

}  // namespace ritor
