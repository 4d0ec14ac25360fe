#include "ritor/fourier.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ritor {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;
  return y;
}
}  // namespace

TorusGrid::TorusGrid(int m_, std::vector<int> dims_) : m(m_), dims(std::move(dims_)) {
  if (m < 1) throw std::invalid_argument("TorusGrid: m must be >= 1");
  if (static_cast<int>(dims.size()) != m)
    throw std::invalid_argument("TorusGrid: dims size != m");
  for (int g : dims) {
    if (g < 2 || g % 2 != 0)
      throw std::invalid_argument("TorusGrid: node counts must be even and >= 2");
  }
}

long TorusGrid::size() const {
  long s = 1;
  for (int g : dims) s *= g;
  return s;
}

Eigen::VectorXd TorusGrid::node(long flat) const {
  Eigen::VectorXd th(m);
  for (int j = m - 1; j >= 0; --j) {
    th[j] = static_cast<double>(flat % dims[j]) / dims[j];
    flat /= dims[j];
  }
  return th;
}

FourierTorus::FourierTorus(int m, int d_out, std::vector<int> modes)
    : m_(m), d_out_(d_out), modes_(std::move(modes)) {
  if (m_ < 1 || d_out_ < 1) throw std::invalid_argument("FourierTorus: bad dimensions");
  if (static_cast<int>(modes_.size()) != m_)
    throw std::invalid_argument("FourierTorus: modes size != m");
  for (int j = 0; j < m_; ++j)
    if (modes_[j] < 0) throw std::invalid_argument("FourierTorus: negative mode count");
  stride_.assign(m_, 1);
  long s = 1;
  for (int j = m_ - 1; j >= 0; --j) {
    stride_[j] = s;
    s *= 2L * modes_[j] + 1;
  }
  n_modes_ = s;
  c_.assign(static_cast<size_t>(n_modes_) * d_out_, {0.0, 0.0});
}

long FourierTorus::flat_index(const std::vector<int>& k) const {
  if (static_cast<int>(k.size()) != m_) throw std::invalid_argument("mode index size != m");
  long f = 0;
  for (int j = 0; j < m_; ++j) {
    if (std::abs(k[j]) > modes_[j]) throw std::out_of_range("mode index out of range");
    f += (k[j] + modes_[j]) * stride_[j];
  }
  return f;
}

std::vector<int> FourierTorus::mode_at(long flat) const {
  std::vector<int> k(m_);
  for (int j = 0; j < m_; ++j) {
    k[j] = static_cast<int>(flat / stride_[j]) % (2 * modes_[j] + 1) - modes_[j];
  }
  return k;
}

long FourierTorus::opposite(long flat) const {
  auto k = mode_at(flat);
  for (auto& kj : k) kj = -kj;
  return flat_index(k);
}

FourierTorus FourierTorus::analyze(const TorusGrid& grid,
                                   const std::vector<Eigen::VectorXd>& values,
                                   std::vector<int> modes) {
  if (grid.m != static_cast<int>(modes.size()))
    throw std::invalid_argument("analyze: modes size != grid.m");
  for (int j = 0; j < grid.m; ++j) {
    if (grid.dims[j] < 2 * modes[j] + 2) {
      std::ostringstream os;
      os << "analyze: axis " << j << " has " << grid.dims[j] << " nodes, needs >= "
         << 2 * modes[j] + 2 << " for mode truncation " << modes[j];
      throw std::invalid_argument(os.str());
    }
  }
  const long n = grid.size();
  if (static_cast<long>(values.size()) != n)
    throw std::invalid_argument("analyze: value count != grid size");
  const int d_out = values.empty() ? 0 : static_cast<int>(values[0].size());
  for (long i = 0; i < n; ++i) {
    if (!values[i].allFinite()) {
      std::ostringstream os;
      os << "analyze: non-finite sample at node " << i << " (theta =";
      Eigen::VectorXd th = grid.node(i);
      for (int j = 0; j < grid.m; ++j) os << " " << th[j];
      os << ")";
      throw std::invalid_argument(os.str());
    }
  }

  FourierTorus t(grid.m, d_out, std::move(modes));
  // direct DFT; grids are small and this stays exact for trig polynomials
  std::vector<std::complex<double>> phase(n);
  for (long f = 0; f < t.n_modes_; ++f) {
    auto k = t.mode_at(f);
    std::complex<double> acc;
    for (int comp = 0; comp < d_out; ++comp) {
      acc = {0.0, 0.0};
      for (long i = 0; i < n; ++i) {
        Eigen::VectorXd th = grid.node(i);
        double ang = 0.0;
        for (int j = 0; j < grid.m; ++j) ang += k[j] * th[j];
        acc += values[i][comp] * std::polar(1.0, -kTwoPi * ang);
      }
      t.c_[static_cast<size_t>(f) * d_out + comp] = acc / static_cast<double>(n);
    }
  }
  t.enforce_hermitian();
  return t;
}

void FourierTorus::enforce_hermitian() {
  for (long f = 0; f < n_modes_; ++f) {
    const long g = opposite(f);
    if (g < f) continue;
    for (int comp = 0; comp < d_out_; ++comp) {
      auto& a = c_[static_cast<size_t>(f) * d_out_ + comp];
      auto& b = c_[static_cast<size_t>(g) * d_out_ + comp];
      const std::complex<double> avg = 0.5 * (a + std::conj(b));
      a = avg;
      b = std::conj(avg);
    }
  }
}

Eigen::VectorXd FourierTorus::synthesize(const Eigen::VectorXd& theta) const {
  if (theta.size() != m_) throw std::invalid_argument("synthesize: theta size != m");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d_out_);
  // separable phase tables per axis
  std::vector<std::vector<std::complex<double>>> ph(m_);
  for (int j = 0; j < m_; ++j) {
    const double tj = wrap01(theta[j]);
    ph[j].resize(2 * modes_[j] + 1);
    for (int k = -modes_[j]; k <= modes_[j]; ++k)
      ph[j][k + modes_[j]] = std::polar(1.0, kTwoPi * k * tj);
  }
  std::vector<int> idx(m_, 0);
  for (long f = 0; f < n_modes_; ++f) {
    long rem = f;
    std::complex<double> p(1.0, 0.0);
    for (int j = 0; j < m_; ++j) {
      const int kj = static_cast<int>(rem / stride_[j]) % (2 * modes_[j] + 1);
      p *= ph[j][kj];
      rem %= stride_[j];
    }
    for (int comp = 0; comp < d_out_; ++comp)
      acc[comp] += c_[static_cast<size_t>(f) * d_out_ + comp] * p;
  }
  return acc.real();
}

std::vector<Eigen::VectorXd> FourierTorus::synthesize_grid(const TorusGrid& grid) const {
  std::vector<Eigen::VectorXd> out(grid.size());
  for (long i = 0; i < grid.size(); ++i) out[i] = synthesize(grid.node(i));
  return out;
}

FourierTorus FourierTorus::rotated(const Eigen::VectorXd& alpha) const {
  if (alpha.size() != m_) throw std::invalid_argument("rotated: alpha size != m");
  FourierTorus t = *this;
  for (long f = 0; f < n_modes_; ++f) {
    auto k = mode_at(f);
    double ang = 0.0;
    for (int j = 0; j < m_; ++j) ang += k[j] * alpha[j];
    const std::complex<double> p = std::polar(1.0, kTwoPi * ang);
    for (int comp = 0; comp < d_out_; ++comp)
      t.c_[static_cast<size_t>(f) * d_out_ + comp] *= p;
  }
  return t;
}

FourierTorus FourierTorus::derivative(int axis) const {
  if (axis < 0 || axis >= m_) throw std::invalid_argument("derivative: bad axis");
  FourierTorus t = *this;
  for (long f = 0; f < n_modes_; ++f) {
    auto k = mode_at(f);
    const std::complex<double> factor(0.0, kTwoPi * k[axis]);
    for (int comp = 0; comp < d_out_; ++comp)
      t.c_[static_cast<size_t>(f) * d_out_ + comp] *= factor;
  }
  return t;
}

std::complex<double> FourierTorus::coeff(const std::vector<int>& k, int comp) const {
  return c_[static_cast<size_t>(flat_index(k)) * d_out_ + comp];
}

void FourierTorus::set_coeff(const std::vector<int>& k, int comp, std::complex<double> v) {
  c_[static_cast<size_t>(flat_index(k)) * d_out_ + comp] = v;
}

double FourierTorus::tail_magnitude() const {
  double t = 0.0;
  for (long f = 0; f < n_modes_; ++f) {
    auto k = mode_at(f);
    bool outer = false;
    for (int j = 0; j < m_; ++j)
      if (modes_[j] > 0 && std::abs(k[j]) == modes_[j]) outer = true;
    if (!outer) continue;
    for (int comp = 0; comp < d_out_; ++comp)
      t = std::max(t, std::abs(c_[static_cast<size_t>(f) * d_out_ + comp]));
  }
  return t;
}

double FourierTorus::max_coeff() const {
  double t = 0.0;
  for (const auto& v : c_) t = std::max(t, std::abs(v));
  return t;
}

double FourierTorus::sup_norm(int refine) const {
  std::vector<int> dims(m_);
  for (int j = 0; j < m_; ++j) dims[j] = refine * (2 * modes_[j] + 2);
  TorusGrid g(m_, dims);
  double s = 0.0;
  for (long i = 0; i < g.size(); ++i)
    s = std::max(s, synthesize(g.node(i)).cwiseAbs().maxCoeff());
  return s;
}

double FourierTorus::sup_norm_cr(int r, int refine) const {
  double s = sup_norm(refine);
  for (int axis = 0; axis < m_; ++axis) {
    FourierTorus d = *this;
    for (int order = 1; order <= r; ++order) {
      d = d.derivative(axis);
      s = std::max(s, d.sup_norm(refine));
    }
  }
  return s;
}

FourierTorus& FourierTorus::operator+=(const FourierTorus& o) {
  if (o.m_ != m_ || o.d_out_ != d_out_ || o.modes_ != modes_)
    throw std::invalid_argument("FourierTorus +=: shape mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

FourierTorus& FourierTorus::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

void FourierTorus::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  char buf[64];
  os << m_ << " " << d_out_ << "\n";
  for (int j = 0; j < m_; ++j) os << modes_[j] << (j + 1 == m_ ? "\n" : " ");
  for (long f = 0; f < n_modes_; ++f) {
    auto k = mode_at(f);
    for (int comp = 0; comp < d_out_; ++comp) {
      for (int j = 0; j < m_; ++j) os << k[j] << " ";
      os << comp;
      const auto& v = c_[static_cast<size_t>(f) * d_out_ + comp];
      std::snprintf(buf, sizeof buf, " %.17g", v.real());
      os << buf;
      std::snprintf(buf, sizeof buf, " %.17g", v.imag());
      os << buf << "\n";
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

FourierTorus FourierTorus::read(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  int m = 0, d_out = 0;
  is >> m >> d_out;
  if (!is || m < 1 || d_out < 1) throw std::runtime_error("bad torus header in " + path);
  std::vector<int> modes(m);
  for (int j = 0; j < m; ++j) is >> modes[j];
  FourierTorus t(m, d_out, modes);
  std::vector<int> k(m);
  int comp;
  double re, im;
  for (long f = 0; f < t.n_modes_; ++f) {
    for (int c = 0; c < d_out; ++c) {
      for (int j = 0; j < m; ++j) is >> k[j];
      is >> comp >> re >> im;
      if (!is) throw std::runtime_error("truncated torus file: " + path);
      t.set_coeff(k, comp, {re, im});
    }
  }
  return t;
}

Eigen::MatrixXd synth_matrix(const FourierTorus& t, const Eigen::VectorXd& theta,
                             int rows, int cols) {
  if (t.d_out() != rows * cols) throw std::invalid_argument("synth_matrix: shape mismatch");
  Eigen::VectorXd v = t.synthesize(theta);
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = v[i * cols + j];
  return M;
}

FourierTorus analyze_matrix(const TorusGrid& grid,
                            const std::vector<Eigen::MatrixXd>& values,
                            std::vector<int> modes) {
  std::vector<Eigen::VectorXd> flat(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const auto& M = values[i];
    Eigen::VectorXd v(M.rows() * M.cols());
    for (int r = 0; r < M.rows(); ++r)
      for (int c = 0; c < M.cols(); ++c) v[r * M.cols() + c] = M(r, c);
    flat[i] = std::move(v);
  }
  return FourierTorus::analyze(grid, flat, std::move(modes));
}

}  // namespace ritor
