#include "pss/pdesolver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace pss {

struct SpectralOps::Impl {
  int n = 0;
  double length = 0.0;
  double* real_buf = nullptr;
  fftw_complex* cplx_buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real_buf) fftw_free(real_buf);
    if (cplx_buf) fftw_free(cplx_buf);
  }

  using Modifier = std::function<std::complex<double>(std::complex<double>, double)>;

  std::vector<double> apply_symbol(const std::vector<double>& u, const Modifier& mod,
                                   bool zero_nyquist) const {
    if (static_cast<int>(u.size()) != n) throw Error("field size mismatch");
    std::copy(u.begin(), u.end(), real_buf);
    fftw_execute(fwd);
    const int nk = n / 2 + 1;
    const double k0 = 2.0 * M_PI / length;
    for (int j = 0; j < nk; ++j) {
      std::complex<double> c(cplx_buf[j][0], cplx_buf[j][1]);
      c = mod(c, k0 * j);
      if (zero_nyquist && n % 2 == 0 && j == n / 2) c = 0.0;
      cplx_buf[j][0] = c.real();
      cplx_buf[j][1] = c.imag();
    }
    fftw_execute(bwd);
    std::vector<double> out(static_cast<std::size_t>(n));
    const double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = real_buf[i] * inv;
    return out;
  }
};

SpectralOps::SpectralOps(const Grid1D& grid) : impl_(std::make_unique<Impl>()) {
  grid.check();
  impl_->n = grid.n;
  impl_->length = grid.length;
  impl_->real_buf = fftw_alloc_real(static_cast<std::size_t>(grid.n));
  impl_->cplx_buf = fftw_alloc_complex(static_cast<std::size_t>(grid.n / 2 + 1));
  impl_->fwd = fftw_plan_dft_r2c_1d(grid.n, impl_->real_buf, impl_->cplx_buf,
                                    FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_1d(grid.n, impl_->cplx_buf, impl_->real_buf,
                                    FFTW_ESTIMATE);
}

SpectralOps::~SpectralOps() = default;

std::vector<double> SpectralOps::derivative(const std::vector<double>& u,
                                            int order) const {
  if (order < 1 || order > 4) throw Error("spectral derivative order must be 1..4");
  const bool odd = order % 2 == 1;
  return impl_->apply_symbol(
      u,
      [order](std::complex<double> c, double k) {
        const std::complex<double> ik(0.0, k);
        return c * std::pow(ik, order);
      },
      odd);
}

std::vector<double> SpectralOps::helmholtz_invert(const std::vector<double>& g) const {
  return impl_->apply_symbol(
      g, [](std::complex<double> c, double k) { return c / (1.0 + k * k); }, false);
}

double SpectralOps::tail_energy_fraction(const std::vector<double>& u) const {
  const int n = impl_->n;
  if (static_cast<int>(u.size()) != n) throw Error("field size mismatch");
  std::copy(u.begin(), u.end(), impl_->real_buf);
  fftw_execute(impl_->fwd);
  const int nk = n / 2 + 1;
  double total = 0.0, tail = 0.0;
  for (int j = 1; j < nk; ++j) {  // skip the mean
    const double e = impl_->cplx_buf[j][0] * impl_->cplx_buf[j][0] +
                     impl_->cplx_buf[j][1] * impl_->cplx_buf[j][1];
    total += e;
    if (j >= (2 * (nk - 1)) / 3) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

std::vector<double> helmholtz_invert(const Grid1D& grid,
                                     const std::vector<double>& g) {
  SpectralOps ops(grid);
  return ops.helmholtz_invert(g);
}

namespace {

// Periodic centered differences, used in the finite-difference jet mode.
std::vector<double> fd_derivative(const std::vector<double>& u, double h, int order) {
  const int n = static_cast<int>(u.size());
  auto at = [&](int i) {
    i %= n;
    return u[static_cast<std::size_t>(i < 0 ? i + n : i)];
  };
  std::vector<double> out(u.size());
  for (int i = 0; i < n; ++i) {
    switch (order) {
      case 1: out[static_cast<std::size_t>(i)] = (at(i + 1) - at(i - 1)) / (2 * h); break;
      case 2:
        out[static_cast<std::size_t>(i)] = (at(i + 1) - 2 * at(i) + at(i - 1)) / (h * h);
        break;
      case 3:
        out[static_cast<std::size_t>(i)] =
            (at(i + 2) - 2 * at(i + 1) + 2 * at(i - 1) - at(i - 2)) / (2 * h * h * h);
        break;
      default: throw Error("unsupported fd order");
    }
  }
  return out;
}

}  // namespace

PdeSolver::PdeSolver(FamilySpec spec, Grid1D grid, SolverOptions opts)
    : spec_(std::move(spec)), grid_(grid), opts_(opts) {
  grid_.check();
  if (std::holds_alternative<ExplicitFrame>(spec_))
    throw UnsupportedForExplicitFrame("the solver integrates catalog members only");
  frame_ = build_frame(spec_);
  spectral_ = std::make_unique<SpectralOps>(grid_);
}

std::vector<double> PdeSolver::rhs(const std::vector<double>& u) const {
  const int n = grid_.n;
  std::vector<double> z1, z2, z3;
  if (opts_.jets == JetMode::kSpectral) {
    z1 = spectral_->derivative(u, 1);
    z2 = spectral_->derivative(u, 2);
    z3 = spectral_->derivative(u, 3);
  } else {
    const double h = grid_.dx();
    z1 = fd_derivative(u, h, 1);
    z2 = fd_derivative(u, h, 2);
    z3 = fd_derivative(u, h, 3);
  }
  std::vector<double> F(static_cast<std::size_t>(n));
  Jet jet = make_jet({0, 0, 0, 0});
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    jet.x = grid_.xval(i);
    jet.z[0] = u[k];
    jet.z[1] = z1[k];
    jet.z[2] = z2[k];
    jet.z[3] = z3[k];
    F[k] = frame_.F.eval(jet);
  }
  return spectral_->helmholtz_invert(F);
}

void PdeSolver::check_cfl(const std::vector<double>& u, double dt) const {
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  const double bound = opts_.cfl * grid_.dx() / (1.0 + std::abs(frame_.lambda) * umax);
  if (dt > bound) {
    std::ostringstream os;
    os << "dt=" << dt << " exceeds the advective bound " << bound;
    throw CflViolation(os.str());
  }
  if (umax > opts_.blowup_threshold) throw BlowupDetected("max|u| exceeded threshold");
}

std::vector<double> PdeSolver::step_rk4(const std::vector<double>& u, double dt) const {
  check_cfl(u, dt);
  const std::size_t n = u.size();
  const auto k1 = rhs(u);
  std::vector<double> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
  const auto k2 = rhs(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
  const auto k3 = rhs(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
  const auto k4 = rhs(tmp);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

SolutionField PdeSolver::solve(const std::vector<double>& u0, double dt,
                               double t_max, int snap_every) {
  if (static_cast<int>(u0.size()) != grid_.n) throw Error("u0 size mismatch");
  if (!(dt > 0.0)) throw Error("dt must be positive");
  if (snap_every < 1) snap_every = 1;
  diag_ = SolverDiagnostics{};

  SolutionField field;
  field.grid = grid_;
  std::vector<double> u = u0;
  double t = 0.0;
  field.times.push_back(t);
  field.values.push_back(u);

  const long nsteps = std::lround(t_max / dt);
  if (std::abs(nsteps * dt - t_max) > 1e-9 * std::max(1.0, t_max))
    throw Error("t_max must be an integer multiple of dt");

  for (long step = 1; step <= nsteps; ++step) {
    u = step_rk4(u, dt);
    t = step * dt;
    for (double v : u) {
      if (!is_finite(v)) throw BlowupDetected("non-finite value during time stepping");
      diag_.max_abs_u = std::max(diag_.max_abs_u, std::abs(v));
    }
    if (diag_.max_abs_u > opts_.blowup_threshold)
      throw BlowupDetected("max|u| exceeded threshold");
    const double tail = spectral_->tail_energy_fraction(u);
    diag_.max_tail_fraction = std::max(diag_.max_tail_fraction, tail);
    if (tail > opts_.tail_threshold) diag_.underresolved = true;
    if (step % snap_every == 0 || step == nsteps) {
      field.times.push_back(t);
      field.values.push_back(u);
    }
  }
  return field;
}

double ExactLinearSolution::u(double x, double t) const {
  return A * std::exp(s() * t) * std::cos(k * x + nu() * t);
}

Jet ExactLinearSolution::jet(double x, double t) const {
  const double ph = k * x + nu() * t;
  const double E = A * std::exp(s() * t);
  Jet j;
  j.x = x;
  j.t = t;
  const double u0 = E * std::cos(ph);
  const double z1 = -E * k * std::sin(ph);
  j.z = {u0, z1, -k * k * u0, -k * k * z1};
  j.zt0 = s() * u0 + (nu() / k) * z1;
  j.zt1 = s() * z1 - nu() * k * u0;
  return j;
}

ExactLinearSolution exact_linear_solution(double m, int k, double A) {
  if (k < 1) throw Error("wavenumber k must be >= 1");
  if (m == 0.0) throw ConstraintViolated("m != 0");
  return ExactLinearSolution{m, k, A};
}

std::vector<double> initial_condition(const std::string& spec, const Grid1D& grid) {
  std::vector<double> u(static_cast<std::size_t>(grid.n));
  if (spec == "cos") {
    for (int i = 0; i < grid.n; ++i)
      u[static_cast<std::size_t>(i)] = std::cos(2.0 * M_PI * grid.xval(i) / grid.length);
    return u;
  }
  if (spec.rfind("gauss:", 0) == 0) {
    const auto params = spec.substr(6);
    const auto comma = params.find(',');
    if (comma == std::string::npos)
      throw ConfigError("gauss initial condition needs mu,sigma");
    double mu, sigma;
    try {
      mu = std::stod(params.substr(0, comma));
      sigma = std::stod(params.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad gauss parameters: " + params);
    }
    if (!(sigma > 0.0)) throw ConfigError("gauss sigma must be positive");
    for (int i = 0; i < grid.n; ++i) {
      const double d = grid.xval(i) - mu;
      u[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return u;
  }
  if (spec.rfind("csv:", 0) == 0) {
    std::ifstream in(spec.substr(4));
    if (!in.good()) throw IoError("cannot open initial-condition file " + spec.substr(4));
    std::vector<double> vals;
    std::string tok;
    while (std::getline(in, tok)) {
      std::stringstream line(tok);
      std::string cell;
      while (std::getline(line, cell, ','))
        if (!cell.empty()) vals.push_back(std::stod(cell));
    }
    if (static_cast<int>(vals.size()) != grid.n)
      throw ConfigError("initial-condition file has " + std::to_string(vals.size()) +
                        " values, grid has " + std::to_string(grid.n));
    return vals;
  }
  throw ConfigError("unknown initial condition '" + spec + "'");
}

std::string solution_to_csv(const SolutionField& field,
                            const std::vector<std::string>& header_comments) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& c : header_comments) os << "# " << c << "\n";
  os << "t";
  for (int i = 0; i < field.grid.n; ++i) os << ",x" << i;
  os << "\n";
  for (int k = 0; k < field.snapshots(); ++k) {
    os << field.times[static_cast<std::size_t>(k)];
    for (double v : field.values[static_cast<std::size_t>(k)]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

SolutionField solution_from_csv(const std::string& text, double length) {
  SolutionField field;
  std::stringstream ss(text);
  std::string line;
  bool have_header = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      have_header = true;  // "t,x0,..."
      continue;
    }
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw IoError("malformed solution CSV row");
    field.times.push_back(row.front());
    field.values.emplace_back(row.begin() + 1, row.end());
  }
  if (field.values.empty()) throw IoError("solution CSV has no data rows");
  field.grid.n = static_cast<int>(field.values.front().size());
  field.grid.length = length;
  for (const auto& row : field.values)
    if (row.size() != field.values.front().size())
      throw IoError("ragged solution CSV");
  return field;
}

}  // namespace pss
