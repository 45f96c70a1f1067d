#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pss/families.hpp"
#include "pss/grid.hpp"

namespace pss {

// Spectral differentiation / inversion on a periodic grid. One instance owns
// its FFT plans and scratch; not safe to share across threads.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid1D& grid);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  std::vector<double> derivative(const std::vector<double>& u, int order) const;

  // Solves (1 - d^2/dx^2) w = g.
  std::vector<double> helmholtz_invert(const std::vector<double>& g) const;

  // Energy fraction carried by the top third of the spectrum.
  double tail_energy_fraction(const std::vector<double>& u) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> helmholtz_invert(const Grid1D& grid,
                                     const std::vector<double>& g);

enum class JetMode { kSpectral, kFiniteDifference };

struct SolverOptions {
  double cfl = 0.5;
  double blowup_threshold = 1e6;
  double tail_threshold = 1e-3;
  JetMode jets = JetMode::kSpectral;
};

struct SolverDiagnostics {
  double max_abs_u = 0.0;
  double max_tail_fraction = 0.0;
  bool underresolved = false;
};

// Method-of-lines integrator for u_t - u_xxt = F(u, u_x, u_xx, u_xxx) on a
// periodic grid: u_t = (1 - d_xx)^{-1} F(jets of u), classical RK4 in time.
class PdeSolver {
 public:
  PdeSolver(FamilySpec spec, Grid1D grid, SolverOptions opts = {});

  const Grid1D& grid() const { return grid_; }

  std::vector<double> rhs(const std::vector<double>& u) const;
  std::vector<double> step_rk4(const std::vector<double>& u, double dt) const;

  SolutionField solve(const std::vector<double>& u0, double dt, double t_max,
                      int snap_every = 1);

  const SolverDiagnostics& diagnostics() const { return diag_; }

 private:
  void check_cfl(const std::vector<double>& u, double dt) const;

  FamilySpec spec_;
  Grid1D grid_;
  SolverOptions opts_;
  FrameBundle frame_;
  std::unique_ptr<SpectralOps> spectral_;
  SolverDiagnostics diag_;
};

// u(x,t) = A e^{st} cos(kx + nu t); the closed-form solution used as ground
// truth for the first-order linear member with h = identity, psi = z0.
struct ExactLinearSolution {
  double m = 1.0;
  int k = 1;
  double A = 1.0;

  double s() const { return m / (1.0 + k * k); }
  double nu() const { return static_cast<double>(k) / (1.0 + k * k); }

  double u(double x, double t) const;
  Jet jet(double x, double t) const;  // analytic z0..z3, zt0, zt1
};

ExactLinearSolution exact_linear_solution(double m, int k, double A = 1.0);

// Initial-condition specs: "cos" | "gauss:mu,sigma" | "csv:path".
std::vector<double> initial_condition(const std::string& spec, const Grid1D& grid);

// Solution CSV: header "t,x0,x1,..."; one row per snapshot.
std::string solution_to_csv(const SolutionField& field,
                            const std::vector<std::string>& header_comments = {});
SolutionField solution_from_csv(const std::string& text, double length);

}  // namespace pss
