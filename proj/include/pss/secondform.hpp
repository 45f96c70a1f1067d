#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pss/families.hpp"
#include "pss/grid.hpp"
#include "pss/ode45.hpp"

namespace pss {

struct SecondFundamentalForm {
  double a = 0.0, b = 0.0, c = 0.0;
};

struct Deltas {
  double d12 = 0.0, d13 = 0.0, d23 = 0.0;
};

// Delta_ij = f_i1 f_j2 - f_j1 f_i2.
Deltas deltas(const FrameCoeffs& f);

// Returns a*c - b^2 + 1 (zero for a pseudospherical second fundamental form).
double gauss_check(const SecondFundamentalForm& s);

// ---------------------------------------------------------------------------
// Universal second-fundamental-form parameter sets.

struct Prop1i {
  double eta = 1.0, sigma = 3.0, beta = 1.0;
  Sign sign = Sign::kPlus;
};

struct Prop1ii {
  double mu = 1.0, eta = 1.0, beta = 0.0;
  Sign sign = Sign::kPlus;
  double b0 = 2.0, x0 = 0.0;
};

struct Prop3i {
  double m2 = 1.0, sigma = 3.0, beta = 1.0;
  Sign sign = Sign::kPlus;
};

struct Prop3ii {
  double m1 = 1.0, m2 = 1.0, sigma = 3.0, beta = 1.0;
  Sign sign = Sign::kPlus;
};

struct Prop3iii {
  double mu = 1.0, m1 = 1.0, m2 = 1.0, beta = 0.0;
  Sign sign = Sign::kPlus;
  double b0 = 2.0, s0 = 0.0;
};

using UniversalSffParams = std::variant<Prop1i, Prop1ii, Prop3i, Prop3ii, Prop3iii>;

inline constexpr double kStripMargin = 1e-6;

// Open strip where L > 0; evaluation outside (with margin) raises OutsideStrip.
struct Strip {
  double lo = 0.0, hi = 0.0;
  bool contains(double v, double margin = kStripMargin) const {
    return v > lo + margin && v < hi - margin;
  }
};

Strip strip_bounds(double sigma, double beta);  // in the strip coordinate

// Closed-form universal coefficients.
SecondFundamentalForm sff_prop1_i(const Prop1i& p, double x);
SecondFundamentalForm sff_prop3_i(const Prop3i& p, double t);
SecondFundamentalForm sff_prop3_ii(const Prop3ii& p, double x, double t);

// ODE-backed universal coefficients (sampled curves with dense output).
struct SffSample {
  double s = 0.0;  // x for Prop1ii, m1 x + m2 t for Prop3iii
  SecondFundamentalForm sff;
  double delta = 0.0;        // discriminant along the curve
  double ode_residual = 0.0; // scaled plug-back residual of the defining ODE
};

struct SffCurve {
  std::vector<SffSample> samples;
  double s_lo = 0.0, s_hi = 0.0;   // covered range (may stop early on events)
  bool stopped_by_event = false;
  std::string event_name;
  Ode45Solution ode;              // the underlying b(s) solution (merged range)

  double max_ode_residual() const;
  double max_gauss_residual() const;
};

SffCurve sff_prop1_ii(const Prop1ii& p, double x_lo, double x_hi, int n_samples,
                      const Ode45Options& opts = {});
SffCurve sff_prop3_iii(const Prop3iii& p, double s_lo, double s_hi, int n_samples,
                       const Ode45Options& opts = {});

// ---------------------------------------------------------------------------
// Existence classification.

enum class Verdict { kUniversalExists, kNonexistent };

struct ExistenceReport {
  std::string branch;
  Verdict verdict = Verdict::kNonexistent;
  double obstruction = 0.0;       // strictly positive when NONEXISTENT
  std::string proposition_case;   // e.g. "1(i)" when EXISTS
  std::string note;

  std::string to_string() const;
};

ExistenceReport classify_existence(const FamilySpec& spec);

// ---------------------------------------------------------------------------
// Codazzi residuals along gridded data.

struct CodazziResidual {
  Field2D<double> ra, rb;  // the two compatibility equations, interior points
  double max_abs = 0.0;
};

CodazziResidual codazzi_residual(const Field2D<FrameCoeffs>& frames,
                                 const Field2D<SecondFundamentalForm>& sff,
                                 const Mask2D* mask = nullptr);

}  // namespace pss
