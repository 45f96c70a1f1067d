#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pss/jet_expr.hpp"

namespace pss {

// One correlated choice for every +- appearing in a branch's formulas.
enum class Sign : int { kPlus = +1, kMinus = -1 };
inline double signv(Sign s) { return static_cast<double>(static_cast<int>(s)); }

// Plugin scalar function drawn from the built-in dictionary.
//   1-argument (h(s), phi(z0)): identity | exp | affine:a,b | poly2:c0,c1,c2
//   2-argument (psi(z0,z1)):    z0 | z1 | identity(=z0) | exp(=e^{z0}) |
//                               affine:a,b (a*z0+b) |
//                               poly2:c00,c10,c01,c20,c11,c02
struct FuncSpec {
  std::string kind;
  std::vector<double> coeffs;

  std::string spec_string() const;
};

FuncSpec parse_func(const std::string& text);
JetExpr build_func1(const FuncSpec& f, const JetExpr& s);
JetExpr build_func2(const FuncSpec& f, const JetExpr& a, const JetExpr& b);

struct BranchT2 {
  double mu = 0.0, m = 1.0;
  Sign sign = Sign::kPlus;
  FuncSpec h{"identity", {}}, psi{"z0", {}};
};

struct BranchT3 {
  double lambda = 1.0, mu = 0.0, eta = 1.0, m1 = 0.0, m2 = 1.0;
  FuncSpec h{"identity", {}};
};

struct BranchT4 {
  double lambda = 1.0, mu = 0.0, m1 = 1.0, m2 = 1.0;
  Sign sign = Sign::kPlus;
  FuncSpec h{"identity", {}}, psi{"z0", {}};
};

struct BranchT5i {
  double lambda = 0.0, mu = 0.0, eta = 1.0, m = 1.0, tau = 1.0, p = 1.0, q = 0.0;
  Sign sign = Sign::kPlus;
  FuncSpec phi{"exp", {}};
};

struct BranchT5ii {
  double lambda = 1.0, theta = 1.0, mu = 0.0, eta = 0.0, m1 = 0.0, m2 = 1.0,
         p = 1.0;
  Sign sign = Sign::kPlus;

  // Derived constant (the paper's b).
  double q() const;
};

struct ExplicitFrame {
  std::array<JetExpr, 6> f;  // f11, f21, f31, f12, f22, f32
  std::string name;          // e.g. "sg-lightcone"
};

using FamilySpec =
    std::variant<BranchT2, BranchT3, BranchT4, BranchT5i, BranchT5ii, ExplicitFrame>;

struct FrameCoeffs {
  double f[3][2] = {{0, 0}, {0, 0}, {0, 0}};
};

// Symbolic frame plus the constants of the linear relation
// f_{p1} = mu_p f_11 + eta_p (catalog branches only).
struct FrameBundle {
  JetExpr f[3][2];
  JetExpr G;   // F = lambda z0 z3 + G
  JetExpr F;
  double lambda = 0.0;
  double mu2 = 0.0, eta2 = 0.0, mu3 = 0.0, eta3 = 0.0;
  bool catalog = false;
};

FrameBundle build_frame(const FamilySpec& spec);

FrameCoeffs frame_coeffs(const FamilySpec& spec, const Jet& jet);
FrameCoeffs eval_frame(const FrameBundle& fb, const Jet& jet);

double pde_rhs(const FamilySpec& spec, const Jet& jet);

struct JetBox {
  double lo = -2.0, hi = 2.0;
};

struct ValidationWarning {
  std::string what;     // e.g. "h' crosses zero on sample domain"
  Jet where;
};

struct ValidationReport {
  std::vector<std::string> checked;
  std::vector<ValidationWarning> warnings;
  bool ok() const { return warnings.empty(); }
};

// Checks every algebraic constraint exactly (throws ConstraintViolated naming
// the constraint) and samples h', psi, phi at 256 quasi-random jets for
// zero-crossings, reported as warnings.
ValidationReport validate(const FamilySpec& spec, const JetBox& box = {},
                          std::uint64_t seed = 1);

// Cubic-form fitting target. The principal monomials are z0z3, z1z2, z0z1,
// z1, z2; the remaining entries close the span of the affine-h / quadratic-psi
// search basis.
struct CubicTarget {
  double z0z3 = 0, z1z2 = 0, z0z1 = 0, z1 = 0, z2 = 0;
  double one = 0, z0 = 0, z0z0 = 0, z0z2 = 0, z1z1 = 0;
};

// Exact coefficient extraction for a polynomial right-hand side; throws
// FunctionEvalError if F is outside the monomial span above.
CubicTarget target_from_expr(const JetExpr& F);

JetExpr target_to_expr(const CubicTarget& c);

// Coefficient-matching search: BranchT5ii (m1 = 0), then BranchT3, BranchT4,
// BranchT2 with h affine and psi of total degree <= 2. Returns the first
// validated spec whose right-hand side reproduces the target at 64
// quasi-random jets to 1e-10, else nullopt.
std::optional<FamilySpec> fit_family(const CubicTarget& target,
                                     std::uint64_t seed = 2025);

// Presets: linear-t2, ch, t3-ref, t4-ref, t5i-ref, sg-lightcone, sg-eta.
FamilySpec make_preset(const std::string& name);
std::vector<std::string> preset_names();

// Flat key=value config files; unknown keys are errors.
FamilySpec parse_family_config(const std::string& text);
FamilySpec load_family(const std::string& path_or_preset);
std::string family_to_config(const FamilySpec& spec);
std::string family_name(const FamilySpec& spec);

}  // namespace pss
