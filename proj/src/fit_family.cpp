#include <algorithm>
#include <cmath>
#include <set>

#include "pss/common.hpp"
#include "pss/families.hpp"

namespace pss {

namespace {

constexpr double kMatchTol = 1e-10;

struct Mono {
  int a = -1, b = -1;  // z_a * z_b; -1 meaning absent
  double CubicTarget::* field;
};

const Mono kMonos[] = {
    {0, 3, &CubicTarget::z0z3}, {1, 2, &CubicTarget::z1z2},
    {0, 1, &CubicTarget::z0z1}, {1, -1, &CubicTarget::z1},
    {2, -1, &CubicTarget::z2},  {-1, -1, &CubicTarget::one},
    {0, -1, &CubicTarget::z0},  {0, 0, &CubicTarget::z0z0},
    {0, 2, &CubicTarget::z0z2}, {1, 1, &CubicTarget::z1z1},
};

Jet zero_jet() { return make_jet({0, 0, 0, 0}); }

}  // namespace

CubicTarget target_from_expr(const JetExpr& F) {
  CubicTarget c;
  const Jet z = zero_jet();
  for (const Mono& m : kMonos) {
    double v;
    if (m.a < 0) {
      v = F.eval(z);
    } else if (m.b < 0) {
      v = F.diff_z(m.a).eval(z);
    } else if (m.a == m.b) {
      v = 0.5 * F.diff_z(m.a).diff_z(m.b).eval(z);
    } else {
      v = F.diff_z(m.a).diff_z(m.b).eval(z);
    }
    c.*(m.field) = v;
  }
  const JetExpr back = target_to_expr(c);
  HaltonSampler sampler(4, 99);
  for (int k = 0; k < 64; ++k) {
    auto u = sampler.next();
    Jet j = make_jet({0, 0, 0, 0});
    for (int d = 0; d < 4; ++d)
      j.z[static_cast<std::size_t>(d)] = -2.0 + 4.0 * u[static_cast<std::size_t>(d)];
    const double lhs = F.eval(j), rhs = back.eval(j);
    if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(lhs)))
      throw FunctionEvalError("right-hand side is not in the cubic-form monomial span");
  }
  return c;
}

JetExpr target_to_expr(const CubicTarget& c) {
  auto z = [](int i) { return JetExpr::z(i); };
  return JetExpr(c.z0z3) * z(0) * z(3) + JetExpr(c.z1z2) * z(1) * z(2) +
         JetExpr(c.z0z1) * z(0) * z(1) + JetExpr(c.z1) * z(1) +
         JetExpr(c.z2) * z(2) + JetExpr(c.one) + JetExpr(c.z0) * z(0) +
         JetExpr(c.z0z0) * z(0) * z(0) + JetExpr(c.z0z2) * z(0) * z(2) +
         JetExpr(c.z1z1) * z(1) * z(1);
}

namespace {

bool near(double a, double b, double scale = 1.0) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(scale));
}

bool reproduces(const FamilySpec& spec, const CubicTarget& target,
                std::uint64_t seed) {
  const FrameBundle fb = build_frame(spec);
  const JetExpr want = target_to_expr(target);
  HaltonSampler sampler(4, seed);
  for (int k = 0; k < 64; ++k) {
    auto u = sampler.next();
    Jet j = make_jet({0, 0, 0, 0});
    for (int d = 0; d < 4; ++d)
      j.z[static_cast<std::size_t>(d)] = -2.0 + 4.0 * u[static_cast<std::size_t>(d)];
    const double got = fb.F.eval(j);
    const double ref = want.eval(j);
    if (std::abs(got - ref) > kMatchTol * (1.0 + std::abs(ref))) return false;
  }
  return true;
}

bool validates(const FamilySpec& spec) {
  try {
    validate(spec);
    return true;
  } catch (const ConstraintViolated&) {
    return false;
  }
}

std::optional<FamilySpec> try_t5ii(const CubicTarget& c, std::uint64_t seed) {
  const double lambda = c.z0z3;
  if (lambda == 0.0) return std::nullopt;
  if (!near(c.z1z2, 2.0 * lambda, lambda) || !near(c.z0z1, -3.0 * lambda, lambda))
    return std::nullopt;
  for (double v : {c.z2, c.one, c.z0, c.z0z0, c.z0z2, c.z1z1})
    if (!near(v, 0.0)) return std::nullopt;
  BranchT5ii b;
  b.lambda = lambda;
  b.m1 = 0.0;
  b.m2 = -c.z1 / lambda;
  b.theta = 1.0;
  b.mu = 0.0;
  b.eta = 0.0;
  b.p = 1.0;
  FamilySpec spec = b;
  if (validates(spec) && reproduces(spec, c, seed)) return spec;
  return std::nullopt;
}

std::optional<FamilySpec> try_t3(const CubicTarget& c, std::uint64_t seed) {
  // F = lambda z0z3 - lambda [2 z0z1 - z1z2 + (beta + m1) z1 + m2 z2], h = s + beta.
  const double lambda = c.z0z3;
  if (lambda == 0.0) return std::nullopt;
  if (!near(c.z1z2, lambda, lambda) || !near(c.z0z1, -2.0 * lambda, lambda))
    return std::nullopt;
  for (double v : {c.one, c.z0, c.z0z0, c.z0z2, c.z1z1})
    if (!near(v, 0.0)) return std::nullopt;
  const double m2 = -c.z2 / lambda;
  if (m2 == 0.0) return std::nullopt;
  const double beta_plus_m1 = -c.z1 / lambda;

  BranchT3 b;
  b.lambda = lambda;
  b.m2 = m2;
  if (near(m2 * m2, 1.0)) {
    b.m1 = 0.0;
    b.mu = 0.0;
    b.eta = 1.0;
    b.h = FuncSpec{"affine", {1.0, beta_plus_m1}};
  } else if (m2 * m2 > 1.0) {
    b.m1 = 1.0;
    b.mu = 0.0;
    b.eta = 1.0 / std::sqrt(m2 * m2 - 1.0);
    b.h = FuncSpec{"affine", {1.0, beta_plus_m1 - 1.0}};
  } else {
    b.m1 = 1.0;
    b.eta = 2.0 / std::abs(m2);
    b.mu = b.eta + std::sqrt(m2 * m2 * b.eta * b.eta - 1.0);
    b.h = FuncSpec{"affine", {1.0, beta_plus_m1 - 1.0}};
  }
  FamilySpec spec = b;
  if (validates(spec) && reproduces(spec, c, seed)) return spec;
  return std::nullopt;
}

// Real roots of a x^3 + b x^2 + c x + d, Newton-polished.
std::vector<double> real_cubic_roots(double a, double b, double c, double d) {
  std::vector<double> roots;
  auto poly = [&](double x) { return ((a * x + b) * x + c) * x + d; };
  auto dpoly = [&](double x) { return (3.0 * a * x + 2.0 * b) * x + c; };
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (scale == 0.0) return roots;  // identically zero: no constraint
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) <= 1e-14 * scale) {
      if (std::abs(c) > 1e-14 * scale) roots.push_back(-d / c);
      return roots;
    }
    const double disc = c * c - 4.0 * b * d;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      roots.push_back((-c + r) / (2.0 * b));
      roots.push_back((-c - r) / (2.0 * b));
    }
    return roots;
  }
  const double bn = b / a, cn = c / a, dn = d / a;
  const double p = cn - bn * bn / 3.0;
  const double q = 2.0 * bn * bn * bn / 27.0 - bn * cn / 3.0 + dn;
  const double shift = -bn / 3.0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double acosarg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(acosarg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift);
  } else {
    const double inner = q * q / 4.0 + p * p * p / 27.0;
    const double s = std::sqrt(std::max(0.0, inner));
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
  }
  for (double& r : roots)
    for (int it = 0; it < 4; ++it) {
      const double dp = dpoly(r);
      if (std::abs(dp) < 1e-300) break;
      r -= poly(r) / dp;
    }
  return roots;
}

std::optional<FamilySpec> try_t4(const CubicTarget& c, std::uint64_t seed) {
  const double lambda = c.z0z3;

  std::set<double> cand;
  cand.insert(0.0);
  if (std::abs(c.z1z2 - 3.0 * lambda) > 1e-12)
    cand.insert(2.0 * (c.z1z1 - c.z0z2) / (c.z1z2 - 3.0 * lambda));
  for (double r : real_cubic_roots(lambda, -c.z0z2, c.z0z1, -2.0 * c.z0z0))
    cand.insert(r);

  for (double m1 : cand) {
    const double p02 = (c.z1z2 - lambda) / 2.0;
    const double p11 = c.z0z2 - lambda * m1;
    if (!near(p11 + m1 * p02, c.z1z1, c.z1z1)) continue;
    const double p20 = (c.z0z1 + 2.0 * lambda - m1 * p11) / 2.0;
    if (!near(m1 * p20 - lambda * m1, c.z0z0, c.z0z0)) continue;

    std::vector<double> m2cand;
    if (std::abs(m1 * m1 - 1.0) > 1e-12) {
      m2cand.push_back((c.z0 - m1 * c.z1 + m1 * m1 * c.z2) / (m1 * m1 - 1.0));
    } else {
      if (!near(c.z0 - m1 * c.z1 + m1 * m1 * c.z2, 0.0)) continue;
      m2cand.push_back(c.z2);
      m2cand.push_back(1.0);
    }
    for (double m2 : m2cand) {
      if ((lambda * m1) * (lambda * m1) + m2 * m2 == 0.0) continue;
      double beta, p00;
      if (m1 != 0.0) {
        beta = 0.0;
        p00 = c.one / m1;
      } else if (m2 != 0.0) {
        beta = -c.one / m2;
        p00 = 0.0;
      } else {
        continue;
      }
      const double p01 = c.z2 - m2;
      const double p10 = c.z1 - m1 * p01 + lambda * beta;

      // Full coefficient verification before the sampled identity test.
      const bool coeffs_ok =
          near(m1 * p10 - lambda * beta * m1 - m2, c.z0, c.z0) &&
          near(m1 * p00 - m2 * beta, c.one, c.one) &&
          near(2.0 * p20 + m1 * p11 - 2.0 * lambda, c.z0z1, c.z0z1);
      if (!coeffs_ok) continue;

      BranchT4 b;
      b.lambda = lambda;
      b.mu = 0.0;
      b.m1 = m1;
      b.m2 = m2;
      b.sign = Sign::kPlus;
      b.h = FuncSpec{"affine", {1.0, beta}};
      b.psi = FuncSpec{"poly2", {p00, p10, p01, p20, p11, p02}};
      FamilySpec spec = b;
      if (validates(spec) && reproduces(spec, c, seed)) return spec;
    }
  }
  return std::nullopt;
}

std::optional<FamilySpec> try_t2(const CubicTarget& c, std::uint64_t seed) {
  if (!near(c.z0z3, 0.0)) return std::nullopt;

  std::set<double> cand;
  if (std::abs(c.z1z2) > 1e-12) cand.insert(2.0 * (c.z1z1 - c.z0z2) / c.z1z2);
  for (double r : real_cubic_roots(0.0, c.z0z2, -c.z0z1, 2.0 * c.z0z0)) cand.insert(r);
  for (double r : real_cubic_roots(0.0, c.z2, -c.z1, c.z0)) cand.insert(r);
  cand.insert(1.0);
  cand.insert(-1.0);

  for (double m : cand) {
    if (m == 0.0 || !std::isfinite(m)) continue;
    const double p02 = c.z1z2 / 2.0;
    const double p11 = c.z0z2;
    const double p20 = c.z0z0 / m;
    const double p01 = c.z2;
    const double p10 = c.z1 - m * c.z2;
    const double p00 = c.one / m;
    const bool coeffs_ok = near(p11 + m * p02, c.z1z1, c.z1z1) &&
                           near(2.0 * p20 + m * p11, c.z0z1, c.z0z1) &&
                           near(m * p10, c.z0, c.z0) &&
                           near(m * p20, c.z0z0, c.z0z0);
    if (!coeffs_ok) continue;
    if (p00 == 0 && p10 == 0 && p01 == 0 && p20 == 0 && p11 == 0 && p02 == 0)
      continue;  // psi == 0 is out

    BranchT2 b;
    b.mu = 0.0;
    b.m = m;
    b.sign = Sign::kPlus;
    b.h = FuncSpec{"identity", {}};
    b.psi = FuncSpec{"poly2", {p00, p10, p01, p20, p11, p02}};
    FamilySpec spec = b;
    if (validates(spec) && reproduces(spec, c, seed)) return spec;
  }
  return std::nullopt;
}

}  // namespace

std::optional<FamilySpec> fit_family(const CubicTarget& target, std::uint64_t seed) {
  if (auto s = try_t5ii(target, seed)) return s;
  if (auto s = try_t3(target, seed)) return s;
  if (auto s = try_t4(target, seed)) return s;
  if (auto s = try_t2(target, seed)) return s;
  return std::nullopt;
}

}  // namespace pss
