#include "pss/secondform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pss {

Deltas deltas(const FrameCoeffs& f) {
  Deltas d;
  d.d12 = f.f[0][0] * f.f[1][1] - f.f[1][0] * f.f[0][1];
  d.d13 = f.f[0][0] * f.f[2][1] - f.f[2][0] * f.f[0][1];
  d.d23 = f.f[1][0] * f.f[2][1] - f.f[2][0] * f.f[1][1];
  return d;
}

double gauss_check(const SecondFundamentalForm& s) {
  return s.a * s.c - s.b * s.b + 1.0;
}

Strip strip_bounds(double sigma, double beta) {
  if (!(sigma > 0.0)) throw ConstraintViolated("sigma > 0");
  if (!(sigma * sigma > 4.0 * beta * beta))
    throw ConstraintViolated("sigma^2 > 4 beta^2");
  Strip s;
  if (std::abs(beta) < 1e-300) {
    s.lo = -0.5 * std::log(sigma);
    s.hi = std::numeric_limits<double>::infinity();
    return s;
  }
  const double disc = std::sqrt(sigma * sigma - 4.0 * beta * beta);
  s.lo = std::log(std::sqrt((sigma - disc) / (2.0 * beta * beta)));
  s.hi = std::log(std::sqrt((sigma + disc) / (2.0 * beta * beta)));
  return s;
}

namespace {

// Shared closed-form evaluation in the strip coordinate w:
//   L = sigma e^{2w} - beta^2 e^{4w} - 1,  a = sqrt(L),
//   dL/dw = 2 (sigma e^{2w} - 2 beta^2 e^{4w}).
struct ClosedForm {
  double a = 0.0, dadw = 0.0, E = 0.0;  // E = e^{2w}
};

ClosedForm closed_form(double sigma, double beta, double w) {
  const Strip strip = strip_bounds(sigma, beta);
  if (!strip.contains(w))
    throw OutsideStrip("strip coordinate " + std::to_string(w) + " outside (" +
                       std::to_string(strip.lo) + ", " + std::to_string(strip.hi) + ")");
  ClosedForm cf;
  cf.E = std::exp(2.0 * w);
  const double L = sigma * cf.E - beta * beta * cf.E * cf.E - 1.0;
  if (L <= kStripMargin * kStripMargin)
    throw DegenerateL("L(w) too close to zero inside strip");
  cf.a = std::sqrt(L);
  const double dLdw = 2.0 * (sigma * cf.E - 2.0 * beta * beta * cf.E * cf.E);
  cf.dadw = dLdw / (2.0 * cf.a);
  return cf;
}

}  // namespace

SecondFundamentalForm sff_prop1_i(const Prop1i& p, double x) {
  if (p.eta == 0.0) throw ConstraintViolated("eta != 0");
  const double d = signv(p.sign);
  const ClosedForm cf = closed_form(p.sigma, p.beta, d * p.eta * x);
  SecondFundamentalForm s;
  s.a = cf.a;
  s.b = -p.beta * cf.E;
  // a_x = dadw * d eta; c = a - (sign) a_x / eta = a - dadw.
  s.c = cf.a - cf.dadw;
  return s;
}

SecondFundamentalForm sff_prop3_i(const Prop3i& p, double t) {
  if (p.m2 == 0.0) throw ConstraintViolated("m2 != 0");
  const double d = signv(p.sign);
  const ClosedForm cf = closed_form(p.sigma, p.beta, d * p.m2 * t);
  SecondFundamentalForm s;
  s.a = cf.a;
  s.b = p.beta * cf.E;
  s.c = cf.a - cf.dadw;
  return s;
}

SecondFundamentalForm sff_prop3_ii(const Prop3ii& p, double x, double t) {
  const double d = signv(p.sign);
  const ClosedForm cf = closed_form(p.sigma, p.beta, d * (p.m1 * x + p.m2 * t));
  SecondFundamentalForm s;
  s.a = cf.a;
  s.b = -p.beta * cf.E;
  s.c = cf.a - cf.dadw;
  return s;
}

namespace {

// The implicit ODE A(s,b) b' + B(s,b) = 0 behind the two ODE-backed cases, in
// a shared parametrization: ef is eta for the x-only case and 1 for the
// travelling-coordinate case.
struct OdeFamily {
  double mu, beta, ef, d;  // d = sign

  double Ee(double s) const { return std::exp(2.0 * d * ef * s); }

  double discriminant(double s, double b) const {
    const double E = Ee(s);
    const double t = (mu * mu - 1.0) * b - beta * E;
    return (t * t - 4.0 * mu * mu * (1.0 - b * b)) / (mu * mu);
  }

  // Coefficient of b'.
  double acoef(double s, double b) const {
    const double E = Ee(s);
    const double sq = std::sqrt(std::max(0.0, discriminant(s, b)));
    return mu * (1.0 + mu * mu) * sq + d * (mu * mu + 1.0) * (mu * mu + 1.0) * b -
           d * (mu * mu - 1.0) * beta * E;
  }

  // Inhomogeneous part.
  double bcoef(double s, double b) const {
    const double E = Ee(s);
    const double sq = std::sqrt(std::max(0.0, discriminant(s, b)));
    return 2.0 * ef *
           ((-d * mu * (1.0 + mu * mu) * sq - beta * (mu * mu - 1.0) * E) * b +
            beta * beta * E * E);
  }

  double rhs(double s, double b) const {
    const double A = acoef(s, b);
    if (A == 0.0) throw SingularCoefficient("b' coefficient vanished");
    return -bcoef(s, b) / A;
  }

  SecondFundamentalForm reconstruct(double s, double b) const {
    const double E = Ee(s);
    const double sq = std::sqrt(discriminant(s, b));
    SecondFundamentalForm out;
    out.a = (d * mu * sq - (mu * mu - 1.0) * b + beta * E) / (2.0 * mu);
    out.b = b;
    out.c = (d * mu * sq + (mu * mu - 1.0) * b - beta * E) / (2.0 * mu);
    return out;
  }

  double ode_residual(double s, double b, double bprime) const {
    const double A = acoef(s, b) * bprime;
    const double B = bcoef(s, b);
    return std::abs(A + B) / (1.0 + std::abs(A) + std::abs(B));
  }
};

constexpr double kDeltaFloor = 1e-8;

SffCurve integrate_family(const OdeFamily& fam, double s0, double b0,
                          double s_lo, double s_hi, int n_samples,
                          const Ode45Options& opts) {
  if (fam.mu == 0.0) throw ConstraintViolated("mu != 0");
  if (fam.discriminant(s0, b0) <= 0.0)
    throw BadInitialCondition("discriminant not positive at the anchor");
  if (std::abs(fam.acoef(s0, b0)) < 1e-12 * (1.0 + std::abs(b0)))
    throw SingularCoefficient("b' coefficient vanishes at the anchor");
  if (!(s_lo <= s0 && s0 <= s_hi)) throw Error("anchor must lie inside the range");

  auto f = [&fam](double s, double b) { return fam.rhs(s, b); };
  std::vector<OdeEvent> events;
  events.push_back({"discriminant collapse",
                    [&fam](double s, double b) {
                      return fam.discriminant(s, b) - kDeltaFloor;
                    }});
  events.push_back({"singular b' coefficient",
                    [&fam](double s, double b) {
                      return std::abs(fam.acoef(s, b)) -
                             1e-9 * (1.0 + std::abs(b));
                    }});

  SffCurve curve;
  Ode45Solution fwd = ode45_integrate(f, s0, b0, s_hi, events, opts);
  Ode45Solution bwd = ode45_integrate(f, s0, b0, s_lo, events, opts);
  curve.s_lo = bwd.x_end;
  curve.s_hi = fwd.x_end;
  curve.stopped_by_event = fwd.stopped_by_event || bwd.stopped_by_event;
  curve.event_name = fwd.stopped_by_event ? fwd.event_name : bwd.event_name;

  // Merge segments into one solution object for dense evaluation.
  curve.ode = bwd;
  for (const auto& seg : fwd.segments) curve.ode.segments.push_back(seg);
  curve.ode.x_start = curve.s_lo;
  curve.ode.x_end = curve.s_hi;

  const int n = std::max(2, n_samples);
  curve.samples.reserve(static_cast<std::size_t>(n));
  // Shrink slightly inward so dense output interpolates, never extrapolates.
  const double span = curve.s_hi - curve.s_lo;
  const double pad = span * 1e-9;
  for (int k = 0; k < n; ++k) {
    const double s = curve.s_lo + pad + (span - 2 * pad) * k / (n - 1);
    SffSample sm;
    sm.s = s;
    const double b = curve.ode.eval(s);
    const double bp = curve.ode.deriv(s);
    sm.delta = fam.discriminant(s, b);
    if (sm.delta <= 0.0) throw DeltaCollapse("discriminant lost positivity");
    sm.sff = fam.reconstruct(s, b);
    sm.ode_residual = fam.ode_residual(s, b, bp);
    curve.samples.push_back(sm);
  }
  return curve;
}

}  // namespace

SffCurve sff_prop1_ii(const Prop1ii& p, double x_lo, double x_hi, int n_samples,
                      const Ode45Options& opts) {
  if (p.eta == 0.0) throw ConstraintViolated("eta != 0");
  OdeFamily fam{p.mu, p.beta, p.eta, signv(p.sign)};
  return integrate_family(fam, p.x0, p.b0, x_lo, x_hi, n_samples, opts);
}

SffCurve sff_prop3_iii(const Prop3iii& p, double s_lo, double s_hi, int n_samples,
                       const Ode45Options& opts) {
  OdeFamily fam{p.mu, p.beta, 1.0, signv(p.sign)};
  return integrate_family(fam, p.s0, p.b0, s_lo, s_hi, n_samples, opts);
}

double SffCurve::max_ode_residual() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.ode_residual);
  return m;
}

double SffCurve::max_gauss_residual() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(gauss_check(s.sff)));
  return m;
}

std::string ExistenceReport::to_string() const {
  std::ostringstream os;
  os.precision(12);
  if (verdict == Verdict::kUniversalExists) {
    os << "UNIVERSAL_EXISTS, Prop " << proposition_case;
  } else {
    os << "NONEXISTENT, obstruction=" << obstruction;
  }
  if (!note.empty()) os << " (" << note << ")";
  return os.str();
}

ExistenceReport classify_existence(const FamilySpec& spec) {
  ExistenceReport rep;
  rep.branch = family_name(spec);
  std::visit(
      [&rep](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BranchT2>) {
          rep.verdict = Verdict::kUniversalExists;
          rep.proposition_case = b.mu == 0.0 ? "1(i)" : "1(ii)";
        } else if constexpr (std::is_same_v<T, BranchT3>) {
          rep.verdict = Verdict::kNonexistent;
          const double k = b.m1 * b.mu - b.eta;
          rep.obstruction = k * k + b.m1 * b.m1;
          rep.note = "(m1*mu - eta)^2 + m1^2 > 0 since eta != 0";
        } else if constexpr (std::is_same_v<T, BranchT4>) {
          rep.verdict = Verdict::kUniversalExists;
          if (b.mu != 0.0) rep.proposition_case = "3(iii)";
          else if (b.m1 == 0.0) rep.proposition_case = "3(i)";
          else rep.proposition_case = "3(ii)";
        } else if constexpr (std::is_same_v<T, BranchT5i>) {
          rep.verdict = Verdict::kNonexistent;
          const double k2 = b.m - b.q * b.tau / b.p;
          const double k1 = b.mu * k2 - b.tau * b.eta / b.p;
          rep.obstruction = k1 * k1 + k2 * k2;
          std::ostringstream os;
          os.precision(12);
          os << "k1=" << k1 << ", k2=" << k2
             << "; k1^2+k2^2=0 would force Delta13=Delta23=0, contradicting "
                "the normal nondegeneracy";
          rep.note = os.str();
        } else if constexpr (std::is_same_v<T, BranchT5ii>) {
          rep.verdict = Verdict::kNonexistent;
          rep.obstruction = b.lambda * b.lambda + b.m1 * b.m1;
          rep.note = "vanishing would need lambda=m1=0, contradicting Delta12 != 0";
        } else {
          throw UnsupportedForExplicitFrame(
              "existence classification applies to catalog branches only");
        }
      },
      spec);
  return rep;
}

CodazziResidual codazzi_residual(const Field2D<FrameCoeffs>& frames,
                                 const Field2D<SecondFundamentalForm>& sff,
                                 const Mask2D* mask) {
  const int nx = frames.nx(), nt = frames.nt();
  if (nx != sff.nx() || nt != sff.nt()) throw Error("field size mismatch");
  if (nx < 3 || nt < 3) throw GridTooSmall("codazzi residual needs a 3x3 grid");
  CodazziResidual out;
  out.ra = Field2D<double>(nx, nt, 0.0);
  out.rb = Field2D<double>(nx, nt, 0.0);
  out.ra.x0 = out.rb.x0 = frames.x0;
  out.ra.t0 = out.rb.t0 = frames.t0;
  out.ra.dx = out.rb.dx = frames.dx;
  out.ra.dt = out.rb.dt = frames.dt;

  auto masked = [&](int i, int j) {
    return mask != nullptr && mask->at(i, j) != 0;
  };

  const double twodx = 2.0 * frames.dx, twodt = 2.0 * frames.dt;
  for (int j = 1; j + 1 < nt; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      if (masked(i, j) || masked(i - 1, j) || masked(i + 1, j) ||
          masked(i, j - 1) || masked(i, j + 1))
        continue;
      const FrameCoeffs& f = frames.at(i, j);
      const auto d = deltas(f);
      const SecondFundamentalForm& s = sff.at(i, j);
      auto Dx = [&](double SecondFundamentalForm::* m) {
        return (sff.at(i + 1, j).*m - sff.at(i - 1, j).*m) / twodx;
      };
      auto Dt = [&](double SecondFundamentalForm::* m) {
        return (sff.at(i, j + 1).*m - sff.at(i, j - 1).*m) / twodt;
      };
      const double at = Dt(&SecondFundamentalForm::a), ax = Dx(&SecondFundamentalForm::a);
      const double bt = Dt(&SecondFundamentalForm::b), bx = Dx(&SecondFundamentalForm::b);
      const double ct = Dt(&SecondFundamentalForm::c), cx = Dx(&SecondFundamentalForm::c);
      const double ra = f.f[0][0] * at + f.f[1][0] * bt - f.f[0][1] * ax -
                        f.f[1][1] * bx - 2.0 * s.b * d.d13 + (s.a - s.c) * d.d23;
      const double rb = f.f[0][0] * bt + f.f[1][0] * ct - f.f[0][1] * bx -
                        f.f[1][1] * cx + (s.a - s.c) * d.d13 + 2.0 * s.b * d.d23;
      out.ra.at(i, j) = ra;
      out.rb.at(i, j) = rb;
      out.max_abs = std::max({out.max_abs, std::abs(ra), std::abs(rb)});
    }
  }
  return out;
}

}  // namespace pss
