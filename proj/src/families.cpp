#include "pss/families.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pss/common.hpp"

namespace pss {

namespace {

const JetExpr kZ0 = JetExpr::z(0);
const JetExpr kZ1 = JetExpr::z(1);
const JetExpr kZ2 = JetExpr::z(2);
const JetExpr kZ3 = JetExpr::z(3);

JetExpr sexpr() { return kZ0 - kZ2; }

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // canonicalize negative zero
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string FuncSpec::spec_string() const {
  std::string out = kind;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    out += (i == 0 ? ":" : ",") + fmt(coeffs[i]);
  return out;
}

FuncSpec parse_func(const std::string& text) {
  FuncSpec f;
  auto colon = text.find(':');
  f.kind = text.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        f.coeffs.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad numeric coefficient in function spec: " + text);
      }
    }
  }
  return f;
}

namespace {
void need_coeffs(const FuncSpec& f, std::size_t n) {
  if (f.coeffs.size() != n)
    throw ConfigError("function '" + f.kind + "' needs " + std::to_string(n) +
                      " coefficients, got " + std::to_string(f.coeffs.size()));
}
}  // namespace

JetExpr build_func1(const FuncSpec& f, const JetExpr& s) {
  if (f.kind == "identity") return s;
  if (f.kind == "exp") return JetExpr::exp(s);
  if (f.kind == "affine") {
    need_coeffs(f, 2);
    return JetExpr(f.coeffs[0]) * s + JetExpr(f.coeffs[1]);
  }
  if (f.kind == "poly2") {
    need_coeffs(f, 3);
    return JetExpr(f.coeffs[0]) + JetExpr(f.coeffs[1]) * s +
           JetExpr(f.coeffs[2]) * JetExpr::pow(s, 2);
  }
  throw ConfigError("unknown 1-argument function '" + f.kind + "'");
}

JetExpr build_func2(const FuncSpec& f, const JetExpr& a, const JetExpr& b) {
  if (f.kind == "identity" || f.kind == "z0") return a;
  if (f.kind == "z1") return b;
  if (f.kind == "exp") return JetExpr::exp(a);
  if (f.kind == "affine") {
    need_coeffs(f, 2);
    return JetExpr(f.coeffs[0]) * a + JetExpr(f.coeffs[1]);
  }
  if (f.kind == "poly2") {
    need_coeffs(f, 6);
    const auto& c = f.coeffs;
    return JetExpr(c[0]) + JetExpr(c[1]) * a + JetExpr(c[2]) * b +
           JetExpr(c[3]) * JetExpr::pow(a, 2) + JetExpr(c[4]) * a * b +
           JetExpr(c[5]) * JetExpr::pow(b, 2);
  }
  throw ConfigError("unknown 2-argument function '" + f.kind + "'");
}

double BranchT5ii::q() const {
  const double r2 = 1.0 + mu * mu;
  const double num = (mu * theta - eta * p);
  return (p / (2.0 * theta)) *
         (num * num / (p * p * r2) - theta * theta / (p * p) + m2 * theta - 1.0);
}

namespace {

FrameBundle frame_t2(const BranchT2& b) {
  FrameBundle fb;
  fb.catalog = true;
  fb.lambda = 0.0;
  const double e = signv(b.sign);
  const double r = std::sqrt(1.0 + b.mu * b.mu);
  const JetExpr h = build_func1(b.h, sexpr());
  const JetExpr hp = h.diff_z(0);  // h'(s)
  const JetExpr psi = build_func2(b.psi, kZ0, kZ1);
  fb.f[0][0] = h;
  fb.f[1][0] = JetExpr(b.mu) * h + JetExpr(e * b.m * r);
  fb.f[2][0] = JetExpr(e * r) * h + JetExpr(b.m * b.mu);
  fb.f[0][1] = psi;
  fb.f[1][1] = JetExpr(b.mu) * psi;
  fb.f[2][1] = JetExpr(e * r) * psi;
  fb.G = (kZ1 * psi.diff_z(0) + kZ2 * psi.diff_z(1) + JetExpr(b.m) * psi) / hp;
  fb.mu2 = b.mu;
  fb.eta2 = e * b.m * r;
  fb.mu3 = e * r;
  fb.eta3 = b.m * b.mu;
  return fb;
}

FrameBundle frame_t3(const BranchT3& b) {
  FrameBundle fb;
  fb.catalog = true;
  fb.lambda = b.lambda;
  const double r2 = 1.0 + b.mu * b.mu;
  const JetExpr h = build_func1(b.h, sexpr());
  const JetExpr hp = h.diff_z(0);
  fb.mu2 = b.mu;
  fb.eta2 = b.eta;
  fb.mu3 = b.m1 * r2 / (b.m2 * b.eta) - b.mu / b.m2;
  fb.eta3 = (b.m1 * b.mu - b.eta) / b.m2;
  const JetExpr lam(b.lambda);
  fb.f[0][0] = h;
  fb.f[1][0] = JetExpr(b.mu) * h + JetExpr(b.eta);
  fb.f[2][0] = JetExpr(fb.mu3) * h + JetExpr(fb.eta3);
  fb.f[0][1] = -lam * kZ0 * h - JetExpr(b.lambda * b.m2) * kZ1;
  fb.f[1][1] = -JetExpr(b.lambda * b.mu) * kZ0 * h -
               JetExpr(b.lambda * b.m2 * b.mu) * kZ1 -
               JetExpr(b.lambda * b.eta) * kZ0;
  fb.f[2][1] = -lam * kZ0 * fb.f[2][0] -
               JetExpr(b.lambda / b.eta * (b.m1 * r2 - b.mu * b.eta)) * kZ1;
  fb.G = -(lam / hp) * (kZ1 * h + kZ0 * kZ1 * hp + JetExpr(b.m1) * kZ1 +
                        JetExpr(b.m2) * kZ2);
  return fb;
}

FrameBundle frame_t4(const BranchT4& b) {
  FrameBundle fb;
  fb.catalog = true;
  fb.lambda = b.lambda;
  const double e = signv(b.sign);
  const double r = std::sqrt(1.0 + b.mu * b.mu);
  const JetExpr h = build_func1(b.h, sexpr());
  const JetExpr hp = h.diff_z(0);
  const JetExpr psi = build_func2(b.psi, kZ0, kZ1);
  const JetExpr lam(b.lambda);
  fb.f[0][0] = h;
  fb.f[1][0] = JetExpr(b.mu) * h + JetExpr(e * b.m1 * r);
  fb.f[2][0] = JetExpr(e * r) * h + JetExpr(b.m1 * b.mu);
  fb.f[0][1] = -lam * kZ0 * h + psi;
  fb.f[1][1] = -JetExpr(b.lambda * b.mu) * kZ0 * h + JetExpr(b.mu) * psi +
               JetExpr(e * b.m2 * r);
  fb.f[2][1] = JetExpr(e * r) * (psi - lam * kZ0 * h) + JetExpr(b.mu * b.m2);
  fb.G = (kZ2 * psi.diff_z(1) + kZ1 * psi.diff_z(0) + JetExpr(b.m1) * psi -
          lam * kZ0 * kZ1 * hp -
          (lam * kZ1 + JetExpr(b.lambda * b.m1) * kZ0 + JetExpr(b.m2)) * h) /
         hp;
  fb.mu2 = b.mu;
  fb.eta2 = e * b.m1 * r;
  fb.mu3 = e * r;
  fb.eta3 = b.m1 * b.mu;
  return fb;
}

FrameBundle frame_t5i(const BranchT5i& b) {
  FrameBundle fb;
  fb.catalog = true;
  fb.lambda = b.lambda;
  const double e = signv(b.sign);
  const double r2 = 1.0 + b.mu * b.mu;
  const double k2 = b.m - b.q * b.tau / b.p;  // m - q tau / p
  const JetExpr V = build_func1(b.phi, kZ0);
  const JetExpr Vp = V.diff_z(0);
  const JetExpr Vpp = Vp.diff_z(0);
  const JetExpr E1 = JetExpr::exp(JetExpr(e * b.tau) * kZ1);
  const JetExpr lam(b.lambda);
  const JetExpr pz0q = JetExpr(b.p) * kZ0 + JetExpr(b.q);

  fb.f[0][0] = JetExpr(b.p) * sexpr() + JetExpr(b.q);
  fb.f[1][0] = JetExpr(b.mu) * fb.f[0][0] + JetExpr(b.eta);
  fb.f[2][0] = JetExpr(e * k2) *
                   (JetExpr(r2 / b.eta) * fb.f[0][0] + JetExpr(b.mu)) -
               JetExpr(e * b.tau / b.p) * fb.f[1][0];
  fb.f[0][1] = -lam * kZ0 * fb.f[0][0] +
               (JetExpr(e * b.tau) * pz0q * V + JetExpr(b.p) * kZ1 * Vp) * E1 -
               JetExpr(e * b.lambda * b.p / b.tau) * kZ1;
  fb.f[1][1] = JetExpr(b.mu) * fb.f[0][1] - JetExpr(b.lambda * b.eta) * kZ0 +
               JetExpr(e * b.eta * b.tau) * E1 * V;
  fb.f[2][1] = JetExpr(e * k2) *
                   (JetExpr(r2 / b.eta) * fb.f[0][1] -
                    JetExpr(b.mu) * (lam * kZ0 - JetExpr(e * b.tau) * E1 * V)) -
               JetExpr(e * b.tau / b.p) * fb.f[1][1];
  fb.G = lam * (kZ1 * kZ2 - JetExpr(2.0) * kZ0 * kZ1 -
                JetExpr(b.m / b.tau) * kZ1 - JetExpr(e / b.tau) * kZ2) +
         JetExpr(b.tau) * E1 *
             (JetExpr(b.tau) * kZ0 * kZ2 + JetExpr(e) * kZ1 + JetExpr(b.m) * kZ2) * V +
         JetExpr(e) * E1 *
             (JetExpr(b.tau) * kZ0 * kZ1 + JetExpr(b.tau) * kZ1 * kZ2 +
              JetExpr(b.m) * kZ1 + JetExpr(e) * kZ2) * Vp +
         JetExpr::pow(kZ1, 2) * E1 * Vpp;
  fb.mu2 = b.mu;
  fb.eta2 = b.eta;
  fb.mu3 = e * (k2 * r2 / b.eta - b.tau * b.mu / b.p);
  fb.eta3 = e * (k2 * b.mu - b.tau * b.eta / b.p);
  return fb;
}

FrameBundle frame_t5ii(const BranchT5ii& b) {
  FrameBundle fb;
  fb.catalog = true;
  fb.lambda = b.lambda;
  const double e = signv(b.sign);
  const double r = std::sqrt(1.0 + b.mu * b.mu);
  const double r2 = 1.0 + b.mu * b.mu;
  const double q = b.q();
  const JetExpr lam(b.lambda);
  const JetExpr E0 = JetExpr::exp(JetExpr(b.theta) * kZ0);
  const JetExpr A = JetExpr(b.m1 * b.theta) * E0 - lam;
  const JetExpr pz0q = JetExpr(b.p) * kZ0 + JetExpr(q);
  const JetExpr z1sq = JetExpr::pow(kZ1, 2);

  fb.f[0][0] = JetExpr(b.p) * sexpr() + JetExpr(q);
  fb.f[1][0] = JetExpr(b.mu) * fb.f[0][0] + JetExpr(b.eta);
  fb.f[2][0] = JetExpr(e * r) * fb.f[0][0] +
               JetExpr(e * (b.theta + b.p * b.mu * b.eta) / (b.p * r));
  fb.f[0][1] = -lam * kZ0 * fb.f[0][0] + JetExpr(b.p * b.m1 * b.theta) * E0 * z1sq +
               A * (pz0q / JetExpr(b.theta) +
                    JetExpr(e * (b.mu - b.p * b.eta / b.theta) / r) * kZ1);
  fb.f[1][1] = -lam * kZ0 * fb.f[1][0] +
               JetExpr(b.mu * b.p * b.m1 * b.theta) * E0 * z1sq +
               A * (JetExpr(b.mu) * pz0q + JetExpr(b.eta) -
                    JetExpr(e * (b.theta + b.mu * b.eta * b.p) / r) * kZ1) /
                   JetExpr(b.theta);
  fb.f[2][1] = -lam * kZ0 * fb.f[2][0] +
               JetExpr(e * r * b.p * b.m1 * b.theta) * E0 * z1sq -
               A * (JetExpr(b.p * b.eta) * kZ1 -
                    JetExpr(e / r) * (JetExpr(r2) * pz0q +
                                      JetExpr(b.mu * b.eta + b.theta / b.p))) /
                   JetExpr(b.theta);
  fb.G = lam * (JetExpr(2.0) * kZ1 * kZ2 - JetExpr(3.0) * kZ0 * kZ1 -
                JetExpr(b.m2) * kZ1) +
         JetExpr(b.m1 * b.theta) * E0 *
             (JetExpr(b.theta) * JetExpr::pow(kZ1, 3) + kZ1 * kZ2 +
              JetExpr(2.0) * kZ0 * kZ1 + JetExpr(b.m2) * kZ1);
  fb.mu2 = b.mu;
  fb.eta2 = b.eta;
  fb.mu3 = e * r;
  fb.eta3 = e * (b.theta + b.p * b.mu * b.eta) / (b.p * r);
  return fb;
}

FrameBundle frame_explicit(const ExplicitFrame& b) {
  FrameBundle fb;
  fb.catalog = false;
  for (int i = 0; i < 3; ++i) {
    fb.f[i][0] = b.f[static_cast<std::size_t>(i)];
    fb.f[i][1] = b.f[static_cast<std::size_t>(i + 3)];
  }
  return fb;
}

}  // namespace

FrameBundle build_frame(const FamilySpec& spec) {
  FrameBundle fb = std::visit(
      [](const auto& b) -> FrameBundle {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BranchT2>) return frame_t2(b);
        else if constexpr (std::is_same_v<T, BranchT3>) return frame_t3(b);
        else if constexpr (std::is_same_v<T, BranchT4>) return frame_t4(b);
        else if constexpr (std::is_same_v<T, BranchT5i>) return frame_t5i(b);
        else if constexpr (std::is_same_v<T, BranchT5ii>) return frame_t5ii(b);
        else return frame_explicit(b);
      },
      spec);
  if (fb.catalog) fb.F = JetExpr(fb.lambda) * kZ0 * kZ3 + fb.G;
  return fb;
}

FrameCoeffs eval_frame(const FrameBundle& fb, const Jet& jet) {
  FrameCoeffs fc;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) fc.f[i][j] = fb.f[i][j].eval(jet);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      if (!is_finite(fc.f[i][j]))
        throw FunctionEvalError("frame coefficient evaluated non-finite");
  return fc;
}

FrameCoeffs frame_coeffs(const FamilySpec& spec, const Jet& jet) {
  return eval_frame(build_frame(spec), jet);
}

double pde_rhs(const FamilySpec& spec, const Jet& jet) {
  if (std::holds_alternative<ExplicitFrame>(spec))
    throw UnsupportedForExplicitFrame("pde_rhs is defined for catalog branches only");
  jet.zval(3);
  const FrameBundle fb = build_frame(spec);
  return fb.F.eval(jet);
}

namespace {

void hard(bool ok, const std::string& name, std::vector<std::string>* checked) {
  if (!ok) throw ConstraintViolated(name);
  checked->push_back(name);
}

bool rel_equal(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Sample a scalar expression over quasi-random jets; report zero crossings.
void sample_nonzero(const JetExpr& fn, const std::string& what, const JetBox& box,
                    std::uint64_t seed, ValidationReport* rep) {
  HaltonSampler sampler(4, seed);
  bool pos = false, neg = false;
  for (int k = 0; k < 256; ++k) {
    auto u = sampler.next();
    Jet j = make_jet({0, 0, 0, 0});
    for (int d = 0; d < 4; ++d)
      j.z[static_cast<std::size_t>(d)] = box.lo + (box.hi - box.lo) * u[static_cast<std::size_t>(d)];
    const double v = fn.eval(j);
    if (v > 0) pos = true;
    if (v < 0) neg = true;
    if ((pos && neg) || std::abs(v) < 1e-12) {
      rep->warnings.push_back({what + " crosses zero on sample domain", j});
      return;
    }
  }
}

}  // namespace

ValidationReport validate(const FamilySpec& spec, const JetBox& box,
                          std::uint64_t seed) {
  ValidationReport rep;
  auto* checked = &rep.checked;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BranchT2>) {
          hard(b.m != 0.0, "m != 0", checked);
          sample_nonzero(build_func1(b.h, sexpr()).diff_z(0), "h'", box, seed, &rep);
          sample_nonzero(build_func2(b.psi, kZ0, kZ1), "psi", box, seed, &rep);
        } else if constexpr (std::is_same_v<T, BranchT3>) {
          hard(b.eta != 0.0, "eta != 0", checked);
          hard(b.lambda * b.m2 != 0.0, "lambda*m2 != 0", checked);
          const double lhs = (b.m2 * b.eta) * (b.m2 * b.eta);
          const double rhs = b.m1 * b.m1 + (b.m1 * b.mu - b.eta) * (b.m1 * b.mu - b.eta);
          hard(rel_equal(lhs, rhs), "(m2*eta)^2 == m1^2 + (m1*mu - eta)^2", checked);
          sample_nonzero(build_func1(b.h, sexpr()).diff_z(0), "h'", box, seed, &rep);
        } else if constexpr (std::is_same_v<T, BranchT4>) {
          const double c = (b.lambda * b.m1) * (b.lambda * b.m1) + b.m2 * b.m2;
          hard(c != 0.0, "(lambda*m1)^2 + m2^2 != 0", checked);
          sample_nonzero(build_func1(b.h, sexpr()).diff_z(0), "h'", box, seed, &rep);
        } else if constexpr (std::is_same_v<T, BranchT5i>) {
          hard(b.p * b.eta != 0.0, "p*eta != 0", checked);
          hard(b.tau > 0.0, "tau > 0", checked);
          const double w = b.p * b.m - b.q * b.tau;
          const double lhs = (b.p * b.eta) * (b.p * b.eta);
          const double rhs = w * w + (b.mu * w - b.tau * b.eta) * (b.mu * w - b.tau * b.eta);
          hard(rel_equal(lhs, rhs), "(p*eta)^2 == (p*m - q*tau)^2 + (mu*(p*m - q*tau) - tau*eta)^2",
               checked);
          sample_nonzero(build_func1(b.phi, kZ0), "phi", box, seed, &rep);
        } else if constexpr (std::is_same_v<T, BranchT5ii>) {
          hard(b.theta != 0.0, "theta != 0", checked);
          hard(b.p != 0.0, "p != 0", checked);
          hard(b.lambda * b.lambda + b.m1 * b.m1 != 0.0, "lambda^2 + m1^2 != 0", checked);
        } else {
          // Explicit frames carry no algebraic constraints.
          checked->push_back("explicit frame (no algebraic constraints)");
        }
      },
      spec);
  return rep;
}

namespace {

ExplicitFrame sg_lightcone() {
  ExplicitFrame ef;
  ef.name = "sg-lightcone";
  const JetExpr half = JetExpr(0.5) * kZ0;
  ef.f[0] = JetExpr::cos(half);
  ef.f[1] = JetExpr::sin(half);
  ef.f[2] = JetExpr(0.5) * kZ1;
  ef.f[3] = JetExpr::cos(half);
  ef.f[4] = -JetExpr::sin(half);
  ef.f[5] = JetExpr(-0.5) * JetExpr::zt0();
  return ef;
}

ExplicitFrame sg_eta(double eta) {
  if (eta == 0.0) throw ConfigError("sg-eta requires eta != 0");
  ExplicitFrame ef;
  ef.name = "sg-eta";
  ef.f[0] = JetExpr(0.0);
  ef.f[1] = JetExpr(eta);
  ef.f[2] = kZ1;
  ef.f[3] = JetExpr::sin(kZ0) / JetExpr(eta);
  ef.f[4] = JetExpr::cos(kZ0) / JetExpr(eta);
  ef.f[5] = JetExpr(0.0);
  return ef;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

FamilySpec make_preset(const std::string& name) {
  const std::string n = lower(name);
  if (n == "linear-t2") return BranchT2{0.0, 1.0, Sign::kPlus, {"identity", {}}, {"z0", {}}};
  if (n == "ch")
    return BranchT5ii{1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, Sign::kPlus};
  if (n == "t3-ref") return BranchT3{1.0, 0.0, 1.0, 0.0, 1.0, {"identity", {}}};
  if (n == "t4-ref")
    return BranchT4{1.0, 0.0, 1.0, 1.0, Sign::kPlus, {"identity", {}}, {"z0", {}}};
  if (n == "t5i-ref")
    return BranchT5i{0.5, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0 - std::sqrt(3.0),
                     Sign::kPlus, {"exp", {}}};
  if (n == "sg-lightcone") return sg_lightcone();
  if (n == "sg-eta") return sg_eta(1.0);
  throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"linear-t2", "ch", "t3-ref", "t4-ref", "t5i-ref", "sg-lightcone", "sg-eta"};
}

namespace {

Sign parse_sign(const std::string& v) {
  if (v == "+" || v == "+1" || v == "plus") return Sign::kPlus;
  if (v == "-" || v == "-1" || v == "minus") return Sign::kMinus;
  throw ConfigError("sign must be + or -, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for key '" + key + "': " + v);
  }
}

struct KvMap {
  std::map<std::string, std::string> kv;
  mutable std::map<std::string, bool> used;

  bool has(const std::string& k) const { return kv.count(k) != 0; }
  std::string get(const std::string& k, const std::string& def = "") const {
    used[k] = true;
    auto it = kv.find(k);
    return it == kv.end() ? def : it->second;
  }
  double num(const std::string& k, double def) const {
    used[k] = true;
    auto it = kv.find(k);
    return it == kv.end() ? def : parse_num(it->second, k);
  }
  double num_req(const std::string& k) const {
    used[k] = true;
    auto it = kv.find(k);
    if (it == kv.end()) throw ConfigError("missing required key '" + k + "'");
    return parse_num(it->second, k);
  }
  void finish() const {
    for (const auto& [k, v] : kv)
      if (!used.count(k)) throw ConfigError("unknown key '" + k + "'");
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

FamilySpec parse_family_config(const std::string& text) {
  KvMap m;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (m.kv.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    m.kv[key] = val;
  }
  const std::string branch = lower(m.get("branch"));
  if (branch.empty()) throw ConfigError("missing required key 'branch'");

  FamilySpec spec;
  if (branch == "t2") {
    BranchT2 b;
    b.mu = m.num("mu", 0.0);
    b.m = m.num_req("m");
    b.sign = parse_sign(m.get("sign", "+"));
    b.h = parse_func(m.get("h", "identity"));
    b.psi = parse_func(m.get("psi", "z0"));
    spec = b;
  } else if (branch == "t3") {
    BranchT3 b;
    b.lambda = m.num_req("lambda");
    b.mu = m.num("mu", 0.0);
    b.eta = m.num_req("eta");
    b.m1 = m.num("m1", 0.0);
    b.m2 = m.num_req("m2");
    b.h = parse_func(m.get("h", "identity"));
    spec = b;
  } else if (branch == "t4") {
    BranchT4 b;
    b.lambda = m.num_req("lambda");
    b.mu = m.num("mu", 0.0);
    b.m1 = m.num("m1", 0.0);
    b.m2 = m.num("m2", 0.0);
    b.sign = parse_sign(m.get("sign", "+"));
    b.h = parse_func(m.get("h", "identity"));
    b.psi = parse_func(m.get("psi", "z0"));
    spec = b;
  } else if (branch == "t5i") {
    BranchT5i b;
    b.lambda = m.num("lambda", 0.0);
    b.mu = m.num("mu", 0.0);
    b.eta = m.num_req("eta");
    b.m = m.num_req("m");
    b.tau = m.num_req("tau");
    b.p = m.num_req("p");
    b.q = m.num_req("q");
    b.sign = parse_sign(m.get("sign", "+"));
    b.phi = parse_func(m.get("phi", "exp"));
    spec = b;
  } else if (branch == "t5ii") {
    BranchT5ii b;
    b.lambda = m.num_req("lambda");
    b.theta = m.num("theta", 1.0);
    b.mu = m.num("mu", 0.0);
    b.eta = m.num("eta", 0.0);
    b.m1 = m.num("m1", 0.0);
    b.m2 = m.num_req("m2");
    b.p = m.num("p", 1.0);
    b.sign = parse_sign(m.get("sign", "+"));
    spec = b;
  } else if (branch == "sg-lightcone") {
    spec = sg_lightcone();
  } else if (branch == "sg-eta") {
    spec = sg_eta(m.num("eta", 1.0));
  } else {
    throw ConfigError("unknown branch '" + branch + "'");
  }
  m.finish();
  return spec;
}

FamilySpec load_family(const std::string& path_or_preset) {
  std::ifstream in(path_or_preset);
  if (in.good()) {
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_family_config(buf.str());
  }
  return make_preset(path_or_preset);
}

std::string family_name(const FamilySpec& spec) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BranchT2>) return "t2";
        else if constexpr (std::is_same_v<T, BranchT3>) return "t3";
        else if constexpr (std::is_same_v<T, BranchT4>) return "t4";
        else if constexpr (std::is_same_v<T, BranchT5i>) return "t5i";
        else if constexpr (std::is_same_v<T, BranchT5ii>) return "t5ii";
        else return b.name.empty() ? "explicit" : b.name;
      },
      spec);
}

std::string family_to_config(const FamilySpec& spec) {
  std::ostringstream os;
  os << "branch = " << family_name(spec) << "\n";
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BranchT2>) {
          os << "mu = " << fmt(b.mu) << "\nm = " << fmt(b.m)
             << "\nsign = " << (b.sign == Sign::kPlus ? "+" : "-")
             << "\nh = " << b.h.spec_string() << "\npsi = " << b.psi.spec_string() << "\n";
        } else if constexpr (std::is_same_v<T, BranchT3>) {
          os << "lambda = " << fmt(b.lambda) << "\nmu = " << fmt(b.mu)
             << "\neta = " << fmt(b.eta) << "\nm1 = " << fmt(b.m1)
             << "\nm2 = " << fmt(b.m2) << "\nh = " << b.h.spec_string() << "\n";
        } else if constexpr (std::is_same_v<T, BranchT4>) {
          os << "lambda = " << fmt(b.lambda) << "\nmu = " << fmt(b.mu)
             << "\nm1 = " << fmt(b.m1) << "\nm2 = " << fmt(b.m2)
             << "\nsign = " << (b.sign == Sign::kPlus ? "+" : "-")
             << "\nh = " << b.h.spec_string() << "\npsi = " << b.psi.spec_string() << "\n";
        } else if constexpr (std::is_same_v<T, BranchT5i>) {
          os << "lambda = " << fmt(b.lambda) << "\nmu = " << fmt(b.mu)
             << "\neta = " << fmt(b.eta) << "\nm = " << fmt(b.m)
             << "\ntau = " << fmt(b.tau) << "\np = " << fmt(b.p)
             << "\nq = " << fmt(b.q)
             << "\nsign = " << (b.sign == Sign::kPlus ? "+" : "-")
             << "\nphi = " << b.phi.spec_string() << "\n";
        } else if constexpr (std::is_same_v<T, BranchT5ii>) {
          os << "lambda = " << fmt(b.lambda) << "\ntheta = " << fmt(b.theta)
             << "\nmu = " << fmt(b.mu) << "\neta = " << fmt(b.eta)
             << "\nm1 = " << fmt(b.m1) << "\nm2 = " << fmt(b.m2)
             << "\np = " << fmt(b.p)
             << "\nsign = " << (b.sign == Sign::kPlus ? "+" : "-") << "\n";
        } else {
          for (int i = 0; i < 6; ++i)
            os << "# f" << (i % 3 + 1) << (i / 3 + 1) << " = "
               << b.f[static_cast<std::size_t>(i)].to_string() << "\n";
        }
      },
      spec);
  return os.str();
}

}  // namespace pss
