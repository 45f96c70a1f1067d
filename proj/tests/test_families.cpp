#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pss/common.hpp"
#include "pss/families.hpp"

using namespace pss;

namespace {

Jet sample_jet(HaltonSampler& s) {
  auto u = s.next();
  Jet j = make_jet({0, 0, 0, 0});
  for (int d = 0; d < 4; ++d) j.z[static_cast<std::size_t>(d)] = -2.0 + 4.0 * u[static_cast<std::size_t>(d)];
  return j;
}

std::vector<FamilySpec> catalog_presets_both_signs() {
  std::vector<FamilySpec> specs;
  for (const auto& name : {"linear-t2", "ch", "t3-ref", "t4-ref", "t5i-ref"}) {
    FamilySpec s = make_preset(name);
    specs.push_back(s);
    std::visit(
        [&specs](auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, BranchT2> || std::is_same_v<T, BranchT4> ||
                        std::is_same_v<T, BranchT5i> || std::is_same_v<T, BranchT5ii>) {
            b.sign = Sign::kMinus;
            specs.push_back(b);
          }
        },
        s);
  }
  return specs;
}

}  // namespace

TEST_CASE("first-order branch frame at a reference jet") {
  const FamilySpec spec = make_preset("linear-t2");
  const FrameCoeffs f = frame_coeffs(spec, make_jet({2, 0, 1}));
  CHECK(f.f[0][0] == doctest::Approx(1.0));
  CHECK(f.f[1][0] == doctest::Approx(1.0));
  CHECK(f.f[2][0] == doctest::Approx(1.0));
  CHECK(f.f[0][1] == doctest::Approx(2.0));
  CHECK(f.f[1][1] == doctest::Approx(0.0));
  CHECK(f.f[2][1] == doctest::Approx(2.0));
}

TEST_CASE("lightcone frame of the second-order reference equation") {
  const FamilySpec spec = make_preset("sg-lightcone");
  Jet j = make_jet({M_PI / 2, 0.3});
  j.zt0 = 0.7;
  const FrameCoeffs f = frame_coeffs(spec, j);
  const double c = std::sqrt(2.0) / 2.0;
  CHECK(f.f[0][0] == doctest::Approx(c));
  CHECK(f.f[0][1] == doctest::Approx(c));
  CHECK(f.f[1][0] == doctest::Approx(c));
  CHECK(f.f[1][1] == doctest::Approx(-c));
  CHECK(f.f[2][0] == doctest::Approx(0.15));
  CHECK(f.f[2][1] == doctest::Approx(-0.35));
}

TEST_CASE("right-hand side evaluation") {
  CHECK(pde_rhs(make_preset("linear-t2"), make_jet({2, 3, 1, 0})) == doctest::Approx(5.0));

  BranchT5ii ch;
  ch.lambda = 1.0;
  ch.m1 = 0.0;
  ch.m2 = 0.0;
  CHECK(pde_rhs(ch, make_jet({1, 1, 1, 1})) == doctest::Approx(0.0));
  CHECK(pde_rhs(ch, make_jet({0, 0, 0, 0})) == doctest::Approx(0.0));

  CHECK_THROWS_AS(pde_rhs(make_preset("sg-lightcone"), make_jet({1, 1, 1, 1})),
                  UnsupportedForExplicitFrame);
}

TEST_CASE("camassa-holm member reduces to the cubic-form right-hand side") {
  BranchT5ii ch;  // lambda=1, m1=0, m2=1
  HaltonSampler s(4, 3);
  for (int k = 0; k < 32; ++k) {
    Jet j = sample_jet(s);
    const double z0 = j.z[0], z1 = j.z[1], z2 = j.z[2], z3 = j.z[3];
    const double want = z0 * z3 + 2 * z1 * z2 - 3 * z0 * z1 - 1.0 * z1;
    CHECK(pde_rhs(ch, j) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("validation enforces the branch constraints") {
  BranchT3 good;  // mu=0, eta=1, m1=0, m2=1, lambda=1
  CHECK_NOTHROW(validate(good));

  BranchT3 bad = good;
  bad.m2 = 2.0;
  CHECK_THROWS_AS(validate(bad), ConstraintViolated);

  BranchT2 t2;
  t2.m = 0.0;
  CHECK_THROWS_AS(validate(t2), ConstraintViolated);

  BranchT5ii t5;
  t5.lambda = 0.0;
  t5.m1 = 0.0;
  CHECK_THROWS_AS(validate(t5), ConstraintViolated);
}

TEST_CASE("validation warns about zero crossings of plugin functions") {
  BranchT2 t2;  // psi = z0 crosses zero on [-2,2]^4
  const auto rep = validate(t2);
  REQUIRE(!rep.warnings.empty());
  CHECK(rep.warnings[0].what.find("psi") != std::string::npos);
}

TEST_CASE("every catalog preset satisfies the linear relation in f_i1") {
  for (const auto& spec : catalog_presets_both_signs()) {
    const FrameBundle fb = build_frame(spec);
    HaltonSampler s(4, 11);
    for (int k = 0; k < 64; ++k) {
      const Jet j = sample_jet(s);
      const double f11 = fb.f[0][0].eval(j);
      const double f21 = fb.f[1][0].eval(j);
      const double f31 = fb.f[2][0].eval(j);
      CHECK(std::abs(f21 - (fb.mu2 * f11 + fb.eta2)) < 1e-12 * (1 + std::abs(f21)));
      CHECK(std::abs(f31 - (fb.mu3 * f11 + fb.eta3)) < 1e-12 * (1 + std::abs(f31)));
    }
  }
}

TEST_CASE("f11 depends on z0 and z2 only through their difference") {
  for (const auto& spec : catalog_presets_both_signs()) {
    const FrameBundle fb = build_frame(spec);
    HaltonSampler s(4, 13);
    for (int k = 0; k < 16; ++k) {
      const Jet j = sample_jet(s);
      const double d0 = fb.f[0][0].diff_z(0).eval(j);
      const double d2 = fb.f[0][0].diff_z(2).eval(j);
      CHECK(std::abs(d0 + d2) < 1e-12 * (1 + std::abs(d0)));
      CHECK(std::abs(fb.f[0][0].diff_z(1).eval(j)) < 1e-12);
    }
  }
}

TEST_CASE("f_i2 plus lambda z0 f_i1 is independent of z2") {
  for (const auto& spec : catalog_presets_both_signs()) {
    const FrameBundle fb = build_frame(spec);
    HaltonSampler s(4, 17);
    for (int k = 0; k < 16; ++k) {
      const Jet j = sample_jet(s);
      for (int i = 0; i < 3; ++i) {
        const JetExpr phi = fb.f[i][1] + JetExpr(fb.lambda) * JetExpr::z(0) * fb.f[i][0];
        CHECK(std::abs(phi.diff_z(2).eval(j)) < 1e-11 * (1 + std::abs(phi.eval(j))));
      }
    }
  }
}

TEST_CASE("lambda = 0 branches expose f_i2 as the phi functions directly") {
  const FrameBundle fb = build_frame(make_preset("linear-t2"));
  CHECK(fb.lambda == 0.0);
  HaltonSampler s(4, 19);
  const Jet j = sample_jet(s);
  for (int i = 0; i < 3; ++i) CHECK(fb.f[i][1].diff_z(2).eval(j) == 0.0);
}

TEST_CASE("fitting recovers the camassa-holm parameters") {
  for (double m : {1.0, 0.25, -0.7}) {
    CubicTarget t;
    t.z0z3 = 1.0;
    t.z1z2 = 2.0;
    t.z0z1 = -3.0;
    t.z1 = -m;
    const auto fit = fit_family(t);
    REQUIRE(fit.has_value());
    REQUIRE(std::holds_alternative<BranchT5ii>(*fit));
    const auto& b = std::get<BranchT5ii>(*fit);
    CHECK(b.lambda == doctest::Approx(1.0));
    CHECK(b.m1 == doctest::Approx(0.0));
    CHECK(b.m2 == doctest::Approx(m));
  }
}

TEST_CASE("fitting round-trips generated members of each searchable branch") {
  auto roundtrip = [](const FamilySpec& spec) {
    const FrameBundle fb = build_frame(spec);
    const CubicTarget t = target_from_expr(fb.F);
    const auto fit = fit_family(t);
    REQUIRE(fit.has_value());
    const FrameBundle got = build_frame(*fit);
    HaltonSampler s(4, 23);
    for (int k = 0; k < 64; ++k) {
      const Jet j = sample_jet(s);
      CHECK(got.F.eval(j) == doctest::Approx(fb.F.eval(j)).epsilon(1e-10));
    }
  };

  BranchT2 t2;
  t2.m = 2.0;
  t2.psi = FuncSpec{"poly2", {0.5, 1.0, -0.25, 0.0, 0.0, 0.0}};
  roundtrip(t2);

  roundtrip(make_preset("linear-t2"));
  roundtrip(make_preset("t3-ref"));

  BranchT3 t3;
  t3.lambda = -0.5;
  t3.m2 = 2.0;
  t3.eta = 1.0 / std::sqrt(3.0);
  t3.m1 = 1.0;
  t3.h = FuncSpec{"affine", {1.0, 0.3}};
  roundtrip(t3);

  roundtrip(make_preset("t4-ref"));

  BranchT4 t4;
  t4.lambda = 1.5;
  t4.m1 = 0.5;
  t4.m2 = -1.0;
  t4.psi = FuncSpec{"poly2", {0.1, -0.2, 0.4, 0.05, -0.3, 0.2}};
  roundtrip(t4);
}

TEST_CASE("degasperis-procesi target is matched inside the quadratic basis") {
  CubicTarget dp;
  dp.z0z3 = 1.0;
  dp.z1z2 = 3.0;
  dp.z0z1 = -4.0;
  const auto fit = fit_family(dp);
  REQUIRE(fit.has_value());
  REQUIRE(std::holds_alternative<BranchT4>(*fit));
  const auto& b = std::get<BranchT4>(*fit);
  CHECK(std::abs(b.m1) == doctest::Approx(2.0));
  CHECK(b.m2 == doctest::Approx(0.0));
  CHECK((b.lambda * b.m1) * (b.lambda * b.m1) + b.m2 * b.m2 > 0.5);

  const FrameBundle fb = build_frame(*fit);
  HaltonSampler s(4, 29);
  for (int k = 0; k < 64; ++k) {
    const Jet j = sample_jet(s);
    const double want = j.z[0] * j.z[3] + 3 * j.z[1] * j.z[2] - 4 * j.z[0] * j.z[1];
    CHECK(fb.F.eval(j) == doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("targets outside every branch yield no match") {
  CubicTarget odd;
  odd.z1z1 = 1.0;  // pure z1^2 is unreachable
  CHECK(!fit_family(odd).has_value());

  CubicTarget zero;  // G == 0 is excluded
  CHECK(!fit_family(zero).has_value());
}

TEST_CASE("config files parse, echo, and reject unknown keys") {
  const std::string cfg =
      "branch = t4\nlambda = 1\nmu = 0\nm1 = 1\nm2 = 1\nsign = +\n"
      "h = affine:1,0.5\npsi = poly2:0,1,0,0,0,0\n";
  const FamilySpec spec = parse_family_config(cfg);
  REQUIRE(std::holds_alternative<BranchT4>(spec));
  CHECK(std::get<BranchT4>(spec).h.coeffs[1] == doctest::Approx(0.5));

  const FamilySpec again = parse_family_config(family_to_config(spec));
  const FrameBundle a = build_frame(spec), b = build_frame(again);
  const Jet j = make_jet({0.3, -0.4, 0.9, 1.2});
  for (int i = 0; i < 3; ++i)
    for (int col = 0; col < 2; ++col)
      CHECK(a.f[i][col].eval(j) == doctest::Approx(b.f[i][col].eval(j)));

  CHECK_THROWS_AS(parse_family_config("branch = t2\nm = 1\nbogus = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_family_config("branch = t3\n"), ConfigError);
  CHECK_THROWS_AS(parse_family_config("branch = nope\n"), ConfigError);
}

TEST_CASE("every preset name resolves and validates") {
  for (const auto& name : preset_names()) {
    const FamilySpec spec = make_preset(name);
    CHECK_NOTHROW(validate(spec));
  }
}
