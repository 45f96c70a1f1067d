#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pss/jetspace.hpp"
#include "pss/pdesolver.hpp"
#include "pss/secondform.hpp"
#include "pss/verifier.hpp"

using namespace pss;

namespace {

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

// Frame field sampled from the analytic jets of the exact linear solution.
Field2D<FrameCoeffs> linear_frames(const ExactLinearSolution& sol,
                                   const FamilySpec& spec, int nx, int nt,
                                   double x0, double x1, double t0, double t1) {
  const FrameBundle fb = build_frame(spec);
  Field2D<FrameCoeffs> frames(nx, nt);
  frames.x0 = x0;
  frames.t0 = t0;
  frames.dx = (x1 - x0) / (nx - 1);
  frames.dt = (t1 - t0) / (nt - 1);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i)
      frames.at(i, j) = eval_frame(fb, sol.jet(frames.xval(i), frames.tval(j)));
  return frames;
}

}  // namespace

TEST_CASE("characterization identities hold on every preset, both partial modes") {
  for (const auto& spec : catalog_presets_both_signs()) {
    const auto rep = theorem1_conditions(spec, 500, JetBox{-2, 2}, 1e-9,
                                         PartialMode::kAnalytic, 7);
    INFO("branch ", family_name(spec));
    CHECK(rep.pass);
    CHECK(rep.delta == 1);

    const auto rep_fd = theorem1_conditions(spec, 200, JetBox{-2, 2}, 1e-6,
                                            PartialMode::kFiniteDifference, 7);
    CHECK(rep_fd.pass);
  }
}

TEST_CASE("broken constraints break the identities loudly") {
  BranchT3 bad;  // reference values, then perturb m2
  bad.m2 = 1.3;
  const auto rep = theorem1_conditions(bad, 200, JetBox{-2, 2}, 1e-9);
  CHECK(!rep.pass);
  double worst = 0.0;
  for (const auto& row : rep.rows)
    if (row.identity.find("(7.") != std::string::npos)
      worst = std::max(worst, row.residual);
  CHECK(worst > 1e-3);
}

TEST_CASE("explicit frames are not certifiable") {
  CHECK_THROWS_AS(theorem1_conditions(make_preset("sg-eta"), 10, JetBox{}, 1e-9),
                  UnsupportedForExplicitFrame);
}

TEST_CASE("report serializes to csv") {
  const auto rep = theorem1_conditions(make_preset("linear-t2"), 64, JetBox{}, 1e-9);
  const std::string csv = rep.to_csv();
  CHECK(csv.find("identity,max_residual,n_samples,pass") == 0);
  CHECK(csv.find("(7.3)") != std::string::npos);
}

TEST_CASE("single-jet structure identity via exact total derivatives") {
  // First-order member, h = identity, psi = z0, m = 1, jet (2, 3, 1):
  // D_x f12 - D_t f11 + Delta23 must vanish identically.
  const FamilySpec spec = make_preset("linear-t2");
  const FrameBundle fb = build_frame(spec);
  Jet j = make_jet({2, 3, 1, 0, 0});

  JetExprFunction f12(fb.f[0][1]);
  const double dxf12 = total_derivative_x(f12, j);
  CHECK(dxf12 == doctest::Approx(3.0));

  const double F = pde_rhs(spec, j);
  CHECK(F == doctest::Approx(5.0));

  // f11 = h(z0 - z2), so D_t f11 = h' (z0t - z2t) = F by prolongation.
  JetExprFunction Ffn(fb.F);
  const double z0t = 0.8, z1t = -0.4;
  const auto zt = prolong(Ffn, j, z0t, z1t, 2);
  JetExprFunction f11(fb.f[0][0]);
  const double dtf11 = total_derivative_t(f11, j, zt);
  CHECK(dtf11 == doctest::Approx(F));

  const auto d = deltas(eval_frame(fb, j));
  CHECK(dxf12 - dtf11 + d.d23 == doctest::Approx(0.0));
}

TEST_CASE("structure residual vanishes at second order on the exact solution") {
  const auto sol = exact_linear_solution(1.0, 1, 1.0);
  const FamilySpec spec = make_preset("linear-t2");

  auto max_resid = [&](int n) {
    const auto frames = linear_frames(sol, spec, n, n, 0.0, 1.0, 0.0, 0.5);
    return structure_residual(frames).max_abs;
  };
  const double r1 = max_resid(33);
  const double r2 = max_resid(65);
  CHECK(r1 < 1e-2);
  const double order = std::log2(r1 / r2);
  CHECK(order >= 1.9);
}

TEST_CASE("spectral-parameter frame closes on the kink as well") {
  // omega1 = (1/eta) sin u dt, omega2 = eta dx + (1/eta) cos u dt,
  // omega3 = u_x dx, along u = 4 arctan(e^{x+t}).
  const FrameBundle fb = build_frame(make_preset("sg-eta"));
  auto resid = [&](int n) {
    Field2D<FrameCoeffs> frames(n, n);
    frames.x0 = 0.2;
    frames.t0 = 0.1;
    frames.dx = frames.dt = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double X = frames.xval(i) + frames.tval(j);
        Jet jet;
        jet.x = frames.xval(i);
        jet.t = frames.tval(j);
        const double sech = 1.0 / std::cosh(X);
        jet.z = {4.0 * std::atan(std::exp(X)), 2.0 * sech};
        frames.at(i, j) = eval_frame(fb, jet);
      }
    return structure_residual(frames).max_abs;
  };
  const double r1 = resid(65), r2 = resid(129);
  CHECK(r1 < 1e-3);
  CHECK(std::log2(r1 / r2) >= 1.9);
}

TEST_CASE("random fields fail the structure equations by a wide margin") {
  const auto sol = exact_linear_solution(1.0, 1, 1.0);
  const FamilySpec spec = make_preset("linear-t2");
  const int n = 33;
  const auto good = linear_frames(sol, spec, n, n, 0.0, 1.0, 0.0, 0.5);
  const double good_resid = structure_residual(good).max_abs;

  // Same window, jets replaced by smooth-amplitude noise.
  const FrameBundle fb = build_frame(spec);
  Field2D<FrameCoeffs> bad(n, n);
  bad.x0 = good.x0;
  bad.t0 = good.t0;
  bad.dx = good.dx;
  bad.dt = good.dt;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Jet jet = make_jet({uni(rng), uni(rng), uni(rng), uni(rng)});
      bad.at(i, j) = eval_frame(fb, jet);
    }
  const double bad_resid = structure_residual(bad).max_abs;
  CHECK(bad_resid > 1e3 * good_resid);
}

TEST_CASE("nondegeneracy quantities and masking") {
  const FamilySpec spec = make_preset("linear-t2");
  const FrameCoeffs f = frame_coeffs(spec, make_jet({2, 0, 1}));
  const auto d = deltas(f);
  CHECK(d.d12 == doctest::Approx(-2.0));
  CHECK(d.d13 == doctest::Approx(0.0));
  CHECK(d.d23 == doctest::Approx(2.0));

  // A field crossing u = 0 masks exactly the near-zero column.
  const auto sol = exact_linear_solution(1.0, 1, 1.0);
  auto frames = linear_frames(sol, spec, 65, 9, 0.0, 2.0 * M_PI, 0.0, 0.1);
  const auto rep = nondegeneracy(frames, 1e-2);
  CHECK(rep.masked_count > 0);
  CHECK(rep.masked_count < 65 * 9 / 4);
  CHECK(!rep.pass);

  // Masking is monotone in the threshold and idempotent.
  const auto loose = nondegeneracy(frames, 1e-3);
  CHECK(loose.masked_count <= rep.masked_count);
  const auto again = nondegeneracy(frames, 1e-2);
  CHECK(again.masked_count == rep.masked_count);

  // omega1 == omega2 collapses the wedge: everything masked.
  Field2D<FrameCoeffs> degenerate(4, 4);
  FrameCoeffs eq;
  eq.f[0][0] = eq.f[1][0] = 1.0;
  eq.f[0][1] = eq.f[1][1] = 0.5;
  eq.f[2][0] = 0.3;
  eq.f[2][1] = 0.1;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) degenerate.at(i, j) = eq;
  const auto deg = nondegeneracy(degenerate, 1e-8);
  CHECK(deg.masked_count == 16);
  CHECK(deg.min_abs_delta12 == doctest::Approx(0.0));
}
