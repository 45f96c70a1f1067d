#include "pss/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pss/secondform.hpp"

namespace pss {

namespace {

// Scaled residual accumulator: keeps max |r| / (1 + scale) and the offender.
struct Acc {
  double worst = 0.0;
  Jet where;
  void feed(double r, double scale, const Jet& jet) {
    const double s = std::abs(r) / (1.0 + scale);
    if (s >= worst) {
      worst = s;
      where = jet;
    }
  }
};

struct MinAcc {
  double best = std::numeric_limits<double>::infinity();
  Jet where;
  void feed(double v, const Jet& jet) {
    if (std::abs(v) <= best) {
      best = std::abs(v);
      where = jet;
    }
  }
};

// Evaluated frame data at one jet, with partials in the requested mode.
struct FramePoint {
  double f[3][2];
  double df[3][2][4];   // d f_ij / d z_s, s = 0..3
  double G = 0.0;
};

FramePoint eval_point(const FrameBundle& fb,
                      const std::vector<std::vector<JetExpr>>& dexpr,
                      PartialMode mode, const Jet& jet) {
  FramePoint p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) p.f[i][j] = fb.f[i][j].eval(jet);
  p.G = fb.G.eval(jet);
  if (mode == PartialMode::kAnalytic) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j)
        for (int s = 0; s < 4; ++s)
          p.df[i][j][s] = dexpr[static_cast<std::size_t>(i * 2 + j)][static_cast<std::size_t>(s)].eval(jet);
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j)
        for (int s = 0; s < 4; ++s) {
          const double h = fd_step(jet.zval(s));
          Jet jp = jet, jm = jet;
          jp.z[static_cast<std::size_t>(s)] += h;
          jm.z[static_cast<std::size_t>(s)] -= h;
          p.df[i][j][s] = (fb.f[i][j].eval(jp) - fb.f[i][j].eval(jm)) / (2.0 * h);
        }
  }
  return p;
}

}  // namespace

ResidualReport theorem1_conditions(const FamilySpec& spec, int n_samples,
                                   const JetBox& box, double tol,
                                   PartialMode mode, std::uint64_t seed,
                                   double ineq_floor) {
  if (std::holds_alternative<ExplicitFrame>(spec))
    throw UnsupportedForExplicitFrame(
        "the characterization identities apply to catalog branches only");
  const FrameBundle fb = build_frame(spec);
  const double lam = fb.lambda;

  std::vector<std::vector<JetExpr>> dexpr(6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      auto& v = dexpr[static_cast<std::size_t>(i * 2 + j)];
      for (int s = 0; s < 4; ++s) v.push_back(fb.f[i][j].diff_z(s));
    }

  // Sample jets first so sweeps can run in parallel deterministically.
  HaltonSampler sampler(4, seed);
  std::vector<Jet> jets(static_cast<std::size_t>(n_samples));
  for (auto& j : jets) {
    auto u = sampler.next();
    j = make_jet({0, 0, 0, 0});
    for (int d = 0; d < 4; ++d)
      j.z[static_cast<std::size_t>(d)] = box.lo + (box.hi - box.lo) * u[static_cast<std::size_t>(d)];
  }

  std::vector<FramePoint> pts(jets.size());
  parallel_for(jets.size(), [&](std::size_t k) {
    pts[k] = eval_point(fb, dexpr, mode, jets[k]);
  });

  MinAcc f11z0_min, ineq_min;
  Acc sum_z0z2, f11_z1, f11_z3, phi_zs[3], eq73, eq74, eq75[2];

  for (std::size_t k = 0; k < jets.size(); ++k) {
    const Jet& jet = jets[k];
    const FramePoint& p = pts[k];
    const double z1 = jet.zval(1), z2 = jet.zval(2), z0 = jet.zval(0);

    f11z0_min.feed(p.df[0][0][0], jet);
    sum_z0z2.feed(p.df[0][0][0] + p.df[0][0][2], std::abs(p.df[0][0][0]), jet);
    f11_z1.feed(p.df[0][0][1], std::abs(p.f[0][0]), jet);
    f11_z3.feed(p.df[0][0][3], std::abs(p.f[0][0]), jet);

    // phi_i2 = f_i2 + lambda z0 f_i1 must be independent of z2 and z3.
    double phi[3];
    for (int i = 0; i < 3; ++i) {
      phi[i] = p.f[i][1] + lam * z0 * p.f[i][0];
      const double dz2 = p.df[i][1][2] + lam * z0 * p.df[i][0][2];
      const double dz3 = p.df[i][1][3] + lam * z0 * p.df[i][0][3];
      const double scale = std::abs(phi[i]);
      phi_zs[i].feed(std::abs(dz2) > std::abs(dz3) ? dz2 : dz3, scale, jet);
    }

    const double mu2 = fb.mu2, eta2 = fb.eta2, mu3 = fb.mu3, eta3 = fb.eta3;
    const double f11 = p.f[0][0];

    auto sum12 = [&](int i) { return z1 * p.df[i][1][0] + z2 * p.df[i][1][1]; };

    {
      const double t1 = -p.df[0][0][0] * p.G;
      const double t2 = sum12(0);
      const double t3 = (mu2 * phi[2] - mu3 * phi[1]) * f11;
      const double t4 = eta2 * phi[2] - eta3 * phi[1];
      eq73.feed(t1 + t2 + t3 + t4,
                std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)}), jet);
    }
    {
      const double t1 = -mu2 * p.df[0][0][0] * p.G;
      const double t2 = sum12(1);
      const double t3 = -(phi[2] - mu3 * phi[0]) * f11;
      const double t4 = eta3 * phi[0];
      eq74.feed(t1 + t2 + t3 + t4,
                std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)}), jet);
    }
    for (int di = 0; di < 2; ++di) {
      const double delta = di == 0 ? 1.0 : -1.0;
      const double t1 = -mu3 * p.df[0][0][0] * p.G;
      const double t2 = sum12(2);
      const double t3 = -(phi[1] - mu2 * phi[0]) * f11;
      const double t4 = delta * eta2 * phi[0];
      eq75[di].feed(t1 + t2 + t3 + t4,
                    std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)}), jet);
    }
    ineq_min.feed((phi[1] - mu2 * phi[0]) * f11 - eta2 * phi[0], jet);
  }

  ResidualReport rep;
  const int delta_best = eq75[0].worst <= eq75[1].worst ? 0 : 1;
  rep.delta = delta_best == 0 ? +1 : -1;

  auto push = [&](const std::string& name, const Acc& a) {
    rep.rows.push_back({name, a.worst, false, n_samples, a.where, a.worst < tol});
  };
  auto push_min = [&](const std::string& name, const MinAcc& a) {
    rep.rows.push_back({name, a.best, true, n_samples, a.where, a.best > ineq_floor});
  };

  push_min("f11_z0 nonzero", f11z0_min);
  push("f11_z0 + f11_z2", sum_z0z2);
  push("f11_z1", f11_z1);
  push("f11_z3", f11_z3);
  push("phi12 indep z2,z3", phi_zs[0]);
  push("phi22 indep z2,z3", phi_zs[1]);
  push("phi32 indep z2,z3", phi_zs[2]);
  push("identity (7.3)", eq73);
  push("identity (7.4)", eq74);
  push("identity (7.5)", eq75[delta_best]);
  push_min("inequality (7.5.1) nonzero", ineq_min);

  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                         [](const ResidualRow& r) { return r.pass; });
  return rep;
}

std::string ResidualReport::to_csv() const {
  std::ostringstream os;
  os << "identity,max_residual,n_samples,pass\n";
  os.precision(17);
  for (const auto& r : rows)
    os << '"' << r.identity << '"' << ',' << r.residual << ',' << r.n_samples
       << ',' << (r.pass ? 1 : 0) << '\n';
  return os.str();
}

StructureResidual structure_residual(const Field2D<FrameCoeffs>& frames) {
  const int nx = frames.nx(), nt = frames.nt();
  if (nx < 3 || nt < 3) throw GridTooSmall("structure residual needs a 3x3 grid");
  StructureResidual out;
  out.r1 = Field2D<double>(nx, nt, 0.0);
  out.r2 = Field2D<double>(nx, nt, 0.0);
  out.r3 = Field2D<double>(nx, nt, 0.0);
  out.r1.x0 = out.r2.x0 = out.r3.x0 = frames.x0;
  out.r1.t0 = out.r2.t0 = out.r3.t0 = frames.t0;
  out.r1.dx = out.r2.dx = out.r3.dx = frames.dx;
  out.r1.dt = out.r2.dt = out.r3.dt = frames.dt;

  const double twodx = 2.0 * frames.dx, twodt = 2.0 * frames.dt;
  for (int j = 1; j + 1 < nt; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      const FrameCoeffs& c = frames.at(i, j);
      const auto d = deltas(c);
      auto Dx = [&](int r, int s) {
        return (frames.at(i + 1, j).f[r][s] - frames.at(i - 1, j).f[r][s]) / twodx;
      };
      auto Dt = [&](int r, int s) {
        return (frames.at(i, j + 1).f[r][s] - frames.at(i, j - 1).f[r][s]) / twodt;
      };
      const double r1 = Dx(0, 1) - Dt(0, 0) + d.d23;
      const double r2 = Dx(1, 1) - Dt(1, 0) - d.d13;
      const double r3 = Dx(2, 1) - Dt(2, 0) - d.d12;
      out.r1.at(i, j) = r1;
      out.r2.at(i, j) = r2;
      out.r3.at(i, j) = r3;
      out.max_abs = std::max({out.max_abs, std::abs(r1), std::abs(r2), std::abs(r3)});
    }
  }
  return out;
}

NondegeneracyReport nondegeneracy(const Field2D<FrameCoeffs>& frames,
                                  double threshold) {
  const int nx = frames.nx(), nt = frames.nt();
  NondegeneracyReport rep;
  rep.mask = Mask2D(nx, nt, 0);
  rep.mask.x0 = frames.x0;
  rep.mask.t0 = frames.t0;
  rep.mask.dx = frames.dx;
  rep.mask.dt = frames.dt;
  rep.min_abs_delta12 = std::numeric_limits<double>::infinity();
  rep.min_delta13sq_plus_delta23sq = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto d = deltas(frames.at(i, j));
      const double wedge = std::abs(d.d12);
      const double normal = d.d13 * d.d13 + d.d23 * d.d23;
      rep.min_abs_delta12 = std::min(rep.min_abs_delta12, wedge);
      rep.min_delta13sq_plus_delta23sq =
          std::min(rep.min_delta13sq_plus_delta23sq, normal);
      if (wedge < threshold || normal < threshold * threshold) {
        rep.mask.at(i, j) = 1;
        ++rep.masked_count;
      }
    }
  rep.pass = rep.masked_count == 0;
  return rep;
}

}  // namespace pss
