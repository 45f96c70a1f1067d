#include "pss/jetspace.hpp"

#include <algorithm>
#include <cmath>

namespace pss {

double total_derivative_x(const ScalarJetFunction& fn, const Jet& jet) {
  double acc = fn.dx(jet);
  const int top = fn.max_z_index();
  if (top + 1 > jet.order())
    throw MissingJetOrder("total_derivative_x needs z" + std::to_string(top + 1));
  for (int i = 0; i <= top; ++i) acc += fn.dz(i, jet) * jet.zval(i + 1);
  return acc;
}

double total_derivative_t(const ScalarJetFunction& fn, const Jet& jet,
                          const std::vector<double>& zt) {
  double acc = fn.dt(jet);
  const int top = fn.max_z_index();
  if (top >= static_cast<int>(zt.size()))
    throw MissingTimeJet("total_derivative_t needs z_{" + std::to_string(top) +
                         ",t}");
  for (int i = 0; i <= top; ++i) acc += fn.dz(i, jet) * zt[static_cast<std::size_t>(i)];
  return acc;
}

std::vector<double> prolong(const ScalarJetFunction& F, const Jet& jet,
                            double z0t, double z1t, int up_to) {
  // Non-owning view so the derivative chain can hold it.
  auto view = std::shared_ptr<const ScalarJetFunction>(&F, [](const ScalarJetFunction*) {});
  return prolong(view, jet, z0t, z1t, up_to);
}

std::vector<double> prolong(const JetFnPtr& F, const Jet& jet, double z0t,
                            double z1t, int up_to) {
  if (up_to < 0) throw Error("prolong: up_to must be non-negative");
  if (up_to > kProlongCap)
    throw CapExceeded("prolong: up_to capped at " + std::to_string(kProlongCap));
  std::vector<double> zt;
  zt.reserve(static_cast<std::size_t>(up_to) + 1);
  zt.push_back(z0t);
  if (up_to >= 1) zt.push_back(z1t);

  // Running sums of even/odd total-derivative chains of F.
  double even_sum = 0.0, odd_sum = 0.0;
  JetFnPtr dk = F;  // D_x^k F, k starting at 0
  for (int i = 2; i <= up_to; ++i) {
    const int k = i - 2;  // the chain index consumed at order i
    if (k > 0) dk = total_x_derivative_fn(dk);
    const double val = dk->value(jet);
    if (i % 2 == 0) {
      even_sum += val;
      zt.push_back(z0t - even_sum);
    } else {
      odd_sum += val;
      zt.push_back(z1t - odd_sum);
    }
  }
  return zt;
}

namespace {

// Periodic index helper.
inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

double centered(const std::vector<double>& u, int i, int n, double h, int deriv,
                Stencil st) {
  auto v = [&](int off) { return u[static_cast<std::size_t>(wrap(i + off, n))]; };
  if (st == Stencil::kOrder2) {
    switch (deriv) {
      case 1: return (v(1) - v(-1)) / (2 * h);
      case 2: return (v(1) - 2 * v(0) + v(-1)) / (h * h);
      case 3: return (v(2) - 2 * v(1) + 2 * v(-1) - v(-2)) / (2 * h * h * h);
      case 4: return (v(2) - 4 * v(1) + 6 * v(0) - 4 * v(-1) + v(-2)) / (h * h * h * h);
      default: break;
    }
  } else {
    switch (deriv) {
      case 1: return (-v(2) + 8 * v(1) - 8 * v(-1) + v(-2)) / (12 * h);
      case 2: return (-v(2) + 16 * v(1) - 30 * v(0) + 16 * v(-1) - v(-2)) / (12 * h * h);
      case 3:
        return (-v(3) + 8 * v(2) - 13 * v(1) + 13 * v(-1) - 8 * v(-2) + v(-3)) /
               (8 * h * h * h);
      case 4:
        return (-v(3) + 12 * v(2) - 39 * v(1) + 56 * v(0) - 39 * v(-1) +
                12 * v(-2) - v(-3)) / (6 * h * h * h * h);
      default: break;
    }
  }
  throw Error("unsupported derivative order");
}

// A periodic sample of a smooth periodic function has no outsized jump across
// the seam; data like u(x) = x does. Flag it rather than silently wrapping.
void check_seam(const std::vector<double>& u) {
  const int n = static_cast<int>(u.size());
  double interior = 0.0;
  for (int i = 0; i + 1 < n; ++i) interior = std::max(interior, std::abs(u[i + 1] - u[i]));
  const double seam = std::abs(u[0] - u[n - 1]);
  double scale = 0.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  if (seam > 20.0 * interior + 1e-12 * (1.0 + scale))
    throw Error("periodicity violated: seam jump exceeds interior increments");
}

}  // namespace

JetGrid extract_jets(const SolutionField& u, int order, Stencil stencil) {
  u.grid.check();
  if (order < 1 || order > 4) throw Error("extract_jets supports orders 1..4");
  const int n = u.grid.n;
  const int halo = stencil == Stencil::kOrder2 ? 2 : 3;
  if (n < 2 * (stencil == Stencil::kOrder2 ? 2 : 4) + 1)
    throw GridTooSmall("extract_jets: grid too small for the stencil");
  const int nt = u.snapshots();
  if (nt < 1) throw GridTooSmall("extract_jets: no snapshots");
  (void)halo;

  for (const auto& row : u.values) {
    if (static_cast<int>(row.size()) != n) throw Error("snapshot size mismatch");
    check_seam(row);
  }

  JetGrid out;
  out.jets = Field2D<Jet>(n, nt);
  out.jets.x0 = 0.0;
  out.jets.dx = u.grid.dx();
  out.jets.t0 = nt > 0 ? u.times.front() : 0.0;
  out.jets.dt = nt > 1 ? u.times[1] - u.times[0] : 0.0;
  out.time_boundary.assign(static_cast<std::size_t>(nt), false);

  const double h = u.grid.dx();
  for (int jt = 0; jt < nt; ++jt) {
    const auto& row = u.values[static_cast<std::size_t>(jt)];
    const bool lo = jt == 0, hi = jt == nt - 1;
    out.time_boundary[static_cast<std::size_t>(jt)] = (lo || hi) && nt > 1;
    for (int i = 0; i < n; ++i) {
      Jet& j = out.jets.at(i, jt);
      j.x = u.grid.xval(i);
      j.t = u.times[static_cast<std::size_t>(jt)];
      j.z.resize(static_cast<std::size_t>(order) + 1);
      j.z[0] = row[static_cast<std::size_t>(i)];
      for (int d = 1; d <= order; ++d)
        j.z[static_cast<std::size_t>(d)] = centered(row, i, n, h, d, stencil);
      if (nt > 1) {
        const auto& prev = u.values[static_cast<std::size_t>(lo ? jt : jt - 1)];
        const auto& next = u.values[static_cast<std::size_t>(hi ? jt : jt + 1)];
        const double dt_lo = lo ? 0.0 : u.times[jt] - u.times[jt - 1];
        const double dt_hi = hi ? 0.0 : u.times[jt + 1] - u.times[jt];
        const double span = dt_lo + dt_hi;
        auto ddt = [&](auto&& get) {
          return (get(next) - get(prev)) / span;
        };
        j.zt0 = ddt([&](const std::vector<double>& r) { return r[static_cast<std::size_t>(i)]; });
        j.zt1 = ddt([&](const std::vector<double>& r) {
          return centered(r, i, n, h, 1, stencil);
        });
      }
    }
  }
  return out;
}

}  // namespace pss
