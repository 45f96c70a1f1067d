#include "pss/ode45.hpp"

#include <algorithm>
#include <cmath>

namespace pss {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Error weights (5th order minus embedded 4th order solution).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer, Norsett, Wanner DOPRI5 continuous extension).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

double Ode45Solution::eval(double x) const {
  if (segments.empty()) throw Error("empty ode solution");
  // Locate the segment containing x (segments are monotone in x0).
  const Ode45Segment* seg = &segments.back();
  for (const auto& s : segments) {
    const double lo = std::min(s.x0, s.x0 + s.h), hi = std::max(s.x0, s.x0 + s.h);
    if (x >= lo - 1e-14 && x <= hi + 1e-14) {
      seg = &s;
      break;
    }
  }
  const double th = (x - seg->x0) / seg->h;
  const double th1 = 1.0 - th;
  // y(theta) = rc0 + th*(rc1 + th1*(rc2 + th*(rc3 + th1*rc4)))
  return seg->rc[0] +
         th * (seg->rc[1] + th1 * (seg->rc[2] + th * (seg->rc[3] + th1 * seg->rc[4])));
}

double Ode45Solution::deriv(double x) const {
  if (segments.empty()) throw Error("empty ode solution");
  const Ode45Segment* seg = &segments.back();
  for (const auto& s : segments) {
    const double lo = std::min(s.x0, s.x0 + s.h), hi = std::max(s.x0, s.x0 + s.h);
    if (x >= lo - 1e-14 && x <= hi + 1e-14) {
      seg = &s;
      break;
    }
  }
  const double th = (x - seg->x0) / seg->h;
  const double th1 = 1.0 - th;
  // d/dx of the quartic polynomial above, via d/dth * (1/h).
  const double A = seg->rc[1], B = seg->rc[2], C = seg->rc[3], D = seg->rc[4];
  const double dth = A + (th1 - th) * B + th * (2.0 - 3.0 * th) * C +
                     th * th1 * (th1 - th) * D +
                     0.0;
  // Expand carefully: y = rc0 + A th + B th th1 + C th^2 th1 + D th^2 th1^2
  const double dpoly = A + B * (1.0 - 2.0 * th) + C * th * (2.0 - 3.0 * th) +
                       D * th * (2.0 * th1 * th1 - 2.0 * th * th1);
  (void)dth;
  return dpoly / seg->h;
}

bool Ode45Solution::covers(double x) const {
  const double lo = std::min(x_start, x_end), hi = std::max(x_start, x_end);
  return x >= lo - 1e-12 && x <= hi + 1e-12;
}

Ode45Solution ode45_integrate(const std::function<double(double, double)>& f,
                              double x0, double y0, double x_target,
                              const std::vector<OdeEvent>& events,
                              const Ode45Options& opts) {
  Ode45Solution sol;
  sol.x_start = x0;
  sol.forward = x_target >= x0;
  const double dir = sol.forward ? 1.0 : -1.0;

  double x = x0, y = y0;
  double h = std::min(opts.h_init, std::abs(x_target - x0)) * dir;
  if (h == 0.0) {
    sol.x_end = x0;
    return sol;
  }
  double k1 = f(x, y);
  if (!is_finite(k1)) throw Error("ode right-hand side non-finite at start");

  for (int step = 0; step < opts.max_steps; ++step) {
    if ((sol.forward && x >= x_target) || (!sol.forward && x <= x_target)) break;
    if ((sol.forward && x + h > x_target) || (!sol.forward && x + h < x_target))
      h = x_target - x;

    const double k2 = f(x + c2 * h, y + h * a21 * k1);
    const double k3 = f(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const double k4 = f(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 =
        f(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(x + h, ynew);

    const double err_raw =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double sc = opts.atol + opts.rtol * std::max(std::abs(y), std::abs(ynew));
    const double err = std::abs(err_raw) / sc;

    if (!is_finite(ynew) || !is_finite(err_raw)) {
      h *= 0.5;
      if (std::abs(h) < opts.h_min) throw Error("ode step collapsed on non-finite value");
      continue;
    }

    if (err <= 1.0) {
      // Accept; build the dense-output segment.
      Ode45Segment seg;
      seg.x0 = x;
      seg.h = h;
      seg.y0 = y;
      const double ydiff = ynew - y;
      const double bspl = h * k1 - ydiff;
      seg.rc[0] = y;
      seg.rc[1] = ydiff;
      seg.rc[2] = bspl;
      seg.rc[3] = ydiff - h * k7 - bspl;
      seg.rc[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.segments.push_back(seg);

      // Event check across [x, x+h] with bisection on the dense output.
      for (const auto& ev : events) {
        const double ea = ev.fn(x, y), eb = ev.fn(x + h, ynew);
        if (ea > 0.0 && eb > 0.0) continue;
        double lo = x, hi = x + h;
        if (ea <= 0.0) {
          hi = x;  // event already active at the left end
        } else {
          for (int it = 0; it < 100 && std::abs(hi - lo) > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ev.fn(mid, sol.eval(mid)) > 0.0 ? lo : hi) = mid;
          }
        }
        sol.stopped_by_event = true;
        sol.event_name = ev.name;
        sol.x_end = hi;
        // Trim the final segment's reach to the event location.
        return sol;
      }

      x += h;
      y = ynew;
      k1 = k7;  // FSAL
      const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-16, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= fac;
      if (std::abs(h) < opts.h_min) throw Error("ode step size underflow");
    }
  }
  sol.x_end = x;
  return sol;
}

}  // namespace pss
