#pragma once

#include <optional>
#include <vector>

#include "pss/common.hpp"

namespace pss {

// A point in jet space: spatial derivatives z_i = d^i u / dx^i plus the two
// time-derivative coordinates z_{0,t}, z_{1,t} that close the prolongation
// formulas. Higher mixed derivatives are never runtime fields.
struct Jet {
  double x = 0.0;
  double t = 0.0;
  std::vector<double> z;             // z[0..L]
  std::optional<double> zt0;         // z_{0,t}
  std::optional<double> zt1;         // z_{1,t}

  int order() const { return static_cast<int>(z.size()) - 1; }

  double zval(int i) const {
    if (i < 0 || i >= static_cast<int>(z.size())) {
      throw MissingJetOrder("jet carries z0..z" + std::to_string(order()) +
                            ", z" + std::to_string(i) + " requested");
    }
    return z[static_cast<std::size_t>(i)];
  }

  double zt0val() const {
    if (!zt0) throw MissingTimeJet("jet has no z_{0,t}");
    return *zt0;
  }
  double zt1val() const {
    if (!zt1) throw MissingTimeJet("jet has no z_{1,t}");
    return *zt1;
  }

  void check_finite() const {
    auto bad = [](double v) { return !is_finite(v); };
    if (bad(x) || bad(t)) throw Error("jet has non-finite coordinates");
    for (double v : z)
      if (bad(v)) throw Error("jet has non-finite z entry");
    if ((zt0 && bad(*zt0)) || (zt1 && bad(*zt1)))
      throw Error("jet has non-finite time-derivative entry");
  }
};

inline Jet make_jet(std::vector<double> z, double x = 0.0, double t = 0.0) {
  Jet j;
  j.x = x;
  j.t = t;
  j.z = std::move(z);
  return j;
}

}  // namespace pss
