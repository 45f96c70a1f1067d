#include "pss/jet_function.hpp"

namespace pss {

namespace {
Jet shifted(const Jet& jet, int i, double delta) {
  Jet j = jet;
  if (i >= static_cast<int>(j.z.size()))
    throw MissingJetOrder("finite-difference partial needs z" + std::to_string(i));
  j.z[static_cast<std::size_t>(i)] += delta;
  return j;
}
}  // namespace

double ScalarJetFunction::dz(int i, const Jet& jet) const {
  if (i > max_z_index()) return 0.0;
  const double h = fd_step(jet.zval(i));
  return (value(shifted(jet, i, h)) - value(shifted(jet, i, -h))) / (2.0 * h);
}

double ScalarJetFunction::dzz(int i, int k, const Jet& jet) const {
  if (i > max_z_index() || k > max_z_index()) return 0.0;
  if (i == k) {
    const double h = fd_step(jet.zval(i));
    return (value(shifted(jet, i, h)) - 2.0 * value(jet) +
            value(shifted(jet, i, -h))) / (h * h);
  }
  const double hi = fd_step(jet.zval(i));
  const double hk = fd_step(jet.zval(k));
  const double pp = value(shifted(shifted(jet, i, hi), k, hk));
  const double pm = value(shifted(shifted(jet, i, hi), k, -hk));
  const double mp = value(shifted(shifted(jet, i, -hi), k, hk));
  const double mm = value(shifted(shifted(jet, i, -hi), k, -hk));
  return (pp - pm - mp + mm) / (4.0 * hi * hk);
}

double ScalarJetFunction::dx(const Jet& jet) const {
  const double h = fd_step(jet.x);
  Jet p = jet, m = jet;
  p.x += h;
  m.x -= h;
  return (value(p) - value(m)) / (2.0 * h);
}

double ScalarJetFunction::dt(const Jet& jet) const {
  const double h = fd_step(jet.t);
  Jet p = jet, m = jet;
  p.t += h;
  m.t -= h;
  return (value(p) - value(m)) / (2.0 * h);
}

double TotalXDerivativeFunction::value(const Jet& jet) const {
  double acc = inner_->dx(jet);
  const int top = inner_->max_z_index();
  for (int i = 0; i <= top; ++i) {
    jet.zval(i + 1);  // precondition: one order above what inner uses
    acc += inner_->dz(i, jet) * jet.zval(i + 1);
  }
  return acc;
}

}  // namespace pss
