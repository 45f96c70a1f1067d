#pragma once

#include <functional>
#include <memory>

#include "pss/jet.hpp"

namespace pss {

// Default relative finite-difference step and absolute floor.
inline constexpr double kFdStepRel = 1e-5;
inline constexpr double kFdStepAbs = 1e-8;

inline double fd_step(double at) {
  double h = kFdStepRel * (1.0 + std::abs(at));
  return h < kFdStepAbs ? kFdStepAbs : h;
}

// Scalar function on jet space. Implementations either supply analytic
// partials (analytic() == true) or inherit the central finite-difference
// fallbacks below.
class ScalarJetFunction {
 public:
  virtual ~ScalarJetFunction() = default;

  virtual double value(const Jet& jet) const = 0;

  // Highest z-index the function reads; -1 for jet-independent functions.
  virtual int max_z_index() const = 0;

  virtual bool analytic() const { return false; }

  // First and second partials w.r.t. z_i (central differences by default).
  virtual double dz(int i, const Jet& jet) const;
  virtual double dzz(int i, int k, const Jet& jet) const;

  // Explicit coordinate dependence.
  virtual double dx(const Jet& jet) const;
  virtual double dt(const Jet& jet) const;

  // Exact total-x-derivative closure, when the implementation has one.
  virtual std::shared_ptr<const ScalarJetFunction> exact_derivative_x() const {
    return nullptr;
  }
};

using JetFnPtr = std::shared_ptr<const ScalarJetFunction>;

// Wraps a plain callable; partials come from the FD fallback. Used in tests
// and anywhere a one-off numeric function is convenient.
class LambdaJetFunction final : public ScalarJetFunction {
 public:
  LambdaJetFunction(std::function<double(const Jet&)> fn, int max_z)
      : fn_(std::move(fn)), max_z_(max_z) {}

  double value(const Jet& jet) const override { return fn_(jet); }
  int max_z_index() const override { return max_z_; }

 private:
  std::function<double(const Jet&)> fn_;
  int max_z_;
};

// value = D_x inner, evaluated via the chain rule through inner's partials.
class TotalXDerivativeFunction final : public ScalarJetFunction {
 public:
  explicit TotalXDerivativeFunction(JetFnPtr inner) : inner_(std::move(inner)) {}

  double value(const Jet& jet) const override;
  int max_z_index() const override { return inner_->max_z_index() + 1; }

 private:
  JetFnPtr inner_;
};

// D_x as a jet function: exact when the implementation provides a closure,
// chain-rule-through-partials otherwise.
inline JetFnPtr total_x_derivative_fn(JetFnPtr fn) {
  if (auto exact = fn->exact_derivative_x()) return exact;
  return std::make_shared<TotalXDerivativeFunction>(std::move(fn));
}

}  // namespace pss
