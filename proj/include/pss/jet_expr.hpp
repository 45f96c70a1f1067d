#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pss/jet_function.hpp"

namespace pss {

// Closed-form expression over jet coordinates with exact differentiation.
// Node set: constants, coordinates (x, t, z_i, z_{0,t}, z_{1,t}), sums,
// products, integer powers, exp, sin, cos. This is exactly the closure the
// catalog frame coefficients and right-hand sides live in, so analytic
// partials and repeated total derivatives never fall back to differencing.
class JetExpr {
 public:
  JetExpr() : JetExpr(0.0) {}
  JetExpr(double c);  // NOLINT: implicit constant lift is the point

  static JetExpr x();
  static JetExpr t();
  static JetExpr z(int i);
  static JetExpr zt0();
  static JetExpr zt1();

  double eval(const Jet& jet) const;

  // Exact partial derivatives and total derivatives, as expressions.
  JetExpr diff_z(int i) const;
  JetExpr diff_x() const;   // partial w.r.t. the explicit x coordinate
  JetExpr diff_t() const;   // partial w.r.t. the explicit t coordinate
  JetExpr total_x() const;  // D_x: z_i -> z_{i+1}, zt0 -> zt1, x -> 1

  int max_z_index() const;
  bool uses_zt() const;
  bool is_zero() const;
  bool is_const(double* out = nullptr) const;

  std::string to_string() const;

  JetFnPtr as_function() const;

  friend JetExpr operator+(const JetExpr& a, const JetExpr& b);
  friend JetExpr operator-(const JetExpr& a, const JetExpr& b);
  friend JetExpr operator*(const JetExpr& a, const JetExpr& b);
  friend JetExpr operator/(const JetExpr& a, const JetExpr& b);
  friend JetExpr operator-(const JetExpr& a);

  static JetExpr pow(const JetExpr& base, int n);
  static JetExpr exp(const JetExpr& arg);
  static JetExpr sin(const JetExpr& arg);
  static JetExpr cos(const JetExpr& arg);

  // Internal representation; exposed for the implementation file only.
  struct Node;
  explicit JetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

class JetExprFunction final : public ScalarJetFunction {
 public:
  explicit JetExprFunction(JetExpr expr);

  double value(const Jet& jet) const override { return expr_.eval(jet); }
  int max_z_index() const override { return max_z_; }
  bool analytic() const override { return true; }
  double dz(int i, const Jet& jet) const override;
  double dzz(int i, int k, const Jet& jet) const override;
  double dx(const Jet& jet) const override { return dx_.eval(jet); }
  double dt(const Jet& jet) const override { return dt_.eval(jet); }
  JetFnPtr exact_derivative_x() const override;

  const JetExpr& expr() const { return expr_; }

 private:
  JetExpr expr_;
  JetExpr dx_, dt_;
  mutable std::vector<JetExpr> dz_;    // cached first partials per z-index
  int max_z_;
};

}  // namespace pss
