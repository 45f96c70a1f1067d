#include "pss/jet_expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pss {

struct JetExpr::Node {
  enum class Op { kConst, kCoord, kAdd, kMul, kPow, kExp, kSin, kCos };
  enum class Coord { kX, kT, kZ, kZt0, kZt1 };

  Op op = Op::kConst;
  double cval = 0.0;
  Coord coord = Coord::kX;
  int zindex = 0;
  int ipow = 1;
  std::vector<JetExpr> kids;
};

using Node = JetExpr::Node;
using Op = Node::Op;
using Coord = Node::Coord;

namespace {

JetExpr wrap(std::shared_ptr<const Node> n) { return JetExpr(std::move(n)); }

const std::shared_ptr<const Node>& node_of(const JetExpr& e) { return e.node(); }

JetExpr make_const(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->cval = c;
  return wrap(n);
}

JetExpr make_coord(Coord c, int zindex = 0) {
  auto n = std::make_shared<Node>();
  n->op = Op::kCoord;
  n->coord = c;
  n->zindex = zindex;
  return wrap(n);
}

JetExpr make_add(std::vector<JetExpr> kids) {
  std::vector<JetExpr> flat;
  double c = 0.0;
  for (auto& k : kids) {
    const auto n = node_of(k);
    if (n->op == Op::kConst) {
      c += n->cval;
    } else if (n->op == Op::kAdd) {
      for (const auto& kk : n->kids) flat.push_back(kk);
    } else {
      flat.push_back(k);
    }
  }
  if (c != 0.0) flat.push_back(make_const(c));
  if (flat.empty()) return make_const(0.0);
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<Node>();
  n->op = Op::kAdd;
  n->kids = std::move(flat);
  return wrap(n);
}

JetExpr make_mul(std::vector<JetExpr> kids) {
  std::vector<JetExpr> flat;
  double c = 1.0;
  for (auto& k : kids) {
    const auto n = node_of(k);
    if (n->op == Op::kConst) {
      c *= n->cval;
    } else if (n->op == Op::kMul) {
      for (const auto& kk : n->kids) flat.push_back(kk);
    } else {
      flat.push_back(k);
    }
  }
  if (c == 0.0) return make_const(0.0);
  if (flat.empty()) return make_const(c);
  if (c != 1.0) flat.insert(flat.begin(), make_const(c));
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<Node>();
  n->op = Op::kMul;
  n->kids = std::move(flat);
  return wrap(n);
}

JetExpr make_unary(Op op, JetExpr arg) {
  const auto n = node_of(arg);
  if (n->op == Op::kConst) {
    switch (op) {
      case Op::kExp: return make_const(std::exp(n->cval));
      case Op::kSin: return make_const(std::sin(n->cval));
      case Op::kCos: return make_const(std::cos(n->cval));
      default: break;
    }
  }
  auto m = std::make_shared<Node>();
  m->op = op;
  m->kids = {std::move(arg)};
  return wrap(m);
}

JetExpr make_pow(JetExpr base, int p) {
  if (p == 0) return make_const(1.0);
  if (p == 1) return base;
  const auto n = node_of(base);
  if (n->op == Op::kConst) return make_const(std::pow(n->cval, p));
  auto m = std::make_shared<Node>();
  m->op = Op::kPow;
  m->ipow = p;
  m->kids = {std::move(base)};
  return wrap(m);
}

}  // namespace

JetExpr::JetExpr(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->cval = c;
  node_ = std::move(n);
}

JetExpr JetExpr::x() { return make_coord(Coord::kX); }
JetExpr JetExpr::t() { return make_coord(Coord::kT); }
JetExpr JetExpr::z(int i) {
  if (i < 0) throw Error("negative jet index");
  return make_coord(Coord::kZ, i);
}
JetExpr JetExpr::zt0() { return make_coord(Coord::kZt0); }
JetExpr JetExpr::zt1() { return make_coord(Coord::kZt1); }

double JetExpr::eval(const Jet& jet) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::kConst: return n.cval;
    case Op::kCoord:
      switch (n.coord) {
        case Coord::kX: return jet.x;
        case Coord::kT: return jet.t;
        case Coord::kZ: return jet.zval(n.zindex);
        case Coord::kZt0: return jet.zt0val();
        case Coord::kZt1: return jet.zt1val();
      }
      break;
    case Op::kAdd: {
      double s = 0.0;
      for (const auto& k : n.kids) s += k.eval(jet);
      return s;
    }
    case Op::kMul: {
      double p = 1.0;
      for (const auto& k : n.kids) p *= k.eval(jet);
      return p;
    }
    case Op::kPow: {
      const double b = n.kids[0].eval(jet);
      if (n.ipow < 0 && b == 0.0)
        throw FunctionEvalError("division by zero in jet expression");
      return std::pow(b, n.ipow);
    }
    case Op::kExp: return std::exp(n.kids[0].eval(jet));
    case Op::kSin: return std::sin(n.kids[0].eval(jet));
    case Op::kCos: return std::cos(n.kids[0].eval(jet));
  }
  throw Error("corrupt jet expression");
}

namespace {
// Generic derivative: dcoord(node) must return the derivative of a bare
// coordinate node.
JetExpr derive(const JetExpr& e, const std::function<JetExpr(const Node&)>& dcoord) {
  const auto n = node_of(e);
  switch (n->op) {
    case Op::kConst: return JetExpr(0.0);
    case Op::kCoord: return dcoord(*n);
    case Op::kAdd: {
      std::vector<JetExpr> kids;
      kids.reserve(n->kids.size());
      for (const auto& k : n->kids) kids.push_back(derive(k, dcoord));
      return make_add(std::move(kids));
    }
    case Op::kMul: {
      std::vector<JetExpr> terms;
      for (std::size_t i = 0; i < n->kids.size(); ++i) {
        std::vector<JetExpr> factors;
        for (std::size_t j = 0; j < n->kids.size(); ++j)
          factors.push_back(i == j ? derive(n->kids[j], dcoord) : n->kids[j]);
        terms.push_back(make_mul(std::move(factors)));
      }
      return make_add(std::move(terms));
    }
    case Op::kPow: {
      const JetExpr& b = n->kids[0];
      return make_mul({JetExpr(static_cast<double>(n->ipow)),
                       make_pow(b, n->ipow - 1), derive(b, dcoord)});
    }
    case Op::kExp:
      return make_mul({make_unary(Op::kExp, n->kids[0]), derive(n->kids[0], dcoord)});
    case Op::kSin:
      return make_mul({make_unary(Op::kCos, n->kids[0]), derive(n->kids[0], dcoord)});
    case Op::kCos:
      return make_mul({JetExpr(-1.0), make_unary(Op::kSin, n->kids[0]),
                       derive(n->kids[0], dcoord)});
  }
  throw Error("corrupt jet expression");
}
}  // namespace

JetExpr JetExpr::diff_z(int i) const {
  return derive(*this, [i](const Node& n) -> JetExpr {
    return (n.coord == Coord::kZ && n.zindex == i) ? JetExpr(1.0) : JetExpr(0.0);
  });
}

JetExpr JetExpr::diff_x() const {
  return derive(*this, [](const Node& n) -> JetExpr {
    return n.coord == Coord::kX ? JetExpr(1.0) : JetExpr(0.0);
  });
}

JetExpr JetExpr::diff_t() const {
  return derive(*this, [](const Node& n) -> JetExpr {
    return n.coord == Coord::kT ? JetExpr(1.0) : JetExpr(0.0);
  });
}

JetExpr JetExpr::total_x() const {
  return derive(*this, [](const Node& n) -> JetExpr {
    switch (n.coord) {
      case Coord::kX: return JetExpr(1.0);
      case Coord::kT: return JetExpr(0.0);
      case Coord::kZ: return JetExpr::z(n.zindex + 1);
      case Coord::kZt0: return JetExpr::zt1();
      case Coord::kZt1:
        throw MissingJetOrder("total x-derivative of z_{1,t} leaves runtime jet coordinates");
    }
    throw Error("corrupt jet expression");
  });
}

int JetExpr::max_z_index() const {
  const Node& n = *node_;
  if (n.op == Op::kCoord) return n.coord == Coord::kZ ? n.zindex : -1;
  int m = -1;
  for (const auto& k : n.kids) m = std::max(m, k.max_z_index());
  return m;
}

bool JetExpr::uses_zt() const {
  const Node& n = *node_;
  if (n.op == Op::kCoord) return n.coord == Coord::kZt0 || n.coord == Coord::kZt1;
  for (const auto& k : n.kids)
    if (k.uses_zt()) return true;
  return false;
}

bool JetExpr::is_zero() const {
  return node_->op == Op::kConst && node_->cval == 0.0;
}

bool JetExpr::is_const(double* out) const {
  if (node_->op != Op::kConst) return false;
  if (out) *out = node_->cval;
  return true;
}

std::string JetExpr::to_string() const {
  const Node& n = *node_;
  std::ostringstream os;
  switch (n.op) {
    case Op::kConst: os << n.cval; break;
    case Op::kCoord:
      switch (n.coord) {
        case Coord::kX: os << "x"; break;
        case Coord::kT: os << "t"; break;
        case Coord::kZ: os << "z" << n.zindex; break;
        case Coord::kZt0: os << "zt0"; break;
        case Coord::kZt1: os << "zt1"; break;
      }
      break;
    case Op::kAdd: {
      os << "(";
      for (std::size_t i = 0; i < n.kids.size(); ++i)
        os << (i ? " + " : "") << n.kids[i].to_string();
      os << ")";
      break;
    }
    case Op::kMul: {
      os << "(";
      for (std::size_t i = 0; i < n.kids.size(); ++i)
        os << (i ? "*" : "") << n.kids[i].to_string();
      os << ")";
      break;
    }
    case Op::kPow: os << n.kids[0].to_string() << "^" << n.ipow; break;
    case Op::kExp: os << "exp(" << n.kids[0].to_string() << ")"; break;
    case Op::kSin: os << "sin(" << n.kids[0].to_string() << ")"; break;
    case Op::kCos: os << "cos(" << n.kids[0].to_string() << ")"; break;
  }
  return os.str();
}

JetFnPtr JetExpr::as_function() const {
  return std::make_shared<JetExprFunction>(*this);
}

JetExpr operator+(const JetExpr& a, const JetExpr& b) { return make_add({a, b}); }
JetExpr operator-(const JetExpr& a, const JetExpr& b) {
  return make_add({a, make_mul({JetExpr(-1.0), b})});
}
JetExpr operator*(const JetExpr& a, const JetExpr& b) { return make_mul({a, b}); }
JetExpr operator/(const JetExpr& a, const JetExpr& b) {
  double c;
  if (b.is_const(&c)) {
    if (c == 0.0) throw Error("division by zero constant in jet expression");
    return make_mul({a, JetExpr(1.0 / c)});
  }
  return make_mul({a, make_pow(b, -1)});
}
JetExpr operator-(const JetExpr& a) { return make_mul({JetExpr(-1.0), a}); }

JetExpr JetExpr::pow(const JetExpr& base, int n) { return make_pow(base, n); }
JetExpr JetExpr::exp(const JetExpr& arg) { return make_unary(Op::kExp, arg); }
JetExpr JetExpr::sin(const JetExpr& arg) { return make_unary(Op::kSin, arg); }
JetExpr JetExpr::cos(const JetExpr& arg) { return make_unary(Op::kCos, arg); }

JetExprFunction::JetExprFunction(JetExpr expr)
    : expr_(std::move(expr)),
      dx_(expr_.diff_x()),
      dt_(expr_.diff_t()),
      max_z_(expr_.max_z_index()) {
  dz_.reserve(static_cast<std::size_t>(max_z_ + 1));
  for (int i = 0; i <= max_z_; ++i) dz_.push_back(expr_.diff_z(i));
}

double JetExprFunction::dz(int i, const Jet& jet) const {
  if (i < 0) throw Error("negative jet index");
  if (i > max_z_) return 0.0;
  return dz_[static_cast<std::size_t>(i)].eval(jet);
}

double JetExprFunction::dzz(int i, int k, const Jet& jet) const {
  if (i > max_z_ || k > max_z_) return 0.0;
  return dz_[static_cast<std::size_t>(i)].diff_z(k).eval(jet);
}

JetFnPtr JetExprFunction::exact_derivative_x() const {
  return std::make_shared<JetExprFunction>(expr_.total_x());
}

}  // namespace pss
