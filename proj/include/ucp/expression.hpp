#pragma once

// Closed-form scalar expressions (boundary graphs, Lamé moduli, outer data,
// test functions). Evaluation is templated so the same tree yields values
// and exact Taylor jets.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ucp/error.hpp"
#include "ucp/taylor.hpp"

namespace ucp {

class Expression {
 public:
  enum class Op {
    Const, Var, Neg, Add, Sub, Mul, Div, PowInt, Pow,
    Sin, Cos, Tan, Exp, Log, Sqrt, Tanh, Atan, Sinh, Cosh, Abs, Bump, Bridge
  };

  struct Node {
    Op op;
    double value = 0.0;  // Const payload, or integer exponent for PowInt
    int var = -1;
    int lhs = -1;
    int rhs = -1;
  };

  Expression() = default;

  // variables: names in evaluation order; "x1"/"x2" alias "x"/"y" when present.
  // parameters: named constants substituted at parse time (pi, e built in).
  static Expression parse(const std::string& text, std::vector<std::string> variables,
                          const std::map<std::string, double>& parameters = {});

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }
  bool empty() const { return nodes_.empty(); }

  // True when the tree has no variable references.
  bool is_constant() const;
  // Value of a constant expression (NaN otherwise).
  double constant_value() const;

  template <class T>
  T eval(std::span<const T> vars) const {
    if (nodes_.empty()) throw Error(ErrorKind::InvalidInput, "evaluating empty expression");
    return eval_node<T>(root_, vars);
  }

  template <class T>
  T operator()(const T& x) const {
    const T v[1] = {x};
    return eval<T>(std::span<const T>(v, 1));
  }
  template <class T>
  T operator()(const T& x, const T& y) const {
    const T v[2] = {x, y};
    return eval<T>(std::span<const T>(v, 2));
  }

 private:
  template <class T>
  T eval_node(int id, std::span<const T> vars) const;

  std::string text_;
  std::vector<std::string> variables_;
  std::vector<Node> nodes_;
  int root_ = -1;

  friend class ExpressionParser;
};

template <class T>
T Expression::eval_node(int id, std::span<const T> vars) const {
  using std::abs;
  using std::atan;
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  using std::tan;
  using std::tanh;
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Op::Const: return T(n.value);
    case Op::Var: return vars[static_cast<std::size_t>(n.var)];
    case Op::Neg: return -eval_node<T>(n.lhs, vars);
    case Op::Add: return eval_node<T>(n.lhs, vars) + eval_node<T>(n.rhs, vars);
    case Op::Sub: return eval_node<T>(n.lhs, vars) - eval_node<T>(n.rhs, vars);
    case Op::Mul: return eval_node<T>(n.lhs, vars) * eval_node<T>(n.rhs, vars);
    case Op::Div: return eval_node<T>(n.lhs, vars) / eval_node<T>(n.rhs, vars);
    case Op::PowInt: return ipow(eval_node<T>(n.lhs, vars), static_cast<int>(n.value));
    case Op::Pow: {
      const Node& e = nodes_[static_cast<std::size_t>(n.rhs)];
      if (e.op == Op::Const) return pow(eval_node<T>(n.lhs, vars), e.value);
      return exp(eval_node<T>(n.rhs, vars) * log(eval_node<T>(n.lhs, vars)));
    }
    case Op::Sin: return sin(eval_node<T>(n.lhs, vars));
    case Op::Cos: return cos(eval_node<T>(n.lhs, vars));
    case Op::Tan: return tan(eval_node<T>(n.lhs, vars));
    case Op::Exp: return exp(eval_node<T>(n.lhs, vars));
    case Op::Log: return log(eval_node<T>(n.lhs, vars));
    case Op::Sqrt: return sqrt(eval_node<T>(n.lhs, vars));
    case Op::Tanh: return tanh(eval_node<T>(n.lhs, vars));
    case Op::Atan: return atan(eval_node<T>(n.lhs, vars));
    case Op::Sinh: return sinh(eval_node<T>(n.lhs, vars));
    case Op::Cosh: return cosh(eval_node<T>(n.lhs, vars));
    case Op::Abs: return abs(eval_node<T>(n.lhs, vars));
    case Op::Bump: return bump(eval_node<T>(n.lhs, vars));
    case Op::Bridge: return bridge(eval_node<T>(n.lhs, vars));
  }
  return T(0.0);
}

}  // namespace ucp
