#include "ucp/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>

namespace ucp {

class ExpressionParser {
 public:
  ExpressionParser(const std::string& text, const std::vector<std::string>& variables,
                   const std::map<std::string, double>& parameters, Expression& out)
      : s_(text), vars_(variables), params_(parameters), out_(out) {}

  int parse() {
    const int root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::InvalidInput,
                "expression \"" + s_ + "\" at position " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(Expression::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  const Expression::Node& node(int id) const { return out_.nodes_[static_cast<std::size_t>(id)]; }

  int constant(double v) { return push({Op::Const, v}); }

  int binary(Op op, int a, int b) {
    if (node(a).op == Op::Const && node(b).op == Op::Const) {
      const double x = node(a).value, y = node(b).value;
      switch (op) {
        case Op::Add: return constant(x + y);
        case Op::Sub: return constant(x - y);
        case Op::Mul: return constant(x * y);
        case Op::Div: return constant(x / y);
        case Op::Pow: return constant(std::pow(x, y));
        default: break;
      }
    }
    if (op == Op::Pow && node(b).op == Op::Const) {
      const double p = node(b).value;
      if (p == std::floor(p) && std::abs(p) <= 64.0) return push({Op::PowInt, p, -1, a, -1});
    }
    return push({op, 0.0, -1, a, b});
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = binary(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  int unary() {
    if (accept('-')) {
      const int a = unary();
      if (node(a).op == Op::Const) return constant(-node(a).value);
      return push({Op::Neg, 0.0, -1, a, -1});
    }
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    const int base = primary();
    if (accept('^')) return binary(Op::Pow, base, unary());
    return base;
  }

  int primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      const int e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        const int arg = expr();
        if (!accept(')')) fail("expected ')' after argument of " + name);
        return function(name, arg);
      }
      return identifier(name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  int function(const std::string& name, int arg) {
    static const std::map<std::string, Op> table = {
        {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},     {"exp", Op::Exp},
        {"log", Op::Log},   {"ln", Op::Log},    {"sqrt", Op::Sqrt},   {"tanh", Op::Tanh},
        {"atan", Op::Atan}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh},   {"abs", Op::Abs},
        {"bump", Op::Bump}, {"bridge", Op::Bridge}};
    const auto it = table.find(name);
    if (it == table.end()) fail("unknown function " + name);
    if (node(arg).op == Op::Const) {
      // Fold through the generic evaluator so constants match runtime semantics.
      Expression tmp;
      tmp.nodes_ = {node(arg), {it->second, 0.0, -1, 0, -1}};
      tmp.root_ = 1;
      return constant(tmp.eval<double>(std::span<const double>()));
    }
    return push({it->second, 0.0, -1, arg, -1});
  }

  int identifier(const std::string& name) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) return push({Op::Var, 0.0, static_cast<int>(i)});
    }
    if (name == "x1" || name == "x2") {
      const std::string alias = name == "x1" ? "x" : "y";
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == alias) return push({Op::Var, 0.0, static_cast<int>(i)});
      }
    }
    if (const auto it = params_.find(name); it != params_.end()) return constant(it->second);
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "e") return constant(std::numbers::e);
    fail("unknown identifier " + name);
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& params_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(const std::string& text, std::vector<std::string> variables,
                             const std::map<std::string, double>& parameters) {
  Expression e;
  e.text_ = text;
  e.variables_ = std::move(variables);
  ExpressionParser p(e.text_, e.variables_, parameters, e);
  e.root_ = p.parse();
  return e;
}

bool Expression::is_constant() const {
  for (const auto& n : nodes_) {
    if (n.op == Op::Var) return false;
  }
  return !nodes_.empty();
}

double Expression::constant_value() const {
  if (!is_constant()) return std::numeric_limits<double>::quiet_NaN();
  return eval<double>(std::span<const double>());
}

}  // namespace ucp
