#include "curveflow/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

Jet constant(double c) { return {c, 0.0, 0.0}; }

// g(f(u)) given g, g', g'' at f(u).
Jet compose(const Jet& f, double g0, double g1, double g2) {
  return {g0, g1 * f.d1, g2 * f.d1 * f.d1 + g1 * f.d2};
}

Jet operator+(const Jet& a, const Jet& b) { return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2}; }
Jet operator-(const Jet& a, const Jet& b) { return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2}; }
Jet operator-(const Jet& a) { return {-a.value, -a.d1, -a.d2}; }

Jet operator*(const Jet& a, const Jet& b) {
  return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
          a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}

Jet reciprocal(const Jet& a) {
  const double x = a.value;
  return compose(a, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet jet_exp(const Jet& a) {
  const double e = std::exp(a.value);
  return compose(a, e, e, e);
}

Jet jet_log(const Jet& a) {
  const double x = a.value;
  return compose(a, std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet jet_pow(const Jet& a, const Jet& b) {
  if (b.d1 == 0.0 && b.d2 == 0.0) {
    const double x = a.value, c = b.value;
    return compose(a, std::pow(x, c), c * std::pow(x, c - 1.0), c * (c - 1.0) * std::pow(x, c - 2.0));
  }
  return jet_exp(b * jet_log(a));
}

enum class Op { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Function { Exp, Log, Log1p, Sqrt, Sin, Cos, Tan };

}  // namespace

struct Expression::Node {
  Op op = Op::Number;
  double number = 0.0;
  Function function = Function::Exp;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    auto root = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidParams("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make_node(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      auto inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "u" || name == "kappa") return make_node(Op::Variable);
      if (name == "pi" || name == "e") {
        auto n = std::make_shared<Expression::Node>();
        n->number = name == "pi" ? std::numbers::pi : std::numbers::e;
        return n;
      }
      Function fn;
      if (name == "exp") fn = Function::Exp;
      else if (name == "log" || name == "ln") fn = Function::Log;
      else if (name == "log1p") fn = Function::Log1p;
      else if (name == "sqrt") fn = Function::Sqrt;
      else if (name == "sin") fn = Function::Sin;
      else if (name == "cos") fn = Function::Cos;
      else if (name == "tan") fn = Function::Tan;
      else fail("unknown identifier '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      auto arg = expr();
      if (!accept(')')) fail("expected ')'");
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Call;
      n->function = fn;
      n->lhs = arg;
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

Jet eval(const Expression::Node& n, double u) {
  switch (n.op) {
    case Op::Number: return constant(n.number);
    case Op::Variable: return {u, 1.0, 0.0};
    case Op::Add: return eval(*n.lhs, u) + eval(*n.rhs, u);
    case Op::Sub: return eval(*n.lhs, u) - eval(*n.rhs, u);
    case Op::Mul: return eval(*n.lhs, u) * eval(*n.rhs, u);
    case Op::Div: return eval(*n.lhs, u) / eval(*n.rhs, u);
    case Op::Pow: return jet_pow(eval(*n.lhs, u), eval(*n.rhs, u));
    case Op::Neg: return -eval(*n.lhs, u);
    case Op::Call: {
      const Jet a = eval(*n.lhs, u);
      const double x = a.value;
      switch (n.function) {
        case Function::Exp: return jet_exp(a);
        case Function::Log: return jet_log(a);
        case Function::Log1p: return compose(a, std::log1p(x), 1.0 / (1.0 + x), -1.0 / ((1.0 + x) * (1.0 + x)));
        case Function::Sqrt: {
          const double r = std::sqrt(x);
          return compose(a, r, 0.5 / r, -0.25 / (r * x));
        }
        case Function::Sin: return compose(a, std::sin(x), std::cos(x), -std::sin(x));
        case Function::Cos: return compose(a, std::cos(x), -std::sin(x), -std::cos(x));
        case Function::Tan: {
          const double t = std::tan(x), sec2 = 1.0 + t * t;
          return compose(a, t, sec2, 2.0 * t * sec2);
        }
      }
    }
  }
  return {};
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  return Expression(text, Parser(text).parse());
}

Jet Expression::evaluate(double u) const { return eval(*root_, u); }

}  // namespace curveflow
