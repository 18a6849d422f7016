#pragma once

#include <memory>
#include <string>

namespace curveflow {

/// Value with first and second derivative, propagated by forward-mode
/// differentiation.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Scalar expression in one variable (`u`, alias `kappa`), used for custom
/// speed functions. Grammar: + - * / ^, unary minus, parentheses, numeric
/// literals, constants pi and e, functions exp log ln log1p sqrt sin cos tan.
class Expression {
 public:
  static Expression parse(const std::string& text);

  Jet evaluate(double u) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace curveflow
