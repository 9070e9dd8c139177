#pragma once

// Small arithmetic language for data and viscosity specs:
//   literals, x, y, eps, pi, + - * / ^, parentheses, unary minus,
//   sin, cos, exp, abs, min, max.

#include <memory>
#include <string>
#include <vector>

namespace genalg {

class Expression {
 public:
  /// Parses `text`; identifiers outside `variables` (and pi) are rejected.
  /// Throws ParseError with the offending column.
  static Expression parse(const std::string& text,
                          const std::vector<std::string>& variables = {"x", "y"});

  double operator()(double x, double y = 0.0, double eps = 0.0) const;

  const std::string& text() const noexcept { return text_; }
  bool uses(const std::string& variable) const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace genalg
