#include "genalg/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "genalg/error.hpp"

namespace genalg {

struct Expression::Node {
  enum class Kind { Number, X, Y, Eps, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs, Min, Max };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

NodePtr make(Kind k, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  n->value = value;
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression '" + s_ + "' column " + std::to_string(pos_ + 1) + ": " + msg);
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

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-')) lhs = make(Kind::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Kind::Div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  // Right-associative; binds tighter than unary minus on its left: -x^2 = -(x^2).
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string id = s_.substr(start, pos_ - start);
      return identifier(id, start);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr identifier(const std::string& id, std::size_t start) {
    static const std::vector<std::pair<std::string, std::pair<Kind, int>>> functions = {
        {"sin", {Kind::Sin, 1}}, {"cos", {Kind::Cos, 1}}, {"exp", {Kind::Exp, 1}},
        {"abs", {Kind::Abs, 1}}, {"min", {Kind::Min, 2}}, {"max", {Kind::Max, 2}}};
    for (const auto& [name, info] : functions) {
      if (name != id) continue;
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (static_cast<int>(args.size()) != info.second) {
        fail(id + " takes " + std::to_string(info.second) + " argument(s)");
      }
      return make(info.first, std::move(args));
    }
    if (id == "pi") return make(Kind::Number, {}, std::numbers::pi);
    if (std::find(vars_.begin(), vars_.end(), id) == vars_.end()) {
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    if (id == "x") return make(Kind::X);
    if (id == "y") return make(Kind::Y);
    if (id == "eps") return make(Kind::Eps);
    pos_ = start;
    fail("unsupported variable '" + id + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, double x, double y, double eps) {
  auto arg = [&](std::size_t i) { return eval(*n.args[i], x, y, eps); };
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::X: return x;
    case Kind::Y: return y;
    case Kind::Eps: return eps;
    case Kind::Neg: return -arg(0);
    case Kind::Add: return arg(0) + arg(1);
    case Kind::Sub: return arg(0) - arg(1);
    case Kind::Mul: return arg(0) * arg(1);
    case Kind::Div: return arg(0) / arg(1);
    case Kind::Pow: return std::pow(arg(0), arg(1));
    case Kind::Sin: return std::sin(arg(0));
    case Kind::Cos: return std::cos(arg(0));
    case Kind::Exp: return std::exp(arg(0));
    case Kind::Abs: return std::abs(arg(0));
    case Kind::Min: return std::min(arg(0), arg(1));
    case Kind::Max: return std::max(arg(0), arg(1));
  }
  return 0.0;
}

bool uses_kind(const Node& n, Kind k) {
  if (n.kind == k) return true;
  return std::any_of(n.args.begin(), n.args.end(), [k](const NodePtr& a) { return uses_kind(*a, k); });
}

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text, variables).run();
  return e;
}

double Expression::operator()(double x, double y, double eps) const {
  if (!root_) throw InvalidArgument("empty expression");
  return eval(*root_, x, y, eps);
}

bool Expression::uses(const std::string& variable) const {
  if (!root_) return false;
  if (variable == "x") return uses_kind(*root_, Kind::X);
  if (variable == "y") return uses_kind(*root_, Kind::Y);
  if (variable == "eps") return uses_kind(*root_, Kind::Eps);
  return false;
}

}  // namespace genalg
