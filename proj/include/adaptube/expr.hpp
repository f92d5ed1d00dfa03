#pragma once

// Scalar expression language used for contact forms, embeddings and
// vector fields. Grammar (whitespace insignificant):
//
//   expr    := term  (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | log | sqrt | tanh
//
// '^' binds tighter than unary minus (-x^2 is -(x^2)) and is right
// associative. Its exponent must fold to a constant integer in [-6, 6].

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adaptube/dual.hpp"
#include "adaptube/smooth_map.hpp"

namespace adaptube {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnboundIdentifier : public ParseError {
 public:
  UnboundIdentifier(const std::string& name, std::size_t offset)
      : ParseError("unbound identifier '" + name + "'", offset), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

enum class ExprOp { Literal, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt, Tanh };

struct ExprNode {
  ExprOp op = ExprOp::Literal;
  double literal = 0.0;
  int var = -1;
  int exponent = 0;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

class ScalarExpr {
 public:
  static ScalarExpr parse(std::string_view text, const std::vector<std::string>& coords);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& coords() const { return coords_; }
  const ExprNode& root() const { return *root_; }

  template <typename T>
  T eval(std::span<const T> values) const {
    if (values.size() != coords_.size())
      throw std::invalid_argument("ScalarExpr::eval: expected " +
                                  std::to_string(coords_.size()) + " coordinates");
    return eval_node(*root_, values);
  }

  /// Binding by name; every coordinate must be present.
  double eval(const std::map<std::string, double>& env) const;

  /// Fully parenthesised form that reparses to the same tree.
  std::string to_string() const;

  bool structurally_equal(const ScalarExpr& other) const;

 private:
  template <typename T>
  T eval_node(const ExprNode& n, std::span<const T> x) const;

  std::string source_;
  std::vector<std::string> coords_;
  std::shared_ptr<const ExprNode> root_;
};

template <typename T>
T ScalarExpr::eval_node(const ExprNode& n, std::span<const T> x) const {
  T r{};
  switch (n.op) {
    case ExprOp::Literal: r = T(n.literal); break;
    case ExprOp::Var: r = x[n.var]; break;
    case ExprOp::Add: r = eval_node(*n.lhs, x) + eval_node(*n.rhs, x); break;
    case ExprOp::Sub: r = eval_node(*n.lhs, x) - eval_node(*n.rhs, x); break;
    case ExprOp::Mul: r = eval_node(*n.lhs, x) * eval_node(*n.rhs, x); break;
    case ExprOp::Div: r = eval_node(*n.lhs, x) / eval_node(*n.rhs, x); break;
    case ExprOp::Pow: r = pow_int(eval_node(*n.lhs, x), n.exponent); break;
    case ExprOp::Neg: r = -eval_node(*n.lhs, x); break;
    case ExprOp::Sin: r = sin(eval_node(*n.lhs, x)); break;
    case ExprOp::Cos: r = cos(eval_node(*n.lhs, x)); break;
    case ExprOp::Exp: r = exp(eval_node(*n.lhs, x)); break;
    case ExprOp::Log: r = log(eval_node(*n.lhs, x)); break;
    case ExprOp::Sqrt: r = sqrt(eval_node(*n.lhs, x)); break;
    case ExprOp::Tanh: r = tanh(eval_node(*n.lhs, x)); break;
  }
  if (!std::isfinite(primal(r)))
    throw NonFiniteError("non-finite intermediate value in '" + source_ + "'");
  return r;
}

/// Parses each string over `coords`.
std::vector<ScalarExpr> parse_all(const std::vector<std::string>& texts,
                                  const std::vector<std::string>& coords);

/// Vector-valued map whose components are the given expressions. All
/// expressions must share the same coordinate list.
SmoothMap make_expr_map(const std::vector<ScalarExpr>& components);

}  // namespace adaptube
