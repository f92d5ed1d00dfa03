#include "adaptube/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace adaptube {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprOp op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

struct FunctionName {
  const char* name;
  ExprOp op;
};
constexpr FunctionName kFunctions[] = {
    {"sin", ExprOp::Sin}, {"cos", ExprOp::Cos},   {"exp", ExprOp::Exp},
    {"log", ExprOp::Log}, {"sqrt", ExprOp::Sqrt}, {"tanh", ExprOp::Tanh},
};

bool contains_var(const ExprNode& n) {
  if (n.op == ExprOp::Var) return true;
  if (n.lhs && contains_var(*n.lhs)) return true;
  if (n.rhs && contains_var(*n.rhs)) return true;
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coords)
      : text_(text), coords_(coords) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected character", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_node(ExprOp::Add, lhs, term());
      else if (accept('-'))
        lhs = make_node(ExprOp::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_node(ExprOp::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make_node(ExprOp::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(ExprOp::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    NodePtr e = unary();
    if (contains_var(*e)) throw ParseError("exponent must be a constant integer", at);
    double v = fold(*e);
    if (!(std::abs(v) <= 6.0) || v != std::floor(v))
      throw ParseError("exponent must be an integer in [-6, 6]", at);
    auto n = std::make_shared<ExprNode>();
    n->op = ExprOp::Pow;
    n->lhs = base;
    n->exponent = static_cast<int>(v);
    return n;
  }

  double fold(const ExprNode& n) {
    switch (n.op) {
      case ExprOp::Literal: return n.literal;
      case ExprOp::Add: return fold(*n.lhs) + fold(*n.rhs);
      case ExprOp::Sub: return fold(*n.lhs) - fold(*n.rhs);
      case ExprOp::Mul: return fold(*n.lhs) * fold(*n.rhs);
      case ExprOp::Div: return fold(*n.lhs) / fold(*n.rhs);
      case ExprOp::Pow: return pow_int(fold(*n.lhs), n.exponent);
      case ExprOp::Neg: return -fold(*n.lhs);
      case ExprOp::Sin: return std::sin(fold(*n.lhs));
      case ExprOp::Cos: return std::cos(fold(*n.lhs));
      case ExprOp::Exp: return std::exp(fold(*n.lhs));
      case ExprOp::Log: return std::log(fold(*n.lhs));
      case ExprOp::Sqrt: return std::sqrt(fold(*n.lhs));
      case ExprOp::Tanh: return std::tanh(fold(*n.lhs));
      case ExprOp::Var: break;
    }
    return NAN;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", pos_);
    }
    auto node = std::make_shared<ExprNode>();
    node->op = ExprOp::Literal;
    node->literal = std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
    return node;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == name) {
        auto node = std::make_shared<ExprNode>();
        node->op = ExprOp::Var;
        node->var = static_cast<int>(i);
        return node;
      }
    }
    for (const auto& f : kFunctions) {
      if (name == f.name) {
        if (!accept('(')) throw ParseError("expected '(' after " + name, pos_);
        NodePtr arg = expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return make_node(f.op, arg);
      }
    }
    throw UnboundIdentifier(name, start);
  }

  std::string_view text_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;
};

const char* function_name(ExprOp op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "?";
}

void print(const ExprNode& n, const std::vector<std::string>& coords, std::string& out) {
  switch (n.op) {
    case ExprOp::Literal: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.literal);
      out += buf;
      return;
    }
    case ExprOp::Var: out += coords[n.var]; return;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div: {
      const char* sym = n.op == ExprOp::Add   ? " + "
                        : n.op == ExprOp::Sub ? " - "
                        : n.op == ExprOp::Mul ? " * "
                                              : " / ";
      out += '(';
      print(*n.lhs, coords, out);
      out += sym;
      print(*n.rhs, coords, out);
      out += ')';
      return;
    }
    case ExprOp::Pow:
      out += '(';
      print(*n.lhs, coords, out);
      out += '^';
      out += std::to_string(n.exponent);
      out += ')';
      return;
    case ExprOp::Neg:
      out += "(-";
      print(*n.lhs, coords, out);
      out += ')';
      return;
    default:
      out += function_name(n.op);
      out += '(';
      print(*n.lhs, coords, out);
      out += ')';
      return;
  }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case ExprOp::Literal: return a.literal == b.literal;
    case ExprOp::Var: return a.var == b.var;
    case ExprOp::Pow: return a.exponent == b.exponent && equal_nodes(*a.lhs, *b.lhs);
    default: break;
  }
  if (!equal_nodes(*a.lhs, *b.lhs)) return false;
  if (a.rhs || b.rhs) return a.rhs && b.rhs && equal_nodes(*a.rhs, *b.rhs);
  return true;
}

}  // namespace

ScalarExpr ScalarExpr::parse(std::string_view text, const std::vector<std::string>& coords) {
  ScalarExpr e;
  e.source_ = std::string(text);
  e.coords_ = coords;
  e.root_ = Parser(text, coords).parse();
  return e;
}

double ScalarExpr::eval(const std::map<std::string, double>& env) const {
  std::vector<double> values;
  values.reserve(coords_.size());
  for (const auto& name : coords_) {
    auto it = env.find(name);
    if (it == env.end()) throw std::invalid_argument("coordinate '" + name + "' not bound");
    values.push_back(it->second);
  }
  return eval<double>(std::span<const double>(values));
}

std::string ScalarExpr::to_string() const {
  std::string out;
  print(*root_, coords_, out);
  return out;
}

bool ScalarExpr::structurally_equal(const ScalarExpr& other) const {
  return coords_ == other.coords_ && equal_nodes(*root_, *other.root_);
}

std::vector<ScalarExpr> parse_all(const std::vector<std::string>& texts,
                                  const std::vector<std::string>& coords) {
  std::vector<ScalarExpr> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(ScalarExpr::parse(t, coords));
  return out;
}

SmoothMap make_expr_map(const std::vector<ScalarExpr>& components) {
  if (components.empty()) throw std::invalid_argument("make_expr_map: no components");
  const int in_dim = static_cast<int>(components.front().coords().size());
  for (const auto& c : components)
    if (c.coords() != components.front().coords())
      throw std::invalid_argument("make_expr_map: coordinate lists differ");
  return make_map(in_dim, static_cast<int>(components.size()),
                  [components](auto in, auto out) {
                    using T = typename decltype(out)::value_type;
                    for (std::size_t k = 0; k < components.size(); ++k)
                      out[k] = components[k].template eval<T>(in);
                  });
}

}  // namespace adaptube
