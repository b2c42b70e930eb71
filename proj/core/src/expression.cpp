#include "fraclab/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow };

struct Expression::Node {
  Op op;
  double value = 0.0;  // kConst
  int index = 0;       // kVar; exponent for kPow
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_const(double v) {
  return std::make_shared<const Expression::Node>(Expression::Node{Op::kConst, v, 0, nullptr, nullptr});
}

NodePtr make_var(int i) {
  return std::make_shared<const Expression::Node>(Expression::Node{Op::kVar, 0.0, i, nullptr, nullptr});
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::kConst && n->value == v; }

// Constructors with light constant folding so derivative trees stay small.
NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  if (a->op == Op::kConst && b->op == Op::kConst) {
    switch (op) {
      case Op::kAdd: return make_const(a->value + b->value);
      case Op::kSub: return make_const(a->value - b->value);
      case Op::kMul: return make_const(a->value * b->value);
      case Op::kDiv: return make_const(a->value / b->value);
      default: break;
    }
  }
  switch (op) {
    case Op::kAdd:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::kSub:
      if (is_const(b, 0.0)) return a;
      break;
    case Op::kMul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::kDiv:
      if (is_const(a, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    default: break;
  }
  return std::make_shared<const Expression::Node>(Expression::Node{op, 0.0, 0, std::move(a), std::move(b)});
}

NodePtr make_neg(NodePtr a) {
  if (a->op == Op::kConst) return make_const(-a->value);
  return std::make_shared<const Expression::Node>(Expression::Node{Op::kNeg, 0.0, 0, std::move(a), nullptr});
}

NodePtr make_pow(NodePtr a, int k) {
  if (k == 0) return make_const(1.0);
  if (k == 1) return a;
  if (a->op == Op::kConst) return make_const(std::pow(a->value, k));
  return std::make_shared<const Expression::Node>(Expression::Node{Op::kPow, 0.0, k, std::move(a), nullptr});
}

double eval(const Expression::Node& n, std::span<const double> p) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar:
      if (static_cast<std::size_t>(n.index) >= p.size()) {
        throw DimensionMismatchError("expression references variable " + std::to_string(n.index) +
                                     " but point has dimension " + std::to_string(p.size()));
      }
      return p[n.index];
    case Op::kAdd: return eval(*n.lhs, p) + eval(*n.rhs, p);
    case Op::kSub: return eval(*n.lhs, p) - eval(*n.rhs, p);
    case Op::kMul: return eval(*n.lhs, p) * eval(*n.rhs, p);
    case Op::kDiv: return eval(*n.lhs, p) / eval(*n.rhs, p);
    case Op::kNeg: return -eval(*n.lhs, p);
    case Op::kPow: {
      const double base = eval(*n.lhs, p);
      int k = n.index;
      if (k < 0) return 1.0 / std::pow(base, -k);
      double r = 1.0;
      double b = base;
      while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
      }
      return r;
    }
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::kConst: return make_const(0.0);
    case Op::kVar: return make_const(n->index == var ? 1.0 : 0.0);
    case Op::kAdd: return make_binary(Op::kAdd, diff(n->lhs, var), diff(n->rhs, var));
    case Op::kSub: return make_binary(Op::kSub, diff(n->lhs, var), diff(n->rhs, var));
    case Op::kMul:
      return make_binary(Op::kAdd, make_binary(Op::kMul, diff(n->lhs, var), n->rhs),
                         make_binary(Op::kMul, n->lhs, diff(n->rhs, var)));
    case Op::kDiv: {
      auto num = make_binary(Op::kSub, make_binary(Op::kMul, diff(n->lhs, var), n->rhs),
                             make_binary(Op::kMul, n->lhs, diff(n->rhs, var)));
      return make_binary(Op::kDiv, num, make_pow(n->rhs, 2));
    }
    case Op::kNeg: return make_neg(diff(n->lhs, var));
    case Op::kPow:
      return make_binary(Op::kMul,
                         make_binary(Op::kMul, make_const(n->index), make_pow(n->lhs, n->index - 1)),
                         diff(n->lhs, var));
  }
  return make_const(0.0);
}

int max_var(const Expression::Node& n) {
  switch (n.op) {
    case Op::kConst: return 0;
    case Op::kVar: return n.index + 1;
    case Op::kNeg:
    case Op::kPow: return max_var(*n.lhs);
    default: return std::max(max_var(*n.lhs), max_var(*n.rhs));
  }
}

bool polynomial(const Expression::Node& n) {
  switch (n.op) {
    case Op::kConst:
    case Op::kVar: return true;
    case Op::kNeg: return polynomial(*n.lhs);
    case Op::kPow: return n.index >= 0 && polynomial(*n.lhs);
    case Op::kDiv: return polynomial(*n.lhs) && max_var(*n.rhs) == 0;
    default: return polynomial(*n.lhs) && polynomial(*n.rhs);
  }
}

void print(const Expression::Node& n, std::ostream& os) {
  static const char* names[] = {"x", "y", "z"};
  switch (n.op) {
    case Op::kConst: {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), n.value);
      if (n.value < 0) os << '(';
      os << std::string_view(buf, static_cast<std::size_t>(end - buf));
      if (n.value < 0) os << ')';
      return;
    }
    case Op::kVar: os << (n.index < 3 ? names[n.index] : "x" + std::to_string(n.index + 1)); return;
    case Op::kNeg: os << "(-"; print(*n.lhs, os); os << ')'; return;
    case Op::kPow: os << '('; print(*n.lhs, os); os << ")^" << n.index; return;
    default: break;
  }
  const char sym = n.op == Op::kAdd ? '+' : n.op == Op::kSub ? '-' : n.op == Op::kMul ? '*' : '/';
  os << '(';
  print(*n.lhs, os);
  os << sym;
  print(*n.rhs, os);
  os << ')';
}

// Recursive-descent parser.
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' signed-integer)?
//   atom   := number | variable | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto node = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + std::string(text_) + "': " + what + " at offset " + std::to_string(pos_));
  }

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
    auto node = term();
    for (;;) {
      if (accept('+')) {
        node = make_binary(Op::kAdd, node, term());
      } else if (accept('-')) {
        node = make_binary(Op::kSub, node, term());
      } else {
        return node;
      }
    }
  }

  NodePtr term() {
    auto node = unary();
    for (;;) {
      if (accept('*')) {
        node = make_binary(Op::kMul, node, unary());
      } else if (accept('/')) {
        node = make_binary(Op::kDiv, node, unary());
      } else {
        return node;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = atom();
    if (accept('^')) {
      skip_ws();
      bool negative = false;
      if (accept('-')) negative = true;
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be an integer literal");
      if (pos_ < text_.size() && text_[pos_] == '.') fail("exponent must be an integer literal");
      int k = 0;
      std::from_chars(text_.data() + start, text_.data() + pos_, k);
      return make_pow(base, negative ? -k : k);
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto node = expr();
      if (!accept(')')) fail("missing ')'");
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
      if (ec != std::errc() || ptr != text_.data() + pos_) fail("malformed number");
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x" || name == "x1") return make_var(0);
      if (name == "y" || name == "x2") return make_var(1);
      if (name == "z" || name == "x3") return make_var(2);
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(make_const(0.0)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double value) { return Expression(make_const(value)); }

Expression Expression::variable(int index) { return Expression(make_var(index)); }

double Expression::operator()(std::span<const double> point) const { return eval(*root_, point); }

Expression Expression::derivative(int index) const { return Expression(diff(root_, index)); }

bool Expression::is_polynomial() const { return polynomial(*root_); }

int Expression::arity() const { return max_var(*root_); }

std::string Expression::to_string() const {
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::kAdd, a.root_, b.root_));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::kSub, a.root_, b.root_));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::kMul, a.root_, b.root_));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(make_binary(Op::kDiv, a.root_, b.root_));
}
Expression operator-(const Expression& a) { return Expression(make_neg(a.root_)); }

}  // namespace fraclab
