#include "nsocp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "nsocp/errors.hpp"

namespace nsocp {

namespace {

NodePtr make(NodeKind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_lit(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Lit;
  n->value = v;
  return n;
}

NodePtr make_var(int i) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->var = i;
  return n;
}

class Parser {
 public:
  Parser(const std::string& s, int n) : s_(s), n_(n) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  int n_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    Error err(ErrorKind::SyntaxError, "syntax error at position " + std::to_string(at) + ": " + msg);
    err.position = static_cast<long>(at);
    throw err;
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(NodeKind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(NodeKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(NodeKind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(NodeKind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(NodeKind::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(NodeKind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string tok = s_.substr(start, pos_ - start);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v)) fail("malformed number '" + tok + "'", start);
    return make_lit(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id.size() > 1 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const long idx = std::strtol(id.c_str() + 1, nullptr, 10);
      if (idx < 1 || idx > n_) {
        Error err(ErrorKind::VariableOutOfRange,
                  "variable " + id + " out of range 1.." + std::to_string(n_));
        err.position = static_cast<long>(start);
        throw err;
      }
      return make_var(static_cast<int>(idx - 1));
    }
    NodeKind k;
    if (id == "sin") k = NodeKind::Sin;
    else if (id == "cos") k = NodeKind::Cos;
    else if (id == "exp") k = NodeKind::Exp;
    else if (id == "log") k = NodeKind::Log;
    else if (id == "sqrt") k = NodeKind::Sqrt;
    else {
      Error err(ErrorKind::UnknownIdentifier, "unknown identifier '" + id + "'");
      err.position = static_cast<long>(start);
      throw err;
    }
    if (!accept('(')) fail("expected '(' after " + id);
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    return make(k, arg);
  }
};

bool is_constant(const NodePtr& n) {
  if (!n) return true;
  if (n->kind == NodeKind::Var) return false;
  return is_constant(n->a) && is_constant(n->b);
}

[[noreturn]] void domain_error(const NodePtr& n, const std::string& why) {
  Error err(ErrorKind::DomainError, why + " in " + print(n));
  err.detail = print(n);
  throw err;
}

// Constant integer exponent, if any.
bool integer_exponent(const NodePtr& pow_node, const Eigen::VectorXd& x, double& p);

double eval_node(const NodePtr& n, const Eigen::VectorXd& x) {
  switch (n->kind) {
    case NodeKind::Lit: return n->value;
    case NodeKind::Var: return x[n->var];
    case NodeKind::Add: return eval_node(n->a, x) + eval_node(n->b, x);
    case NodeKind::Sub: return eval_node(n->a, x) - eval_node(n->b, x);
    case NodeKind::Mul: return eval_node(n->a, x) * eval_node(n->b, x);
    case NodeKind::Div: {
      const double d = eval_node(n->b, x);
      if (d == 0.0) domain_error(n, "division by zero");
      return eval_node(n->a, x) / d;
    }
    case NodeKind::Pow: {
      const double a = eval_node(n->a, x);
      double p;
      if (integer_exponent(n, x, p)) {
        if (a == 0.0 && p < 0) domain_error(n, "division by zero");
        return std::pow(a, p);
      }
      const double b = eval_node(n->b, x);
      if (!(a > 0.0)) domain_error(n, "non-integer power of a non-positive base");
      return std::pow(a, b);
    }
    case NodeKind::Neg: return -eval_node(n->a, x);
    case NodeKind::Sin: return std::sin(eval_node(n->a, x));
    case NodeKind::Cos: return std::cos(eval_node(n->a, x));
    case NodeKind::Exp: return std::exp(eval_node(n->a, x));
    case NodeKind::Log: {
      const double a = eval_node(n->a, x);
      if (!(a > 0.0)) domain_error(n, "log of a non-positive value");
      return std::log(a);
    }
    case NodeKind::Sqrt: {
      const double a = eval_node(n->a, x);
      if (a < 0.0) domain_error(n, "sqrt of a negative value");
      return std::sqrt(a);
    }
  }
  return 0.0;
}

bool integer_exponent(const NodePtr& pow_node, const Eigen::VectorXd& x, double& p) {
  if (!is_constant(pow_node->b)) return false;
  p = eval_node(pow_node->b, x);
  return std::isfinite(p) && p == std::round(p);
}

DualNumber dual_node(const NodePtr& n, const Eigen::VectorXd& x) {
  const Eigen::Index dim = x.size();
  switch (n->kind) {
    case NodeKind::Lit: return {n->value, Eigen::VectorXd::Zero(dim)};
    case NodeKind::Var: {
      DualNumber d{x[n->var], Eigen::VectorXd::Zero(dim)};
      d.partials[n->var] = 1.0;
      return d;
    }
    case NodeKind::Add: {
      DualNumber a = dual_node(n->a, x), b = dual_node(n->b, x);
      return {a.value + b.value, a.partials + b.partials};
    }
    case NodeKind::Sub: {
      DualNumber a = dual_node(n->a, x), b = dual_node(n->b, x);
      return {a.value - b.value, a.partials - b.partials};
    }
    case NodeKind::Mul: {
      DualNumber a = dual_node(n->a, x), b = dual_node(n->b, x);
      return {a.value * b.value, b.value * a.partials + a.value * b.partials};
    }
    case NodeKind::Div: {
      DualNumber a = dual_node(n->a, x), b = dual_node(n->b, x);
      if (b.value == 0.0) domain_error(n, "division by zero");
      const double q = a.value / b.value;
      return {q, (a.partials - q * b.partials) / b.value};
    }
    case NodeKind::Pow: {
      DualNumber a = dual_node(n->a, x);
      double p;
      if (integer_exponent(n, x, p)) {
        if (a.value == 0.0 && p < 1 && p != 0) domain_error(n, "division by zero");
        if (p == 0.0) return {1.0, Eigen::VectorXd::Zero(dim)};
        const double v = std::pow(a.value, p);
        const double dv = p * std::pow(a.value, p - 1);
        return {v, dv * a.partials};
      }
      DualNumber b = dual_node(n->b, x);
      if (!(a.value > 0.0)) domain_error(n, "non-integer power of a non-positive base");
      const double v = std::pow(a.value, b.value);
      const double la = std::log(a.value);
      return {v, v * (la * b.partials + (b.value / a.value) * a.partials)};
    }
    case NodeKind::Neg: {
      DualNumber a = dual_node(n->a, x);
      return {-a.value, -a.partials};
    }
    case NodeKind::Sin: {
      DualNumber a = dual_node(n->a, x);
      return {std::sin(a.value), std::cos(a.value) * a.partials};
    }
    case NodeKind::Cos: {
      DualNumber a = dual_node(n->a, x);
      return {std::cos(a.value), -std::sin(a.value) * a.partials};
    }
    case NodeKind::Exp: {
      DualNumber a = dual_node(n->a, x);
      const double v = std::exp(a.value);
      return {v, v * a.partials};
    }
    case NodeKind::Log: {
      DualNumber a = dual_node(n->a, x);
      if (!(a.value > 0.0)) domain_error(n, "log of a non-positive value");
      return {std::log(a.value), a.partials / a.value};
    }
    case NodeKind::Sqrt: {
      DualNumber a = dual_node(n->a, x);
      if (a.value < 0.0) domain_error(n, "sqrt of a negative value");
      const double v = std::sqrt(a.value);
      if (v == 0.0) domain_error(n, "sqrt is not differentiable at zero");
      return {v, a.partials / (2.0 * v)};
    }
  }
  return {};
}

void check_dim(const Expr& e, const Eigen::VectorXd& x) {
  if (x.size() != e.n())
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(x.size()) + " entries, expected " + std::to_string(e.n()));
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* func_name(NodeKind k) {
  switch (k) {
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::Exp: return "exp";
    case NodeKind::Log: return "log";
    case NodeKind::Sqrt: return "sqrt";
    default: return "";
  }
}

int max_var_node(const NodePtr& n) {
  if (!n) return 0;
  int m = n->kind == NodeKind::Var ? n->var + 1 : 0;
  return std::max({m, max_var_node(n->a), max_var_node(n->b)});
}

}  // namespace

Expr parse(const std::string& text, int n) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "n must be >= 1");
  Parser p(text, n);
  return Expr(p.run(), n);
}

double eval(const Expr& e, const Eigen::VectorXd& x) {
  check_dim(e, x);
  return eval_node(e.root(), x);
}

DualNumber eval_dual(const Expr& e, const Eigen::VectorXd& x) {
  check_dim(e, x);
  return dual_node(e.root(), x);
}

Eigen::VectorXd grad(const Expr& e, const Eigen::VectorXd& x) { return eval_dual(e, x).partials; }

std::string print(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Lit: return fmt_double(n->value);
    case NodeKind::Var: return "x" + std::to_string(n->var + 1);
    case NodeKind::Add: return "(" + print(n->a) + " + " + print(n->b) + ")";
    case NodeKind::Sub: return "(" + print(n->a) + " - " + print(n->b) + ")";
    case NodeKind::Mul: return "(" + print(n->a) + " * " + print(n->b) + ")";
    case NodeKind::Div: return "(" + print(n->a) + " / " + print(n->b) + ")";
    case NodeKind::Pow: return "(" + print(n->a) + " ^ " + print(n->b) + ")";
    case NodeKind::Neg: return "(-" + print(n->a) + ")";
    default: return std::string(func_name(n->kind)) + "(" + print(n->a) + ")";
  }
}

std::string print(const Expr& e) { return print(e.root()); }

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == NodeKind::Lit && a->value != b->value) return false;
  if (a->kind == NodeKind::Var && a->var != b->var) return false;
  return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
}

int max_variable(const Expr& e) { return max_var_node(e.root()); }

}  // namespace nsocp
