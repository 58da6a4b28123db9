#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

namespace nsocp {

enum class NodeKind { Var, Lit, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt };

struct Node {
  NodeKind kind;
  double value = 0.0;  // Lit
  int var = 0;         // Var, 0-based
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

using NodePtr = std::shared_ptr<const Node>;

struct DualNumber {
  double value = 0.0;
  Eigen::VectorXd partials;
};

class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, int n) : root_(std::move(root)), n_(n) {}

  const NodePtr& root() const { return root_; }
  int n() const { return n_; }
  bool empty() const { return !root_; }

 private:
  NodePtr root_;
  int n_ = 0;
};

// Grammar: x1..xn, decimal literals, + - * / ^, unary minus,
// sin cos exp log sqrt. ^ binds tightest and is right-associative.
Expr parse(const std::string& text, int n);

double eval(const Expr& e, const Eigen::VectorXd& x);
DualNumber eval_dual(const Expr& e, const Eigen::VectorXd& x);
Eigen::VectorXd grad(const Expr& e, const Eigen::VectorXd& x);

// Fully parenthesised text that parses back to the same tree.
std::string print(const Expr& e);
std::string print(const NodePtr& node);

bool structurally_equal(const NodePtr& a, const NodePtr& b);
inline bool structurally_equal(const Expr& a, const Expr& b) {
  return a.n() == b.n() && structurally_equal(a.root(), b.root());
}

// Largest 1-based variable index used, 0 for constants.
int max_variable(const Expr& e);

}  // namespace nsocp
