#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsocp/cone.hpp"
#include "nsocp/expr.hpp"

namespace nsocp {

inline constexpr double kDefaultIndexTol = 1e-7;

struct ConstraintBlock {
  int dim = 0;
  std::vector<Expr> components;
  std::vector<std::string> texts;
};

struct ProblemSpec {
  std::string name;
  int n = 0;
  Expr objective;
  std::string objective_text;
  std::vector<ConstraintBlock> constraints;
  std::vector<Vec> points_of_interest;
  std::map<std::string, bool> expected;

  int q() const { return static_cast<int>(constraints.size()); }
};

// Parses every expression and validates dimensions (q >= 1, m_j >= 2).
ProblemSpec make_problem(const std::string& name, int n, const std::string& objective,
                         const std::vector<std::vector<std::string>>& blocks);

using Multipliers = std::vector<Vec>;

struct PointEval {
  double f = 0.0;
  Vec grad_f;
  std::vector<Vec> g;
  std::vector<Mat> Dg;  // m_j x n
};

PointEval evaluate(const ProblemSpec& p, const Vec& x);
double evaluate_f(const ProblemSpec& p, const Vec& x);
std::vector<Vec> evaluate_g(const ProblemSpec& p, const Vec& x);

struct IndexClassification {
  std::vector<int> I0;
  std::vector<int> IB;
  std::vector<int> Iint;
  double tol = kDefaultIndexTol;
};

IndexClassification classify_indices(const ProblemSpec& p, const Vec& x, double tol = kDefaultIndexTol);
IndexClassification classify_indices(const std::vector<Vec>& g, double tol = kDefaultIndexTol);

// Σ_j Dg_jᵀ μ_j
Vec jacobian_transpose_sum(const std::vector<Mat>& Dg, const Multipliers& mu);

Vec lagrangian_grad(const ProblemSpec& p, const Vec& x, const Multipliers& mu);
Vec lagrangian_grad(const PointEval& ev, const Multipliers& mu);

struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;

  double max() const;
  bool within(double tol) const { return max() <= tol; }
};

KktResidual kkt_residual(const ProblemSpec& p, const Vec& x, const Multipliers& mu);
KktResidual kkt_residual(const PointEval& ev, const Multipliers& mu);

struct IterateLog {
  int k = 0;
  Vec x;
  Multipliers mu;
  std::optional<std::vector<Vec>> delta;
  KktResidual residuals;
  double rho = 0.0;
  int inner_iterations = 0;
};

struct AkktReport {
  bool ok = false;
  bool stationarity_ok = false;
  bool perturbed_ok = false;
  bool delta_decreasing = false;
  double last_stationarity = 0.0;
  double worst_lambda1 = 0.0;       // min over k, j of λ1(g + Δ)
  double worst_complementarity = 0.0;
  std::vector<double> delta_norms;
  std::vector<double> mu_norms;     // max_j ‖μ_j^k‖
  double mu_growth = 1.0;           // last / first
};

AkktReport akkt_check(const ProblemSpec& p, const std::vector<IterateLog>& iterates, double eps);

// Least-squares search for KKT multipliers at x with the complementarity
// structure of the index partition built in.
struct KktSearchResult {
  bool exists = false;
  Multipliers mu;
  double residual = 0.0;
};

KktSearchResult find_kkt_multipliers(const ProblemSpec& p, const Vec& x, double tol = 1e-8,
                                     double index_tol = kDefaultIndexTol);

double max_block_norm(const Multipliers& mu);

}  // namespace nsocp
