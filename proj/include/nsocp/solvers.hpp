#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nsocp/model.hpp"

namespace nsocp {

enum class Method { Penalty, AugLag, Sqp };

const char* method_name(Method m);
Method parse_method(const std::string& s);

struct SolverConfig {
  Method method = Method::AugLag;
  double rho0 = 1.0;
  double rho_growth = 10.0;
  double rho_max = 1e30;
  int max_outer = 50;
  double inner_tol_floor = 1e-8;  // eps_k = max(floor, 0.1^k)
  int inner_max_iter = 20000;
  double stationarity_tol = 1e-8;
  double feasibility_tol = 1e-8;
  double multiplier_box = 1e6;
  double divergence_norm = 1e8;
  // SQP
  double alpha0 = 1.0;
  double sigma = 0.1;
  double gamma1 = 1e-3;
  double gamma2 = 1e3;
  double tau = 1.0;
  // alternate AL sign, [-λ2]+ violation measure, reversed step test
  bool paper_literal = false;
};

enum class SolveStatus { Converged, IterationLimit, Stalled, Diverged, SubproblemInfeasible };

const char* solve_status_name(SolveStatus s);
int exit_code(SolveStatus s);  // 0, 2, 2, 3, 3

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  std::vector<IterateLog> log;
  Vec x;
  Multipliers mu;
  std::string note;
  double max_identity_gap = 0.0;  // augmented Lagrangian gradient identity
};

using Objective = std::function<double(const Vec&, Vec*)>;

enum class InnerStatus { Converged, MaxIter, Stalled };

struct InnerResult {
  Vec x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  InnerStatus status = InnerStatus::MaxIter;
};

// Gradient descent with Barzilai-Borwein steps and Armijo backtracking
// (c = 1e-4, halving). Throws LineSearchStalled after 60 halvings unless
// throw_on_stall is false.
InnerResult inner_minimize(const Objective& phi, const Vec& x0, double tol, int max_iter, bool throw_on_stall = true);

// f + ρ/2 Σ‖P(-g_j)‖²
double penalty_objective(const ProblemSpec& p, const Vec& x, double rho, Vec* grad);
// f + ρ/2 Σ(‖P(μ̃_j/ρ - g_j)‖² - ‖μ̃_j/ρ‖²); literal variant uses P(-g_j - μ̃_j/ρ)
double auglag_objective(const ProblemSpec& p, const Vec& x, double rho, const Multipliers& mutilde, Vec* grad,
                        bool paper_literal = false);

double violation_phi(const ProblemSpec& p, const Vec& x, double alpha, bool paper_literal = false);

// Backtracking from t = 1 by halving until phi(x) - phi(x + t d) >= σ t dMd
// (literal variant: <=). Throws LineSearchStalled after 60 halvings.
double armijo_step(const std::function<double(const Vec&)>& phi, const Vec& x, const Vec& d, double dMd, double sigma,
                   bool paper_literal = false);

SolveResult penalty_solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg = {});
SolveResult auglag_solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg = {});
SolveResult sqp_solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg = {});
SolveResult solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg);

}  // namespace nsocp
