#include "nsocp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nsocp/errors.hpp"

namespace nsocp {

const char* method_name(Method m) {
  switch (m) {
    case Method::Penalty:
      return "penalty";
    case Method::AugLag:
      return "auglag";
    case Method::Sqp:
      return "sqp";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "penalty") return Method::Penalty;
  if (s == "auglag") return Method::AugLag;
  if (s == "sqp") return Method::Sqp;
  throw Error(ErrorKind::InvalidProblem, "unknown method '" + s + "'");
}

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::IterationLimit:
      return "iteration-limit";
    case SolveStatus::Stalled:
      return "stalled";
    case SolveStatus::Diverged:
      return "diverged";
    case SolveStatus::SubproblemInfeasible:
      return "subproblem-infeasible";
  }
  return "?";
}

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return 0;
    case SolveStatus::IterationLimit:
    case SolveStatus::Stalled:
      return 2;
    case SolveStatus::Diverged:
    case SolveStatus::SubproblemInfeasible:
      return 3;
  }
  return 1;
}

InnerResult inner_minimize(const Objective& phi, const Vec& x0, double tol, int max_iter, bool throw_on_stall) {
  InnerResult r;
  Vec x = x0;
  Vec g(x.size());
  double f = phi(x, &g);
  double gn = g.norm();
  double alpha = gn > 0 ? std::min(1.0, 1.0 / gn) : 1.0;
  r.status = InnerStatus::MaxIter;
  for (int it = 0; it < max_iter; ++it) {
    if (gn <= tol) {
      r.status = InnerStatus::Converged;
      break;
    }
    double t = alpha;
    Vec xn, gw(x.size());
    double fn = 0.0;
    bool accepted = false;
    // fallback when f is too noisy to show the decrease: smallest gradient
    // among trials that do not raise f beyond its noise level
    double fb_gn = gn, fb_t = 0.0, fb_f = 0.0;
    Vec fb_x, fb_g;
    for (int h = 0; h <= 60; ++h) {
      xn = x - t * g;
      try {
        fn = phi(xn, &gw);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DomainError) throw;
        fn = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(fn)) {
        if (fn <= f - 1e-4 * t * gn * gn) {
          accepted = true;
          break;
        }
        const double gwn = gw.norm();
        if (fn <= f + 1e-8 * std::abs(f) && gwn < fb_gn) {
          fb_gn = gwn;
          fb_t = t;
          fb_f = fn;
          fb_x = xn;
          fb_g = gw;
        }
      }
      t *= 0.5;
    }
    if (!accepted && fb_t > 0.0) {
      accepted = true;
      t = fb_t;
      fn = fb_f;
      xn = fb_x;
      gw = fb_g;
    }
    if (!accepted) {
      r.status = InnerStatus::Stalled;
      if (throw_on_stall) {
        r.x = x;
        Error e(ErrorKind::LineSearchStalled, "line search stalled after 60 halvings");
        e.value = gn;
        throw e;
      }
      break;
    }
    const Vec s = xn - x;
    const Vec y = gw - g;
    const double sy = s.dot(y);
    alpha = sy > 0 ? s.squaredNorm() / sy : 2.0 * t;
    alpha = std::clamp(alpha, 1e-30, 1e30);
    x = xn;
    f = fn;
    g = gw;
    gn = g.norm();
    ++r.iterations;
  }
  if (r.status == InnerStatus::MaxIter && gn <= tol) r.status = InnerStatus::Converged;
  r.x = x;
  r.value = f;
  r.grad_norm = gn;
  return r;
}

namespace {

struct Oracle {
  int n = 0;
  std::function<PointEval(const Vec&)> eval;
};

Oracle oracle_of(const ProblemSpec& p) {
  return {p.n, [&p](const Vec& x) { return evaluate(p, x); }};
}

double penalty_value(const PointEval& ev, double rho, Vec* grad) {
  double v = ev.f;
  if (grad) *grad = ev.grad_f;
  for (std::size_t j = 0; j < ev.g.size(); ++j) {
    const Vec pm = project(Vec(-ev.g[j]));
    v += 0.5 * rho * pm.squaredNorm();
    if (grad) *grad -= rho * (ev.Dg[j].transpose() * pm);
  }
  return v;
}

// shifted point whose projection gives the multiplier estimate
Vec al_shift(const Vec& g, const Vec& mut, double rho, bool literal) {
  return literal ? Vec(-rho * g - mut) : Vec(mut - rho * g);
}

double al_value(const PointEval& ev, double rho, const Multipliers& mut, bool literal, Vec* grad) {
  double v = ev.f;
  if (grad) *grad = ev.grad_f;
  for (std::size_t j = 0; j < ev.g.size(); ++j) {
    const Vec pm = project(al_shift(ev.g[j], mut[j], rho, literal));
    v += 0.5 * (pm.squaredNorm() - mut[j].squaredNorm()) / rho;
    if (grad) *grad -= ev.Dg[j].transpose() * pm;
  }
  return v;
}

bool kkt_ok(const KktResidual& r, const SolverConfig& cfg) {
  return r.stationarity <= cfg.stationarity_tol && r.feasibility <= cfg.feasibility_tol &&
         r.complementarity <= cfg.feasibility_tol;
}

Multipliers zero_multipliers(const PointEval& ev) {
  Multipliers mu;
  for (const auto& g : ev.g) mu.push_back(Vec::Zero(g.size()));
  return mu;
}

// the non-improving iterate is not reported
void drop_last(SolveResult& res) {
  if (res.log.size() < 2) return;
  res.log.pop_back();
  res.x = res.log.back().x;
  res.mu = res.log.back().mu;
}

double inner_tol(const SolverConfig& cfg, int k) { return std::max(cfg.inner_tol_floor, std::pow(0.1, k)); }

SolveResult auglag_core(const Oracle& o, const Vec& x0, const SolverConfig& cfg) {
  SolveResult res;
  Vec x = x0;
  double rho = cfg.rho0;
  Multipliers mut = zero_multipliers(o.eval(x));
  double prev_v = std::numeric_limits<double>::infinity();
  double prev_max = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cfg.max_outer; ++k) {
    auto phi = [&](const Vec& z, Vec* g) { return al_value(o.eval(z), rho, mut, cfg.paper_literal, g); };
    const InnerResult in = inner_minimize(phi, x, inner_tol(cfg, k), cfg.inner_max_iter, false);
    x = in.x;
    const PointEval ev = o.eval(x);
    Multipliers mu;
    std::vector<Vec> delta;
    double v = 0.0;
    for (std::size_t j = 0; j < ev.g.size(); ++j) {
      mu.push_back(project(al_shift(ev.g[j], mut[j], rho, cfg.paper_literal)));
      delta.push_back((mu[j] - mut[j]) / rho);
      v = std::max(v, delta.back().norm());
    }
    Vec gal;
    al_value(ev, rho, mut, cfg.paper_literal, &gal);
    const Vec gl = lagrangian_grad(ev, mu);
    const double scale = 1.0 + ev.grad_f.norm() + jacobian_transpose_sum(ev.Dg, mu).norm();
    const double gap = (gal - gl).norm() / scale;
    res.max_identity_gap = std::max(res.max_identity_gap, gap);
    if (gap > 1e-10) throw std::logic_error("augmented Lagrangian gradient identity violated");

    IterateLog it;
    it.k = k;
    it.x = x;
    it.mu = mu;
    it.delta = delta;
    it.residuals = kkt_residual(ev, mu);
    it.rho = rho;
    it.inner_iterations = in.iterations;
    res.log.push_back(it);
    res.x = x;
    res.mu = mu;

    if (!x.allFinite() || x.norm() > cfg.divergence_norm) {
      res.status = SolveStatus::Diverged;
      res.note = "iterates left the ball of radius " + std::to_string(cfg.divergence_norm);
      return res;
    }
    if (kkt_ok(it.residuals, cfg)) {
      res.status = SolveStatus::Converged;
      return res;
    }
    if (in.status != InnerStatus::Converged && it.residuals.max() >= prev_max) {
      res.status = SolveStatus::IterationLimit;
      res.note = "residuals stopped improving at the floating-point floor";
      drop_last(res);
      return res;
    }
    prev_max = it.residuals.max();
    if (v > 0.5 * prev_v) {
      if (rho * cfg.rho_growth > cfg.rho_max) {
        res.status = SolveStatus::IterationLimit;
        res.note = "penalty parameter cap reached";
        return res;
      }
      rho *= cfg.rho_growth;
    }
    prev_v = v;
    for (std::size_t j = 0; j < mu.size(); ++j)
      mut[j] = mu[j].cwiseMax(-cfg.multiplier_box).cwiseMin(cfg.multiplier_box);
  }
  res.status = SolveStatus::IterationLimit;
  res.note = "outer iteration limit";
  return res;
}

}  // namespace

double penalty_objective(const ProblemSpec& p, const Vec& x, double rho, Vec* grad) {
  return penalty_value(evaluate(p, x), rho, grad);
}

double auglag_objective(const ProblemSpec& p, const Vec& x, double rho, const Multipliers& mutilde, Vec* grad,
                        bool paper_literal) {
  return al_value(evaluate(p, x), rho, mutilde, paper_literal, grad);
}

double violation_phi(const ProblemSpec& p, const Vec& x, double alpha, bool paper_literal) {
  double v = evaluate_f(p, x);
  if (alpha == 0.0) return v;
  for (const Vec& g : evaluate_g(p, x)) {
    const double viol = paper_literal ? -lambda2(g) : -lambda1(g);
    v += alpha * std::max(0.0, viol);
  }
  return v;
}

double armijo_step(const std::function<double(const Vec&)>& phi, const Vec& x, const Vec& d, double dMd, double sigma,
                   bool paper_literal) {
  const double f0 = phi(x);
  double t = 1.0;
  for (int h = 0; h <= 60; ++h) {
    double decrease = -std::numeric_limits<double>::infinity();
    try {
      decrease = f0 - phi(x + t * d);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DomainError) throw;
    }
    const bool ok = paper_literal ? decrease <= sigma * t * dMd : decrease >= sigma * t * dMd;
    if (ok) return t;
    t *= 0.5;
  }
  throw Error(ErrorKind::LineSearchStalled, "step-size rule failed after 60 halvings");
}

SolveResult penalty_solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg) {
  SolveResult res;
  Vec x = x0;
  double rho = cfg.rho0;
  double prev_max = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= cfg.max_outer; ++k) {
    auto phi = [&](const Vec& z, Vec* g) { return penalty_objective(p, z, rho, g); };
    const InnerResult in = inner_minimize(phi, x, inner_tol(cfg, k), cfg.inner_max_iter, false);
    x = in.x;
    const PointEval ev = evaluate(p, x);
    Multipliers mu;
    std::vector<Vec> delta;
    for (const Vec& g : ev.g) {
      mu.push_back(rho * project(Vec(-g)));
      delta.push_back(project(g) - g);
    }
    IterateLog it;
    it.k = k;
    it.x = x;
    it.mu = mu;
    it.delta = delta;
    it.residuals = kkt_residual(ev, mu);
    it.rho = rho;
    it.inner_iterations = in.iterations;
    res.log.push_back(it);
    res.x = x;
    res.mu = mu;

    if (!x.allFinite() || x.norm() > cfg.divergence_norm) {
      res.status = SolveStatus::Diverged;
      res.note = "iterates left the ball of radius " + std::to_string(cfg.divergence_norm);
      return res;
    }
    if (kkt_ok(it.residuals, cfg)) {
      res.status = SolveStatus::Converged;
      return res;
    }
    if (in.status != InnerStatus::Converged && it.residuals.max() >= prev_max) {
      res.status = SolveStatus::IterationLimit;
      res.note = "residuals stopped improving at the floating-point floor";
      drop_last(res);
      return res;
    }
    prev_max = it.residuals.max();
    if (rho * cfg.rho_growth > cfg.rho_max) {
      res.status = SolveStatus::IterationLimit;
      res.note = "penalty parameter cap reached";
      return res;
    }
    rho *= cfg.rho_growth;
  }
  res.status = SolveStatus::IterationLimit;
  res.note = "outer iteration limit";
  return res;
}

SolveResult auglag_solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg) {
  return auglag_core(oracle_of(p), x0, cfg);
}

SolveResult sqp_solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg) {
  SolveResult res;
  Vec x = x0;
  double alpha = cfg.alpha0;

  SolverConfig qcfg;
  qcfg.rho0 = 1.0;
  qcfg.rho_growth = 10.0;
  qcfg.rho_max = 1e14;
  qcfg.max_outer = 80;
  qcfg.inner_tol_floor = 1e-12;
  qcfg.stationarity_tol = 1e-11;
  qcfg.feasibility_tol = 1e-11;
  qcfg.multiplier_box = 1e12;
  qcfg.divergence_norm = 1e12;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const PointEval ev = evaluate(p, x);
    Oracle qp;
    qp.n = p.n;
    qp.eval = [&ev](const Vec& d) {
      PointEval e;
      e.f = ev.grad_f.dot(d) + 0.5 * d.squaredNorm();
      e.grad_f = ev.grad_f + d;
      for (std::size_t j = 0; j < ev.g.size(); ++j) e.g.push_back(ev.g[j] + ev.Dg[j] * d);
      e.Dg = ev.Dg;
      return e;
    };
    const SolveResult sub = auglag_core(qp, Vec::Zero(p.n), qcfg);
    const KktResidual& qr = sub.log.back().residuals;
    if (sub.status != SolveStatus::Converged && qr.feasibility > 1e-6) {
      res.status = SolveStatus::SubproblemInfeasible;
      res.note = "linearized constraints could not be satisfied at iteration " + std::to_string(k);
      return res;
    }
    const Vec d = sub.x;
    const Multipliers& mu = sub.mu;
    std::vector<Vec> delta;
    for (std::size_t j = 0; j < ev.g.size(); ++j) delta.push_back(ev.Dg[j] * d);

    IterateLog it;
    it.k = k;
    it.x = x;
    it.mu = mu;
    it.delta = delta;
    it.residuals = kkt_residual(ev, mu);
    it.rho = alpha;
    it.inner_iterations = static_cast<int>(sub.log.size());
    res.log.push_back(it);
    res.x = x;
    res.mu = mu;

    if (d.norm() <= cfg.stationarity_tol) {
      res.status = SolveStatus::Converged;
      return res;
    }
    double mu0 = 0.0;
    for (const Vec& m : mu) mu0 = std::max(mu0, std::abs(m[0]));
    if (alpha < mu0) alpha = std::max(alpha, mu0) + cfg.tau;

    auto phi = [&](const Vec& z) { return violation_phi(p, z, alpha, cfg.paper_literal); };
    double t = 0.0;
    try {
      t = armijo_step(phi, x, d, d.squaredNorm(), cfg.sigma, cfg.paper_literal);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::LineSearchStalled) throw;
      res.status = SolveStatus::Stalled;
      res.note = "step-size rule stalled at iteration " + std::to_string(k);
      return res;
    }
    x += t * d;
    if (!x.allFinite() || x.norm() > cfg.divergence_norm) {
      res.status = SolveStatus::Diverged;
      res.note = "iterates left the ball of radius " + std::to_string(cfg.divergence_norm);
      return res;
    }
  }
  res.status = SolveStatus::IterationLimit;
  res.note = "outer iteration limit";
  return res;
}

SolveResult solve(const ProblemSpec& p, const Vec& x0, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::Penalty:
      return penalty_solve(p, x0, cfg);
    case Method::AugLag:
      return auglag_solve(p, x0, cfg);
    case Method::Sqp:
      return sqp_solve(p, x0, cfg);
  }
  return {};
}

}  // namespace nsocp
