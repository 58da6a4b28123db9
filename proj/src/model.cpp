#include "nsocp/model.hpp"

#include <algorithm>
#include <cmath>

#include "nsocp/errors.hpp"
#include "nsocp/kernels.hpp"

namespace nsocp {

ProblemSpec make_problem(const std::string& name, int n, const std::string& objective,
                         const std::vector<std::vector<std::string>>& blocks) {
  if (n < 1) throw Error(ErrorKind::InvalidProblem, "n must be >= 1");
  if (blocks.empty()) throw Error(ErrorKind::InvalidProblem, "at least one cone constraint is required");
  ProblemSpec p;
  p.name = name;
  p.n = n;
  p.objective_text = objective;
  p.objective = parse(objective, n);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& comps = blocks[j];
    if (comps.size() < 2) {
      Error err(ErrorKind::InvalidProblem,
                "constraint " + std::to_string(j) + " has dimension " + std::to_string(comps.size()) +
                    "; one-dimensional cones are not supported (use m >= 2)");
      err.block = static_cast<long>(j);
      throw err;
    }
    ConstraintBlock b;
    b.dim = static_cast<int>(comps.size());
    for (const auto& c : comps) {
      b.components.push_back(parse(c, n));
      b.texts.push_back(c);
    }
    p.constraints.push_back(std::move(b));
  }
  return p;
}

PointEval evaluate(const ProblemSpec& p, const Vec& x) {
  if (x.size() != p.n) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
  PointEval ev;
  DualNumber fd = eval_dual(p.objective, x);
  ev.f = fd.value;
  ev.grad_f = fd.partials;
  ev.g.reserve(p.constraints.size());
  ev.Dg.reserve(p.constraints.size());
  for (const auto& b : p.constraints) {
    Vec g(b.dim);
    Mat D(b.dim, p.n);
    for (int i = 0; i < b.dim; ++i) {
      DualNumber d = eval_dual(b.components[i], x);
      g[i] = d.value;
      D.row(i) = d.partials.transpose();
    }
    ev.g.push_back(std::move(g));
    ev.Dg.push_back(std::move(D));
  }
  return ev;
}

double evaluate_f(const ProblemSpec& p, const Vec& x) { return eval(p.objective, x); }

std::vector<Vec> evaluate_g(const ProblemSpec& p, const Vec& x) {
  std::vector<Vec> out;
  out.reserve(p.constraints.size());
  for (const auto& b : p.constraints) {
    Vec g(b.dim);
    for (int i = 0; i < b.dim; ++i) g[i] = eval(b.components[i], x);
    out.push_back(std::move(g));
  }
  return out;
}

IndexClassification classify_indices(const std::vector<Vec>& g, double tol) {
  IndexClassification ic;
  ic.tol = tol;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double l1 = lambda1(g[j]);
    if (l1 < -tol) {
      Error err(ErrorKind::InfeasiblePoint, "constraint block " + std::to_string(j) +
                                                " is violated (lambda1 = " + std::to_string(l1) + ")");
      err.block = static_cast<long>(j);
      err.value = -l1;
      throw err;
    }
    switch (classify(SocVector::from(g[j]), tol)) {
      case ConeMembership::Interior: ic.Iint.push_back(static_cast<int>(j)); break;
      case ConeMembership::Origin: ic.I0.push_back(static_cast<int>(j)); break;
      case ConeMembership::BoundaryNonzero: ic.IB.push_back(static_cast<int>(j)); break;
      case ConeMembership::Outside: break;
    }
  }
  return ic;
}

IndexClassification classify_indices(const ProblemSpec& p, const Vec& x, double tol) {
  return classify_indices(evaluate_g(p, x), tol);
}

Vec jacobian_transpose_sum(const std::vector<Mat>& Dg, const Multipliers& mu) {
  if (Dg.size() != mu.size()) throw Error(ErrorKind::DimensionMismatch, "multiplier count mismatch");
  if (Dg.empty()) return Vec();
  Vec s = Vec::Zero(Dg[0].cols());
  for (std::size_t j = 0; j < Dg.size(); ++j) {
    if (mu[j].size() != Dg[j].rows()) throw Error(ErrorKind::DimensionMismatch, "multiplier block size mismatch");
    kernels::gemv_t(Dg[j].data(), static_cast<std::size_t>(Dg[j].rows()), static_cast<std::size_t>(Dg[j].cols()),
                    mu[j].data(), s.data());
  }
  return s;
}

Vec lagrangian_grad(const PointEval& ev, const Multipliers& mu) {
  return ev.grad_f - jacobian_transpose_sum(ev.Dg, mu);
}

Vec lagrangian_grad(const ProblemSpec& p, const Vec& x, const Multipliers& mu) {
  return lagrangian_grad(evaluate(p, x), mu);
}

double KktResidual::max() const { return std::max({stationarity, feasibility, complementarity}); }

KktResidual kkt_residual(const PointEval& ev, const Multipliers& mu) {
  KktResidual r;
  r.stationarity = lagrangian_grad(ev, mu).norm();
  for (std::size_t j = 0; j < ev.g.size(); ++j) {
    r.feasibility = std::max(r.feasibility, project(Vec(-ev.g[j])).norm());
    r.complementarity = std::max(
        r.complementarity,
        std::abs(kernels::dot(mu[j].data(), ev.g[j].data(), static_cast<std::size_t>(ev.g[j].size()))));
  }
  return r;
}

KktResidual kkt_residual(const ProblemSpec& p, const Vec& x, const Multipliers& mu) {
  return kkt_residual(evaluate(p, x), mu);
}

double max_block_norm(const Multipliers& mu) {
  double m = 0.0;
  for (const auto& v : mu) m = std::max(m, v.norm());
  return m;
}

AkktReport akkt_check(const ProblemSpec& p, const std::vector<IterateLog>& iterates, double eps) {
  if (iterates.size() < 2) throw Error(ErrorKind::InvalidProblem, "akkt_check needs at least two iterates");
  AkktReport rep;
  rep.worst_lambda1 = INFINITY;
  bool perturbed = true;
  for (const auto& it : iterates) {
    if (!it.delta) {
      throw Error(ErrorKind::MissingPerturbations, "iterate " + std::to_string(it.k) + " has no perturbations");
    }
    const auto& delta = *it.delta;
    const std::vector<Vec> g = evaluate_g(p, it.x);
    if (delta.size() != g.size() || it.mu.size() != g.size())
      throw Error(ErrorKind::DimensionMismatch, "iterate block count mismatch");
    double dn = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Vec shifted = g[j] + delta[j];
      const double l1 = lambda1(shifted);
      const double c = std::abs(shifted.dot(it.mu[j]));
      rep.worst_lambda1 = std::min(rep.worst_lambda1, l1);
      rep.worst_complementarity = std::max(rep.worst_complementarity, c);
      if (l1 < -eps || c > eps) perturbed = false;
      dn += delta[j].squaredNorm();
    }
    rep.delta_norms.push_back(std::sqrt(dn));
    rep.mu_norms.push_back(max_block_norm(it.mu));
  }
  rep.perturbed_ok = perturbed;
  rep.last_stationarity = lagrangian_grad(p, iterates.back().x, iterates.back().mu).norm();
  rep.stationarity_ok = rep.last_stationarity <= eps;
  rep.delta_decreasing = rep.delta_norms.back() <= rep.delta_norms.front() && rep.delta_norms.back() <= eps;
  const double first_mu = rep.mu_norms.front();
  rep.mu_growth = first_mu > 0 ? rep.mu_norms.back() / first_mu : (rep.mu_norms.back() > 0 ? INFINITY : 1.0);
  rep.ok = rep.stationarity_ok && rep.perturbed_ok && rep.delta_decreasing;
  return rep;
}

KktSearchResult find_kkt_multipliers(const ProblemSpec& p, const Vec& x, double tol, double index_tol) {
  const PointEval ev = evaluate(p, x);
  const IndexClassification ic = classify_indices(ev.g, index_tol);
  const int n = p.n;

  // Columns of A: one per IB block (direction Dgᵀ Γg), m_j per I0 block.
  struct Var {
    int block;
    int offset;
    int size;
    bool halfline;
  };
  std::vector<Var> vars;
  int cols = 0;
  for (int j : ic.IB) {
    vars.push_back({j, cols, 1, true});
    cols += 1;
  }
  for (int j : ic.I0) {
    vars.push_back({j, cols, p.constraints[j].dim, false});
    cols += p.constraints[j].dim;
  }

  KktSearchResult res;
  res.mu.resize(p.q());
  for (int j = 0; j < p.q(); ++j) res.mu[j] = Vec::Zero(p.constraints[j].dim);

  Eigen::MatrixXd A(n, cols);
  std::vector<Vec> ray(p.q());
  for (const auto& v : vars) {
    if (v.halfline) {
      ray[v.block] = gamma_reflect(ev.g[v.block]);
      ray[v.block] /= ray[v.block].norm();
      A.col(v.offset) = ev.Dg[v.block].transpose() * ray[v.block];
    } else {
      A.middleCols(v.offset, v.size) = ev.Dg[v.block].transpose();
    }
  }
  const Vec b = ev.grad_f;
  if (cols == 0) {
    res.residual = b.norm();
    res.exists = res.residual <= tol * (1.0 + b.norm());
    return res;
  }

  const double L = std::max(1e-300, A.operatorNorm() * A.operatorNorm());
  auto proj = [&](Vec& z) {
    for (const auto& v : vars) {
      if (v.halfline) {
        z[v.offset] = std::max(0.0, z[v.offset]);
      } else {
        Vec blk = z.segment(v.offset, v.size);
        z.segment(v.offset, v.size) = project(blk);
      }
    }
  };
  Vec z = Vec::Zero(cols), y = z, zprev = z;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    const Vec gr = A.transpose() * (A * y - b);
    zprev = z;
    z = y - gr / L;
    proj(z);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = z + ((t - 1.0) / tn) * (z - zprev);
    t = tn;
    if ((z - zprev).norm() <= 1e-15 * (1.0 + z.norm())) break;
  }
  res.residual = (A * z - b).norm();
  res.exists = res.residual <= tol * (1.0 + b.norm());
  for (const auto& v : vars) {
    if (v.halfline) {
      res.mu[v.block] = z[v.offset] * ray[v.block];
    } else {
      res.mu[v.block] = z.segment(v.offset, v.size);
    }
  }
  return res;
}

}  // namespace nsocp
