// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failing criteria.
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "nsocp/corpus.hpp"
#include "nsocp/cq.hpp"
#include "nsocp/rank.hpp"
#include "nsocp/rng.hpp"
#include "nsocp/solvers.hpp"

using namespace nsocp;

namespace {

constexpr double kCorpusSeconds = 60.0;
constexpr int kHierarchySeeds = 100;
constexpr int kConeTrials = 10000;
constexpr double kConeTol = 1e-10;
constexpr int kCaraTrials = 10000;
constexpr double kCaraTol = 1e-10;
constexpr double kHalflineXTol = 1e-5;
constexpr double kHalflineMuTol = 1e-4;
constexpr double kAkktEps = 1e-6;
constexpr double kDivergenceResidual = 1e-6;
constexpr double kDivergenceGrowth = 10.0;
constexpr double kDivergenceRhoGrowth = 100.0;
constexpr int kAuditPoints = 100;
constexpr double kAuditTol = 1e-5;

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void corpus_verdicts() {
  const auto t0 = std::chrono::steady_clock::now();
  int checks = 0, bad = 0;
  for (const auto& f : corpus()) {
    const ProblemSpec p = load_fixture(f);
    for (const Vec& x : p.points_of_interest)
      for (const auto& c : check_expected(p, x)) {
        ++checks;
        if (!c.match) {
          ++bad;
          std::printf("  mismatch %s %s\n", f.name.c_str(), c.cq.c_str());
        }
      }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "corpus verdicts", bad == 0 && secs < kCorpusSeconds,
         fmt("%d/%d match in %.2f s (limit %.0f s)", checks - bad, checks, secs, kCorpusSeconds));
}

void hierarchy() {
  int problems = 0, violations = 0;
  auto check = [&](const ProblemSpec& p, const Vec& x, const std::string& label) {
    std::map<std::string, CqStatus> table;
    for (const auto& cq : cq_names()) table[cq] = run_cq(p, x, cq).status;
    ++problems;
    for (const auto& [s, w] : hierarchy_violations(table)) {
      ++violations;
      std::printf("  %s: %s HOLDS but %s VIOLATED\n", label.c_str(), s.c_str(), w.c_str());
    }
  };
  for (const auto& f : corpus()) {
    const ProblemSpec p = load_fixture(f);
    check(p, p.points_of_interest[0], f.name);
  }
  for (int s = 0; s < kHierarchySeeds; ++s) {
    const ProblemSpec p = random_problem(static_cast<std::uint64_t>(s));
    check(p, Vec::Zero(p.n), "random-" + std::to_string(s));
  }
  report(2, "hierarchy consistency", violations == 0,
         fmt("%d problems, %d arrow violations", problems, violations));
}

void cone_properties() {
  Rng rng(2024);
  double moreau = 0, idem = 0, nonexp = 0, recon = 0;
  for (int t = 0; t < kConeTrials; ++t) {
    const int m = rng.integer(2, 6);
    const double scale = std::pow(10.0, rng.uniform(-2, 2));
    const Vec y = scale * rng.normal_vec(m), z = scale * rng.normal_vec(m);
    const Vec py = project(y);
    const double s = 1 + y.norm();
    moreau = std::max(moreau, (py - project(Vec(-y)) - y).norm() / s);
    idem = std::max(idem, (project(py) - py).norm() / s);
    nonexp = std::max(nonexp, (py - project(z)).norm() - (y - z).norm());
    const auto sd = spectral_decompose(SocVector::from(y));
    recon = std::max(recon, (sd.lambda1 * sd.u1 + sd.lambda2 * sd.u2 - y).norm() / s);
  }
  report(3, "cone primitives", moreau <= kConeTol && idem <= kConeTol && nonexp <= kConeTol && recon <= kConeTol,
         fmt("%d trials: moreau %.1e, idempotence %.1e, nonexpansive excess %.1e, reconstruction %.1e (tol %.0e)",
             kConeTrials, moreau, idem, nonexp, recon, kConeTol));
}

void caratheodory() {
  Rng rng(77);
  int bad = 0;
  double worst = 0;
  for (int t = 0; t < kCaraTrials; ++t) {
    const int n = rng.integer(1, 6), p = rng.integer(1, 10);
    std::vector<Vec> vs;
    for (int i = 0; i < p; ++i) vs.push_back(rng.normal_vec(n));
    Vec alpha(p);
    for (int i = 0; i < p; ++i) alpha[i] = (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.1, 2);
    const auto r = caratheodory_reduce(vs, alpha);
    Vec sum = Vec::Zero(n), red = Vec::Zero(n);
    for (int i = 0; i < p; ++i) sum += alpha[i] * vs[i];
    VectorFamily F;
    bool signs = true;
    for (std::size_t i = 0; i < r.J.size(); ++i) {
      red += r.alphas[i] * vs[r.J[i]];
      F.add(vs[r.J[i]], {});
      signs = signs && r.alphas[i] * alpha[r.J[i]] > 0;
    }
    const double err = (red - sum).norm() / (1 + sum.norm());
    worst = std::max(worst, err);
    const bool indep = F.empty() || numeric_rank(F) == static_cast<int>(F.size());
    if (!(indep && signs && err <= kCaraTol)) ++bad;
  }
  report(4, "caratheodory reduce", bad == 0,
         fmt("%d instances, %d failing, worst sum error %.1e (tol %.0e)", kCaraTrials, bad, worst, kCaraTol));
}

void halfline() {
  const ProblemSpec p = load_fixture("halfline-min");
  bool ok = true;
  std::string detail;
  for (Method m : {Method::Penalty, Method::AugLag, Method::Sqp}) {
    SolverConfig cfg;
    cfg.method = m;
    const auto r = solve(p, Vec::Constant(1, 5.0), cfg);
    const double ex = std::abs(r.x[0] - 1.0);
    const double emu = (r.mu[0] - (Vec(2) << 1.0, -1.0).finished()).norm();
    const bool akkt = akkt_check(p, r.log, kAkktEps).ok;
    ok = ok && ex <= kHalflineXTol && emu <= kHalflineMuTol && akkt;
    detail += fmt("%s |x-1| %.1e |mu-(1,-1)| %.1e akkt %s; ", method_name(m), ex, emu, akkt ? "ok" : "no");
  }
  report(5, "halfline-min by every method", ok, detail);
}

void divergence() {
  const ProblemSpec p = load_fixture("zz-erratum");
  auto growth = [](const SolveResult& r) {
    const std::size_t K = r.log.size();
    return K > 3 ? max_block_norm(r.log[K - 1].mu) / max_block_norm(r.log[K - 4].mu) : 0.0;
  };
  bool ok = true;
  std::string detail = fmt("rho_growth %.0f: ", kDivergenceRhoGrowth);
  for (Method m : {Method::Penalty, Method::AugLag}) {
    SolverConfig cfg;
    cfg.method = m;
    cfg.rho_growth = kDivergenceRhoGrowth;
    const auto r = solve(p, Vec::Constant(1, 1.0), cfg);
    const auto& last = r.log.back().residuals;
    const double g = growth(r);
    ok = ok && last.feasibility < kDivergenceResidual && last.stationarity < kDivergenceResidual &&
         g >= kDivergenceGrowth;
    detail += fmt("%s feas %.1e stat %.1e |mu| %.1e growth(3) %.2f; ", method_name(m), last.feasibility,
                  last.stationarity, max_block_norm(r.log.back().mu), g);
  }
  detail += "default rho_growth:";
  for (Method m : {Method::Penalty, Method::AugLag}) {
    SolverConfig cfg;
    cfg.method = m;
    detail += fmt(" %s %.6f", method_name(m), growth(solve(p, Vec::Constant(1, 1.0), cfg)));
  }
  report(6, "multiplier divergence on zz-erratum", ok, detail);
}

double rel_err(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

Vec central_fd(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

void derivative_audit() {
  Rng rng(99);
  double worst_expr = 0, worst_pen = 0, worst_al = 0;
  int points = 0;
  for (const auto& f : corpus()) {
    const ProblemSpec p = load_fixture(f);
    std::vector<Expr> exprs{p.objective};
    for (const auto& b : p.constraints)
      for (const auto& c : b.components) exprs.push_back(c);
    for (int t = 0; t < kAuditPoints; ++t, ++points) {
      const Vec x = rng.normal_vec(p.n);
      for (const Expr& e : exprs)
        worst_expr = std::max(worst_expr, rel_err(grad(e, x), central_fd([&](const Vec& z) { return eval(e, z); }, x)));
      const double rho = std::pow(10.0, rng.uniform(0, 3));
      Multipliers mut;
      for (const auto& b : p.constraints) mut.push_back(rng.normal_vec(b.dim));
      Vec g;
      penalty_objective(p, x, rho, &g);
      worst_pen = std::max(worst_pen, rel_err(g, central_fd([&](const Vec& z) { return penalty_objective(p, z, rho, nullptr); }, x)));
      auglag_objective(p, x, rho, mut, &g);
      worst_al = std::max(worst_al, rel_err(g, central_fd([&](const Vec& z) { return auglag_objective(p, z, rho, mut, nullptr); }, x)));
    }
  }
  report(7, "derivative audits", worst_expr <= kAuditTol && worst_pen <= kAuditTol && worst_al <= kAuditTol,
         fmt("%d points: expr %.1e, penalty %.1e, auglag %.1e (tol %.0e)", points, worst_expr, worst_pen, worst_al,
             kAuditTol));
}

void ndg_crosscheck() {
  int fixtures = 0, disagree = 0;
  for (const auto& f : corpus()) {
    const ProblemSpec p = load_fixture(f);
    for (const Vec& x : p.points_of_interest) {
      ++fixtures;
      const auto c = crosscheck_ndg_decomposition(p, x);
      if (!c.consistent) {
        ++disagree;
        std::printf("  %s: ndg %s, weak-ndg %s, stacked rank %s\n", f.name.c_str(), status_name(c.ndg),
                    status_name(c.weak_ndg), c.hat_full_row_rank ? "full" : "deficient");
      }
    }
  }
  report(8, "ndg decomposition cross-check", disagree == 0, fmt("%d points, %d disagreements", fixtures, disagree));
}

}  // namespace

int main() {
  corpus_verdicts();
  hierarchy();
  cone_properties();
  caratheodory();
  halfline();
  divergence();
  derivative_audit();
  ndg_crosscheck();
  std::printf("%d of 8 criteria failing\n", failures);
  return failures;
}
