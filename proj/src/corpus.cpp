#include "nsocp/corpus.hpp"

#include <cmath>
#include <sstream>

#include "nsocp/errors.hpp"
#include "nsocp/problem_io.hpp"

namespace nsocp {

namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

}  // namespace

const std::vector<Fixture>& corpus() {
  static const std::vector<Fixture> fixtures{
      {"ex31-padded", R"({"name": "ex31-padded", "n": 2, "objective": "0",
        "constraints": [{"dim": 3, "components": ["x1", "x2", "0"]}],
        "points_of_interest": [[0, 0]],
        "expected": {"ndg": false, "weak-ndg": true}})",
       std::nullopt, false},
      {"ex32", R"({"name": "ex32", "n": 2, "objective": "0",
        "constraints": [{"dim": 3, "components": ["x1", "x2", "x2"]}],
        "points_of_interest": [[0, 0]],
        "expected": {"ndg": false, "weak-ndg": true}})",
       std::nullopt, false},
      {"ex33", R"({"name": "ex33", "n": 1, "objective": "0",
        "constraints": [{"dim": 3, "components": ["4*x1", "2*x1", "x1"]}],
        "points_of_interest": [[0]],
        "expected": {"robinson": true, "weak-ndg": false}})",
       std::nullopt, false},
      {"zz-erratum", R"({"name": "zz-erratum", "n": 1, "objective": "-x1",
        "constraints": [{"dim": 2, "components": ["x1", "x1 + x1^2"]}],
        "points_of_interest": [[0]],
        "expected": {"weak-crcq": false, "weak-cpld": false, "kkt": false}})",
       scalar(1.0), false},
      {"ex41", R"({"name": "ex41", "n": 1, "objective": "0",
        "constraints": [{"dim": 3, "components": ["-x1", "x1", "x1"]}],
        "points_of_interest": [[0]],
        "expected": {"weak-cpld": true, "weak-robinson": false}})",
       std::nullopt, false},
      {"ex42", R"({"name": "ex42", "n": 2, "objective": "0",
        "constraints": [{"dim": 2, "components": ["2*x1", "x2^2"]}],
        "points_of_interest": [[0, 0]],
        "expected": {"robinson": true, "weak-crcq": false}})",
       std::nullopt, false},
      {"ex51", R"({"name": "ex51", "n": 1, "objective": "0",
        "constraints": [{"dim": 2, "components": ["-x1", "x1"]}],
        "points_of_interest": [[0]],
        "expected": {"seq-crcq": true, "seq-cpld": true, "ndg": false, "robinson": false}})",
       std::nullopt, false},
      {"ex52", R"({"name": "ex52", "n": 1, "objective": "0",
        "constraints": [{"dim": 3, "components": ["x1^2", "x1", "0"]}],
        "points_of_interest": [[0]],
        "expected": {"weak-cpld": true, "seq-cpld": false}})",
       std::nullopt, false},
      {"halfline-min", R"({"name": "halfline-min", "n": 1, "objective": "x1",
        "constraints": [{"dim": 2, "components": ["x1", "1"]}],
        "points_of_interest": [[1]],
        "expected": {"kkt": true, "ndg": true, "robinson": true}})",
       scalar(5.0), true},
  };
  return fixtures;
}

const Fixture* find_fixture(const std::string& name) {
  for (const auto& f : corpus())
    if (f.name == name) return &f;
  return nullptr;
}

ProblemSpec load_fixture(const Fixture& f) { return load_problem_text(f.text); }

ProblemSpec load_fixture(const std::string& name) {
  const Fixture* f = find_fixture(name);
  if (!f) throw Error(ErrorKind::InvalidProblem, "no fixture named '" + name + "'");
  return load_fixture(*f);
}

bool verdict_matches(CqStatus s, bool expected) {
  return expected ? s == CqStatus::Holds : s == CqStatus::Violated;
}

std::vector<ExpectationCheck> check_expected(const ProblemSpec& p, const Vec& x, const CqOptions& opt) {
  std::vector<ExpectationCheck> out;
  for (const auto& [cq, expected] : p.expected) {
    ExpectationCheck c;
    c.cq = cq;
    c.expected = expected;
    c.verdict = run_cq(p, x, cq, opt);
    c.match = verdict_matches(c.verdict.status, expected);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<SmokeResult> smoke_test(const Fixture& f) {
  std::vector<SmokeResult> out;
  if (!f.solve_x0) return out;
  const ProblemSpec p = load_fixture(f);
  for (Method m : {Method::Penalty, Method::AugLag, Method::Sqp}) {
    SolverConfig cfg;
    cfg.method = m;
    SmokeResult r;
    r.method = m;
    const SolveResult s = solve(p, *f.solve_x0, cfg);
    r.status = s.status;
    std::ostringstream os;
    if (f.expect_kkt) {
      const KktSearchResult kkt = find_kkt_multipliers(p, p.points_of_interest.front());
      const double dx = (s.x - p.points_of_interest.front()).norm();
      double dmu = 0.0;
      for (std::size_t j = 0; j < s.mu.size(); ++j) dmu = std::max(dmu, (s.mu[j] - kkt.mu[j]).norm());
      bool akkt = false;
      if (s.log.size() >= 2) akkt = akkt_check(p, s.log, 1e-6).ok;
      r.pass = dx <= 1e-5 && dmu <= 1e-4 && akkt;
      os << "|x - x*| = " << dx << ", |mu - mu*| = " << dmu << ", akkt " << (akkt ? "ok" : "failed");
    } else {
      // no KKT point: the method must not claim success
      const double first = s.log.empty() ? 0.0 : max_block_norm(s.log.front().mu);
      const double last = s.log.empty() ? 0.0 : max_block_norm(s.log.back().mu);
      r.pass = s.status != SolveStatus::Converged;
      os << "status " << solve_status_name(s.status) << ", |mu| " << first << " -> " << last;
    }
    r.detail = os.str();
    out.push_back(r);
  }
  return out;
}

}  // namespace nsocp
