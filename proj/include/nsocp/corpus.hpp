#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsocp/cq.hpp"
#include "nsocp/model.hpp"
#include "nsocp/solvers.hpp"

namespace nsocp {

struct Fixture {
  std::string name;
  std::string text;  // problem JSON
  // solver smoke test: start point and whether a KKT point should be reached
  std::optional<Vec> solve_x0;
  bool expect_kkt = false;
};

const std::vector<Fixture>& corpus();
const Fixture* find_fixture(const std::string& name);
ProblemSpec load_fixture(const Fixture& f);
ProblemSpec load_fixture(const std::string& name);

struct ExpectationCheck {
  std::string cq;
  bool expected = false;
  CqVerdict verdict;
  bool match = false;
};

// Every entry of p.expected at the given point.
std::vector<ExpectationCheck> check_expected(const ProblemSpec& p, const Vec& x, const CqOptions& opt = {});
bool verdict_matches(CqStatus s, bool expected);

struct SmokeResult {
  Method method = Method::AugLag;
  SolveStatus status = SolveStatus::IterationLimit;
  bool pass = false;
  std::string detail;
};

std::vector<SmokeResult> smoke_test(const Fixture& f);

// Small random instance with x̄ = 0 feasible: n <= 3, q <= 2, m_j <= 3.
ProblemSpec random_problem(std::uint64_t seed);

}  // namespace nsocp
