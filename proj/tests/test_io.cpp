#include "doctest.h"
#include "nsocp/corpus.hpp"
#include "nsocp/errors.hpp"
#include "nsocp/problem_io.hpp"
#include "test_util.hpp"

using namespace nsocp;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    load_problem_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::SubproblemInfeasible;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("fixtures survive a json round trip") {
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      const ProblemSpec q = problem_from_json(problem_to_json(p));
      CHECK(q.n == p.n);
      CHECK(q.q() == p.q());
      CHECK(q.expected == p.expected);
      CHECK(structurally_equal(q.objective, p.objective));
      for (int j = 0; j < p.q(); ++j)
        for (std::size_t i = 0; i < p.constraints[j].components.size(); ++i)
          CHECK(structurally_equal(q.constraints[j].components[i], p.constraints[j].components[i]));
    }
  }

  TEST_CASE("bad documents") {
    CHECK(kind_of("{\"n\": 1,") == ErrorKind::SyntaxError);
    CHECK(kind_of(R"({"name": "a", "n": 1, "objective": "x1", "constraints": []})") == ErrorKind::InvalidProblem);
    CHECK(kind_of(R"({"name": "a", "n": 1, "objective": "x1",
      "constraints": [{"dim": 3, "components": ["x1", "1"]}]})") == ErrorKind::InvalidProblem);
    CHECK(kind_of(R"({"name": "a", "n": 1, "objective": "x1 +",
      "constraints": [{"dim": 2, "components": ["x1", "1"]}]})") == ErrorKind::SyntaxError);
  }

  TEST_CASE("doubles are written exactly") {
    const double v = 0.1 + 0.2;
    const std::string s = dump_json(json{{"v", v}});
    CHECK(json::parse(s)["v"].get<double>() == v);
  }

  TEST_CASE("csv vectors and overrides") {
    CHECK((parse_csv_vector("1, -2.5,3e-1") - vec({1, -2.5, 0.3})).norm() == 0.0);
    CHECK_THROWS_AS(parse_csv_vector("1,,2"), Error);
    SolverConfig cfg;
    apply_override(cfg, "rho_growth=100");
    CHECK(cfg.rho_growth == 100.0);
    CHECK_THROWS_AS(apply_override(cfg, "nonsense=1"), Error);
  }
}
