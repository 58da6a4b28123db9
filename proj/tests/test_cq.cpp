#include <cmath>

#include "doctest.h"
#include "nsocp/corpus.hpp"
#include "nsocp/cq.hpp"
#include "nsocp/errors.hpp"
#include "oracle_values.hpp"
#include "test_util.hpp"

using namespace nsocp;

namespace {

CqStatus run(const std::string& fixture, const std::string& cq) {
  const ProblemSpec p = load_fixture(fixture);
  return run_cq(p, p.points_of_interest.at(0), cq).status;
}

}  // namespace

TEST_SUITE("cq") {
  TEST_CASE("family D") {
    const ProblemSpec zz = load_fixture("zz-erratum");
    const auto F = build_family_D(zz, vec({0}), {{}, {0}, {}}, {{0, vec({1})}});
    REQUIRE(F.size() == 1);
    CHECK(F.vectors[0].norm() == 0.0);

    const ProblemSpec e41 = load_fixture("ex41");
    const double r = 1 / std::sqrt(2.0);
    const auto G = build_family_D(e41, vec({0}), {{}, {0}, {0}}, {{0, vec({r, r})}});
    REQUIRE(G.size() == 2);
    CHECK(G.vectors[0][0] == doctest::Approx(oracle::kEx41_family[0]));
    CHECK(G.vectors[1][0] == doctest::Approx(oracle::kEx41_family[1]));

    CHECK(build_family_D(zz, vec({0}), {}, {}).empty());
  }

  TEST_CASE("nondegeneracy") {
    CHECK(run("ex32", "ndg") == CqStatus::Violated);
    CHECK(run("ex31-padded", "ndg") == CqStatus::Violated);
    const ProblemSpec id = make_problem("identity", 2, "0", {{"x1", "x2"}});
    CHECK(run_cq(id, vec({0, 0}), "ndg").status == CqStatus::Holds);
  }

  TEST_CASE("robinson") {
    CHECK(run("ex33", "robinson") == CqStatus::Holds);
    CHECK(run("ex42", "robinson") == CqStatus::Holds);
    CHECK(run("ex32", "robinson") == CqStatus::Holds);
    const auto v = run_cq(load_fixture("zz-erratum"), vec({0}), "robinson");
    REQUIRE(v.status == CqStatus::Violated);
    REQUIRE(v.witness.has_value());
    REQUIRE(v.witness->cone_vector.has_value());
    const Vec c = *v.witness->cone_vector;
    CHECK(std::abs(c[0] + c[1]) <= 1e-8);
    CHECK(c[0] > 0);
  }

  TEST_CASE("weak nondegeneracy") {
    CHECK(run("ex32", "weak-ndg") == CqStatus::Holds);
    CHECK(run("ex31-padded", "weak-ndg") == CqStatus::Holds);
    const auto v = run_cq(load_fixture("ex33"), vec({0}), "weak-ndg");
    REQUIRE(v.status == CqStatus::Violated);
    REQUIRE(v.witness.has_value());
    REQUIRE(v.witness->wbar.count(0));
    const Vec w = v.witness->wbar.at(0);
    CHECK(std::abs(std::abs(w[0]) - 2 / std::sqrt(5.0)) <= 1e-6);
    CHECK(std::abs(std::abs(w[1]) - 1 / std::sqrt(5.0)) <= 1e-6);
  }

  TEST_CASE("constant rank variants") {
    CHECK(run("zz-erratum", "weak-crcq") == CqStatus::Violated);
    CHECK(run("zz-erratum", "weak-cpld") == CqStatus::Violated);
    CHECK(run("ex52", "weak-cpld") == CqStatus::Holds);
    CHECK(run("ex52", "seq-cpld") == CqStatus::Violated);
    CHECK(run("ex51", "seq-crcq") == CqStatus::Holds);
    CHECK(run("ex51", "seq-cpld") == CqStatus::Holds);
    CHECK(run("ex51", "ndg") == CqStatus::Violated);
    CHECK(run("ex51", "robinson") == CqStatus::Violated);
  }

  TEST_CASE("kkt verdicts") {
    CHECK(run("zz-erratum", "kkt") == CqStatus::Violated);
    const ProblemSpec h = load_fixture("halfline-min");
    CHECK(run_cq(h, vec({1}), "kkt").status == CqStatus::Holds);
  }

  TEST_CASE("corpus expectations and crosscheck") {
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      for (const Vec& x : p.points_of_interest) {
        for (const auto& c : check_expected(p, x)) CHECK_MESSAGE(c.match, f.name << " " << c.cq);
        CHECK_MESSAGE(crosscheck_ndg_decomposition(p, x).consistent, f.name);
      }
    }
  }

  TEST_CASE("ndg invariant under positive block scaling") {
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      std::vector<std::vector<std::string>> scaled;
      for (const auto& b : p.constraints) {
        std::vector<std::string> comps;
        for (const auto& t : b.texts) comps.push_back("3*(" + t + ")");
        scaled.push_back(comps);
      }
      const ProblemSpec s = make_problem(p.name, p.n, p.objective_text, scaled);
      for (const Vec& x : p.points_of_interest)
        CHECK(check_nondegeneracy(p, x).status == check_nondegeneracy(s, x).status);
    }
  }

  TEST_CASE("determinism for a fixed seed") {
    CqOptions opt;
    opt.seed = 17;
    for (const char* name : {"ex52", "zz-erratum"}) {
      const ProblemSpec p = load_fixture(name);
      for (const auto& cq : cq_names()) {
        const auto a = run_cq(p, p.points_of_interest[0], cq, opt);
        const auto b = run_cq(p, p.points_of_interest[0], cq, opt);
        CHECK(a.status == b.status);
        if (a.witness && b.witness) CHECK(a.witness->evidence == b.witness->evidence);
      }
    }
  }

  TEST_CASE("hierarchy") {
    CHECK(hierarchy_arrows().size() == 11);
    CHECK(hierarchy_violations({{"ndg", CqStatus::Holds}, {"weak-ndg", CqStatus::Violated}}).size() == 1);
    CHECK(hierarchy_violations({{"ndg", CqStatus::Violated}, {"weak-ndg", CqStatus::Holds}}).empty());
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      std::map<std::string, CqStatus> table;
      for (const auto& cq : cq_names()) table[cq] = run_cq(p, p.points_of_interest[0], cq).status;
      CHECK_MESSAGE(hierarchy_violations(table).empty(), f.name);
    }
  }

  TEST_CASE("infeasible point") {
    const ProblemSpec h = load_fixture("halfline-min");
    try {
      run_cq(h, vec({0}), "ndg");
      FAIL("expected InfeasiblePoint");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InfeasiblePoint);
      CHECK(e.block == 0);
    }
  }
}
