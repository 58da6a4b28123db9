#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nsocp/corpus.hpp"
#include "nsocp/errors.hpp"
#include "nsocp/model.hpp"
#include "nsocp/rng.hpp"
#include "nsocp/solvers.hpp"
#include "oracle_values.hpp"
#include "test_util.hpp"

using namespace nsocp;

TEST_SUITE("model") {
  TEST_CASE("evaluate zz at the origin") {
    const auto ev = evaluate(load_fixture("zz-erratum"), vec({0}));
    CHECK(ev.f == 0.0);
    CHECK((ev.grad_f - vec({-1})).norm() == 0.0);
    CHECK(ev.g[0].norm() == 0.0);
    CHECK(ev.Dg[0](0, 0) == 1.0);
    CHECK(ev.Dg[0](1, 0) == 1.0);
  }

  TEST_CASE("jacobian of ex32") {
    const auto ev = evaluate(load_fixture("ex32"), vec({0, 0}));
    Mat expect(3, 2);
    expect << 1, 0, 0, 1, 0, 1;
    CHECK((ev.Dg[0] - expect).norm() == 0.0);
  }

  TEST_CASE("jacobians match finite differences") {
    Rng rng(5);
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      for (int t = 0; t < 20; ++t) {
        const Vec x = rng.normal_vec(p.n);
        const auto ev = evaluate(p, x);
        for (int i = 0; i < p.n; ++i) {
          Vec xp = x, xm = x;
          const double h = 1e-6;
          xp[i] += h;
          xm[i] -= h;
          const auto gp = evaluate_g(p, xp), gm = evaluate_g(p, xm);
          for (int j = 0; j < p.q(); ++j)
            CHECK((ev.Dg[j].col(i) - (gp[j] - gm[j]) / (2 * h)).norm() <= 1e-6 * (1 + ev.Dg[j].norm()));
        }
      }
    }
  }

  TEST_CASE("index classification") {
    auto ic = classify_indices(load_fixture("ex33"), vec({0}));
    CHECK(ic.I0 == std::vector<int>{0});
    ic = classify_indices(make_problem("h", 1, "x1", {{"x1", "1"}}), vec({1}));
    CHECK(ic.IB == std::vector<int>{0});
    // (5,(3,4)) sits on the boundary
    CHECK(lambda1(vec({5, 3, 4})) == oracle::kLambda1_5_3_4);
    ic = classify_indices(make_problem("b", 1, "0", {{"5", "3", "4"}}), vec({0}));
    CHECK(ic.IB == std::vector<int>{0});
    ic = classify_indices(make_problem("i", 1, "0", {{"6", "3", "4"}}), vec({0}));
    CHECK(ic.Iint == std::vector<int>{0});
  }

  TEST_CASE("classification is stable under small moves off the interior") {
    Rng rng(9);
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      for (const Vec& x : p.points_of_interest) {
        const auto base = classify_indices(p, x);
        for (int t = 0; t < 50; ++t) {
          const Vec xs = x + (kDefaultIndexTol / 10) * rng.unit_vec(p.n) * rng.uniform();
          const auto moved = classify_indices(p, xs);
          for (int j : base.Iint)
            CHECK(std::find(moved.I0.begin(), moved.I0.end(), j) == moved.I0.end());
        }
      }
    }
  }

  TEST_CASE("lagrangian gradient") {
    const ProblemSpec h = load_fixture("halfline-min");
    CHECK(lagrangian_grad(h, vec({oracle::kHalflineX}), {vec(oracle::kHalflineMu)}).norm() < 1e-12);
    Rng rng(2);
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      const Vec x = rng.normal_vec(p.n);
      Multipliers zero;
      for (const auto& b : p.constraints) zero.push_back(Vec::Zero(b.dim));
      CHECK((lagrangian_grad(p, x, zero) - evaluate(p, x).grad_f).norm() == 0.0);
    }
    const ProblemSpec zz = load_fixture("zz-erratum");
    for (int t = 0; t < 100; ++t) {
      const double b = rng.uniform(-5, 5), a = std::abs(b) + rng.uniform(0, 5);
      const Vec r = lagrangian_grad(zz, vec({0}), {vec({a, b})});
      CHECK(r[0] == doctest::Approx(-1 - (a + b)));
      CHECK(r[0] <= -1.0);
    }
  }

  TEST_CASE("kkt residuals") {
    const ProblemSpec h = load_fixture("halfline-min");
    CHECK(kkt_residual(h, vec({1}), {vec(oracle::kHalflineMu)}).max() <= 1e-10);
    CHECK(kkt_residual(h, vec({2}), {vec({0, 0})}).stationarity > 0);
    CHECK(kkt_residual(h, vec({-1}), {vec({0, 0})}).feasibility > 0);
    CHECK(find_kkt_multipliers(h, vec({1})).exists);
    CHECK_FALSE(find_kkt_multipliers(load_fixture("zz-erratum"), vec({0})).exists);
  }

  TEST_CASE("akkt on logs") {
    const ProblemSpec h = load_fixture("halfline-min");
    IterateLog it;
    it.x = vec({1});
    it.mu = {vec({1, -1})};
    it.delta = std::vector<Vec>{vec({0, 0})};
    it.residuals = kkt_residual(h, it.x, it.mu);
    std::vector<IterateLog> constant;
    for (int k = 1; k <= 5; ++k) {
      it.k = k;
      constant.push_back(it);
    }
    CHECK(akkt_check(h, constant, 1e-6).ok);

    auto bad = constant;
    for (auto& b : bad) b.delta = std::vector<Vec>{vec({-5, 0})};
    CHECK_FALSE(akkt_check(h, bad, 1e-6).ok);

    const ProblemSpec zz = load_fixture("zz-erratum");
    const auto r = penalty_solve(zz, vec({1}));
    const auto rep = akkt_check(zz, r.log, 1e-6);
    CHECK(rep.ok);
    CHECK(rep.mu_growth > 1e3);
  }

  TEST_CASE("problem validation") {
    CHECK_THROWS_AS(make_problem("bad", 1, "x1", {{"x1"}}), Error);
    CHECK_THROWS_AS(make_problem("bad", 1, "x1", {}), Error);
    CHECK_THROWS_AS(make_problem("bad", 1, "x2", {{"x1", "1"}}), Error);
  }
}
