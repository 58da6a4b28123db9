#include <cmath>
#include <cstring>

#include "doctest.h"
#include "nsocp/corpus.hpp"
#include "nsocp/errors.hpp"
#include "nsocp/expr.hpp"
#include "nsocp/rng.hpp"
#include "test_util.hpp"

using namespace nsocp;

namespace {

NodePtr lit(double v) { return std::make_shared<Node>(Node{NodeKind::Lit, v, 0, nullptr, nullptr}); }
NodePtr var(int i) { return std::make_shared<Node>(Node{NodeKind::Var, 0.0, i, nullptr, nullptr}); }
NodePtr op(NodeKind k, NodePtr a, NodePtr b = nullptr) {
  return std::make_shared<Node>(Node{k, 0.0, 0, std::move(a), std::move(b)});
}

Vec fd_grad(const Expr& e, const Vec& x) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (eval(e, xp) - eval(e, xm)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("parse shapes") {
    CHECK(structurally_equal(parse("x1 + x1^2", 1).root(), op(NodeKind::Add, var(0), op(NodeKind::Pow, var(0), lit(2)))));
    CHECK(structurally_equal(parse("-x1", 2).root(), op(NodeKind::Neg, var(0))));
    CHECK(structurally_equal(parse("2*x1 - sin(x2)", 2).root(),
                             op(NodeKind::Sub, op(NodeKind::Mul, lit(2), var(0)), op(NodeKind::Sin, var(1)))));
    CHECK(structurally_equal(parse("2^3^2", 1).root(), op(NodeKind::Pow, lit(2), op(NodeKind::Pow, lit(3), lit(2)))));
  }

  TEST_CASE("parse errors") {
    auto kind_of = [](const std::string& s, int n) {
      try {
        parse(s, n);
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::InvalidProblem;
    };
    CHECK(kind_of("x1 +", 1) == ErrorKind::SyntaxError);
    CHECK(kind_of("foo(x1)", 1) == ErrorKind::UnknownIdentifier);
    CHECK(kind_of("x3", 2) == ErrorKind::VariableOutOfRange);
    CHECK(kind_of("(x1", 1) == ErrorKind::SyntaxError);
  }

  TEST_CASE("eval examples") {
    CHECK(eval(parse("x1 + x1^2", 1), vec({0.1})) == doctest::Approx(0.11).epsilon(1e-15));
    CHECK(eval(parse("4*x1", 1), vec({2})) == 8.0);
    CHECK_THROWS_AS(eval(parse("sqrt(x1)", 1), vec({-1})), Error);
    CHECK_THROWS_AS(eval(parse("log(x1)", 1), vec({0})), Error);
  }

  TEST_CASE("grad examples") {
    CHECK((grad(parse("x1 + x1^2", 1), vec({0})) - vec({1})).norm() == 0.0);
    CHECK((grad(parse("x1*x2", 2), vec({3, 5})) - vec({5, 3})).norm() == 0.0);
    CHECK((grad(parse("x2^2", 2), vec({0, 0})) - vec({0, 0})).norm() == 0.0);
    const auto d = eval_dual(parse("x1*x2", 2), vec({3, 5}));
    CHECK(d.value == 15.0);
  }

  TEST_CASE("round trip and determinism on the corpus") {
    Rng rng(11);
    for (const auto& f : corpus()) {
      const ProblemSpec p = load_fixture(f);
      std::vector<Expr> all{p.objective};
      for (const auto& b : p.constraints)
        for (const auto& c : b.components) all.push_back(c);
      for (const Expr& e : all) {
        const Expr again = parse(print(e), p.n);
        CHECK(structurally_equal(again, e));
        CHECK(print(again) == print(e));
        for (int t = 0; t < 100; ++t) {
          const Vec x = rng.normal_vec(p.n);
          const double v1 = eval(e, x), v2 = eval(e, x);
          CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
          const Vec g = grad(e, x), fd = fd_grad(e, x);
          CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
        }
      }
    }
  }

  TEST_CASE("grad of the elementary functions") {
    Rng rng(3);
    const Expr e = parse("sin(x1)*cos(x2) + exp(x1/3) - log(2 + x2^2) + sqrt(1 + x1^2)", 2);
    for (int t = 0; t < 100; ++t) {
      const Vec x = rng.normal_vec(2);
      const Vec g = grad(e, x), fd = fd_grad(e, x);
      CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
    }
  }
}
