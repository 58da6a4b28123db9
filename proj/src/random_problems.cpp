#include <sstream>

#include "nsocp/corpus.hpp"
#include "nsocp/rng.hpp"

namespace nsocp {

namespace {

// c0 + Σ a_i x_i + Σ b_i x_i^2 (+ one cross term) with small integers,
// zero coefficients frequent so degenerate families show up.
std::string random_component(Rng& rng, int n, int constant) {
  std::ostringstream os;
  bool any = false;
  auto term = [&](int coef, const std::string& mono) {
    if (coef == 0) return;
    if (any) os << (coef < 0 ? " - " : " + ");
    else if (coef < 0) os << "-";
    const int a = coef < 0 ? -coef : coef;
    if (mono.empty()) os << a;
    else if (a == 1) os << mono;
    else os << a << "*" << mono;
    any = true;
  };
  auto coef = [&]() { return rng.uniform() < 0.45 ? 0 : rng.integer(-2, 2); };
  term(constant, "");
  for (int i = 1; i <= n; ++i) term(coef(), "x" + std::to_string(i));
  for (int i = 1; i <= n; ++i)
    if (rng.uniform() < 0.3) term(coef(), "x" + std::to_string(i) + "^2");
  if (n >= 2 && rng.uniform() < 0.2) term(coef(), "x1*x2");
  if (!any) os << "0";
  return os.str();
}

}  // namespace

ProblemSpec random_problem(std::uint64_t seed) {
  Rng rng(seed);
  const int n = rng.integer(1, 3);
  const int q = rng.integer(1, 2);
  std::vector<std::vector<std::string>> blocks;
  for (int j = 0; j < q; ++j) {
    const int m = rng.integer(2, 3);
    // value at 0: origin, boundary ray, or interior
    std::vector<int> c(m, 0);
    const double u = rng.uniform();
    if (u < 0.3) {
      c[0] = rng.integer(1, 2);
      c[1] = rng.uniform() < 0.5 ? c[0] : -c[0];
    } else if (u < 0.4) {
      c[0] = 2;
    }
    std::vector<std::string> comps;
    for (int i = 0; i < m; ++i) comps.push_back(random_component(rng, n, c[i]));
    blocks.push_back(comps);
  }
  ProblemSpec p = make_problem("random-" + std::to_string(seed), n, "0", blocks);
  p.points_of_interest.push_back(Vec::Zero(n));
  return p;
}

}  // namespace nsocp
