#include "nsocp/rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "nsocp/rng.hpp"

namespace nsocp {

std::uint64_t resolve_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("NSOCP_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
  }
  return fallback;
}

Eigen::MatrixXd VectorFamily::matrix() const {
  if (vectors.empty()) return Eigen::MatrixXd();
  Eigen::MatrixXd A(vectors[0].size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = vectors[i];
  return A;
}

int numeric_rank(const Eigen::MatrixXd& A, double tol) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const Vec s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  if (smax <= 1e-12) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol * smax) ++r;
  return r;
}

int numeric_rank(const VectorFamily& F, double tol) { return numeric_rank(F.matrix(), tol); }

PldCertificate min_norm_in_hull(const std::vector<Vec>& P) {
  const int p = static_cast<int>(P.size());
  PldCertificate out;
  out.coefficients = Vec::Zero(p);
  if (p == 0) return out;
  double maxsq = 0.0;
  int start = 0;
  for (int i = 0; i < p; ++i) {
    const double s = P[i].squaredNorm();
    maxsq = std::max(maxsq, s);
    if (s < P[start].squaredNorm()) start = i;
  }
  const double eps1 = 1e-15 * std::max(maxsq, 1e-300);
  const double eps2 = 1e-12;

  std::vector<int> S{start};
  std::vector<double> lam{1.0};
  Vec x = P[start];

  for (int major = 0; major < 10 * p + 100; ++major) {
    int jbest = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i) {
      const double d = x.dot(P[i]);
      if (d < best) {
        best = d;
        jbest = i;
      }
    }
    if (x.squaredNorm() - best <= eps1) break;
    if (std::find(S.begin(), S.end(), jbest) != S.end()) break;
    S.push_back(jbest);
    lam.push_back(0.0);

    for (int minor = 0; minor < 10 * p + 100; ++minor) {
      const int s = static_cast<int>(S.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
      for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) K(a, b) = P[S[a]].dot(P[S[b]]);
        K(a, s) = 1.0;
        K(s, a) = 1.0;
      }
      Vec rhs = Vec::Zero(s + 1);
      rhs[s] = 1.0;
      const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);
      Vec mu = sol.head(s);
      const double sum = mu.sum();
      if (std::abs(sum) > 1e-300) mu /= sum;
      bool all_pos = true;
      for (int a = 0; a < s; ++a)
        if (mu[a] <= eps2) all_pos = false;
      if (all_pos) {
        for (int a = 0; a < s; ++a) lam[a] = mu[a];
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < s; ++a) {
        if (mu[a] <= eps2 && lam[a] - mu[a] > 0) theta = std::min(theta, lam[a] / (lam[a] - mu[a]));
      }
      for (int a = 0; a < s; ++a) lam[a] = (1.0 - theta) * lam[a] + theta * mu[a];
      std::vector<int> S2;
      std::vector<double> lam2;
      for (int a = 0; a < s; ++a) {
        if (lam[a] > eps2) {
          S2.push_back(S[a]);
          lam2.push_back(lam[a]);
        }
      }
      if (S2.empty()) {
        // numerical breakdown; keep the best single point
        S2.push_back(S[0]);
        lam2.push_back(1.0);
      }
      double tot = 0.0;
      for (double v : lam2) tot += v;
      for (double& v : lam2) v /= tot;
      S = std::move(S2);
      lam = std::move(lam2);
      if (S.size() == 1) break;
    }
    x = Vec::Zero(P[0].size());
    for (std::size_t a = 0; a < S.size(); ++a) x += lam[a] * P[S[a]];
  }
  for (std::size_t a = 0; a < S.size(); ++a) out.coefficients[S[a]] = lam[a];
  out.residual = x.norm();
  return out;
}

std::optional<PldCertificate> is_positively_linearly_dependent(const VectorFamily& F, double tol) {
  if (F.empty()) return std::nullopt;
  PldCertificate c = min_norm_in_hull(F.vectors);
  double mx = 0.0;
  for (const auto& v : F.vectors) mx = std::max(mx, v.norm());
  if (c.residual <= tol * (1.0 + mx)) return c;
  return std::nullopt;
}

double linear_dependence_measure(const std::vector<Vec>& vectors) {
  if (vectors.empty()) return std::numeric_limits<double>::infinity();
  const Eigen::Index n = vectors[0].size();
  const Eigen::Index p = static_cast<Eigen::Index>(vectors.size());
  if (p > n) return 0.0;
  Eigen::MatrixXd A(n, p);
  double mx = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    A.col(i) = vectors[i];
    mx = std::max(mx, vectors[i].norm());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double smin = svd.singularValues()[p - 1];
  return smin / (std::sqrt(static_cast<double>(p)) * (1.0 + mx));
}

double positive_dependence_measure(const std::vector<Vec>& vectors) {
  if (vectors.empty()) return std::numeric_limits<double>::infinity();
  double mx = 0.0;
  for (const auto& v : vectors) mx = std::max(mx, v.norm());
  return min_norm_in_hull(vectors).residual / (1.0 + mx);
}

Dependence classify_measure(double measure, double tol) {
  if (measure <= tol) return Dependence::Dependent;
  if (measure <= 10.0 * tol) return Dependence::Gray;
  return Dependence::Independent;
}

Dependence linear_dependence(const VectorFamily& F, double tol) {
  return classify_measure(linear_dependence_measure(F.vectors), tol);
}

Dependence positive_dependence(const VectorFamily& F, double tol) {
  return classify_measure(positive_dependence_measure(F.vectors), tol);
}

CaratheodoryResult caratheodory_reduce(const std::vector<Vec>& vectors, const Vec& alphas) {
  CaratheodoryResult res;
  std::vector<int> J;
  std::vector<double> a;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (alphas[static_cast<Eigen::Index>(i)] != 0.0) {
      J.push_back(static_cast<int>(i));
      a.push_back(alphas[static_cast<Eigen::Index>(i)]);
    }
  }
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (;;) {
    if (J.empty()) break;
    Eigen::MatrixXd V(vectors[0].size(), static_cast<Eigen::Index>(J.size()));
    for (std::size_t c = 0; c < J.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = vectors[J[c]];
    if (numeric_rank(V) == static_cast<int>(J.size())) break;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeFullV);
    Vec gamma = svd.matrixV().col(V.cols() - 1);
    // need some gamma_i sharing the sign of a_i
    bool any = false;
    for (std::size_t c = 0; c < J.size(); ++c)
      if (gamma[static_cast<Eigen::Index>(c)] * a[c] > 0) any = true;
    if (!any) gamma = -gamma;
    double theta = std::numeric_limits<double>::infinity();
    std::size_t hit = 0;
    for (std::size_t c = 0; c < J.size(); ++c) {
      const double g = gamma[static_cast<Eigen::Index>(c)];
      if (g * a[c] > 0) {
        const double t = a[c] / g;
        if (t < theta) {
          theta = t;
          hit = c;
        }
      }
    }
    std::vector<int> J2;
    std::vector<double> a2;
    for (std::size_t c = 0; c < J.size(); ++c) {
      if (c == hit) continue;
      const double v = a[c] - theta * gamma[static_cast<Eigen::Index>(c)];
      if (std::abs(v) <= 1e-15 * scale || v * a[c] <= 0) continue;
      J2.push_back(J[c]);
      a2.push_back(v);
    }
    J = std::move(J2);
    a = std::move(a2);
  }
  res.J = J;
  res.alphas = Vec(static_cast<Eigen::Index>(a.size()));
  for (std::size_t c = 0; c < a.size(); ++c) res.alphas[static_cast<Eigen::Index>(c)] = a[c];
  return res;
}

VectorFamily slice_family(const std::vector<ConeBlock>& blocks, const std::vector<Vec>& w) {
  VectorFamily F;
  std::size_t wi = 0;
  for (const auto& b : blocks) {
    if (b.halfline) {
      F.add(b.M.col(0), {b.j, FamilyKind::B});
      continue;
    }
    const Vec& wj = w[wi++];
    const Vec base = b.M.col(0);
    const Vec turn = b.M.rightCols(b.M.cols() - 1) * wj;
    F.add(base - turn, {b.j, FamilyKind::Minus});
    F.add(base + turn, {b.j, FamilyKind::Plus});
  }
  return F;
}

namespace {
std::vector<Vec> sphere_points(int k);
}

std::vector<Vec> sphere_grid(int k) {
  std::vector<Vec> pts = sphere_points(k);
  // snap cos/sin round-off so axis points are exact
  for (auto& v : pts) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) < 1e-15) v[i] = 0.0;
    v /= v.norm();
  }
  return pts;
}

namespace {

std::vector<Vec> sphere_points(int k) {
  std::vector<Vec> pts;
  if (k == 1) {
    pts.push_back(Vec::Constant(1, 1.0));
    pts.push_back(Vec::Constant(1, -1.0));
    return pts;
  }
  const int N = (1 << std::min(k + 1, 10)) * 8 / 2;  // 2^(m-1)·8 with m = k+1
  if (k == 2) {
    for (int i = 0; i < N; ++i) {
      const double t = 2.0 * M_PI * i / N;
      Vec v(2);
      v << std::cos(t), std::sin(t);
      pts.push_back(v);
    }
    return pts;
  }
  for (int i = 0; i < k; ++i) {
    Vec e = Vec::Zero(k);
    e[i] = 1.0;
    pts.push_back(e);
    pts.push_back(-e);
  }
  if (k == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const int M = N - static_cast<int>(pts.size());
    for (int i = 0; i < M; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / M;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      Vec v(3);
      v << r * std::cos(phi), r * std::sin(phi), z;
      pts.push_back(v);
    }
    return pts;
  }
  Rng rng(0x5eed0000ULL + static_cast<std::uint64_t>(k));
  while (static_cast<int>(pts.size()) < N) pts.push_back(rng.unit_vec(k));
  return pts;
}

}  // namespace

namespace {

struct Eval {
  double measure = std::numeric_limits<double>::infinity();
  Vec coeff;
  Vec r;
};

Eval evaluate_slice(const VectorFamily& F, SliceMode mode) {
  Eval e;
  if (F.empty()) return e;
  double mx = 0.0;
  for (const auto& v : F.vectors) mx = std::max(mx, v.norm());
  if (mode == SliceMode::Positive) {
    PldCertificate c = min_norm_in_hull(F.vectors);
    e.coeff = c.coefficients;
    e.r = Vec::Zero(F.vectors[0].size());
    for (std::size_t i = 0; i < F.size(); ++i) e.r += c.coefficients[static_cast<Eigen::Index>(i)] * F.vectors[i];
    e.measure = c.residual / (1.0 + mx);
    return e;
  }
  const Eigen::MatrixXd A = F.matrix();
  const Eigen::Index p = A.cols();
  if (p > A.rows()) {
    e.measure = 0.0;
    e.coeff = Vec::Zero(p);
    e.r = Vec::Zero(A.rows());
    return e;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()[p - 1];
  e.coeff = svd.matrixV().col(p - 1);
  e.r = smin * svd.matrixU().col(p - 1);
  e.measure = smin / (std::sqrt(static_cast<double>(p)) * (1.0 + mx));
  return e;
}

// Gradient of ½‖r‖² with respect to each free w (envelope form).
std::vector<Vec> slice_gradient(const std::vector<ConeBlock>& blocks, const Eval& e) {
  std::vector<Vec> g;
  Eigen::Index idx = 0;
  for (const auto& b : blocks) {
    if (b.halfline) {
      ++idx;
      continue;
    }
    const double cm = e.coeff[idx], cp = e.coeff[idx + 1];
    idx += 2;
    g.push_back((cp - cm) * (b.M.rightCols(b.M.cols() - 1).transpose() * e.r));
  }
  return g;
}

Vec cone_vector(const std::vector<ConeBlock>& blocks, const std::vector<Vec>& w, const Vec& coeff) {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.M.cols());
  Vec v(total);
  int off = 0;
  Eigen::Index idx = 0;
  std::size_t wi = 0;
  for (const auto& b : blocks) {
    if (b.halfline) {
      v[off++] = coeff[idx++];
      continue;
    }
    const int m = static_cast<int>(b.M.cols());
    const double cm = coeff[idx], cp = coeff[idx + 1];
    idx += 2;
    v[off] = cm + cp;
    v.segment(off + 1, m - 1) = (cp - cm) * w[wi++];
    off += m;
  }
  return v;
}

Vec apply_blocks(const std::vector<ConeBlock>& blocks, const Vec& v) {
  Vec out = Vec::Zero(blocks.empty() ? 0 : blocks[0].M.rows());
  int off = 0;
  for (const auto& b : blocks) {
    const int m = static_cast<int>(b.M.cols());
    out += b.M * v.segment(off, m);
    off += m;
  }
  return out;
}

}  // namespace

ConicLiResult slice_search(const std::vector<ConeBlock>& blocks, SliceMode mode, double tol,
                           const SearchBudget& budget) {
  ConicLiResult res;
  if (blocks.empty()) {
    res.status = ConicStatus::LI;
    res.best_measure = std::numeric_limits<double>::infinity();
    return res;
  }
  std::vector<int> ks;
  for (const auto& b : blocks)
    if (!b.halfline) ks.push_back(static_cast<int>(b.M.cols()) - 1);

  Eval best;
  std::vector<Vec> best_w;
  auto consider = [&](const std::vector<Vec>& w) {
    const Eval e = evaluate_slice(slice_family(blocks, w), mode);
    ++res.samples;
    if (e.measure < best.measure) {
      best = e;
      best_w = w;
    }
    return e;
  };

  Rng rng(budget.seed);
  // grid over the product of spheres
  std::vector<std::vector<Vec>> grids;
  long combos = 1;
  for (int k : ks) {
    grids.push_back(sphere_grid(k));
    combos *= static_cast<long>(grids.back().size());
  }
  const long cap = 4096;
  if (ks.empty()) {
    consider({});
  } else if (combos <= cap) {
    std::vector<std::size_t> idx(ks.size(), 0);
    for (long c = 0; c < combos; ++c) {
      std::vector<Vec> w;
      long rem = c;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        w.push_back(grids[i][static_cast<std::size_t>(rem % static_cast<long>(grids[i].size()))]);
        rem /= static_cast<long>(grids[i].size());
      }
      consider(w);
      if (best.measure == 0.0) break;
    }
  } else {
    for (long c = 0; c < cap; ++c) {
      std::vector<Vec> w;
      for (std::size_t i = 0; i < ks.size(); ++i)
        w.push_back(grids[i][static_cast<std::size_t>(rng.integer(0, static_cast<int>(grids[i].size()) - 1))]);
      consider(w);
    }
  }

  bool any_continuous = false;
  for (int k : ks)
    if (k >= 2) any_continuous = true;

  auto descend = [&](std::vector<Vec> w) {
    Eval e = consider(w);
    double step = 0.5;
    for (int s = 0; s < budget.steps && step > 1e-10 && e.measure > tol * 1e-3; ++s) {
      std::vector<Vec> g = slice_gradient(blocks, e);
      double gn = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (ks[i] == 1) {
          g[i].setZero();
          continue;
        }
        g[i] -= g[i].dot(w[i]) * w[i];
        gn += g[i].squaredNorm();
      }
      gn = std::sqrt(gn);
      if (gn <= 1e-300) break;
      std::vector<Vec> wn = w;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (ks[i] == 1) continue;
        wn[i] = w[i] - step * g[i] / gn;
        wn[i] /= wn[i].norm();
      }
      Eval en = consider(wn);
      if (en.measure < e.measure) {
        w = std::move(wn);
        e = en;
        step = std::min(1.0, step * 1.5);
      } else {
        step *= 0.5;
      }
    }
  };

  if (any_continuous) {
    if (!best_w.empty()) descend(best_w);
    for (int s = 0; s < budget.starts && best.measure > tol * 1e-3; ++s) {
      std::vector<Vec> w;
      for (int k : ks) w.push_back(rng.unit_vec(k));
      descend(w);
    }
  }

  res.best_measure = best.measure;
  res.w = best_w;
  const Dependence d = classify_measure(best.measure, tol);
  res.status = d == Dependence::Dependent ? ConicStatus::Dependent
               : d == Dependence::Gray    ? ConicStatus::Undecided
                                          : ConicStatus::LI;
  if (best.coeff.size() > 0) {
    res.v = cone_vector(blocks, best_w, best.coeff);
    const double nv = res.v.norm();
    if (nv > 0) res.v /= nv;
    res.mv_norm = apply_blocks(blocks, res.v).norm();
  }
  return res;
}

ConicLiResult conic_li_certificate(const std::vector<ConeBlock>& blocks, double tol, const SearchBudget& budget) {
  return slice_search(blocks, SliceMode::Positive, tol, budget);
}

}  // namespace nsocp
