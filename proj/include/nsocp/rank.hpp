#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nsocp/cone.hpp"

namespace nsocp {

inline constexpr double kRankTol = 1e-8;

enum class FamilyKind { B, Minus, Plus };

struct FamilyLabel {
  int j = 0;
  FamilyKind kind = FamilyKind::B;
};

struct VectorFamily {
  std::vector<Vec> vectors;
  std::vector<FamilyLabel> labels;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  void add(Vec v, FamilyLabel l) {
    vectors.push_back(std::move(v));
    labels.push_back(l);
  }
  Eigen::MatrixXd matrix() const;  // vectors as columns
};

int numeric_rank(const Eigen::MatrixXd& A, double tol = kRankTol);
int numeric_rank(const VectorFamily& F, double tol = kRankTol);

struct PldCertificate {
  Vec coefficients;
  double residual = 0.0;
};

// Minimum of ‖Σ a_i v_i‖ over the unit simplex (Wolfe's minimum-norm point).
PldCertificate min_norm_in_hull(const std::vector<Vec>& vectors);

std::optional<PldCertificate> is_positively_linearly_dependent(const VectorFamily& F, double tol = kRankTol);

// Three-way outcome of a tolerant test; Gray means the measure fell
// between tol and 10·tol.
enum class Dependence { Independent, Dependent, Gray };

// σ_min scaled by √p·(1+max‖v‖); zero when p exceeds the ambient dimension.
double linear_dependence_measure(const std::vector<Vec>& vectors);
// Simplex residual scaled by 1+max‖v‖.
double positive_dependence_measure(const std::vector<Vec>& vectors);

Dependence classify_measure(double measure, double tol = kRankTol);
Dependence linear_dependence(const VectorFamily& F, double tol = kRankTol);
Dependence positive_dependence(const VectorFamily& F, double tol = kRankTol);

struct CaratheodoryResult {
  std::vector<int> J;  // 0-based indices into the input
  Vec alphas;          // aligned with J
};

CaratheodoryResult caratheodory_reduce(const std::vector<Vec>& vectors, const Vec& alphas);

// One block of a stacked matrix acting on a product cone. A half-line block
// is a single column; a Lorentz block has m columns (Dgᵀ).
struct ConeBlock {
  bool halfline = false;
  Eigen::MatrixXd M;  // n x 1 or n x m
  int j = 0;          // owning constraint index, used for labels
};

// Slice family for a choice of w per Lorentz block (in block order,
// half-line blocks skipped).
VectorFamily slice_family(const std::vector<ConeBlock>& blocks, const std::vector<Vec>& w);

struct SearchBudget {
  int starts = 64;
  int steps = 500;
  std::uint64_t seed = 0;
};

enum class ConicStatus { LI, Dependent, Undecided };

struct ConicLiResult {
  ConicStatus status = ConicStatus::LI;
  double best_measure = 0.0;  // smallest scaled residual found
  std::vector<Vec> w;         // slice attaining it
  Vec v;                      // unit cone vector with small ‖Mv‖ when Dependent
  double mv_norm = 0.0;
  long samples = 0;
};

enum class SliceMode { Linear, Positive };

// Minimises the dependence measure of the slice family over the product of
// unit spheres: deterministic grid, then multi-start projected gradient.
ConicLiResult slice_search(const std::vector<ConeBlock>& blocks, SliceMode mode, double tol,
                           const SearchBudget& budget);

ConicLiResult conic_li_certificate(const std::vector<ConeBlock>& blocks, double tol = kRankTol,
                                   const SearchBudget& budget = {});

// Deterministic quasi-uniform points on the unit sphere of R^k, with
// 2^(k)·8 points requested for a cone of dimension m = k+1.
std::vector<Vec> sphere_grid(int k);

}  // namespace nsocp
