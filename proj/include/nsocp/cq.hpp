#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsocp/model.hpp"
#include "nsocp/rank.hpp"

namespace nsocp {

enum class CqStatus { Holds, Violated, Undecided };

const char* status_name(CqStatus s);  // HOLDS / VIOLATED / UNDECIDED

// Slice choice: constraint index j in I0 -> unit vector of length m_j - 1.
using SliceChoice = std::map<int, Vec>;

struct SubsetSelection {
  std::vector<int> JB;
  std::vector<int> Jminus;
  std::vector<int> Jplus;

  bool empty() const { return JB.empty() && Jminus.empty() && Jplus.empty(); }
};

struct CqWitness {
  std::optional<Vec> direction;    // base direction d of x^k = x̄ + t_k d
  std::vector<double> steps;       // t_k
  std::optional<Vec> dw;           // slice perturbation for neighbourhood witnesses
  SliceChoice wbar;
  std::optional<SubsetSelection> subsets;
  std::optional<Vec> cone_vector;  // kernel vector for Robinson
  double measure = 0.0;
  std::string evidence;
};

struct CqCertificate {
  double worst_measure = 0.0;
  long samples = 0;
  std::string note;
};

struct CqVerdict {
  std::string name;
  CqStatus status = CqStatus::Undecided;
  std::optional<CqWitness> witness;
  std::optional<CqCertificate> certificate;
};

struct CqOptions {
  std::uint64_t seed = 0;
  int random_directions = 32;     // per probe family
  int max_choices = 256;          // cap on enumerated free slice choices
  int neighbourhood_samples = 24; // (dx, dw) pairs per dependent candidate
  int steps = 20;                 // t_k = 2^-k, k = 1..steps
  int tail = 10;
  double tol = kRankTol;
  double index_tol = kDefaultIndexTol;
  SearchBudget search;
};

// CQ names accepted by run_cq, in hierarchy order.
const std::vector<std::string>& cq_names();

// Dg_jᵀu1(g_j) for j in JB, Dg_jᵀ(1,-w_j) for J-, Dg_jᵀ(1,w_j) for J+.
VectorFamily build_family_D(const PointEval& ev, const SubsetSelection& sel, const SliceChoice& w);
VectorFamily build_family_D(const ProblemSpec& p, const Vec& x, const SubsetSelection& sel, const SliceChoice& w);

CqVerdict check_nondegeneracy(const ProblemSpec& p, const Vec& x, const CqOptions& opt = {});
CqVerdict check_robinson(const ProblemSpec& p, const Vec& x, const CqOptions& opt = {});
CqVerdict check_kkt(const ProblemSpec& p, const Vec& x, const CqOptions& opt = {});

enum class WeakVariant { Ndg, Robinson };
CqVerdict falsify_weak_cq(const ProblemSpec& p, const Vec& x, WeakVariant v, const CqOptions& opt = {});

enum class RankVariant { WeakCrcq, WeakCpld, SeqCrcq, SeqCpld };
CqVerdict falsify_constant_rank(const ProblemSpec& p, const Vec& x, RankVariant v, const CqOptions& opt = {});

// Dispatch by name: ndg, robinson, weak-ndg, weak-robinson, weak-crcq,
// weak-cpld, seq-crcq, seq-cpld, kkt.
CqVerdict run_cq(const ProblemSpec& p, const Vec& x, const std::string& name, const CqOptions& opt = {});

struct NdgCrosscheck {
  CqStatus ndg = CqStatus::Undecided;
  CqStatus weak_ndg = CqStatus::Undecided;
  bool hat_full_row_rank = false;
  bool consistent = false;
};

NdgCrosscheck crosscheck_ndg_decomposition(const ProblemSpec& p, const Vec& x, const CqOptions& opt = {});

// Stacked Dĝ_j over I0 (rows), n columns.
Eigen::MatrixXd stacked_hat_jacobian(const PointEval& ev, const IndexClassification& ic);

// Solid implications (stronger, weaker) of the hierarchy that the tool checks.
const std::vector<std::pair<std::string, std::string>>& hierarchy_arrows();

// Arrows contradicted by a verdict table: stronger HOLDS with weaker VIOLATED.
std::vector<std::pair<std::string, std::string>> hierarchy_violations(const std::map<std::string, CqStatus>& verdicts);

}  // namespace nsocp
