#pragma once

#include <Eigen/Dense>
#include <optional>

namespace nsocp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ŷ is treated as zero below this norm.
inline constexpr double kZeroHatTol = 1e-14;

struct SocVector {
  double y0 = 0.0;
  Vec yhat;

  SocVector() = default;
  SocVector(double first, Vec rest) : y0(first), yhat(std::move(rest)) {}
  static SocVector from(const Vec& y);

  int m() const { return static_cast<int>(yhat.size()) + 1; }
  Vec to_vec() const;
  double hat_norm() const;
};

struct SpectralDecomposition {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec u1;
  Vec u2;
  Vec w;
  bool canonical = false;
  // Set when a w_choice was passed but ŷ was nonzero, so it was not used.
  bool choice_ignored = false;
};

enum class ConeMembership { Interior, BoundaryNonzero, Origin, Outside };

const char* membership_name(ConeMembership c);

SpectralDecomposition spectral_decompose(const SocVector& y,
                                         const std::optional<Vec>& w_choice = std::nullopt);

SocVector project(const SocVector& y);
Vec project(const Vec& y);

ConeMembership classify(const SocVector& y, double tol);

SocVector gamma_reflect(const SocVector& y);
Vec gamma_reflect(const Vec& y);

double lambda1(const Vec& y);
double lambda2(const Vec& y);

// Unit vector of ŷ, or nullopt when ŷ is (numerically) zero.
std::optional<Vec> hat_direction(const Vec& y);

}  // namespace nsocp
