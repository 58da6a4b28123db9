#include "nsocp/cone.hpp"

#include <cmath>

#include "nsocp/errors.hpp"
#include "nsocp/kernels.hpp"

namespace nsocp {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonUnitChoice: return "NonUnitChoice";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidProblem: return "InvalidProblem";
    case ErrorKind::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorKind::MissingPerturbations: return "MissingPerturbations";
    case ErrorKind::ZeroHatOnBoundary: return "ZeroHatOnBoundary";
    case ErrorKind::SubsetCapExceeded: return "SubsetCapExceeded";
    case ErrorKind::LineSearchStalled: return "LineSearchStalled";
    case ErrorKind::DivergingIterates: return "DivergingIterates";
    case ErrorKind::SubproblemInfeasible: return "SubproblemInfeasible";
  }
  return "Unknown";
}

SocVector SocVector::from(const Vec& y) {
  if (y.size() < 2) throw Error(ErrorKind::DimensionMismatch, "cone vectors need m >= 2");
  return SocVector(y[0], y.tail(y.size() - 1));
}

Vec SocVector::to_vec() const {
  Vec v(m());
  v[0] = y0;
  v.tail(yhat.size()) = yhat;
  return v;
}

double SocVector::hat_norm() const {
  return kernels::nrm2(yhat.data(), static_cast<std::size_t>(yhat.size()));
}

const char* membership_name(ConeMembership c) {
  switch (c) {
    case ConeMembership::Interior: return "Interior";
    case ConeMembership::BoundaryNonzero: return "BoundaryNonzero";
    case ConeMembership::Origin: return "Origin";
    case ConeMembership::Outside: return "Outside";
  }
  return "?";
}

SpectralDecomposition spectral_decompose(const SocVector& y, const std::optional<Vec>& w_choice) {
  if (y.yhat.size() < 1) throw Error(ErrorKind::DimensionMismatch, "cone vectors need m >= 2");
  if (!y.yhat.allFinite() || !std::isfinite(y.y0))
    throw Error(ErrorKind::DimensionMismatch, "non-finite cone vector");
  const Eigen::Index k = y.yhat.size();
  SpectralDecomposition s;
  const double r = y.hat_norm();
  s.lambda1 = y.y0 - r;
  s.lambda2 = y.y0 + r;
  if (r > kZeroHatTol) {
    s.w = y.yhat / r;
    s.canonical = true;
    s.choice_ignored = w_choice.has_value();
  } else if (w_choice) {
    if (w_choice->size() != k) throw Error(ErrorKind::DimensionMismatch, "w_choice has wrong length");
    if (std::abs(w_choice->norm() - 1.0) > 1e-8)
      throw Error(ErrorKind::NonUnitChoice, "w_choice is not a unit vector");
    s.w = *w_choice;
  } else {
    s.w = Vec::Zero(k);
    s.w[0] = 1.0;
  }
  s.u1.resize(k + 1);
  s.u2.resize(k + 1);
  s.u1[0] = 0.5;
  s.u2[0] = 0.5;
  s.u1.tail(k) = -0.5 * s.w;
  s.u2.tail(k) = 0.5 * s.w;
  return s;
}

SocVector project(const SocVector& y) {
  const SpectralDecomposition s = spectral_decompose(y);
  if (s.lambda1 >= 0.0) return y;
  if (s.lambda2 <= 0.0) return SocVector(0.0, Vec::Zero(y.yhat.size()));
  // only λ2 survives
  return SocVector::from(s.lambda2 * s.u2);
}

Vec project(const Vec& y) { return project(SocVector::from(y)).to_vec(); }

ConeMembership classify(const SocVector& y, double tol) {
  const double r = y.hat_norm();
  const double l1 = y.y0 - r;
  const double l2 = y.y0 + r;
  const double nrm = std::sqrt(y.y0 * y.y0 + r * r);
  if (l1 > tol) return ConeMembership::Interior;
  if (nrm <= tol) return ConeMembership::Origin;
  if (std::abs(l1) <= tol && l2 > tol) return ConeMembership::BoundaryNonzero;
  if (l1 < -tol) return ConeMembership::Outside;
  // both eigenvalues within tol of zero but ‖y‖ slightly above tol
  return ConeMembership::Origin;
}

SocVector gamma_reflect(const SocVector& y) { return SocVector(y.y0, -y.yhat); }

Vec gamma_reflect(const Vec& y) {
  Vec r = -y;
  r[0] = y[0];
  return r;
}

double lambda1(const Vec& y) {
  return y[0] - kernels::nrm2(y.data() + 1, static_cast<std::size_t>(y.size() - 1));
}

double lambda2(const Vec& y) {
  return y[0] + kernels::nrm2(y.data() + 1, static_cast<std::size_t>(y.size() - 1));
}

std::optional<Vec> hat_direction(const Vec& y) {
  const Vec h = y.tail(y.size() - 1);
  const double r = h.norm();
  if (r <= kZeroHatTol) return std::nullopt;
  return Vec(h / r);
}

}  // namespace nsocp
