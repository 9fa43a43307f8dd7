#pragma once

// Repair of non-positive-semidefinite model correlation matrices: truncate
// negative eigenvalues to zero, reconstruct, then rescale the result back to
// unit diagonal. The rescaling leaves every single-country marginal alone.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "tfrcorr/correlation_model.hpp"

namespace tfrcorr {

/// Eigenvalues at or above -psd_tolerance count as non-negative.
inline constexpr double psd_tolerance = 1e-10;

struct SymmetricEigen {
  Eigen::MatrixXd vectors;  // columns are eigenvectors
  Eigen::VectorXd values;   // descending
};

namespace detail {
inline void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("matrix is not symmetric");
}
}  // namespace detail

inline SymmetricEigen eigen_sym(const Eigen::MatrixXd& m) {
  detail::require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  // Eigen returns ascending order.
  return {solver.eigenvectors().rowwise().reverse(), solver.eigenvalues().reverse()};
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  detail::require_symmetric(m);
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

/// U max(D, 0) U^T. Inputs with no eigenvalue below -psd_tolerance are
/// returned as-is.
inline Eigen::MatrixXd nearest_psd(const Eigen::MatrixXd& r) {
  auto eig = eigen_sym(r);
  if (eig.values.size() == 0 || eig.values.minCoeff() >= -psd_tolerance) return r;
  Eigen::VectorXd clipped = eig.values.cwiseMax(0.0);
  Eigen::MatrixXd out = eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

inline Eigen::MatrixXd rescale_to_correlation(const Eigen::MatrixXd& s) {
  detail::require_symmetric(s);
  const Eigen::Index n = s.rows();
  Eigen::VectorXd inv_sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(s(i, i) > 0.0))
      throw DegenerateCountryError(static_cast<std::size_t>(i),
                                   "zero variance for country index " + std::to_string(i));
    inv_sd(i) = 1.0 / std::sqrt(s(i, i));
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = std::clamp(s(i, j) * inv_sd(i) * inv_sd(j), -1.0, 1.0);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

struct RepairReport {
  bool repaired = false;
  double min_eigenvalue_before = 0.0;
  double max_abs_change = 0.0;
};

inline Eigen::MatrixXd repair(const Eigen::MatrixXd& r, RepairReport* report = nullptr) {
  detail::require_symmetric(r);
  RepairReport rep;
  rep.min_eigenvalue_before = min_eigenvalue(r);
  Eigen::MatrixXd out = r;
  if (rep.min_eigenvalue_before < -psd_tolerance) {
    out = rescale_to_correlation(nearest_psd(r));
    rep.repaired = true;
    rep.max_abs_change = (out - r).cwiseAbs().maxCoeff();
  }
  if (report) *report = rep;
  return out;
}

inline CorrelationMatrix repair(const CorrelationMatrix& r, RepairReport* report = nullptr) {
  return {r.countries, repair(r.values, report)};
}

/// Symmetric square root U sqrt(max(D, 0)) U^T of a PSD matrix. Works for
/// singular inputs, unlike a Cholesky factor.
inline Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& r) {
  auto eig = eigen_sym(r);
  Eigen::VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.asDiagonal() * eig.vectors.transpose();
}

}  // namespace tfrcorr
