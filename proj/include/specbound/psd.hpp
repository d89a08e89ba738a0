#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "specbound/error.hpp"

namespace specbound {

struct EigenDecomp {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values
};

[[nodiscard]] inline EigenDecomp eigen_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw error("psd", "eigendecomposition needs a square matrix");
  }
  if (!a.allFinite()) {
    throw error("psd", "matrix contains a non-finite value");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw error("psd", "matrix is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw error("psd", "eigendecomposition failed to converge");
  }
  EigenDecomp out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

enum class PsdPolicyKind {
  ClampZero,  // floor eigenvalues at 0
  ClampEps,   // floor eigenvalues at eps / n, keeping the matrix invertible
};

struct PsdPolicy {
  PsdPolicyKind kind = PsdPolicyKind::ClampZero;
  double eps = 0.01;

  [[nodiscard]] double floor_value(std::size_t n) const {
    if (kind == PsdPolicyKind::ClampZero) return 0.0;
    if (n == 0) {
      throw error("psd", "the eps/n floor needs the series length");
    }
    if (!(eps > 0.0)) {
      throw error("psd", "the eps/n floor needs a positive epsilon");
    }
    return eps / static_cast<double>(n);
  }
};

// Positive-(semi)definite correction: clamp the eigenvalues from below and
// recompose with unchanged eigenvectors. Matrices already above the floor
// pass through unchanged up to floating-point noise, so the correction is
// idempotent.
[[nodiscard]] inline Eigen::MatrixXd psd_correct(const Eigen::MatrixXd& a,
                                                 const PsdPolicy& policy,
                                                 std::size_t n = 0) {
  const double floor = policy.floor_value(n);
  const EigenDecomp decomp = eigen_symmetric(a);
  Eigen::VectorXd clamped = decomp.values;
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    clamped(i) = std::max(clamped(i), floor);
  }
  Eigen::MatrixXd out = decomp.vectors * clamped.asDiagonal() *
                        decomp.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace specbound
