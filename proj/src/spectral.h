#pragma once

#include <Eigen/Dense>

namespace skelmap::detail {

struct TopEigen {
  Eigen::VectorXd values;   // largest first
  Eigen::MatrixXd vectors;  // one column per value, largest-|entry| positive
  double min_value = 0.0;   // smallest eigenvalue (estimate on the iterative path)
  bool iterative = false;
};

// Matrices up to this size use the dense tridiagonal QL/QR solver; larger
// ones use Lanczos with full reorthogonalization.
inline constexpr Eigen::Index kDenseEigenLimit = 400;

// Top-d eigenpairs of a symmetric matrix. Deterministic for a given input.
TopEigen top_eigenpairs(const Eigen::MatrixXd& sym, Eigen::Index d);

// Flips each column so its largest-magnitude entry (first on ties) is positive.
void fix_signs(Eigen::MatrixXd& vectors);

}  // namespace skelmap::detail
