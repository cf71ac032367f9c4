#include "spectral.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "skelmap/error.h"

namespace skelmap::detail {

namespace {

using Eigen::Index;

Eigen::VectorXd seeded_unit_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = uni(rng);
  return v.normalized();
}

// Removes the components of w along the first `count` columns of q. Run twice
// for numerical orthogonality.
void orthogonalize(const Eigen::MatrixXd& q, Index count, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd coeff = q.leftCols(count).transpose() * w;
    w.noalias() -= q.leftCols(count) * coeff;
  }
}

TopEigen dense(const Eigen::MatrixXd& sym, Index d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  require(solver.info() == Eigen::Success, "eigensolver convergence",
          "symmetric eigensolver failed to converge");
  const Index n = sym.rows();
  TopEigen out;
  out.values.resize(d);
  out.vectors.resize(n, d);
  for (Index i = 0; i < d; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  out.min_value = solver.eigenvalues()(0);
  return out;
}

TopEigen lanczos(const Eigen::MatrixXd& sym, Index d) {
  const Index n = sym.rows();
  const double scale = std::max(sym.cwiseAbs().maxCoeff(), 1e-300);
  constexpr double kTolerance = 1e-11;
  Index steps = std::min<Index>(n, std::max<Index>(4 * d + 40, 80));
  for (;;) {
    Eigen::MatrixXd q(n, steps + 1);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(steps);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(steps);
    std::uint64_t restarts = 0;
    q.col(0) = seeded_unit_vector(n, 0x5eedULL);
    for (Index j = 0; j < steps; ++j) {
      Eigen::VectorXd w = sym * q.col(j);
      alpha(j) = q.col(j).dot(w);
      w -= alpha(j) * q.col(j);
      if (j > 0) w -= beta(j - 1) * q.col(j - 1);
      orthogonalize(q, j + 1, w);
      beta(j) = w.norm();
      if (beta(j) <= 1e-12 * scale * std::sqrt(static_cast<double>(n))) {
        // Invariant subspace: continue from a fresh orthogonal direction.
        beta(j) = 0.0;
        if (j + 1 >= n) break;
        do {
          w = seeded_unit_vector(n, 0x5eedULL + ++restarts);
          orthogonalize(q, j + 1, w);
        } while (w.norm() < 1e-8);
        q.col(j + 1) = w.normalized();
      } else {
        q.col(j + 1) = w / beta(j);
      }
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
    for (Index j = 0; j < steps; ++j) {
      t(j, j) = alpha(j);
      if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    const Eigen::VectorXd& theta = small.eigenvalues();
    const double top = std::max(std::abs(theta(steps - 1)), std::abs(theta(0)));

    bool converged = true;
    for (Index i = 0; i < std::min(d, steps); ++i) {
      const double residual = std::abs(beta(steps - 1) * small.eigenvectors()(steps - 1, steps - 1 - i));
      if (residual > kTolerance * std::max(top, 1e-300)) converged = false;
    }
    if ((converged && steps >= d) || steps == n) {
      TopEigen out;
      out.iterative = true;
      out.values.resize(d);
      out.vectors.resize(n, d);
      for (Index i = 0; i < d; ++i) {
        out.values(i) = theta(steps - 1 - i);
        out.vectors.col(i) = (q.leftCols(steps) * small.eigenvectors().col(steps - 1 - i)).normalized();
      }
      out.min_value = theta(0);
      return out;
    }
    steps = std::min(n, 2 * steps);
  }
}

}  // namespace

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > best) {
        best = std::abs(vectors(r, c));
        arg = r;
      }
    }
    if (vectors(arg, c) < 0) vectors.col(c) *= -1.0;
  }
}

TopEigen top_eigenpairs(const Eigen::MatrixXd& sym, Index d) {
  require(d >= 1 && d <= sym.rows(), "1 <= d <= n", "requested eigenpair count out of range");
  TopEigen out = sym.rows() <= kDenseEigenLimit ? dense(sym, d) : lanczos(sym, d);
  fix_signs(out.vectors);
  return out;
}

}  // namespace skelmap::detail
