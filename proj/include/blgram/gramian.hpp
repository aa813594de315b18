#pragma once

#include <optional>

#include "blgram/system.hpp"

namespace blgram {

/// Residual ceilings enforced on solver output (relative, spectral norm).
inline constexpr double kVecSolveResidualTol = 1e-10;
inline constexpr double kLyapunovResidualTol = 1e-11;

/// Relative Frobenius cutoff for truncating the controllability factor in
/// linear_gramian_lambda_min.
inline constexpr double kFactorCutoff = 1e-34;

enum class GramianMethod { vec_solve, series };

struct GramianResult {
  Matrix W;  ///< Symmetric PSD reachability Gramian.
  GramianMethod method;
  /// Number of series terms summed; empty for the direct solve.
  std::optional<int> truncation_order;
  /// Relative fixed-point residual of W (see lyapunov_residual).
  double residual;
  /// Spectral radius of the vec-coordinates transition matrix.
  double existence_rho;
};

/// Reachability Gramian W solving
///   W = A W A^T + sum_j F_j W F_j^T + B B^T
/// by one dense linear solve in column-stacked coordinates. Throws
/// ExistenceError when the fixed point does not exist (spectral radius >= 1),
/// NumericalError when the verified residual exceeds kVecSolveResidualTol.
GramianResult gramian_vec_solve(const BilinearSystem& sys);

/// Solves X = A X A^T + Q for Schur-stable A and symmetric Q.
/// Throws StabilityError when rho(A) >= 1.
Matrix discrete_lyapunov_solve(const Matrix& a, const Matrix& q);

/// Same Gramian via the layered series W = sum_i W_i with
///   W_1 = dlyap(A, B B^T),  W_i = dlyap(A, sum_j F_j W_{i-1} F_j^T).
/// Terms are summed until the next term is negligible:
/// ||W_{L+1}|| <= tol * ||partial sum||; the result reports L summed terms.
/// Throws TruncationError when L would exceed max_order.
GramianResult gramian_series(const BilinearSystem& sys, int max_order = 200,
                             double tol = 1e-12);

/// Relative fixed-point residual:
/// spectral_norm(A W A^T - W + sum_j F_j W F_j^T + B B^T) / max(1, spectral_norm(W)).
double lyapunov_residual(const BilinearSystem& sys, const Matrix& w);

/// K-step Gramian of the linear pair (A, B): sum_{i<K} A^i B B^T (A^i)^T.
Matrix linear_gramian_k_step(const Matrix& a, const Matrix& b, int k);

/// lambda_min of the infinite-horizon linear Gramian of (A, B), computed as
/// the squared smallest singular value of the controllability factor
/// [B, AB, A^2 B, ...] truncated once ||A^k B||_F <= kFactorCutoff * max(1, ||B||_F).
/// Resolves eigenvalues far below the dense solver's noise floor. Requires
/// Schur-stable A (StabilityError otherwise).
double linear_gramian_lambda_min(const Matrix& a, const Matrix& b);

}  // namespace blgram
