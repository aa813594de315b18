#pragma once

#include <Eigen/Dense>

#include "blgram/errors.hpp"

namespace blgram {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest row/column count a dense Kronecker product may produce.
inline constexpr Index kMaxKronSide = 4096;

/// Relative symmetry tolerance: M passes when ||M - M^T||_max <= kSymTol * ||M||_max.
inline constexpr double kSymTol = 1e-9;

/// Relative PSD tolerance: lambda_min >= -kPsdTol * max(1, ||M||_2) passes.
inline constexpr double kPsdTol = 1e-10;

/// Reciprocal-condition threshold below which a linear solve is rejected.
inline constexpr double kSingularRcond = 1e-14;

struct SymEigResult {
  Vector eigenvalues;   ///< Ascending order.
  Matrix eigenvectors;  ///< Columns match eigenvalues; empty when not requested.
};

/// Kronecker product. Throws SizeLimitError when either output dimension
/// would exceed kMaxKronSide, ShapeError on non-finite entries.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking of a matrix into a vector: out(i + rows * j) = m(i, j).
Vector vec_stack(const Matrix& m);

/// Inverse of vec_stack. Throws ShapeError when v.size() != rows * cols.
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Solves a * x = b by partially pivoted LU. Throws SingularityError when the
/// reciprocal condition estimate falls below kSingularRcond.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Symmetric eigendecomposition, eigenvalues ascending. Requires symmetry to
/// kSymTol (then symmetrizes); throws ShapeError otherwise.
SymEigResult sym_eig(const Matrix& m, bool with_vectors = true);

/// Smallest / largest eigenvalue of a symmetric matrix.
double lambda_min(const Matrix& m);
double lambda_max(const Matrix& m);

/// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Matrix& m);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// log(det(M)) for symmetric positive definite M via pivoted LDL^T.
/// Throws DefinitenessError when the smallest pivot is not positive.
double log_det_pd(const Matrix& m);

/// PSD verdict under the shared tolerance convention (kPsdTol).
bool is_psd(const Matrix& m);

/// (M + M^T) / 2. No symmetry check; used to clean solver output.
Matrix symmetrize(const Matrix& m);

/// Throws ShapeError unless m is square and symmetric to kSymTol.
void check_symmetric(const Matrix& m, const char* who);

}  // namespace blgram
