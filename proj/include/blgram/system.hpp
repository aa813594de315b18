#pragma once

#include <vector>

#include "blgram/numerics.hpp"

namespace blgram {

/// State norm above which a simulation is declared divergent.
inline constexpr double kDivergenceLimit = 1e12;

/// Relative eigenvalue threshold separating the kernel of a Gramian from its
/// image in image_invariance_check.
inline constexpr double kKernelTol = 1e-9;

/// Discrete-time system  x(k+1) = A x(k) + sum_j (F_j x(k) + B_j) u_j(k),
/// where B_j is the j-th column of B. Every input channel both modulates the
/// state (through F_j) and drives it additively (through B_j); purely linear
/// channels have F_j = 0, purely multiplicative ones have B_j = 0.
struct BilinearSystem {
  Matrix A;               ///< n x n state matrix.
  std::vector<Matrix> F;  ///< m state-modulation matrices, each n x n.
  Matrix B;               ///< n x m additive-input matrix.

  /// Validates dimensions and finiteness; throws ShapeError.
  BilinearSystem(Matrix a, std::vector<Matrix> f, Matrix b);

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
};

/// Variant with separate input groups: p state-modulating inputs v and q
/// purely additive inputs w,  x(k+1) = A x + sum_j Fbar_j x v_j + Bbar w.
struct GeneralBilinearSystem {
  Matrix A;
  std::vector<Matrix> Fbar;  ///< p matrices, each n x n.
  Matrix Bbar;               ///< n x q.
};

struct Trajectory {
  std::vector<Vector> states;  ///< x(0), ..., x(K).
  std::vector<Vector> inputs;  ///< u(0), ..., u(K-1).
  /// Entry k holds sum_{i<=k} ||u(i)||^2, one value per applied input.
  std::vector<double> cumulative_energy;
};

struct StabilityCheck {
  bool stable;
  double rho;
};

struct ExistenceCheck {
  bool exists;
  double rho;
};

/// Rewrites a two-group system into the single-group form with m = p + q
/// channels: the p modulating channels get zero B columns and the q additive
/// channels get zero F matrices. Trajectories are preserved under the input
/// stacking u = [v; w].
BilinearSystem canonicalize(const GeneralBilinearSystem& g);

/// One transition of the dynamics. Channel sum runs in ascending j.
Vector step(const BilinearSystem& sys, const Vector& x, const Vector& u);

/// Applies the input sequence from x0, recording states and running input
/// energy. Throws DivergenceError when a state exceeds kDivergenceLimit or
/// becomes non-finite, reporting the index of the first bad state.
Trajectory simulate(const BilinearSystem& sys, const std::vector<Vector>& u_seq,
                    const Vector& x0);

/// Matrix of the map X -> A X A^T + sum_j F_j X F_j^T in column-stacked
/// coordinates: kron(A, A) + sum_j kron(F_j, F_j).
Matrix vec_transition_matrix(const BilinearSystem& sys);

/// rho(A) < 1 test.
StabilityCheck schur_stable(const Matrix& a);

/// Gramian existence test: spectral radius of vec_transition_matrix < 1.
ExistenceCheck gramian_exists(const BilinearSystem& sys);

/// True when the image of W absorbs the dynamics: for every kernel vector v
/// of W (eigenvalue <= tol * lambda_max(W)), the projections of A^T v and
/// every F_j^T v onto the image of W vanish to tol and B^T v = 0 to tol.
/// Under this condition states reachable from 0 stay inside the image of W.
bool image_invariance_check(const BilinearSystem& sys, const Matrix& w,
                            double tol = kKernelTol);

}  // namespace blgram
