#include "blgram/gramian.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace blgram {

namespace {

Matrix weighted_sum(const BilinearSystem& sys, const Matrix& w) {
  Matrix q = Matrix::Zero(sys.n(), sys.n());
  for (const Matrix& fj : sys.F) q += fj * w * fj.transpose();
  return q;
}

}  // namespace

double lyapunov_residual(const BilinearSystem& sys, const Matrix& w) {
  check_symmetric(w, "lyapunov_residual");
  if (w.rows() != sys.n()) {
    std::ostringstream os;
    os << "lyapunov_residual: W is " << w.rows() << "x" << w.cols()
       << " but the system has " << sys.n() << " states";
    throw ShapeError(os.str());
  }
  const Matrix r = sys.A * w * sys.A.transpose() - w + weighted_sum(sys, w) +
                   sys.B * sys.B.transpose();
  return spectral_norm(r) / std::max(1.0, spectral_norm(w));
}

GramianResult gramian_vec_solve(const BilinearSystem& sys) {
  const Index n = sys.n();
  const Matrix k = vec_transition_matrix(sys);
  const double rho = spectral_radius(k);
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "gramian_vec_solve: Gramian does not exist; transition matrix has spectral "
          "radius "
       << rho << " >= 1";
    throw ExistenceError(os.str(), rho);
  }
  const Matrix lhs = Matrix::Identity(n * n, n * n) - k;
  const Vector w_vec = solve_linear(lhs, vec_stack(sys.B * sys.B.transpose()));
  const Matrix w = symmetrize(unvec(w_vec, n, n));
  const double res = lyapunov_residual(sys, w);
  if (!(res <= kVecSolveResidualTol)) {
    std::ostringstream os;
    os << "gramian_vec_solve: verified residual " << res << " exceeds "
       << kVecSolveResidualTol;
    throw NumericalError(os.str());
  }
  return GramianResult{w, GramianMethod::vec_solve, std::nullopt, res, rho};
}

Matrix discrete_lyapunov_solve(const Matrix& a, const Matrix& q) {
  if (a.rows() != a.cols()) {
    throw ShapeError("discrete_lyapunov_solve: A must be square");
  }
  check_symmetric(q, "discrete_lyapunov_solve");
  if (q.rows() != a.rows()) {
    std::ostringstream os;
    os << "discrete_lyapunov_solve: A is " << a.rows() << "x" << a.cols() << " but Q is "
       << q.rows() << "x" << q.cols();
    throw ShapeError(os.str());
  }
  const StabilityCheck st = schur_stable(a);
  if (!st.stable) {
    std::ostringstream os;
    os << "discrete_lyapunov_solve: A is not Schur stable (spectral radius " << st.rho
       << ")";
    throw StabilityError(os.str(), st.rho);
  }
  const Index n = a.rows();
  const Matrix lhs = Matrix::Identity(n * n, n * n) - kron(a, a);
  const Vector x_vec = solve_linear(lhs, vec_stack(symmetrize(q)));
  const Matrix x = symmetrize(unvec(x_vec, n, n));
  const double res = spectral_norm(a * x * a.transpose() - x + q) /
                     std::max(1.0, spectral_norm(x));
  if (!(res <= kLyapunovResidualTol)) {
    std::ostringstream os;
    os << "discrete_lyapunov_solve: verified residual " << res << " exceeds "
       << kLyapunovResidualTol;
    throw NumericalError(os.str());
  }
  return x;
}

GramianResult gramian_series(const BilinearSystem& sys, int max_order, double tol) {
  if (max_order < 1) {
    throw InputError("gramian_series: max_order must be at least 1");
  }
  if (!(tol > 0.0)) {
    throw InputError("gramian_series: tolerance must be positive");
  }
  const double rho = spectral_radius(vec_transition_matrix(sys));
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "gramian_series: Gramian does not exist; transition matrix has spectral "
          "radius "
       << rho << " >= 1";
    throw ExistenceError(os.str(), rho);
  }

  Matrix term = discrete_lyapunov_solve(sys.A, sys.B * sys.B.transpose());
  Matrix sum = term;
  int order = 1;
  for (int i = 2; i <= max_order + 1; ++i) {
    term = discrete_lyapunov_solve(sys.A, weighted_sum(sys, term));
    const double term_norm = spectral_norm(term);
    if (term_norm <= tol * spectral_norm(sum)) {
      order = i - 1;
      const Matrix w = symmetrize(sum);
      return GramianResult{w, GramianMethod::series, order, lyapunov_residual(sys, w),
                           rho};
    }
    if (i == max_order + 1) {
      std::ostringstream os;
      os << "gramian_series: order cap " << max_order
         << " reached before convergence (last term norm " << term_norm << ")";
      throw TruncationError(os.str(), term_norm);
    }
    sum += term;
  }
  // Unreachable: the loop always returns or throws.
  throw NumericalError("gramian_series: internal iteration error");
}

Matrix linear_gramian_k_step(const Matrix& a, const Matrix& b, int k) {
  if (a.rows() != a.cols()) {
    throw ShapeError("linear_gramian_k_step: A must be square");
  }
  if (b.rows() != a.rows()) {
    std::ostringstream os;
    os << "linear_gramian_k_step: B has " << b.rows() << " rows, expected " << a.rows();
    throw ShapeError(os.str());
  }
  if (k < 1) {
    throw InputError("linear_gramian_k_step: horizon must be at least 1");
  }
  Matrix term = b * b.transpose();
  Matrix sum = term;
  for (int i = 1; i < k; ++i) {
    term = a * term * a.transpose();
    sum += term;
  }
  return symmetrize(sum);
}

double linear_gramian_lambda_min(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) {
    throw ShapeError("linear_gramian_lambda_min: A must be square");
  }
  if (b.rows() != a.rows()) {
    std::ostringstream os;
    os << "linear_gramian_lambda_min: B has " << b.rows() << " rows, expected "
       << a.rows();
    throw ShapeError(os.str());
  }
  const StabilityCheck st = schur_stable(a);
  if (!st.stable) {
    std::ostringstream os;
    os << "linear_gramian_lambda_min: A is not Schur stable (spectral radius " << st.rho
       << ")";
    throw StabilityError(os.str(), st.rho);
  }
  const Index n = a.rows();
  const Index m = b.cols();
  if (m == 0) return 0.0;

  const double cutoff = kFactorCutoff * std::max(1.0, b.norm());
  std::vector<Matrix> blocks;
  blocks.push_back(b);
  Matrix power = b;
  // rho(A) < 1 guarantees the powers decay geometrically; the cap only guards
  // against pathological near-unit spectral radii.
  constexpr int kMaxBlocks = 100000;
  while (true) {
    power = a * power;
    if (power.norm() <= cutoff) break;
    blocks.push_back(power);
    if (static_cast<int>(blocks.size()) > kMaxBlocks) {
      throw NumericalError(
          "linear_gramian_lambda_min: controllability factor failed to decay");
    }
  }
  Matrix factor(n, static_cast<Index>(blocks.size()) * m);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    factor.middleCols(static_cast<Index>(i) * m, m) = blocks[i];
  }
  if (factor.cols() < n) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(factor);
  const double smin = svd.singularValues()(n - 1);
  return smin * smin;
}

}  // namespace blgram
