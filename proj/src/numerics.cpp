#include "blgram/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace blgram {

namespace {

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) {
    throw ShapeError(std::string(who) + ": matrix contains non-finite entries");
  }
}

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << who << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  require_finite(a, "kron");
  require_finite(b, "kron");
  if ((b.rows() != 0 && a.rows() > kMaxKronSide / std::max<Index>(b.rows(), 1)) ||
      (b.cols() != 0 && a.cols() > kMaxKronSide / std::max<Index>(b.cols(), 1)) ||
      a.rows() * b.rows() > kMaxKronSide || a.cols() * b.cols() > kMaxKronSide) {
    std::ostringstream os;
    os << "kron: result would be " << a.rows() * b.rows() << "x" << a.cols() * b.cols()
       << ", exceeding the dense size ceiling of " << kMaxKronSide;
    throw SizeLimitError(os.str());
  }
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec_stack(const Matrix& m) { return m.reshaped(); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    std::ostringstream os;
    os << "unvec: vector of length " << v.size() << " cannot fill a " << rows << "x"
       << cols << " matrix";
    throw ShapeError(os.str());
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  require_square(a, "solve_linear");
  require_finite(a, "solve_linear");
  if (a.rows() != b.size()) {
    std::ostringstream os;
    os << "solve_linear: matrix is " << a.rows() << "x" << a.cols()
       << " but right-hand side has length " << b.size();
    throw ShapeError(os.str());
  }
  if (!b.allFinite()) {
    throw ShapeError("solve_linear: right-hand side contains non-finite entries");
  }
  if (a.rows() == 0) return Vector(0);
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond)) {
    const double cond = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    std::ostringstream os;
    os << "solve_linear: matrix singular to working precision (condition estimate "
       << cond << ")";
    throw SingularityError(os.str(), cond);
  }
  Vector x = lu.solve(b);
  if (!x.allFinite()) {
    throw SingularityError("solve_linear: solution overflowed; matrix effectively singular",
                           std::numeric_limits<double>::infinity());
  }
  return x;
}

void check_symmetric(const Matrix& m, const char* who) {
  require_square(m, who);
  require_finite(m, who);
  if (m.size() == 0) return;
  const double scale = max_abs(m);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol * scale) {
    std::ostringstream os;
    os << who << ": matrix asymmetric beyond tolerance (max deviation " << asym
       << " vs allowed " << kSymTol * scale << ")";
    throw ShapeError(os.str());
  }
}

SymEigResult sym_eig(const Matrix& m, bool with_vectors) {
  check_symmetric(m, "sym_eig");
  const Matrix s = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      s, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("sym_eig: eigenvalue iteration failed to converge");
  }
  SymEigResult out;
  out.eigenvalues = es.eigenvalues();
  if (with_vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

double lambda_min(const Matrix& m) {
  const SymEigResult e = sym_eig(m, false);
  if (e.eigenvalues.size() == 0) {
    throw ShapeError("lambda_min: empty matrix has no eigenvalues");
  }
  return e.eigenvalues(0);
}

double lambda_max(const Matrix& m) {
  const SymEigResult e = sym_eig(m, false);
  if (e.eigenvalues.size() == 0) {
    throw ShapeError("lambda_max: empty matrix has no eigenvalues");
  }
  return e.eigenvalues(e.eigenvalues.size() - 1);
}

double spectral_radius(const Matrix& m) {
  require_square(m, "spectral_radius");
  require_finite(m, "spectral_radius");
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spectral_radius: eigenvalue iteration failed to converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& m) {
  require_finite(m, "spectral_norm");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double log_det_pd(const Matrix& m) {
  check_symmetric(m, "log_det_pd");
  if (m.rows() == 0) return 0.0;
  Eigen::LDLT<Matrix> ldlt(symmetrize(m));
  if (ldlt.info() != Eigen::Success) {
    throw DefinitenessError("log_det_pd: factorization failed; matrix not positive definite",
                            std::numeric_limits<double>::quiet_NaN());
  }
  const Vector d = ldlt.vectorD();
  const double dmin = d.minCoeff();
  if (!(dmin > 0.0)) {
    std::ostringstream os;
    os << "log_det_pd: matrix not positive definite (smallest pivot " << dmin << ")";
    throw DefinitenessError(os.str(), dmin);
  }
  return d.array().log().sum();
}

bool is_psd(const Matrix& m) {
  const SymEigResult e = sym_eig(m, false);
  if (e.eigenvalues.size() == 0) return true;
  const double lo = e.eigenvalues(0);
  const double hi = e.eigenvalues(e.eigenvalues.size() - 1);
  const double norm = std::max(std::abs(lo), std::abs(hi));
  return lo >= -kPsdTol * std::max(1.0, norm);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace blgram
