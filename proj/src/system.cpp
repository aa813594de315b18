#include "blgram/system.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace blgram {

namespace {

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) {
    throw ShapeError(std::string(who) + ": matrix contains non-finite entries");
  }
}

}  // namespace

BilinearSystem::BilinearSystem(Matrix a, std::vector<Matrix> f, Matrix b)
    : A(std::move(a)), F(std::move(f)), B(std::move(b)) {
  if (A.rows() != A.cols()) {
    std::ostringstream os;
    os << "BilinearSystem: A must be square, got " << A.rows() << "x" << A.cols();
    throw ShapeError(os.str());
  }
  if (A.rows() < 1) {
    throw ShapeError("BilinearSystem: state dimension must be at least 1");
  }
  const Index nn = A.rows();
  if (B.rows() != nn) {
    std::ostringstream os;
    os << "BilinearSystem: B has " << B.rows() << " rows, expected " << nn;
    throw ShapeError(os.str());
  }
  if (static_cast<Index>(F.size()) != B.cols()) {
    std::ostringstream os;
    os << "BilinearSystem: " << F.size() << " modulation matrices for " << B.cols()
       << " input channels";
    throw ShapeError(os.str());
  }
  require_finite(A, "BilinearSystem");
  require_finite(B, "BilinearSystem");
  for (std::size_t j = 0; j < F.size(); ++j) {
    if (F[j].rows() != nn || F[j].cols() != nn) {
      std::ostringstream os;
      os << "BilinearSystem: F[" << j << "] is " << F[j].rows() << "x" << F[j].cols()
         << ", expected " << nn << "x" << nn;
      throw ShapeError(os.str());
    }
    require_finite(F[j], "BilinearSystem");
  }
}

BilinearSystem canonicalize(const GeneralBilinearSystem& g) {
  if (g.A.rows() != g.A.cols() || g.A.rows() < 1) {
    throw ShapeError("canonicalize: A must be square and non-empty");
  }
  const Index n = g.A.rows();
  if (g.Bbar.rows() != n && g.Bbar.size() != 0) {
    std::ostringstream os;
    os << "canonicalize: additive input matrix has " << g.Bbar.rows()
       << " rows, expected " << n;
    throw ShapeError(os.str());
  }
  const Index p = static_cast<Index>(g.Fbar.size());
  const Index q = g.Bbar.size() == 0 ? 0 : g.Bbar.cols();
  std::vector<Matrix> f;
  f.reserve(static_cast<std::size_t>(p + q));
  for (const Matrix& fj : g.Fbar) f.push_back(fj);
  for (Index j = 0; j < q; ++j) f.push_back(Matrix::Zero(n, n));
  Matrix b = Matrix::Zero(n, p + q);
  if (q > 0) b.rightCols(q) = g.Bbar;
  return BilinearSystem(g.A, std::move(f), std::move(b));
}

Vector step(const BilinearSystem& sys, const Vector& x, const Vector& u) {
  if (x.size() != sys.n()) {
    std::ostringstream os;
    os << "step: state has length " << x.size() << ", expected " << sys.n();
    throw ShapeError(os.str());
  }
  if (u.size() != sys.m()) {
    std::ostringstream os;
    os << "step: input has length " << u.size() << ", expected " << sys.m();
    throw ShapeError(os.str());
  }
  Vector next = sys.A * x;
  for (Index j = 0; j < sys.m(); ++j) {
    next += (sys.F[static_cast<std::size_t>(j)] * x + sys.B.col(j)) * u(j);
  }
  return next;
}

Trajectory simulate(const BilinearSystem& sys, const std::vector<Vector>& u_seq,
                    const Vector& x0) {
  if (x0.size() != sys.n()) {
    std::ostringstream os;
    os << "simulate: initial state has length " << x0.size() << ", expected " << sys.n();
    throw ShapeError(os.str());
  }
  auto check_state = [](const Vector& x, std::size_t k) {
    if (!x.allFinite() || x.norm() > kDivergenceLimit) {
      std::ostringstream os;
      os << "simulate: state " << k << " diverged (norm exceeds " << kDivergenceLimit
         << " or is non-finite)";
      throw DivergenceError(os.str(), k);
    }
  };
  Trajectory tr;
  tr.states.reserve(u_seq.size() + 1);
  tr.inputs.reserve(u_seq.size());
  tr.cumulative_energy.reserve(u_seq.size());
  check_state(x0, 0);
  tr.states.push_back(x0);
  double energy = 0.0;
  for (std::size_t k = 0; k < u_seq.size(); ++k) {
    const Vector& u = u_seq[k];
    Vector next = step(sys, tr.states.back(), u);
    check_state(next, k + 1);
    energy += u.squaredNorm();
    tr.states.push_back(std::move(next));
    tr.inputs.push_back(u);
    tr.cumulative_energy.push_back(energy);
  }
  return tr;
}

Matrix vec_transition_matrix(const BilinearSystem& sys) {
  Matrix k = kron(sys.A, sys.A);
  for (const Matrix& fj : sys.F) k += kron(fj, fj);
  return k;
}

StabilityCheck schur_stable(const Matrix& a) {
  const double rho = spectral_radius(a);
  return {rho < 1.0, rho};
}

ExistenceCheck gramian_exists(const BilinearSystem& sys) {
  const double rho = spectral_radius(vec_transition_matrix(sys));
  return {rho < 1.0, rho};
}

bool image_invariance_check(const BilinearSystem& sys, const Matrix& w, double tol) {
  check_symmetric(w, "image_invariance_check");
  if (w.rows() != sys.n()) {
    std::ostringstream os;
    os << "image_invariance_check: W is " << w.rows() << "x" << w.cols()
       << " but the system has " << sys.n() << " states";
    throw ShapeError(os.str());
  }
  if (!(tol > 0.0)) {
    throw InputError("image_invariance_check: tolerance must be positive");
  }
  const SymEigResult eig = sym_eig(w, true);
  const Index n = w.rows();
  const double lmax = std::max(eig.eigenvalues(n - 1), 0.0);
  const double thresh = tol * lmax;

  std::vector<Index> kernel_cols;
  std::vector<Index> image_cols;
  for (Index i = 0; i < n; ++i) {
    if (eig.eigenvalues(i) <= thresh) {
      kernel_cols.push_back(i);
    } else {
      image_cols.push_back(i);
    }
  }
  if (kernel_cols.empty()) return true;

  Matrix v_im(n, static_cast<Index>(image_cols.size()));
  for (std::size_t c = 0; c < image_cols.size(); ++c) {
    v_im.col(static_cast<Index>(c)) = eig.eigenvectors.col(image_cols[c]);
  }

  auto image_component_small = [&](const Vector& y) {
    if (v_im.cols() == 0) return true;
    return (v_im * (v_im.transpose() * y)).norm() <= tol;
  };

  for (Index kc : kernel_cols) {
    const Vector v = eig.eigenvectors.col(kc);
    if (!image_component_small(sys.A.transpose() * v)) return false;
    for (const Matrix& fj : sys.F) {
      if (!image_component_small(fj.transpose() * v)) return false;
    }
    if (sys.m() > 0 && (sys.B.transpose() * v).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

}  // namespace blgram
