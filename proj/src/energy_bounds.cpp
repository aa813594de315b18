#include "blgram/energy_bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "blgram/gramian.hpp"

namespace blgram {

namespace {

/// Inverse of a symmetric positive definite matrix through its
/// eigendecomposition, with a relative rank guard.
Matrix pd_inverse(const Matrix& w, const char* who) {
  check_symmetric(w, who);
  const SymEigResult eig = sym_eig(w, true);
  const Index n = w.rows();
  const double lmax = eig.eigenvalues(n - 1);
  const double lmin = eig.eigenvalues(0);
  if (!(lmax > 0.0) || !(lmin > kInvertTol * lmax)) {
    std::ostringstream os;
    os << who << ": Gramian numerically singular (lambda_min " << lmin
       << ", lambda_max " << lmax
       << "); run image_invariance_check to diagnose structural rank deficiency";
    throw RankDeficiencyError(os.str());
  }
  const Matrix inv =
      eig.eigenvectors * eig.eigenvalues.cwiseInverse().asDiagonal() *
      eig.eigenvectors.transpose();
  return symmetrize(inv);
}

void require_state_dim(const BilinearSystem& sys, const Matrix& w, const char* who) {
  if (w.rows() != sys.n() || w.cols() != sys.n()) {
    std::ostringstream os;
    os << who << ": W is " << w.rows() << "x" << w.cols() << " but the system has "
       << sys.n() << " states";
    throw ShapeError(os.str());
  }
}

struct CapParts {
  double s;
  double c;
  double g;
  double beta;
};

CapParts cap_parts(const BilinearSystem& sys, const Matrix& winv, const Matrix& psi) {
  const Matrix& a = sys.A;
  double s = 0.0;
  for (const Matrix& fj : sys.F) {
    s += spectral_norm(a.transpose() * psi * fj + fj.transpose() * psi * a);
  }
  double c = 0.0;
  for (const Matrix& fj : sys.F) {
    for (const Matrix& fi : sys.F) {
      c += spectral_norm(fj.transpose() * psi * fi);
    }
  }
  const double g = lambda_max(symmetrize(a.transpose() * psi * a - winv));
  const double disc = s * s - 4.0 * c * g;
  if (disc < 0.0) {
    std::ostringstream os;
    os << "input cap: discriminant " << disc
       << " is negative; the amplitude bound does not apply to this system";
    throw DiscriminantError(os.str(), disc);
  }
  return {s, c, g, -s + std::sqrt(disc)};
}

}  // namespace

Matrix compute_psi(const BilinearSystem& sys, const Matrix& w) {
  require_state_dim(sys, w, "compute_psi");
  const Matrix winv = pd_inverse(w, "compute_psi");
  const Index m = sys.m();
  if (m == 0) return symmetrize(winv);
  const Matrix mid =
      sys.B.transpose() * winv * sys.B - Matrix::Identity(m, m);
  Eigen::PartialPivLU<Matrix> lu(mid);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond)) {
    const double cond =
        rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    std::ostringstream os;
    os << "compute_psi: B^T W^-1 B - I singular to working precision (condition "
          "estimate "
       << cond << ")";
    throw SingularityError(os.str(), cond);
  }
  const Matrix psi = winv - winv * sys.B * lu.solve(sys.B.transpose() * winv);
  return symmetrize(psi);
}

double compute_beta(const BilinearSystem& sys, const Matrix& w, const Matrix& psi) {
  require_state_dim(sys, w, "compute_beta");
  require_state_dim(sys, psi, "compute_beta");
  const Matrix winv = pd_inverse(w, "compute_beta");
  return cap_parts(sys, winv, psi).beta;
}

EnergyBound input_cap(const BilinearSystem& sys, const Matrix& w) {
  const Matrix psi = compute_psi(sys, w);
  const Matrix winv = pd_inverse(w, "input_cap");
  const CapParts parts = cap_parts(sys, winv, psi);
  EnergyBound out;
  out.Psi = psi;
  out.beta = parts.beta;
  out.input_cap = parts.c == 0.0 ? std::numeric_limits<double>::infinity()
                                 : parts.beta / (2.0 * parts.c);
  out.G_negdef = parts.g < 0.0;
  out.cross_norm_sum = parts.c;
  out.gap_lambda_max = parts.g;
  return out;
}

EnergyBound input_cap(const BilinearSystem& sys) {
  return input_cap(sys, gramian_vec_solve(sys).W);
}

std::pair<bool, double> gap_matrix_negdef(const BilinearSystem& sys, const Matrix& w,
                                          const Matrix& psi) {
  require_state_dim(sys, w, "gap_matrix_negdef");
  require_state_dim(sys, psi, "gap_matrix_negdef");
  const Matrix winv = pd_inverse(w, "gap_matrix_negdef");
  const double g =
      lambda_max(symmetrize(sys.A.transpose() * psi * sys.A - winv));
  return {g < 0.0, g};
}

double energy_lower_bound(const Matrix& w, const Vector& x_f) {
  check_symmetric(w, "energy_lower_bound");
  if (x_f.size() != w.rows()) {
    std::ostringstream os;
    os << "energy_lower_bound: state has length " << x_f.size() << " but W is "
       << w.rows() << "x" << w.cols();
    throw ShapeError(os.str());
  }
  const SymEigResult eig = sym_eig(w, false);
  const double lmax = eig.eigenvalues(w.rows() - 1);
  const double lmin = eig.eigenvalues(0);
  if (!(lmax > 0.0) || !(lmin > kInvertTol * lmax)) {
    std::ostringstream os;
    os << "energy_lower_bound: Gramian numerically singular (lambda_min " << lmin
       << "); the quadratic form W^-1 is undefined";
    throw RankDeficiencyError(os.str());
  }
  Eigen::LLT<Matrix> llt(symmetrize(w));
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError("energy_lower_bound: Cholesky factorization failed",
                            lmin);
  }
  return x_f.dot(llt.solve(x_f));
}

EnergyReport verify_energy_inequality(const BilinearSystem& sys,
                                      const std::vector<Vector>& u_seq,
                                      const Matrix& w) {
  const EnergyBound eb = input_cap(sys, w);
  const Trajectory tr = simulate(sys, u_seq, Vector::Zero(sys.n()));

  EnergyReport rep;
  rep.cap = eb.input_cap;
  rep.cap_satisfied = true;
  for (const Vector& u : tr.inputs) {
    const double amp = u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
    if (!(amp <= eb.input_cap)) rep.cap_satisfied = false;
  }

  rep.inequality_held = true;
  rep.steps.reserve(tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    EnergyStep st;
    st.k = static_cast<Index>(k);
    st.energy = k == 0 ? 0.0 : tr.cumulative_energy[k - 1];
    st.bound = energy_lower_bound(w, tr.states[k]);
    st.slack = st.energy - st.bound;
    if (!(st.slack >= -kSlackTol * (1.0 + st.bound))) rep.inequality_held = false;
    rep.steps.push_back(st);
  }
  return rep;
}

Matrix phi_matrix(const BilinearSystem& sys, const Matrix& w, const Vector& u) {
  require_state_dim(sys, w, "phi_matrix");
  if (u.size() != sys.m()) {
    std::ostringstream os;
    os << "phi_matrix: input has length " << u.size() << ", expected " << sys.m();
    throw ShapeError(os.str());
  }
  const Matrix winv = pd_inverse(w, "phi_matrix");
  const Index n = sys.n();
  const Index m = sys.m();
  const Matrix& a = sys.A;

  Matrix phi11 = a.transpose() * winv * a - winv;
  for (Index j = 0; j < m; ++j) {
    const Matrix& fj = sys.F[static_cast<std::size_t>(j)];
    for (Index i = 0; i < m; ++i) {
      const Matrix& fi = sys.F[static_cast<std::size_t>(i)];
      phi11 += u(j) * u(i) * (fj.transpose() * winv * fi);
    }
  }
  for (Index j = 0; j < m; ++j) {
    const Matrix& fj = sys.F[static_cast<std::size_t>(j)];
    phi11 += u(j) * (a.transpose() * winv * fj + fj.transpose() * winv * a);
  }

  Matrix fu = Matrix::Zero(n, n);
  for (Index j = 0; j < m; ++j) fu += u(j) * sys.F[static_cast<std::size_t>(j)];
  const Matrix phi21 = sys.B.transpose() * winv * (a + fu);
  const Matrix phi22 = sys.B.transpose() * winv * sys.B - Matrix::Identity(m, m);

  Matrix phi(n + m, n + m);
  phi.topLeftCorner(n, n) = phi11;
  phi.topRightCorner(n, m) = phi21.transpose();
  phi.bottomLeftCorner(m, n) = phi21;
  phi.bottomRightCorner(m, m) = phi22;
  return symmetrize(phi);
}

ScalarInterval scalar_input_cap(double a, double f) {
  if (!std::isfinite(a) || !std::isfinite(f)) {
    throw InputError("scalar_input_cap: coefficients must be finite");
  }
  if (f == 0.0) {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), true};
  }
  const double center = -a / f;
  const double radius = std::sqrt((a * a) / (f * f) + 1.0);
  return {center - radius, center + radius, false};
}

RatioWitness unbounded_ratio_witness(double a, double f, double w) {
  if (!std::isfinite(a) || !std::isfinite(f) || !std::isfinite(w)) {
    throw InputError("unbounded_ratio_witness: arguments must be finite");
  }
  if (f == 0.0) {
    throw InputError(
        "unbounded_ratio_witness: requires a state-modulating coefficient f != 0");
  }
  if (!(w > 0.0)) {
    throw InputError("unbounded_ratio_witness: target w must be positive");
  }
  // Smallest integer u1 with (a + f u1)^2 > w. The closed-form start is exact
  // for f > 0; the scan also covers f < 0, where the gain decreases in u1.
  double u1 = std::floor((std::sqrt(w) - a) / f + 1.0) + 1.0;
  while (!((a + f * u1) * (a + f * u1) > w)) u1 += 1.0;
  const double gain = a + f * u1;
  const double m_target = 1.0 + gain * gain;
  const double u0 = (m_target - 1.0) * u1 / gain;
  const double x_f = m_target * u1;
  // Replay the two steps of x' = a x + f x u + u from 0 and confirm the ratio.
  const double x1 = u0;
  const double x2 = a * x1 + f * x1 * u1 + u1;
  const double ratio = (u0 * u0 + u1 * u1) / (x_f * x_f);
  if (!(std::abs(x2 - x_f) <= 1e-9 * std::max(1.0, std::abs(x_f))) ||
      !(ratio < 1.0 / w)) {
    throw NumericalError("unbounded_ratio_witness: construction failed verification");
  }
  return {u0, u1, x_f, ratio};
}

}  // namespace blgram
