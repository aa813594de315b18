#pragma once

#include <utility>
#include <vector>

#include "blgram/system.hpp"

namespace blgram {

/// Relative gap below which a Gramian counts as numerically singular for
/// inversion purposes: lambda_min(W) must exceed kInvertTol * lambda_max(W).
inline constexpr double kInvertTol = 1e-12;

/// Slack tolerance for the per-trajectory energy inequality.
inline constexpr double kSlackTol = 1e-9;

struct EnergyBound {
  Matrix Psi;             ///< Weight certifying the per-step energy inequality.
  double beta;            ///< Positive root scale of the cap quadratic.
  double input_cap;       ///< Amplitude cap; +infinity when no state modulation.
  bool G_negdef;          ///< Whether A^T Psi A - W^{-1} is negative definite.
  double cross_norm_sum;  ///< c = sum_{j,i} ||F_j^T Psi F_i||_2.
  double gap_lambda_max;  ///< g = lambda_max(A^T Psi A - W^{-1}).
};

struct EnergyStep {
  Index k;
  double energy;  ///< Input energy spent through step k.
  double bound;   ///< x(k)^T W^{-1} x(k).
  double slack;   ///< energy - bound.
};

struct EnergyReport {
  std::vector<EnergyStep> steps;  ///< k = 0..K.
  double cap;
  bool cap_satisfied;    ///< max_k ||u(k)||_inf <= cap.
  bool inequality_held;  ///< slack >= -kSlackTol * (1 + bound) at every step.
};

struct ScalarInterval {
  double lo;
  double hi;
  bool all_reals;  ///< True when f = 0: any amplitude is admissible.
};

struct RatioWitness {
  double u0;
  double u1;
  double x_f;     ///< State reached after applying (u0, u1) from 0.
  double ratio;   ///< (u0^2 + u1^2) / x_f^2, verified < 1 / w.
};

/// Psi = W^{-1} - W^{-1} B (B^T W^{-1} B - I)^{-1} B^T W^{-1}.
/// Throws RankDeficiencyError when W is numerically singular (consider
/// image_invariance_check to diagnose structural rank deficiency) and
/// SingularityError when B^T W^{-1} B - I cannot be inverted.
Matrix compute_psi(const BilinearSystem& sys, const Matrix& w);

/// beta = -s + sqrt(s^2 - 4 c g) with
///   s = sum_j ||A^T Psi F_j + F_j^T Psi A||_2,
///   c = sum_{j,i} ||F_j^T Psi F_i||_2,
///   g = lambda_max(A^T Psi A - W^{-1}).
/// Throws DiscriminantError when s^2 - 4 c g < 0.
double compute_beta(const BilinearSystem& sys, const Matrix& w, const Matrix& psi);

/// Full bound report: cap = beta / (2 c), or +infinity exactly when c = 0
/// (no state modulation). The cap is positive iff g < 0.
EnergyBound input_cap(const BilinearSystem& sys, const Matrix& w);

/// Convenience overload computing W first.
EnergyBound input_cap(const BilinearSystem& sys);

/// (g < 0, g) where g = lambda_max(A^T Psi A - W^{-1}).
std::pair<bool, double> gap_matrix_negdef(const BilinearSystem& sys, const Matrix& w,
                                          const Matrix& psi);

/// x_f^T W^{-1} x_f via a symmetric linear solve (no explicit inverse).
double energy_lower_bound(const Matrix& w, const Vector& x_f);

/// Simulates u_seq from x(0) = 0 and tabulates spent energy against the
/// Gramian bound x(k)^T W^{-1} x(k) at every step.
EnergyReport verify_energy_inequality(const BilinearSystem& sys,
                                      const std::vector<Vector>& u_seq, const Matrix& w);

/// Block matrix whose negative semidefiniteness certifies the per-step energy
/// inequality for input value u:
///   [ (A+F(u))^T W^{-1} (A+F(u)) - W^{-1}   (B^T W^{-1} (A+F(u)))^T ]
///   [  B^T W^{-1} (A+F(u))                   B^T W^{-1} B - I       ]
/// with F(u) = sum_j u_j F_j. Size (n+m) x (n+m), symmetric.
Matrix phi_matrix(const BilinearSystem& sys, const Matrix& w, const Vector& u);

/// Exact admissible-amplitude interval for the scalar system (a, f, b):
/// (a + f u)^2 <= a^2 + f^2, i.e. [-a/f - r, -a/f + r] with
/// r = sqrt(a^2/f^2 + 1); all reals when f = 0.
ScalarInterval scalar_input_cap(double a, double f);

/// For the scalar dynamics x' = a x + f x u + u with f != 0, constructs a
/// two-step input pair whose energy-to-reach ratio beats 1 / w for any w > 0:
/// large amplitudes defeat any amplitude-independent energy floor. u1 is the
/// smallest integer with (a + f u1)^2 > w; the intermediate target
/// M = 1 + (a + f u1)^2 minimizes the achieved ratio over that choice of u1.
RatioWitness unbounded_ratio_witness(double a, double f, double w);

}  // namespace blgram
