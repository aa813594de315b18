#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace blgram;
using testsupport::Rng;

namespace {

BilinearSystem scalar_system(double a, double f, double b) {
  Matrix am(1, 1), fm(1, 1), bm(1, 1);
  am << a;
  fm << f;
  bm << b;
  return BilinearSystem(am, {fm}, bm);
}

}  // namespace

TEST_CASE("scalar certificate weight and cap match the closed forms") {
  const BilinearSystem sys = scalar_system(0.5, 0.3, 1.0);
  const Matrix w = gramian_vec_solve(sys).W;
  CHECK(w(0, 0) == doctest::Approx(1.0 / 0.66).epsilon(1e-14));
  const Matrix psi = compute_psi(sys, w);
  CHECK(psi(0, 0) == doctest::Approx(33.0 / 17.0).epsilon(1e-13));

  const EnergyBound eb = input_cap(sys, w);
  CHECK(eb.cross_norm_sum == doctest::Approx(2.97 / 17.0).epsilon(1e-12));
  CHECK(eb.gap_lambda_max == doctest::Approx(8.25 / 17.0 - 0.66).epsilon(1e-12));
  CHECK(eb.G_negdef);
  CHECK(eb.input_cap == doctest::Approx(0.27698396494843336).epsilon(1e-12));
  CHECK(eb.input_cap ==
        doctest::Approx(eb.beta / (2.0 * eb.cross_norm_sum)).epsilon(1e-13));
}

TEST_CASE("five-node benchmark cap quantities match pinned references") {
  const BilinearSystem sys = testsupport::load_fixture_system("bench5_system.json");
  const EnergyBound eb = input_cap(sys);
  CHECK(eb.cross_norm_sum == doctest::Approx(6.984657442769238).epsilon(1e-8));
  CHECK(eb.gap_lambda_max ==
        doctest::Approx(-0.004323902417329337).epsilon(1e-8));
  CHECK(eb.beta == doctest::Approx(0.01537691312823819).epsilon(1e-8));
  CHECK(eb.input_cap == doctest::Approx(0.001100763584630547).epsilon(1e-8));
  CHECK(eb.G_negdef);
  CHECK(eb.input_cap > 0.0);
}

TEST_CASE("systems without state modulation get an unbounded cap") {
  Matrix a(2, 2), b(2, 1);
  a << 0.5, 0.1, 0.0, 0.4;
  b << 1.0, 0.5;
  const BilinearSystem sys(a, {Matrix::Zero(2, 2)}, b);
  const EnergyBound eb = input_cap(sys);
  CHECK(eb.cross_norm_sum == 0.0);
  CHECK(std::isinf(eb.input_cap));
  CHECK(eb.input_cap > 0.0);
}

TEST_CASE("certificate weight equals the inverse of W minus B B^T") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const BilinearSystem sys = testsupport::random_system(rng, 3, 2, 0.8);
    const Matrix w = gramian_vec_solve(sys).W;
    if (lambda_min(w) <= 1e-10 * lambda_max(w)) continue;
    const Matrix shifted = w - sys.B * sys.B.transpose();
    if (std::abs(shifted.determinant()) < 1e-12) continue;
    const Matrix psi = compute_psi(sys, w);
    CHECK(testsupport::rel_frobenius(psi, shifted.inverse()) <= 1e-8);
  }
}

TEST_CASE("gap matrix test reports the pinned benchmark margin") {
  const BilinearSystem sys = testsupport::load_fixture_system("bench5_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  const Matrix psi = compute_psi(sys, w);
  const auto [negdef, g] = gap_matrix_negdef(sys, w, psi);
  CHECK(negdef);
  CHECK(g == doctest::Approx(-0.004323902417329337).epsilon(1e-8));
}

TEST_CASE("certificate block matrix is negative semidefinite under the cap") {
  const BilinearSystem sys = testsupport::load_fixture_system("bench5_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  const double cap = input_cap(sys, w).input_cap;
  for (double scale : {0.0, 0.5, 1.0, -1.0}) {
    Vector u(1);
    u << scale * cap;
    const Matrix phi = phi_matrix(sys, w, u);
    CHECK(testsupport::max_abs_diff(phi, phi.transpose()) == 0.0);
    CHECK(lambda_max(phi) <= 1e-9);
  }
}

TEST_CASE("block matrix matches its factored definition") {
  const BilinearSystem sys = testsupport::load_fixture_system("bench5_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  Vector u(1);
  u << 0.0007;
  const Matrix phi = phi_matrix(sys, w, u);

  const Matrix winv = w.inverse();
  const Matrix m = sys.A + u(0) * sys.F[0];
  const Index n = sys.n(), mm = sys.m();
  Matrix expect(n + mm, n + mm);
  expect.topLeftCorner(n, n) = m.transpose() * winv * m - winv;
  expect.bottomLeftCorner(mm, n) = sys.B.transpose() * winv * m;
  expect.topRightCorner(n, mm) = expect.bottomLeftCorner(mm, n).transpose();
  expect.bottomRightCorner(mm, mm) =
      sys.B.transpose() * winv * sys.B - Matrix::Identity(mm, mm);
  CHECK(testsupport::max_abs_diff(phi, symmetrize(expect)) <= 1e-10);
}

TEST_CASE("Schur complement of the block matrix equals the weighted gap") {
  const BilinearSystem sys = testsupport::load_fixture_system("bench5_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  const Matrix psi = compute_psi(sys, w);
  const Index n = sys.n(), mm = sys.m();
  for (double uj : {0.0, 0.0005, -0.001}) {
    Vector u(1);
    u << uj;
    const Matrix phi = phi_matrix(sys, w, u);
    const Matrix p11 = phi.topLeftCorner(n, n);
    const Matrix p21 = phi.bottomLeftCorner(mm, n);
    const Matrix p22 = phi.bottomRightCorner(mm, mm);
    const Matrix schur = p11 - p21.transpose() * p22.inverse() * p21;
    const Matrix m = sys.A + uj * sys.F[0];
    const Matrix gap = m.transpose() * psi * m - w.inverse();
    CHECK(testsupport::max_abs_diff(schur, gap) <= 1e-10);
  }
}

TEST_CASE("scalar admissible interval has the closed-form endpoints") {
  const ScalarInterval iv = scalar_input_cap(0.5, 0.3);
  CHECK_FALSE(iv.all_reals);
  CHECK(iv.lo == doctest::Approx(-3.6103172982817666).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(0.27698396494843336).epsilon(1e-12));

  const ScalarInterval centered = scalar_input_cap(0.0, 0.5);
  CHECK(centered.lo == doctest::Approx(-1.0));
  CHECK(centered.hi == doctest::Approx(1.0));

  const ScalarInterval free_iv = scalar_input_cap(0.7, 0.0);
  CHECK(free_iv.all_reals);
  CHECK(std::isinf(free_iv.lo));
  CHECK(free_iv.lo < 0.0);
  CHECK(std::isinf(free_iv.hi));
  CHECK(free_iv.hi > 0.0);
}

TEST_CASE("norm-based cap is exact for scalar systems") {
  Rng rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(-0.7, 0.7);
    double f = rng.uniform(0.1, 0.7) * (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    while (a * a + f * f >= 0.9) f *= 0.7;
    const double b = rng.uniform(0.5, 2.0);
    const BilinearSystem sys = scalar_system(a, f, b);
    const EnergyBound eb = input_cap(sys);
    const ScalarInterval iv = scalar_input_cap(a, f);
    // The norm route produces a symmetric amplitude bound, so it recovers the
    // tighter side of the exact (one-sided) admissible interval.
    CHECK(eb.input_cap == doctest::Approx(std::min(-iv.lo, iv.hi)).epsilon(1e-9));
  }
}

TEST_CASE("block matrix gains a positive eigenvalue outside the interval") {
  const BilinearSystem sys = scalar_system(0.5, 0.3, 1.0);
  const Matrix w = gramian_vec_solve(sys).W;
  const ScalarInterval iv = scalar_input_cap(0.5, 0.3);
  Vector u(1);
  u << iv.hi + 0.5;
  CHECK(lambda_max(phi_matrix(sys, w, u)) > 0.0);
  u << iv.lo - 0.5;
  CHECK(lambda_max(phi_matrix(sys, w, u)) > 0.0);
  u << 0.5 * (iv.lo + iv.hi);
  CHECK(lambda_max(phi_matrix(sys, w, u)) < 0.0);
}

TEST_CASE("trajectory energy dominates the Gramian bound under the cap") {
  const BilinearSystem sys = testsupport::load_fixture_system("bench5_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  std::vector<Vector> u(10, Vector::Ones(1) * 0.001);
  const EnergyReport rep = verify_energy_inequality(sys, u, w);
  REQUIRE(rep.steps.size() == 11);
  CHECK(rep.steps.front().k == 0);
  CHECK(rep.steps.front().energy == 0.0);
  CHECK(rep.steps.front().bound == 0.0);
  CHECK(rep.cap == doctest::Approx(0.001100763584630547).epsilon(1e-8));
  CHECK(rep.cap_satisfied);
  CHECK(rep.inequality_held);
  for (std::size_t i = 0; i < rep.steps.size(); ++i) {
    const EnergyStep& st = rep.steps[i];
    CHECK(st.k == static_cast<Index>(i));
    CHECK(st.slack == doctest::Approx(st.energy - st.bound).epsilon(1e-12));
    CHECK(st.slack >= -kSlackTol * (1.0 + st.bound));
    if (i > 0) CHECK(st.energy >= rep.steps[i - 1].energy);
  }
}

TEST_CASE("amplitudes beyond the cap are flagged") {
  const BilinearSystem sys = scalar_system(0.5, 0.3, 1.0);
  const Matrix w = gramian_vec_solve(sys).W;
  std::vector<Vector> u(5, Vector::Ones(1) * 1.0);  // cap is ~0.277
  const EnergyReport rep = verify_energy_inequality(sys, u, w);
  CHECK_FALSE(rep.cap_satisfied);
  REQUIRE(rep.steps.size() == 6);
}

TEST_CASE("energy lower bound agrees with the explicit inverse") {
  Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix q = testsupport::random_matrix(rng, 4, 4);
    const Matrix w = symmetrize(q * q.transpose()) + 0.1 * Matrix::Identity(4, 4);
    const Vector x = testsupport::random_vector(rng, 4);
    const double direct = x.dot(w.inverse() * x);
    CHECK(energy_lower_bound(w, x) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("energy lower bound refuses singular Gramians") {
  const BilinearSystem sys =
      testsupport::load_fixture_system("rank_deficient_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  CHECK_THROWS_AS(energy_lower_bound(w, Vector::Ones(4)), RankDeficiencyError);
  CHECK_THROWS_AS(energy_lower_bound(Matrix::Identity(3, 3), Vector::Ones(2)),
                  ShapeError);
}

TEST_CASE("certificate weight requires an invertible Gramian") {
  const BilinearSystem sys =
      testsupport::load_fixture_system("rank_deficient_system.json");
  const Matrix w = gramian_vec_solve(sys).W;
  CHECK_THROWS_AS(compute_psi(sys, w), RankDeficiencyError);
}

TEST_CASE("certificate weight of an inputless system is the plain inverse") {
  const BilinearSystem sys(0.5 * Matrix::Identity(2, 2), {}, Matrix::Zero(2, 0));
  const Matrix psi = compute_psi(sys, 2.0 * Matrix::Identity(2, 2));
  CHECK(testsupport::max_abs_diff(psi, 0.5 * Matrix::Identity(2, 2)) <= 1e-14);
}

TEST_CASE("ratio witnesses beat the inverse Gramian floor at every scale") {
  struct Expect {
    double w, u1, u0, x_f;
  };
  const Expect table[] = {
      {10.0, 4.0, 18.0, 85.0},
      {1e3, 33.0, 1105.5, 37067.25},
      {1e5, 317.0, 100647.5, 31955898.25},
  };
  for (const Expect& e : table) {
    const RatioWitness wit = unbounded_ratio_witness(0.5, 1.0, e.w);
    CHECK(wit.u1 == doctest::Approx(e.u1).epsilon(1e-15));
    CHECK(wit.u0 == doctest::Approx(e.u0).epsilon(1e-12));
    CHECK(wit.x_f == doctest::Approx(e.x_f).epsilon(1e-12));
    const double gain = 0.5 + wit.u1;
    const double target = 1.0 + gain * gain;
    CHECK(wit.ratio == doctest::Approx(1.0 / target).epsilon(1e-12));
    CHECK(wit.ratio < 1.0 / e.w);

    // Replay the two inputs through the dynamics.
    const BilinearSystem sys = scalar_system(0.5, 1.0, 1.0);
    std::vector<Vector> u(2, Vector::Zero(1));
    u[0](0) = wit.u0;
    u[1](0) = wit.u1;
    const Trajectory tr = simulate(sys, u, Vector::Zero(1));
    CHECK(tr.states[2](0) == doctest::Approx(wit.x_f).epsilon(1e-12));
    const double energy = wit.u0 * wit.u0 + wit.u1 * wit.u1;
    CHECK(tr.cumulative_energy[1] == doctest::Approx(energy).epsilon(1e-12));
  }
}

TEST_CASE("ratio witness handles negative modulation weights") {
  const RatioWitness wit = unbounded_ratio_witness(0.2, -0.7, 50.0);
  const double gain = 0.2 - 0.7 * wit.u1;
  CHECK(gain * gain > 50.0);
  CHECK(wit.ratio < 1.0 / 50.0);
  CHECK(wit.ratio == doctest::Approx(1.0 / (1.0 + gain * gain)).epsilon(1e-12));
}

TEST_CASE("ratio witness rejects degenerate parameters") {
  CHECK_THROWS_AS(unbounded_ratio_witness(0.5, 0.0, 10.0), InputError);
  CHECK_THROWS_AS(unbounded_ratio_witness(0.5, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(unbounded_ratio_witness(0.5, 1.0, -3.0), InputError);
}

TEST_CASE("negative discriminants are reported, not silently clamped") {
  Matrix f = Matrix::Zero(2, 2);
  f(0, 1) = 0.1;
  Matrix b = Matrix::Zero(2, 1);
  b(0, 0) = 1.0;
  const BilinearSystem sys(2.0 * Matrix::Identity(2, 2), {f}, b);
  try {
    compute_beta(sys, Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    FAIL("expected DiscriminantError");
  } catch (const DiscriminantError& e) {
    CHECK(e.discriminant() == doctest::Approx(-0.08).epsilon(1e-12));
  }
}
