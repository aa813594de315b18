#include "blgram/network_analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "blgram/gramian.hpp"

namespace blgram {

namespace {

Matrix placement_columns(Index n, const std::vector<int>& nodes) {
  Matrix b = Matrix::Zero(n, static_cast<Index>(nodes.size()));
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    b(nodes[j], static_cast<Index>(j)) = 1.0;
  }
  return b;
}

bool next_combination(std::vector<int>& comb, int v) {
  const int m = static_cast<int>(comb.size());
  int i = m - 1;
  while (i >= 0 && comb[static_cast<std::size_t>(i)] == v - m + i) --i;
  if (i < 0) return false;
  ++comb[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < m; ++j) {
    comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

/// Best-lambda_min node subset for the self-loop family. All placements share
/// the same vec-coordinates operator (the modulation is placement-independent),
/// so one LU factorization serves every candidate right-hand side.
std::vector<int> optimal_selfloop_placement(const Matrix& a, double alpha, int m_eff) {
  const Index n = a.rows();
  const Matrix lhs = Matrix::Identity(n * n, n * n) - kron(a, a) -
                     alpha * alpha * Matrix::Identity(n * n, n * n);
  Eigen::PartialPivLU<Matrix> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond)) {
    const double cond =
        rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    throw SingularityError(
        "dtc_sweep: placement ranking solve singular to working precision", cond);
  }

  std::vector<int> comb(static_cast<std::size_t>(m_eff));
  for (int i = 0; i < m_eff; ++i) comb[static_cast<std::size_t>(i)] = i;
  std::vector<int> best;
  double best_val = -std::numeric_limits<double>::infinity();
  do {
    // B_S B_S^T for canonical columns is a diagonal indicator matrix.
    Matrix bbt = Matrix::Zero(n, n);
    for (int node : comb) bbt(node, node) = 1.0;
    const Vector w_vec = lu.solve(vec_stack(bbt));
    const Matrix w = symmetrize(unvec(w_vec, n, n));
    Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericalError("dtc_sweep: placement eigenvalue iteration failed");
    }
    const double val = es.eigenvalues()(0);
    if (best.empty() || val > best_val) {
      best_val = val;
      best = comb;
    }
  } while (next_combination(comb, static_cast<int>(n)));
  return best;
}

std::vector<int> choose_placement(const NetworkFamily& family, const Matrix& a,
                                  double alpha, int m_eff) {
  switch (family.placement) {
    case PlacementRule::optimal_exhaustive:
      return optimal_selfloop_placement(a, alpha, m_eff);
    case PlacementRule::first_nodes: {
      std::vector<int> nodes(static_cast<std::size_t>(m_eff));
      for (int i = 0; i < m_eff; ++i) nodes[static_cast<std::size_t>(i)] = i;
      return nodes;
    }
    case PlacementRule::explicit_nodes: {
      const Index n = a.rows();
      if (family.nodes.empty()) {
        throw InputError("dtc_sweep: explicit placement requires a node list");
      }
      std::set<int> seen;
      for (int node : family.nodes) {
        if (node < 0 || node >= n) {
          std::ostringstream os;
          os << "dtc_sweep: placement node " << node << " outside 0.." << n - 1;
          throw InputError(os.str());
        }
        if (!seen.insert(node).second) {
          std::ostringstream os;
          os << "dtc_sweep: duplicate placement node " << node;
          throw InputError(os.str());
        }
      }
      std::vector<int> nodes(seen.begin(), seen.end());
      return nodes;
    }
  }
  throw InputError("dtc_sweep: unknown placement rule");
}

}  // namespace

Matrix line_network(int n, double a) {
  if (n < 1) {
    throw InputError("line_network: need at least one node");
  }
  if (!std::isfinite(a)) {
    throw InputError("line_network: coupling must be finite");
  }
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    out(i, i) = a;
    if (i + 1 < n) {
      out(i, i + 1) = a;
      out(i + 1, i) = a;
    }
  }
  return out;
}

BilinearSystem selfloop_modulated_system(const Matrix& a, double alpha,
                                         const Matrix& b) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw InputError("selfloop_modulated_system: A must be square and non-empty");
  }
  if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() >
                          kSymTol * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    throw InputError("selfloop_modulated_system: A must be symmetric");
  }
  if (!std::isfinite(alpha)) {
    throw InputError("selfloop_modulated_system: alpha must be finite");
  }
  const Index n = a.rows();
  if (b.size() > 0 && b.rows() != n) {
    std::ostringstream os;
    os << "selfloop_modulated_system: B has " << b.rows() << " rows, expected " << n;
    throw InputError(os.str());
  }
  const Index q = b.size() == 0 ? 0 : b.cols();
  std::vector<Matrix> f;
  f.reserve(static_cast<std::size_t>(1 + q));
  f.push_back(alpha * Matrix::Identity(n, n));
  for (Index j = 0; j < q; ++j) f.push_back(Matrix::Zero(n, n));
  Matrix b_sys = Matrix::Zero(n, 1 + q);
  if (q > 0) b_sys.rightCols(q) = b;
  return BilinearSystem(a, std::move(f), std::move(b_sys));
}

int span_horizon(int n, int m) {
  if (n < 1 || m < 1) {
    throw InputError("span_horizon: n and m must be at least 1");
  }
  return (n + m - 1) / m - 1;
}

std::optional<double> selfloop_lambda_min_bound(double rho_a, double alpha,
                                                int horizon) {
  if (!std::isfinite(rho_a) || !std::isfinite(alpha)) {
    throw InputError("selfloop_lambda_min_bound: arguments must be finite");
  }
  if (horizon < 1) return std::nullopt;
  const double t = static_cast<double>(horizon);
  if (!(rho_a >= 0.0) || !(rho_a < std::sqrt(1.0 - 1.0 / t))) return std::nullopt;
  if (!(t * alpha * alpha < 1.0)) return std::nullopt;
  return std::pow(rho_a, 2.0 * t) /
         ((1.0 - t * alpha * alpha) * (1.0 - rho_a * rho_a - 1.0 / t));
}

std::vector<SweepRecord> dtc_sweep(const NetworkFamily& family, int n_from, int n_to) {
  if (n_from < 1 || n_to < n_from) {
    throw InputError("dtc_sweep: need 1 <= n_from <= n_to");
  }
  if (family.kind == FamilyKind::line_subdiag && n_from < 2) {
    throw InputError("dtc_sweep: the sub-diagonal family needs n >= 2");
  }
  if (family.kind == FamilyKind::line_selfloop && family.m < 1) {
    throw InputError("dtc_sweep: actuator count must be at least 1");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepRecord> records;
  records.reserve(static_cast<std::size_t>(n_to - n_from + 1));

  for (int n = n_from; n <= n_to; ++n) {
    SweepRecord rec;
    rec.n = n;
    if (family.kind == FamilyKind::line_subdiag) {
      const Matrix a = line_network(n, 0.05);
      const Matrix b = placement_columns(n, {0});
      rec.placement = {0};
      rec.lambda_min_bound = std::nullopt;
      rec.lambda_min_linear = linear_gramian_lambda_min(a, b);
      try {
        const BilinearSystem sys = subdiag_modulated_system(n);
        rec.lambda_min_bilinear = lambda_min(gramian_vec_solve(sys).W);
        rec.assumptions_hold = true;
      } catch (const ExistenceError&) {
        rec.lambda_min_bilinear = nan;
        rec.assumptions_hold = false;
      }
      records.push_back(std::move(rec));
      continue;
    }

    const Matrix a = line_network(n, family.coupling);
    const double alpha = family.trace_budget / static_cast<double>(n);
    const int m_eff = std::min(family.m, n);

    // Existence depends only on (A, alpha), not on the placement.
    const ExistenceCheck ex =
        gramian_exists(selfloop_modulated_system(a, alpha, Matrix(n, 0)));
    if (!ex.exists) {
      rec.lambda_min_bilinear = nan;
      rec.lambda_min_linear = nan;
      rec.lambda_min_bound = std::nullopt;
      rec.assumptions_hold = false;
      records.push_back(std::move(rec));
      continue;
    }

    rec.placement = choose_placement(family, a, alpha, m_eff);
    const Matrix b = placement_columns(n, rec.placement);
    const BilinearSystem sys = selfloop_modulated_system(a, alpha, b);
    rec.lambda_min_bilinear = lambda_min(gramian_vec_solve(sys).W);
    rec.lambda_min_linear = linear_gramian_lambda_min(a, b);
    const int horizon = span_horizon(n, family.m);
    rec.lambda_min_bound =
        selfloop_lambda_min_bound(spectral_radius(a), alpha, horizon);
    rec.assumptions_hold = rec.lambda_min_bound.has_value();
    records.push_back(std::move(rec));
  }
  return records;
}

BilinearSystem subdiag_modulated_system(int n) {
  if (n < 2) {
    throw InputError("subdiag_modulated_system: need at least two nodes");
  }
  const Matrix a = line_network(n, 0.05);
  Matrix f = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) f(i, i - 1) = 1.0;
  Matrix b = Matrix::Zero(n, 1);
  b(0, 0) = 1.0;
  BilinearSystem sys(a, {f}, b);
  const ExistenceCheck ex = gramian_exists(sys);
  if (!ex.exists) {
    std::ostringstream os;
    os << "subdiag_modulated_system: Gramian does not exist at n = " << n
       << " (transition spectral radius " << ex.rho << ")";
    throw ExistenceError(os.str(), ex.rho);
  }
  return sys;
}

LinearExpansion expand_to_linear(const BilinearSystem& sys) {
  const Index n = sys.n();
  LinearExpansion out;
  out.A = sys.A;
  for (Index j = 0; j < sys.m(); ++j) {
    const Matrix& fj = sys.F[static_cast<std::size_t>(j)];
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) {
        if (fj(r, c) != 0.0) {
          out.column_map.push_back(ExpansionColumn{static_cast<int>(j),
                                                   static_cast<int>(r),
                                                   static_cast<int>(c), fj(r, c)});
        }
      }
    }
  }
  out.B_ext = Matrix::Zero(n, sys.m() + static_cast<Index>(out.column_map.size()));
  out.B_ext.leftCols(sys.m()) = sys.B;
  for (std::size_t i = 0; i < out.column_map.size(); ++i) {
    out.B_ext(out.column_map[i].row, sys.m() + static_cast<Index>(i)) = 1.0;
  }
  return out;
}

}  // namespace blgram
