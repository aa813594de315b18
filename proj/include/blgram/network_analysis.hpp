#pragma once

#include <optional>
#include <vector>

#include "blgram/system.hpp"

namespace blgram {

enum class FamilyKind { line_selfloop, line_subdiag };

enum class PlacementRule {
  optimal_exhaustive,  ///< Best lambda_min(W) placement over all node subsets.
  first_nodes,         ///< Nodes 0..m-1.
  explicit_nodes,      ///< User-provided node list.
};

/// Parameterized family of networks swept over the state dimension.
struct NetworkFamily {
  FamilyKind kind = FamilyKind::line_selfloop;
  double coupling = 0.25;     ///< Shared diagonal/off-diagonal line weight.
  int m = 3;                  ///< Actuator count (line_selfloop only).
  double trace_budget = 0.9;  ///< Total self-loop modulation weight, split as
                              ///< alpha = trace_budget / n on each node.
  PlacementRule placement = PlacementRule::optimal_exhaustive;
  std::vector<int> nodes;     ///< Used by explicit_nodes.
};

struct SweepRecord {
  int n;
  /// lambda_min of the bilinear Gramian; NaN when the Gramian does not exist.
  double lambda_min_bilinear;
  /// lambda_min of the linear Gramian of (A, B) with the same placement.
  double lambda_min_linear;
  /// Closed-form lower bound on lambda_min; empty when its hypotheses fail.
  std::optional<double> lambda_min_bound;
  /// False when the Gramian does not exist or the bound hypotheses fail.
  bool assumptions_hold;
  std::vector<int> placement;  ///< Actuated nodes, ascending.
};

/// Symmetric tridiagonal line network with every diagonal and first
/// off-diagonal entry equal to a. Throws InputError for n < 1.
Matrix line_network(int n, double a);

/// Attaches one shared self-loop modulation channel (F = alpha I, no additive
/// term) ahead of the purely additive columns of b. Requires symmetric a
/// (InputError otherwise).
BilinearSystem selfloop_modulated_system(const Matrix& a, double alpha,
                                         const Matrix& b);

/// ceil(n / m) - 1: steps needed for m spread actuators to span a line of n
/// nodes. Throws InputError unless n, m >= 1.
int span_horizon(int n, int m);

/// Closed-form lower bound on lambda_min(W) for a self-loop-modulated line
/// network with symmetric A:
///   rho^(2 T) / ((1 - T alpha^2) (1 - rho^2 - 1/T))
/// valid when T >= 1, rho < sqrt(1 - 1/T), and T alpha^2 < 1; empty when any
/// hypothesis fails.
std::optional<double> selfloop_lambda_min_bound(double rho_a, double alpha,
                                                int horizon);

/// Dimension sweep: for each n in [n_from, n_to] builds the family instance,
/// places actuators, and records bilinear / linear lambda_min plus the
/// closed-form bound where applicable. Existence failures yield NaN entries
/// flagged assumptions_hold = false rather than an error.
std::vector<SweepRecord> dtc_sweep(const NetworkFamily& family, int n_from, int n_to);

/// Line network (coupling 0.05) with a single channel whose modulation is the
/// sub-diagonal shift and whose additive direction is the first node. Throws
/// InputError for n < 2, ExistenceError if the Gramian does not exist.
BilinearSystem subdiag_modulated_system(int n);

struct ExpansionColumn {
  int input;      ///< Channel index j.
  int row;        ///< Row of the F_j nonzero.
  int col;        ///< Column of the F_j nonzero.
  double weight;  ///< Value of the F_j nonzero.
};

/// Linear pair (A, B_ext) whose reachable space contains every state the
/// bilinear system can reach: B_ext appends one canonical column e_row per
/// nonzero of each F_j (scanned j, then row, then column, ascending). Replaying
/// a bilinear trajectory only needs the extra inputs weight * x_col(k) * u_j(k).
struct LinearExpansion {
  Matrix A;
  Matrix B_ext;
  std::vector<ExpansionColumn> column_map;
};

LinearExpansion expand_to_linear(const BilinearSystem& sys);

}  // namespace blgram
