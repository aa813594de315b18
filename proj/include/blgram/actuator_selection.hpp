#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "blgram/gramian.hpp"
#include "blgram/system.hpp"

namespace blgram {

/// Default ceiling on the number of subsets exhaustive_select may evaluate.
inline constexpr std::size_t kDefaultSubsetBudget = 100000;

/// Relative slack allowed when checking the superposition lower bound.
inline constexpr double kSuperpositionTol = 1e-9;

/// One placeable actuator: a state-modulation matrix paired with an additive
/// input direction. Selecting it adds one input channel to the system.
struct ActuatorCandidate {
  Matrix F;  ///< n x n.
  Vector B;  ///< length n.
};

struct ActuatorLibrary {
  Matrix A;
  std::vector<ActuatorCandidate> candidates;

  /// Validates dimensions and finiteness; throws ShapeError.
  ActuatorLibrary(Matrix a, std::vector<ActuatorCandidate> cands);

  Index n() const { return A.rows(); }
  std::size_t size() const { return candidates.size(); }
};

enum class MetricKind { trace, lambda_min, log_det };

const char* metric_name(MetricKind kind);  ///< "trace" / "lambda_min" / "log_det".

struct Selection {
  std::vector<int> S;  ///< Chosen indices, ascending.
  MetricKind metric_kind;
  double value;  ///< Metric of the Gramian of S.
  /// Singleton metric values for every candidate whose Gramian exists
  /// (-infinity marks a singular Gramian under log_det).
  std::map<int, double> per_singleton_values;
  std::vector<std::string> warnings;  ///< Skipped candidates/subsets.
};

struct SuperpositionCheck {
  double lhs;  ///< Metric of the full set (determinant domain for log_det).
  double rhs;  ///< Sum over the parts.
  bool holds;
};

/// System using the candidates indexed by S (channels ordered by ascending
/// index). Throws InputError on empty, duplicate, or out-of-range S.
BilinearSystem assemble(const ActuatorLibrary& lib, const std::vector<int>& s);

/// trace(W), lambda_min(W), or log(det(W)); the last throws DefinitenessError
/// on a singular Gramian.
double metric(const Matrix& w, MetricKind kind);

/// Ranks candidates by their singleton Gramian metric (descending value, ties
/// by ascending index) and returns the top m, re-evaluating the metric on the
/// combined set. Candidates without a Gramian are skipped with a warning;
/// fewer than m survivors is an InputError.
Selection greedy_select(const ActuatorLibrary& lib, int m, MetricKind kind);

/// Evaluates every m-subset in lexicographic order and keeps the first
/// maximizer (strict improvement replaces). Throws BudgetError when the
/// number of subsets exceeds the budget.
Selection exhaustive_select(const ActuatorLibrary& lib, int m, MetricKind kind,
                            std::size_t budget = kDefaultSubsetBudget);

/// PSD verdict and lambda_min of the increasing-returns difference
///   [W(S2 + s) - W(S2)] - [W(S1 + s) - W(S1)]
/// for nested S1 subset-of S2 and s outside S2. Empty sets map to W = 0.
std::pair<bool, double> increasing_returns_check(const ActuatorLibrary& lib,
                                                 const std::vector<int>& s1,
                                                 const std::vector<int>& s2, int s);

/// Checks metric(W(S)) >= sum_i metric(W(S_i)) over a partition of S.
/// For log_det the comparison runs in the determinant domain.
SuperpositionCheck superposition_bound_check(const ActuatorLibrary& lib,
                                             const std::vector<int>& s,
                                             const std::vector<std::vector<int>>& parts,
                                             MetricKind kind);

/// Verifies that the first series layer is additive across channels:
/// returns (deviation <= 1e-10, deviation) with deviation the relative
/// spectral-norm gap between W_1(S) and sum_s W_1({s}).
std::pair<bool, double> w1_additivity_check(const ActuatorLibrary& lib,
                                            const std::vector<int>& s);

}  // namespace blgram
