#include "blgram/actuator_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace blgram {

namespace {

std::vector<int> sorted_unique_subset(const ActuatorLibrary& lib,
                                      const std::vector<int>& s, const char* who) {
  if (s.empty()) {
    throw InputError(std::string(who) + ": subset must be nonempty");
  }
  std::vector<int> out = s;
  std::sort(out.begin(), out.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0 || static_cast<std::size_t>(out[i]) >= lib.size()) {
      std::ostringstream os;
      os << who << ": index " << out[i] << " outside the library of " << lib.size()
         << " candidates";
      throw InputError(os.str());
    }
    if (i > 0 && out[i] == out[i - 1]) {
      std::ostringstream os;
      os << who << ": duplicate index " << out[i];
      throw InputError(os.str());
    }
  }
  return out;
}

/// W(S) with the convention W(empty) = 0.
Matrix subset_gramian(const ActuatorLibrary& lib, const std::vector<int>& s) {
  if (s.empty()) return Matrix::Zero(lib.n(), lib.n());
  return gramian_vec_solve(assemble(lib, s)).W;
}

void validate_choose(const ActuatorLibrary& lib, int m, const char* who) {
  if (m < 1 || static_cast<std::size_t>(m) > lib.size()) {
    std::ostringstream os;
    os << who << ": must choose between 1 and " << lib.size() << " candidates, got "
       << m;
    throw InputError(os.str());
  }
}

/// Singleton metric table shared by both selection strategies. Candidates
/// whose Gramian does not exist are left out with a warning; a singular
/// Gramian under log_det ranks at -infinity but stays choosable.
std::map<int, double> singleton_values(const ActuatorLibrary& lib, MetricKind kind,
                                       std::vector<std::string>& warnings) {
  std::map<int, double> values;
  for (std::size_t s = 0; s < lib.size(); ++s) {
    const BilinearSystem sys = assemble(lib, {static_cast<int>(s)});
    const ExistenceCheck ex = gramian_exists(sys);
    if (!ex.exists) {
      std::ostringstream os;
      os << "candidate " << s << " skipped: Gramian does not exist (transition spectral "
            "radius "
         << ex.rho << ")";
      warnings.push_back(os.str());
      continue;
    }
    const Matrix w = gramian_vec_solve(sys).W;
    double val;
    try {
      val = metric(w, kind);
    } catch (const DefinitenessError&) {
      val = -std::numeric_limits<double>::infinity();
    }
    values.emplace(static_cast<int>(s), val);
  }
  return values;
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

}  // namespace

ActuatorLibrary::ActuatorLibrary(Matrix a, std::vector<ActuatorCandidate> cands)
    : A(std::move(a)), candidates(std::move(cands)) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw ShapeError("ActuatorLibrary: A must be square and non-empty");
  }
  if (!A.allFinite()) {
    throw ShapeError("ActuatorLibrary: A contains non-finite entries");
  }
  const Index n = A.rows();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const ActuatorCandidate& c = candidates[i];
    if (c.F.rows() != n || c.F.cols() != n || c.B.size() != n) {
      std::ostringstream os;
      os << "ActuatorLibrary: candidate " << i << " has F " << c.F.rows() << "x"
         << c.F.cols() << " and B of length " << c.B.size() << ", expected " << n << "x"
         << n << " and " << n;
      throw ShapeError(os.str());
    }
    if (!c.F.allFinite() || !c.B.allFinite()) {
      std::ostringstream os;
      os << "ActuatorLibrary: candidate " << i << " contains non-finite entries";
      throw ShapeError(os.str());
    }
  }
}

const char* metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::trace:
      return "trace";
    case MetricKind::lambda_min:
      return "lambda_min";
    case MetricKind::log_det:
      return "log_det";
  }
  return "unknown";
}

BilinearSystem assemble(const ActuatorLibrary& lib, const std::vector<int>& s) {
  const std::vector<int> idx = sorted_unique_subset(lib, s, "assemble");
  const Index n = lib.n();
  std::vector<Matrix> f;
  f.reserve(idx.size());
  Matrix b(n, static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const ActuatorCandidate& c = lib.candidates[static_cast<std::size_t>(idx[j])];
    f.push_back(c.F);
    b.col(static_cast<Index>(j)) = c.B;
  }
  return BilinearSystem(lib.A, std::move(f), std::move(b));
}

double metric(const Matrix& w, MetricKind kind) {
  switch (kind) {
    case MetricKind::trace:
      check_symmetric(w, "metric");
      return w.trace();
    case MetricKind::lambda_min:
      return lambda_min(w);
    case MetricKind::log_det:
      return log_det_pd(w);
  }
  throw InputError("metric: unknown metric kind");
}

Selection greedy_select(const ActuatorLibrary& lib, int m, MetricKind kind) {
  validate_choose(lib, m, "greedy_select");
  Selection sel;
  sel.metric_kind = kind;
  sel.per_singleton_values = singleton_values(lib, kind, sel.warnings);
  if (sel.per_singleton_values.size() < static_cast<std::size_t>(m)) {
    std::ostringstream os;
    os << "greedy_select: only " << sel.per_singleton_values.size()
       << " candidates have Gramians, cannot choose " << m;
    throw InputError(os.str());
  }
  std::vector<std::pair<int, double>> ranked(sel.per_singleton_values.begin(),
                                             sel.per_singleton_values.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const std::pair<int, double>& a, const std::pair<int, double>& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  sel.S.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) sel.S.push_back(ranked[static_cast<std::size_t>(i)].first);
  std::sort(sel.S.begin(), sel.S.end());
  try {
    sel.value = metric(subset_gramian(lib, sel.S), kind);
  } catch (const DefinitenessError&) {
    sel.value = -std::numeric_limits<double>::infinity();
  }
  return sel;
}

Selection exhaustive_select(const ActuatorLibrary& lib, int m, MetricKind kind,
                            std::size_t budget) {
  validate_choose(lib, m, "exhaustive_select");
  const std::size_t v = lib.size();
  // C(v, m) with overflow saturation against the budget.
  double count = 1.0;
  for (int i = 1; i <= m; ++i) {
    count *= static_cast<double>(v - static_cast<std::size_t>(m) + static_cast<std::size_t>(i));
    count /= static_cast<double>(i);
  }
  if (count > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "exhaustive_select: " << count << " subsets exceed the budget of " << budget
       << "; consider greedy_select";
    throw BudgetError(os.str());
  }

  Selection sel;
  sel.metric_kind = kind;
  sel.per_singleton_values = singleton_values(lib, kind, sel.warnings);

  std::vector<int> comb(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) comb[static_cast<std::size_t>(i)] = i;
  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_s;
  do {
    const BilinearSystem sys = assemble(lib, comb);
    const ExistenceCheck ex = gramian_exists(sys);
    if (!ex.exists) {
      std::ostringstream os;
      os << "subset {";
      for (std::size_t i = 0; i < comb.size(); ++i) os << (i ? "," : "") << comb[i];
      os << "} skipped: Gramian does not exist (transition spectral radius " << ex.rho
         << ")";
      sel.warnings.push_back(os.str());
      continue;
    }
    const Matrix w = gramian_vec_solve(sys).W;
    double val;
    try {
      val = metric(w, kind);
    } catch (const DefinitenessError&) {
      val = -std::numeric_limits<double>::infinity();
    }
    if (!found || val > best) {
      found = true;
      best = val;
      best_s = comb;
    }
  } while (next_combination(comb, static_cast<int>(v)));

  if (!found) {
    throw InputError("exhaustive_select: no subset of the requested size has a Gramian");
  }
  sel.S = best_s;
  sel.value = best;
  return sel;
}

std::pair<bool, double> increasing_returns_check(const ActuatorLibrary& lib,
                                                 const std::vector<int>& s1,
                                                 const std::vector<int>& s2, int s) {
  std::vector<int> v1 = s1.empty() ? std::vector<int>{}
                                   : sorted_unique_subset(lib, s1, "increasing_returns_check");
  std::vector<int> v2 = s2.empty() ? std::vector<int>{}
                                   : sorted_unique_subset(lib, s2, "increasing_returns_check");
  if (!std::includes(v2.begin(), v2.end(), v1.begin(), v1.end())) {
    throw InputError("increasing_returns_check: S1 must be a subset of S2");
  }
  if (s < 0 || static_cast<std::size_t>(s) >= lib.size()) {
    std::ostringstream os;
    os << "increasing_returns_check: index " << s << " outside the library";
    throw InputError(os.str());
  }
  if (std::binary_search(v2.begin(), v2.end(), s)) {
    std::ostringstream os;
    os << "increasing_returns_check: candidate " << s << " already belongs to S2";
    throw InputError(os.str());
  }
  auto with = [&](std::vector<int> base) {
    base.push_back(s);
    std::sort(base.begin(), base.end());
    return base;
  };
  const Matrix d = (subset_gramian(lib, with(v2)) - subset_gramian(lib, v2)) -
                   (subset_gramian(lib, with(v1)) - subset_gramian(lib, v1));
  const double lmin = lambda_min(d);
  const double norm = spectral_norm(d);
  return {lmin >= -kPsdTol * std::max(1.0, norm), lmin};
}

SuperpositionCheck superposition_bound_check(const ActuatorLibrary& lib,
                                             const std::vector<int>& s,
                                             const std::vector<std::vector<int>>& parts,
                                             MetricKind kind) {
  const std::vector<int> full = sorted_unique_subset(lib, s, "superposition_bound_check");
  std::set<int> seen;
  std::size_t total = 0;
  for (const std::vector<int>& part : parts) {
    const std::vector<int> p =
        sorted_unique_subset(lib, part, "superposition_bound_check");
    for (int idx : p) {
      if (!seen.insert(idx).second) {
        std::ostringstream os;
        os << "superposition_bound_check: index " << idx << " appears in two parts";
        throw InputError(os.str());
      }
      if (!std::binary_search(full.begin(), full.end(), idx)) {
        std::ostringstream os;
        os << "superposition_bound_check: index " << idx << " not in the full set";
        throw InputError(os.str());
      }
    }
    total += p.size();
  }
  if (total != full.size()) {
    throw InputError("superposition_bound_check: parts do not cover the full set");
  }

  const double whole = metric(subset_gramian(lib, full), kind);
  double lhs, rhs = 0.0;
  if (kind == MetricKind::log_det) {
    // Compare determinants; summing log-dets would claim a different product law.
    lhs = std::exp(whole);
    for (const std::vector<int>& part : parts) {
      rhs += std::exp(metric(subset_gramian(lib, part), kind));
    }
  } else {
    lhs = whole;
    for (const std::vector<int>& part : parts) {
      rhs += metric(subset_gramian(lib, part), kind);
    }
  }
  return {lhs, rhs, lhs >= rhs - kSuperpositionTol * (1.0 + std::abs(lhs))};
}

std::pair<bool, double> w1_additivity_check(const ActuatorLibrary& lib,
                                            const std::vector<int>& s) {
  const std::vector<int> idx = sorted_unique_subset(lib, s, "w1_additivity_check");
  const StabilityCheck st = schur_stable(lib.A);
  if (!st.stable) {
    std::ostringstream os;
    os << "w1_additivity_check: A is not Schur stable (spectral radius " << st.rho
       << ")";
    throw StabilityError(os.str(), st.rho);
  }
  const BilinearSystem sys = assemble(lib, idx);
  const Matrix w_joint = discrete_lyapunov_solve(lib.A, sys.B * sys.B.transpose());
  Matrix w_parts = Matrix::Zero(lib.n(), lib.n());
  for (int i : idx) {
    const Vector& b = lib.candidates[static_cast<std::size_t>(i)].B;
    w_parts += discrete_lyapunov_solve(lib.A, b * b.transpose());
  }
  const double denom = spectral_norm(w_joint);
  const double dev = spectral_norm(w_joint - w_parts) / std::max(denom, 1e-300);
  return {dev <= 1e-10, dev};
}

}  // namespace blgram
