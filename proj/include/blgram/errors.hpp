#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blgram {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: unreadable files, bad JSON/CSV, invalid indices,
/// violated call preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch or a matrix argument that violates a structural
/// requirement (e.g. asymmetry beyond tolerance).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A dense operation would exceed the configured size ceiling.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Linear system singular to working precision.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Matrix not positive definite where positive definiteness is required.
class DefinitenessError : public Error {
 public:
  DefinitenessError(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// An eigenvalue/SVD routine failed to converge, or a computed quantity
/// violated its numerical contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Spectral radius >= 1 where a Schur-stable matrix is required.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double rho) : Error(what), rho_(rho) {}
  double rho() const { return rho_; }

 private:
  double rho_;
};

/// Gramian existence condition violated: the vec-coordinates transition
/// matrix has spectral radius >= 1, so the defining series diverges.
class ExistenceError : public Error {
 public:
  ExistenceError(const std::string& what, double rho) : Error(what), rho_(rho) {}
  double rho() const { return rho_; }

 private:
  double rho_;
};

/// Series order cap reached before the terms became negligible.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double last_term_norm)
      : Error(what), last_term_norm_(last_term_norm) {}
  double last_term_norm() const { return last_term_norm_; }

 private:
  double last_term_norm_;
};

/// Simulated state overflowed or became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  /// Index of the first offending state.
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Matrix numerically rank-deficient where an inverse is required.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// The input-cap quadratic has a negative discriminant; the bound is
/// inapplicable to this system.
class DiscriminantError : public Error {
 public:
  DiscriminantError(const std::string& what, double discriminant)
      : Error(what), discriminant_(discriminant) {}
  double discriminant() const { return discriminant_; }

 private:
  double discriminant_;
};

/// Combinatorial enumeration would exceed the configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace blgram
