#pragma once

#include <stdexcept>
#include <string>

namespace defectlab {

// Nonlinear solve exhausted its step/continuation budget.
struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Converged iterate left the admissible cone (u >= 0, v <= 0).
struct SignViolationError : std::runtime_error {
  explicit SignViolationError(const std::string& what) : std::runtime_error(what) {}
};

// Banded/dense factorization could not be completed even after shift adjustment.
struct FactorizationError : std::runtime_error {
  explicit FactorizationError(const std::string& what) : std::runtime_error(what) {}
};

// Operation requested a v'-weighted substitution, which degenerates when v is constant.
struct CriticalRegimeError : std::runtime_error {
  explicit CriticalRegimeError(const std::string& what) : std::runtime_error(what) {}
};

// Catch-all for numeric breakdowns that are not non-convergence (NaN, lost positivity, ...).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace defectlab
