#pragma once

#include <vector>

namespace defectlab {

// Symmetric band matrix, upper LAPACK storage (column-major, ldab = ku+1).
struct BandedSym {
  int n = 0;
  int ku = 0;
  std::vector<double> ab;

  BandedSym() = default;
  BandedSym(int n_, int ku_) : n(n_), ku(ku_), ab(static_cast<std::size_t>(ku_ + 1) * n_, 0.0) {}

  double& at(int i, int j) {  // requires i <= j, j - i <= ku
    return ab[static_cast<std::size_t>(j) * (ku + 1) + (ku + i - j)];
  }
  double get(int i, int j) const {
    if (i > j) { const int t = i; i = j; j = t; }
    if (j - i > ku) return 0.0;
    return ab[static_cast<std::size_t>(j) * (ku + 1) + (ku + i - j)];
  }
  void add(int i, int j, double val) {
    if (i > j) { const int t = i; i = j; j = t; }
    at(i, j) += val;
  }

  void matvec(const double* x, double* y) const;
  std::vector<double> matvec(const std::vector<double>& x) const;
  double inf_norm() const;
};

// axpy on bands: returns a + alpha * b (bandwidths may differ).
BandedSym band_add(const BandedSym& a, double alpha, const BandedSym& b);

// Cholesky factorization of an SPD band matrix (throws FactorizationError on failure
// with the failing pivot index in the message).
class BandCholesky {
 public:
  BandCholesky() = default;  // empty; fill via try_factor
  explicit BandCholesky(const BandedSym& a);
  static bool try_factor(const BandedSym& a, BandCholesky& out);

  void solve_in_place(std::vector<double>& rhs) const;
  int n() const { return n_; }

 private:
  int n_ = 0;
  int ku_ = 0;
  std::vector<double> factor_;
};

// General band matrix for LU solves (Newton Jacobians). Storage sized for dgbsv.
struct BandedGeneral {
  int n = 0;
  int kl = 0;
  int ku = 0;
  std::vector<double> ab;  // ldab = 2*kl + ku + 1, column-major

  BandedGeneral() = default;
  BandedGeneral(int n_, int kl_, int ku_)
      : n(n_), kl(kl_), ku(ku_), ab(static_cast<std::size_t>(2 * kl_ + ku_ + 1) * n_, 0.0) {}

  void zero();
  void add(int i, int j, double val) {  // requires -kl <= j - i <= ku
    ab[static_cast<std::size_t>(j) * (2 * kl + ku + 1) + (kl + ku + i - j)] += val;
  }
  // Solves in place; throws NumericError on singular pivot.
  void solve(std::vector<double>& rhs);
};

}  // namespace defectlab
