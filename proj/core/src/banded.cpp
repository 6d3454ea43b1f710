#include "defectlab/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "defectlab/errors.hpp"

namespace defectlab {

void BandedSym::matvec(const double* x, double* y) const {
  for (int i = 0; i < n; ++i) y[i] = 0.0;
  for (int j = 0; j < n; ++j) {
    const int i0 = std::max(0, j - ku);
    for (int i = i0; i <= j; ++i) {
      const double a = ab[static_cast<std::size_t>(j) * (ku + 1) + (ku + i - j)];
      y[i] += a * x[j];
      if (i != j) y[j] += a * x[i];
    }
  }
}

std::vector<double> BandedSym::matvec(const std::vector<double>& x) const {
  std::vector<double> y(n, 0.0);
  matvec(x.data(), y.data());
  return y;
}

double BandedSym::inf_norm() const {
  std::vector<double> row(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const int i0 = std::max(0, j - ku);
    for (int i = i0; i <= j; ++i) {
      const double a = std::abs(ab[static_cast<std::size_t>(j) * (ku + 1) + (ku + i - j)]);
      row[i] += a;
      if (i != j) row[j] += a;
    }
  }
  return *std::max_element(row.begin(), row.end());
}

BandedSym band_add(const BandedSym& a, double alpha, const BandedSym& b) {
  BandedSym out(a.n, std::max(a.ku, b.ku));
  for (int j = 0; j < out.n; ++j) {
    for (int i = std::max(0, j - out.ku); i <= j; ++i) out.at(i, j) = a.get(i, j) + alpha * b.get(i, j);
  }
  return out;
}

BandCholesky::BandCholesky(const BandedSym& a) {
  if (!try_factor(a, *this))
    throw FactorizationError("banded Cholesky failed: matrix not positive definite");
}

bool BandCholesky::try_factor(const BandedSym& a, BandCholesky& out) {
  out.n_ = a.n;
  out.ku_ = a.ku;
  out.factor_ = a.ab;
  const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', a.n, a.ku, out.factor_.data(),
                                         a.ku + 1);
  if (info < 0)
    throw NumericError("dpbtrf: invalid argument " + std::to_string(-info));
  return info == 0;
}

void BandCholesky::solve_in_place(std::vector<double>& rhs) const {
  const lapack_int info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n_, ku_, 1,
                                         factor_.data(), ku_ + 1, rhs.data(), n_);
  if (info != 0) throw NumericError("dpbtrs failed with info " + std::to_string(info));
}

void BandedGeneral::zero() { std::fill(ab.begin(), ab.end(), 0.0); }

void BandedGeneral::solve(std::vector<double>& rhs) {
  std::vector<lapack_int> ipiv(n);
  const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1, ab.data(),
                                        2 * kl + ku + 1, ipiv.data(), rhs.data(), n);
  if (info != 0)
    throw NumericError("dgbsv failed with info " + std::to_string(info));
}

}  // namespace defectlab
