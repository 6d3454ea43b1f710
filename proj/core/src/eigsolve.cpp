#include "defectlab/eigsolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "defectlab/banded.hpp"
#include "defectlab/errors.hpp"

namespace defectlab {

namespace {

Eigen::MatrixXd to_dense(const BandedSym& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n, a.n);
  for (int j = 0; j < a.n; ++j)
    for (int i = std::max(0, j - a.ku); i <= j; ++i) {
      const double v = a.get(i, j);
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

double pair_residual(const BandedSym& a, const BandedSym& m, const double* x, int n,
                     double lambda) {
  std::vector<double> ax(n), mx(n);
  a.matvec(x, ax.data());
  m.matvec(x, mx.data());
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ax[i] - lambda * mx[i];
    num += r * r;
    den += x[i] * x[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

SpectrumResult dense_spectrum(const QuadForm& form, int count) {
  const BandedSym& a = form.stiffness();
  const BandedSym& m = form.mass();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(a), to_dense(m));
  if (es.info() != Eigen::Success)
    throw NumericError("dense eigensolver failed on form " + form.label());
  SpectrumResult out;
  out.label = form.label();
  out.converged = true;
  out.iterations = 0;
  const int n = a.n;
  for (int i = 0; i < count; ++i) {
    out.eigenvalues.push_back(es.eigenvalues()(i));
    std::vector<double> x(n);
    Eigen::VectorXd::Map(x.data(), n) = es.eigenvectors().col(i);
    out.residuals.push_back(pair_residual(a, m, x.data(), n, es.eigenvalues()(i)));
    out.vectors.push_back(std::move(x));
  }
  return out;
}

// Makes the columns of y M-orthonormal (two modified Gram-Schmidt passes);
// degenerate columns are replaced by fresh random vectors.
void m_orthonormalize(const BandedSym& m, std::vector<std::vector<double>>& y,
                      std::mt19937_64& rng) {
  const int n = m.n;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> my(n);
  for (std::size_t j = 0; j < y.size(); ++j) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < j; ++i) {
          m.matvec(y[i].data(), my.data());
          double dot = 0.0;
          for (int t = 0; t < n; ++t) dot += my[t] * y[j][t];
          for (int t = 0; t < n; ++t) y[j][t] -= dot * y[i][t];
        }
      }
      m.matvec(y[j].data(), my.data());
      double norm2 = 0.0;
      for (int t = 0; t < n; ++t) norm2 += my[t] * y[j][t];
      if (norm2 > 1e-28) {
        const double s = 1.0 / std::sqrt(norm2);
        for (int t = 0; t < n; ++t) y[j][t] *= s;
        break;
      }
      for (int t = 0; t < n; ++t) y[j][t] = gauss(rng);
    }
  }
}

}  // namespace

SpectrumResult lowest_spectrum(const QuadForm& form, int count, const SpectrumOptions& opts) {
  const BandedSym& a = form.stiffness();
  const BandedSym& m = form.mass();
  const int n = a.n;
  if (count < 1 || count > n)
    throw std::invalid_argument("lowest_spectrum: count out of range for form " + form.label());
  if (n <= opts.dense_fallback_max) return dense_spectrum(form, count);

  const double a_norm = a.inf_norm();
  const double m_norm = std::max(m.inf_norm(), 1e-300);
  const double scale = std::max(a_norm / m_norm, 1.0);
  const double target =
      std::min(std::max(opts.tol, 5e-13 * a_norm), 5e-9);

  double sigma = opts.shift.value_or(-1e-8 * scale);
  BandCholesky chol;
  {
    double step = std::max(1e-6 * scale, 0.5 * std::abs(sigma));
    int attempt = 0;
    while (!BandCholesky::try_factor(band_add(a, -sigma, m), chol)) {
      if (++attempt > 60)
        throw FactorizationError("no factorable shift found for form " + form.label());
      sigma -= step;
      step *= 4.0;
    }
  }

  const int block = std::min(count + std::max(opts.extra_block, 1), n);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> x(block, std::vector<double>(n));
  for (auto& col : x)
    for (double& v : col) v = gauss(rng);
  m_orthonormalize(m, x, rng);

  std::vector<std::vector<double>> y(block, std::vector<double>(n));
  Eigen::MatrixXd ar(block, block);
  std::vector<double> tmp(n), ritz(block, 0.0);

  SpectrumResult out;
  out.label = form.label();
  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (int j = 0; j < block; ++j) {
      m.matvec(x[j].data(), y[j].data());
      chol.solve_in_place(y[j]);
    }
    m_orthonormalize(m, y, rng);

    for (int i = 0; i < block; ++i) {
      a.matvec(y[i].data(), tmp.data());
      for (int j = i; j < block; ++j) {
        double dot = 0.0;
        for (int t = 0; t < n; ++t) dot += tmp[t] * y[j][t];
        ar(i, j) = dot;
        ar(j, i) = dot;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(ar);
    if (small.info() != Eigen::Success)
      throw NumericError("Rayleigh-Ritz projection failed on form " + form.label());
    for (int j = 0; j < block; ++j) {
      ritz[j] = small.eigenvalues()(j);
      std::fill(x[j].begin(), x[j].end(), 0.0);
      for (int i = 0; i < block; ++i) {
        const double c = small.eigenvectors()(i, j);
        for (int t = 0; t < n; ++t) x[j][t] += c * y[i][t];
      }
    }

    bool done = true;
    out.residuals.assign(count, 0.0);
    for (int j = 0; j < count; ++j) {
      out.residuals[j] = pair_residual(a, m, x[j].data(), n, ritz[j]);
      if (out.residuals[j] > target) done = false;
    }
    out.iterations = it;
    if (done) {
      out.converged = true;
      out.eigenvalues.assign(ritz.begin(), ritz.begin() + count);
      out.vectors.assign(x.begin(), x.begin() + count);
      return out;
    }

    if (it % 25 == 0) {
      const double spread = std::max(ritz[block - 1] - ritz[0], 1e-6 * scale);
      sigma = ritz[0] - 0.05 * spread;
      double step = std::max(1e-6 * scale, 0.5 * std::abs(sigma));
      int attempt = 0;
      while (!BandCholesky::try_factor(band_add(a, -sigma, m), chol)) {
        if (++attempt > 60)
          throw FactorizationError("no factorable shift found for form " + form.label());
        sigma -= step;
        step *= 4.0;
      }
    }
  }
  throw NonConvergenceError("eigensolve budget exhausted on form " + form.label() +
                            " (worst residual " +
                            std::to_string(*std::max_element(out.residuals.begin(),
                                                             out.residuals.end())) +
                            ")");
}

}  // namespace defectlab
