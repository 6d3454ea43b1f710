#include "defectlab/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "defectlab/fem.hpp"

namespace defectlab {

namespace {

// shape functions on the reference interval [0,1], points {0, 1/2, 1}
inline void shapes(double x, double* n, double* dn) {
  n[0] = (1.0 - x) * (1.0 - 2.0 * x);
  n[1] = 4.0 * x * (1.0 - x);
  n[2] = x * (2.0 * x - 1.0);
  dn[0] = 4.0 * x - 3.0;
  dn[1] = 4.0 - 8.0 * x;
  dn[2] = 4.0 * x - 1.0;
}

}  // namespace

QuadForm::QuadForm(const RadialMesh& mesh, const QuadFormSpec& spec, MassKind mass_kind)
    : mesh_(&mesh), label_(spec.label), components_(spec.components), mass_kind_(mass_kind) {
  const int nc = static_cast<int>(components_.size());
  if (nc == 0) throw std::invalid_argument("quad form needs at least one component");
  const int ne = mesh.n_elements();
  n_points_ = 2 * ne + 1;

  free_index_.assign(static_cast<std::size_t>(n_points_) * nc, -1);
  for (int p = 0; p < n_points_; ++p) {
    for (int c = 0; c < nc; ++c) {
      if (p == 0 && components_[c].fixed_at_origin) continue;
      if (p == n_points_ - 1) continue;
      free_index_[static_cast<std::size_t>(p) * nc + c] = n_free_++;
    }
  }

  const int ku = 3 * nc - 1;
  stiffness_ = BandedSym(n_free_, std::min(ku, std::max(n_free_ - 1, 0)));
  mass_ = BandedSym(n_free_, stiffness_.ku);

  const GaussRule& g = gauss_rule(4);
  std::vector<double> grad(nc), pot(static_cast<std::size_t>(nc) * nc);
  for (int e = 0; e < ne; ++e) {
    const double a = mesh.nodes[e], b = mesh.nodes[e + 1];
    const double h = b - a;
    const int pts[3] = {2 * e, 2 * e + 1, 2 * e + 2};
    for (int q = 0; q < 4; ++q) {
      const double x = 0.5 * (g.x[q] + 1.0);
      const double r = a + h * x;
      const double wq = 0.5 * h * g.w[q] * r;
      double n[3], dn[3];
      shapes(x, n, dn);
      for (double& d : dn) d /= h;
      spec.coefficients(r, grad.data(), pot.data());
      for (int i = 0; i < 3; ++i) {
        for (int ci = 0; ci < nc; ++ci) {
          const int row = free_index_[static_cast<std::size_t>(pts[i]) * nc + ci];
          if (row < 0) continue;
          for (int j = 0; j < 3; ++j) {
            for (int cj = 0; cj < nc; ++cj) {
              const int col = free_index_[static_cast<std::size_t>(pts[j]) * nc + cj];
              if (col < row) continue;
              double k = pot[static_cast<std::size_t>(ci) * nc + cj] * n[i] * n[j];
              if (ci == cj) k += grad[ci] * dn[i] * dn[j];
              stiffness_.add(row, col, wq * k);
              if (ci == cj) {
                double mw = 1.0;
                if (mass_kind_ == MassKind::HardyWeighted && components_[ci].fixed_at_origin)
                  mw += 1.0 / (r * r);
                mass_.add(row, col, wq * mw * n[i] * n[j]);
              }
            }
          }
        }
      }
    }
  }
}

double QuadForm::point_radius(int p) const {
  if (p % 2 == 0) return mesh_->nodes[p / 2];
  const int e = p / 2;
  return 0.5 * (mesh_->nodes[e] + mesh_->nodes[e + 1]);
}

int QuadForm::free_index(int point, int comp) const {
  return free_index_[static_cast<std::size_t>(point) * n_components() + comp];
}

std::vector<double> QuadForm::project(
    const std::vector<std::function<double(double)>>& fns) const {
  const int nc = n_components();
  if (static_cast<int>(fns.size()) != nc)
    throw std::invalid_argument("project: one function per component expected");
  std::vector<double> x(n_free_, 0.0);
  for (int p = 0; p < n_points_; ++p) {
    const double r = point_radius(p);
    for (int c = 0; c < nc; ++c) {
      const int idx = free_index(p, c);
      if (idx >= 0) x[idx] = fns[c](r);
    }
  }
  return x;
}

std::vector<std::vector<double>> QuadForm::expand(const std::vector<double>& x) const {
  const int nc = n_components();
  std::vector<std::vector<double>> out(nc, std::vector<double>(n_points_, 0.0));
  for (int p = 0; p < n_points_; ++p)
    for (int c = 0; c < nc; ++c) {
      const int idx = free_index(p, c);
      if (idx >= 0) out[c][p] = x[idx];
    }
  return out;
}

double QuadForm::rayleigh(const std::vector<double>& x) const {
  std::vector<double> kx(x.size()), mx(x.size());
  stiffness_.matvec(x.data(), kx.data());
  mass_.matvec(x.data(), mx.data());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += x[i] * kx[i];
    den += x[i] * mx[i];
  }
  return num / den;
}

double eval_point_values(const RadialMesh& mesh, const std::vector<double>& values,
                         double r) {
  const int e = find_cell(mesh.nodes, r);
  const double a = mesh.nodes[e], b = mesh.nodes[e + 1];
  const double x = (r - a) / (b - a);
  double n[3], dn[3];
  shapes(x, n, dn);
  return n[0] * values[2 * e] + n[1] * values[2 * e + 1] + n[2] * values[2 * e + 2];
}

}  // namespace defectlab
