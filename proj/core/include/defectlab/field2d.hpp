#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "defectlab/profile.hpp"

namespace defectlab {

// Small dense 3x3 matrix used for the tensor-valued cross checks.
struct Mat3 {
  double a[3][3]{};

  double trace() const { return a[0][0] + a[1][1] + a[2][2]; }

  // Frobenius inner product.
  double dot(const Mat3& o) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += a[i][j] * o.a[i][j];
    return s;
  }

  Mat3 mul(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) s += a[i][l] * o.a[l][j];
        r.a[i][j] = s;
      }
    return r;
  }

  Mat3& add_scaled(const Mat3& o, double c) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a[i][j] += c * o.a[i][j];
    return *this;
  }
};

// Tensor solution sampled on a polar grid: the radii of the originating mesh
// times n_phi uniform angles. A radial solution carries only the E0 and E1
// moving-basis components, stored as per-radius arrays v and u.
struct QTensorField {
  std::vector<double> radii;
  int n_phi = 0;
  int k = 1;
  std::vector<double> u;
  std::vector<double> v;

  double phi(int j) const;
  int n_r() const { return static_cast<int>(radii.size()); }

  // Symmetric traceless 3x3 matrix at grid point (radius i, angle j).
  Mat3 matrix(int i, int j) const;
};

QTensorField reconstruct_Q(const Profile& profile, int n_phi);

// Five-component perturbation on the same polar grid, components in the moving
// basis, each stored row-major as radius index * n_phi + angle index.
struct PerturbationField {
  std::vector<double> radii;
  int n_phi = 0;
  int band_limit = 0;
  std::array<std::vector<double>, 5> w;

  static PerturbationField zeros(const std::vector<double>& radii, int n_phi, int band_limit);

  double& at(int comp, int i, int j) { return w[comp][static_cast<std::size_t>(i) * n_phi + j]; }
  double at(int comp, int i, int j) const {
    return w[comp][static_cast<std::size_t>(i) * n_phi + j];
  }
};

// Smooth random perturbation with azimuthal content up to band_limit, vanishing
// at the two innermost and two outermost radii.
PerturbationField random_perturbation(const std::vector<double>& radii, int n_phi,
                                      int band_limit, std::uint64_t seed);

// Max Frobenius norm over interior grid points of the equilibrium residual
// laplacian(Q) + a2 Q + b2 (Q^2 - |Q|^2 I/3) - c2 |Q|^2 Q, with a
// finite-difference polar Laplacian (second differences in r and phi).
double el_residual(const QTensorField& qfield, const ModelParams& params);

// Second variation of the energy at Q in direction P by direct quadrature:
// trapezoid in phi (exact for band-limited integrands), per-element 4-point
// Gauss in r. The perturbation must vanish on the outer ring and satisfy
// 2 * band_limit + |k| < n_phi so the phi rule is exact.
double L_direct(const QTensorField& qfield, const PerturbationField& pfield,
                const ModelParams& params);

struct ModeSumCheck {
  double direct = 0.0;
  double via_modes = 0.0;
};

// Evaluates the second variation two ways: direct quadrature and the azimuthal
// mode sum through the radial mode forms. Agreement certifies the sign
// bookkeeping of the decomposition.
ModeSumCheck mode_sum_check(const QTensorField& qfield, const PerturbationField& pfield,
                            const ModelParams& params);

}  // namespace defectlab
