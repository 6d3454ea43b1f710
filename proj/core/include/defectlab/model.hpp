#pragma once

#include <array>

namespace defectlab {

// Sign of b^4 - 3 a^2 c^2, which controls the monotonicity pattern of the
// profile pair and the sign of the far-field coefficient q1.
enum class Regime { SubCritical, Critical, SuperCritical };

const char* regime_name(Regime r);

struct ModelParams {
  double a2 = 1.0;  // thermotropic coefficient (>= 0)
  double b2 = 1.0;  // cubic coupling (> 0)
  double c2 = 1.0;  // quartic coupling (> 0)
  int k = 1;        // winding number of the in-plane director pair, degree k/2

  void validate() const;  // throws std::invalid_argument
};

struct BulkConstants {
  double s_plus = 0.0;   // positive root of 2 c2 s^2 - b2 s - 3 a2
  double s_minus = 0.0;  // negative root
  double u_star = 0.0;   // far-field u value, s_plus/sqrt(2)
  double v_star = 0.0;   // far-field v value, -s_plus/sqrt(6)
  Regime regime = Regime::SubCritical;
};

// Second partials of the bulk potential f(u,v).
struct BulkHessian {
  double fuu = 0.0;
  double fuv = 0.0;
  double fvv = 0.0;
};

// Leading far-field expansion u = u_star + p1/r^2, v = v_star + q1/r^2.
struct AsymptoticCoeffs {
  double p1 = 0.0;  // always negative
  double q1 = 0.0;  // negative subcritical, zero critical, positive supercritical
};

struct BulkMinima {
  // Global minimizers of f: (0, 2 s_plus/sqrt 6) and (+-s_plus/sqrt 2, -s_plus/sqrt 6).
  std::array<std::array<double, 2>, 3> locations{};
  double value = 0.0;  // f at the (Newton-polished) minimizers
  // Reference closed form -(a2/3)s+^2 - (2 b2/27)s+^3 + (c2/6)s+^4, kept for comparison;
  // direct evaluation of f at the minimizers gives quartic coefficient c2 s+^4/9 instead.
  double closed_form_value = 0.0;
  double closed_form_discrepancy = 0.0;  // value - closed_form_value
};

BulkConstants bulk_constants(const ModelParams& p);

double bulk_f(const ModelParams& p, double u, double v);

// h = df/du, g = df/dv.
void bulk_grad(const ModelParams& p, double u, double v, double& h, double& g);

BulkHessian bulk_hessian(const ModelParams& p, double u, double v);

AsymptoticCoeffs asymptotic_coeffs(const ModelParams& p);

BulkMinima minima_of_f(const ModelParams& p);

}  // namespace defectlab
