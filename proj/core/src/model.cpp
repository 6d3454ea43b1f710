#include "defectlab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace defectlab {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt6 = std::sqrt(6.0);

// Relative width of the critical band in b^4 - 3 a2 c2.
constexpr double kRegimeTol = 1e-10;

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::SubCritical: return "SubCritical";
    case Regime::Critical: return "Critical";
    case Regime::SuperCritical: return "SuperCritical";
  }
  return "?";
}

void ModelParams::validate() const {
  if (!std::isfinite(a2) || a2 < 0.0)
    throw std::invalid_argument("ModelParams: a2 must be finite and >= 0");
  if (!std::isfinite(b2) || b2 <= 0.0)
    throw std::invalid_argument("ModelParams: b2 must be finite and > 0");
  if (!std::isfinite(c2) || c2 <= 0.0)
    throw std::invalid_argument("ModelParams: c2 must be finite and > 0");
  if (k == 0) throw std::invalid_argument("ModelParams: k must be a nonzero integer");
}

BulkConstants bulk_constants(const ModelParams& p) {
  p.validate();
  BulkConstants out;
  const double disc = std::sqrt(p.b2 * p.b2 + 24.0 * p.a2 * p.c2);
  out.s_plus = (p.b2 + disc) / (4.0 * p.c2);
  out.s_minus = (p.b2 - disc) / (4.0 * p.c2);
  out.u_star = out.s_plus / kSqrt2;
  out.v_star = -out.s_plus / kSqrt6;
  const double quartic = p.b2 * p.b2;
  const double cubic = 3.0 * p.a2 * p.c2;
  const double gap = quartic - cubic;
  if (std::abs(gap) <= kRegimeTol * std::max(quartic, cubic))
    out.regime = Regime::Critical;
  else
    out.regime = gap < 0.0 ? Regime::SubCritical : Regime::SuperCritical;
  return out;
}

double bulk_f(const ModelParams& p, double u, double v) {
  const double s = u * u + v * v;
  return -0.5 * p.a2 * s + 0.25 * p.c2 * s * s - p.b2 / (3.0 * kSqrt6) * v * (v * v - 3.0 * u * u);
}

void bulk_grad(const ModelParams& p, double u, double v, double& h, double& g) {
  const double s = u * u + v * v;
  h = u * (-p.a2 + 2.0 / kSqrt6 * p.b2 * v + p.c2 * s);
  g = v * (-p.a2 - 1.0 / kSqrt6 * p.b2 * v + p.c2 * s) + p.b2 / kSqrt6 * u * u;
}

BulkHessian bulk_hessian(const ModelParams& p, double u, double v) {
  BulkHessian out;
  out.fuu = -p.a2 + 2.0 / kSqrt6 * p.b2 * v + p.c2 * (3.0 * u * u + v * v);
  out.fuv = 2.0 * u * (p.b2 / kSqrt6 + p.c2 * v);
  out.fvv = -p.a2 - 2.0 / kSqrt6 * p.b2 * v + p.c2 * (u * u + 3.0 * v * v);
  return out;
}

AsymptoticCoeffs asymptotic_coeffs(const ModelParams& p) {
  const BulkConstants bc = bulk_constants(p);
  const double k2 = static_cast<double>(p.k) * static_cast<double>(p.k);
  const double spread = -p.b2 + 4.0 * p.c2 * bc.s_plus;  // equals sqrt(b2^2 + 24 a2 c2) > 0
  AsymptoticCoeffs out;
  out.p1 = -(kSqrt2 * k2 / 2.0) * (2.0 * p.b2 + p.c2 * bc.s_plus) / (p.b2 * spread);
  if (bc.regime == Regime::Critical) {
    out.q1 = 0.0;
  } else {
    out.q1 = -(kSqrt6 * k2 / 2.0) * (-p.b2 + p.c2 * bc.s_plus) / (p.b2 * spread);
  }
  return out;
}

BulkMinima minima_of_f(const ModelParams& p) {
  const BulkConstants bc = bulk_constants(p);
  const double s = bc.s_plus;
  BulkMinima out;
  out.locations[0] = {0.0, 2.0 * s / kSqrt6};
  out.locations[1] = {s / kSqrt2, -s / kSqrt6};
  out.locations[2] = {-s / kSqrt2, -s / kSqrt6};

  double value = 0.0;
  for (int loc = 0; loc < 3; ++loc) {
    double u = out.locations[loc][0];
    double v = out.locations[loc][1];
    for (int it = 0; it < 12; ++it) {
      double h, g;
      bulk_grad(p, u, v, h, g);
      const BulkHessian hess = bulk_hessian(p, u, v);
      const double det = hess.fuu * hess.fvv - hess.fuv * hess.fuv;
      if (det == 0.0) break;
      const double du = (hess.fvv * h - hess.fuv * g) / det;
      const double dv = (hess.fuu * g - hess.fuv * h) / det;
      u -= du;
      v -= dv;
      if (std::abs(du) + std::abs(dv) < 1e-15 * (1.0 + s)) break;
    }
    out.locations[loc] = {u, v};
    const double fv = bulk_f(p, u, v);
    if (loc == 0 || fv < value) value = fv;
    // The three minima agree analytically; keep the smallest to be safe against roundoff.
  }
  out.value = value;
  out.closed_form_value =
      -(p.a2 / 3.0) * s * s - (2.0 * p.b2 / 27.0) * s * s * s + (p.c2 / 6.0) * s * s * s * s;
  out.closed_form_discrepancy = out.value - out.closed_form_value;
  return out;
}

}  // namespace defectlab
