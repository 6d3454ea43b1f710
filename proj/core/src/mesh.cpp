#include "defectlab/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace defectlab {

RadialMesh build_mesh(const ModelParams& params, const Domain& domain, int n_elements,
                      const Grading& grading, double r_eff_override) {
  params.validate();
  if (n_elements < 1) throw std::invalid_argument("build_mesh: n_elements must be >= 1");
  if (grading.kind == Grading::Kind::Geometric &&
      (!(grading.ratio >= 1.0) || !(grading.span_cap >= 1.0)))
    throw std::invalid_argument("build_mesh: geometric grading needs ratio >= 1 and span_cap >= 1");

  double r_eff = 0.0;
  if (domain.kind == Domain::Kind::Disk) {
    if (!(domain.radius > 0.0) || !std::isfinite(domain.radius))
      throw std::invalid_argument("build_mesh: disk radius must be finite and > 0");
    r_eff = domain.radius;
  } else {
    if (r_eff_override > 0.0) {
      r_eff = r_eff_override;
    } else {
      const BulkConstants bc = bulk_constants(params);
      const AsymptoticCoeffs ac = asymptotic_coeffs(params);
      r_eff = std::sqrt(std::abs(ac.p1) / (1e-3 * bc.s_plus));
    }
  }

  RadialMesh mesh;
  mesh.domain = domain;
  mesh.r_eff = r_eff;
  mesh.nodes.resize(n_elements + 1);
  mesh.nodes[0] = 0.0;

  const double ratio = grading.kind == Grading::Kind::Uniform ? 1.0 : grading.ratio;
  if (ratio == 1.0) {
    for (int i = 1; i <= n_elements; ++i)
      mesh.nodes[i] = r_eff * static_cast<double>(i) / n_elements;
  } else {
    // Element sizes h_1, h_1*ratio, ... until the size span reaches span_cap, then uniform.
    int graded = n_elements;
    const double max_span = std::log(grading.span_cap) / std::log(ratio);
    if (static_cast<double>(n_elements - 1) > max_span)
      graded = static_cast<int>(std::floor(max_span)) + 1;
    // Total length in units of h_1: geometric part + uniform tail at the largest size.
    const double geo_sum = (std::pow(ratio, graded) - 1.0) / (ratio - 1.0);
    const double tail = static_cast<double>(n_elements - graded) * std::pow(ratio, graded - 1);
    const double h1 = r_eff / (geo_sum + tail);
    double h = h1;
    for (int i = 1; i <= n_elements; ++i) {
      mesh.nodes[i] = mesh.nodes[i - 1] + h;
      if (i < graded) h *= ratio;
    }
    mesh.nodes[n_elements] = r_eff;  // absorb accumulated roundoff
  }
  return mesh;
}

}  // namespace defectlab
