#pragma once

#include <memory>
#include <vector>

#include "defectlab/mesh.hpp"
#include "defectlab/model.hpp"
#include "defectlab/refined_profile.hpp"

namespace defectlab {

struct Profile {
  RadialMesh mesh;
  std::vector<double> u, v;    // P1 nodal values from the finite-element solve
  std::vector<double> du, dv;  // nodal derivative estimates
  ModelParams params;
  BulkConstants constants;
  double u_boundary = 0.0;  // Dirichlet data imposed at r_eff
  double v_boundary = 0.0;
  double residual_norm = 0.0;  // scaled weak residual at convergence
  double energy = 0.0;         // renormalized energy of the converged iterate
  int newton_iterations = 0;
  bool used_flow_fallback = false;
  std::shared_ptr<const RefinedProfile> refined;  // null when polish is disabled

  int n_nodes() const { return static_cast<int>(u.size()); }

  // Pointwise evaluation; routed through the refined representation when present,
  // otherwise P1 interpolation of the nodal arrays.
  double eval_u(double r) const;
  double eval_v(double r) const;
  double eval_du(double r) const;
  double eval_dv(double r) const;
  double eval_d2u(double r) const;
  double eval_d2v(double r) const;
};

// Throws std::invalid_argument unless the profile carries converged nodal data
// consistent with its mesh.
void require_converged(const Profile& profile);

}  // namespace defectlab
