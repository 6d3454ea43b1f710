#include "defectlab/profile.hpp"

#include <stdexcept>
#include <string>

#include "defectlab/fem.hpp"

namespace defectlab {

double Profile::eval_u(double r) const {
  return refined ? refined->u(r) : interp_p1(mesh.nodes, u, r);
}

double Profile::eval_v(double r) const {
  return refined ? refined->v(r) : interp_p1(mesh.nodes, v, r);
}

double Profile::eval_du(double r) const {
  return refined ? refined->du(r) : interp_p1(mesh.nodes, du, r);
}

double Profile::eval_dv(double r) const {
  return refined ? refined->dv(r) : interp_p1(mesh.nodes, dv, r);
}

double Profile::eval_d2u(double r) const {
  if (refined) return refined->d2u(r);
  const int e = find_cell(mesh.nodes, r);
  return (du[e + 1] - du[e]) / (mesh.nodes[e + 1] - mesh.nodes[e]);
}

double Profile::eval_d2v(double r) const {
  if (refined) return refined->d2v(r);
  const int e = find_cell(mesh.nodes, r);
  return (dv[e + 1] - dv[e]) / (mesh.nodes[e + 1] - mesh.nodes[e]);
}

void require_converged(const Profile& profile) {
  const std::size_t nn = profile.mesh.nodes.size();
  if (nn < 2 || profile.u.size() != nn || profile.v.size() != nn)
    throw std::invalid_argument("profile: nodal arrays inconsistent with the mesh");
  if (!(profile.residual_norm <= 1e-6))
    throw std::invalid_argument("profile: not converged (scaled residual " +
                                std::to_string(profile.residual_norm) + ")");
}

}  // namespace defectlab
