#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "defectlab/quadform.hpp"
#include "defectlab/radial_solver.hpp"

namespace defectlab {

// Potential coefficients of the second variation at radius r: the (u,v)-block
// Hessian of the bulk density and the coefficient seen by the in-plane
// director-rotation channel. In the Critical regime the closed forms at
// v = v_star are used, making the cross entry exactly zero.
struct LinearizedPotential {
  double uu = 0.0;
  double vv = 0.0;
  double uv = 0.0;
  double rotation = 0.0;
};

LinearizedPotential linearized_potential(const Profile& profile, double r);

// Second variation of the radial energy over pairs (xi, eta); xi constrained at
// r = 0, both constrained at r_eff.
QuadForm assemble_B(const Profile& profile, MassKind mass_kind = MassKind::L2);

// Direct quadrature of the second-variation integrand on piecewise-linear test
// samples given at the mesh nodes.
double b_value(const Profile& profile, const std::vector<double>& xi,
               const std::vector<double>& eta);

// Evaluates B on the weighted pair (u xi_t, v eta_t) two ways: expanded as the
// form integrand (direct) and in divergence-free form after integrating the
// cross terms by parts (rewritten). Samples live at mesh nodes and must vanish
// at the first and last two nodes.
std::pair<double, double> hardy_certificate_B(const Profile& profile,
                                              const std::vector<double>& xi_t,
                                              const std::vector<double>& eta_t);

struct UniquenessProbe {
  int distinct_count = 0;
  double max_pairwise_deviation = 0.0;  // sup-norm spread inside the principal cluster
  int n_converged = 0;
  int n_failed = 0;
  std::vector<double> energies;
};

// Multi-start probe: solves from n_starts randomized cone-respecting initial
// guesses and clusters the converged profiles by sup-norm distance.
UniquenessProbe uniqueness_probe(const ModelParams& params, const RadialMesh& mesh,
                                 int n_starts, std::uint64_t seed);

}  // namespace defectlab
