#pragma once

#include <utility>
#include <vector>

#include "defectlab/profile.hpp"

namespace defectlab {

struct SolveOptions {
  double tol = 1e-10;            // scaled weak-residual target
  int max_newton = 50;           // Newton budget per continuation stage
  bool flow_fallback = true;     // semi-implicit gradient-flow rescue when Newton stalls
  int continuation_steps = 10;   // b2 ramp stages used in the supercritical regime
  bool polish = true;            // fit the piecewise-Chebyshev representation after converging
  RefineOptions refine{};
};

struct MonotonicityReport {
  bool u_ok = false;           // u nodal increments positive
  bool v_ok = false;           // v increments match the regime (up / constant / down)
  double max_violation = 0.0;  // worst offending nodal increment, in units of the profile
};

struct DiagnosticsReport {
  Regime regime = Regime::SubCritical;
  bool box_bounds_ok = false;
  bool sign_ok = false;
  bool sqrt3_bound_ok = false;      // sqrt(3) v + u < 0 at interior nodes
  bool core_resolution_ok = false;  // at least 8 nodes inside the core length
  MonotonicityReport monotonicity;
  double critical_v_deviation = 0.0;  // max |v - v_star| (Critical regime only)
  double max_residual = 0.0;          // sup of 3-point-stencil strong residual, scaled
  bool asymptotics_checked = false;   // WholePlane runs only
  double p1_hat = 0.0, q1_hat = 0.0;
  double p1_rel_err = 0.0, q1_rel_err = 0.0;
};

// Core-scale vortex ansatz for u, constant v_star for v, rescaled to match the
// Dirichlet data of the given mesh's domain.
std::pair<std::vector<double>, std::vector<double>> initial_guess(const ModelParams& params,
                                                                  const RadialMesh& mesh);

Profile solve_profile(const ModelParams& params, const RadialMesh& mesh,
                      const SolveOptions& opts = {});

// Same solve from explicit nodal starting data (the b2 ramp is skipped); used by
// the multi-start uniqueness probe.
Profile solve_profile(const ModelParams& params, const RadialMesh& mesh,
                      const std::vector<double>& u_start, const std::vector<double>& v_start,
                      const SolveOptions& opts = {});

// Renormalized energy of nodal data on the mesh (bulk minimum subtracted so the
// value stays finite as r_eff grows).
double profile_energy(const ModelParams& params, const RadialMesh& mesh,
                      const std::vector<double>& u, const std::vector<double>& v);

DiagnosticsReport diagnose(const Profile& profile);

}  // namespace defectlab
