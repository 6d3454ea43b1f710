#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "defectlab/eigsolve.hpp"
#include "defectlab/stability.hpp"

namespace defectlab {

// Factor samples for the Hardy splits, given at the mesh nodes; each vector
// must vanish at the first and last two nodes.
struct HardyFactors {
  std::vector<double> eta;   // w0 = v' eta
  std::vector<double> xi;    // w1 = u' xi
  std::vector<double> zeta;  // w2 = u zeta
};

// Azimuthal-mode form over the radial triple (w0, w1, w2); w0 is free at the
// origin only for m = 0. For m == |k| the in-plane components are carried in
// rotated coordinates s = (w1+w2)/sqrt2 (free at the origin) and
// d = (w1-w2)/sqrt2 (constrained), stored in that order after w0.
QuadForm assemble_Pm(const Profile& profile, int m);

// Direct quadrature of the mode form on plain nodal triples sampled at the
// mesh nodes (the profile is read through its polished representation).
double pm_value(const Profile& profile, int m, const std::vector<double>& w0,
                const std::vector<double>& w1, const std::vector<double>& w2);

// Mode-form value on purely piecewise-linear data: background pair (u, v) and
// test triple, all sampled at `nodes`; 4-point Gauss per element with a
// pairwise-stable sum. Radial engine shared with the 2-D consistency check.
double pm_value_nodal(const std::vector<double>& nodes, const ModelParams& params, int m,
                      const std::vector<double>& u, const std::vector<double>& v,
                      const std::vector<double>& w0, const std::vector<double>& w1,
                      const std::vector<double>& w2);

// m = 0 decomposition: the (w1, w0) pair feeds the radial second variation and
// the w2 channel collapses to a single weighted-derivative square.
std::pair<double, double> split_P0(const Profile& profile, const std::vector<double>& w0,
                                   const std::vector<double>& w1,
                                   const std::vector<double>& w2);

// Mode-form value on the weighted triple (v' eta, u' xi, u zeta) built from
// the factor samples; left-hand side of the split identity.
double pm_value_factors(const Profile& profile, int m, const HardyFactors& factors);

struct HardySplit {
  double j_m = 0.0;
  double i_m = 0.0;
  double sos_i_m = 0.0;  // sum-of-squares rewrite of i_m
};

// Evaluates the mode form on the weighted triple (v' eta, u' xi, u zeta) as the
// sum of its sign-definite parts; requires m >= 1, |k| = 1 and a non-Critical
// regime (eta is a quotient by v', which vanishes identically at Critical).
HardySplit hardy_split_Jm_Im(const Profile& profile, int m, const HardyFactors& factors);

// Rayleigh quotient of the translation direction (v', u', u/r) against the
// m = 1 mode form; the direction is tapered to zero near r_eff so it fits the
// constrained space. Requires |k| = 1.
double kernel_check_m1(const Profile& profile);

// Out-of-plane paired form over the unordered index pair (n, k-n). The
// self-paired index 2n = k is accepted: on two independent components its
// spectrum is the union of the attractive and repulsive diagonal branches.
QuadForm assemble_V2_pair(const Profile& profile, int n);

// Paired-form value on nodal samples (lhs) against the pointwise lower bound
// integral (rhs); requires n >= 2 and |k| = 1.
std::pair<double, double> v2_lower_bound_check(const Profile& profile, int n,
                                               const std::vector<double>& xi_n,
                                               const std::vector<double>& xi_kn);

struct ModeScanEntry {
  std::string sector;  // "V1" or "V2"
  int m_or_n = 0;
  int k = 0;
  double lambda_min = 0.0;
  bool extension = false;  // form algebra extended beyond |k| = 1
  std::string label;
};

struct InstabilityScan {
  std::vector<ModeScanEntry> entries;
  double lambda_min = 0.0;
  std::string worst_label;
  bool found_negative = false;  // some entry fell below -1e-8 * scale
  double scale = 0.0;
  SpectrumResult worst;
};

// Solves the profile on the given mesh, scans the V1 forms for m in 0..|k|+2
// and the V2 pairs drawn from n in -2..|k|+2, and reports the most negative
// eigenpair. An empty-handed scan is reported through found_negative, not an
// error: truncation can mask instability on small disks.
InstabilityScan instability_search(const ModelParams& params, const RadialMesh& mesh);

}  // namespace defectlab
