// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "defectlab/eigsolve.hpp"
#include "defectlab/field2d.hpp"
#include "defectlab/mesh.hpp"
#include "defectlab/model.hpp"
#include "defectlab/modes.hpp"
#include "defectlab/radial_solver.hpp"
#include "defectlab/stability.hpp"

using namespace defectlab;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, x);
  return buf;
}

Profile solve_disk(const ModelParams& p, double radius, int n) {
  return solve_profile(p, build_mesh(p, Domain::disk(radius), n, Grading::geometric(1.5)));
}

Profile solve_plane(const ModelParams& p, double r_eff, int n) {
  return solve_profile(p, build_mesh(p, Domain::whole_plane(), n, Grading::geometric(1.5), r_eff));
}

std::vector<double> compact_random(const RadialMesh& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> s(mesh.nodes.size(), 0.0);
  for (std::size_t i = 2; i + 2 < mesh.nodes.size(); ++i)
    s[i] = unif(rng) * std::exp(-0.15 * mesh.nodes[i]);
  return s;
}

// 1. In the critical regime the out-of-plane component is an exact constant.
Outcome criterion1() {
  const ModelParams p{1.0, std::sqrt(3.0), 1.0, 1};
  const BulkConstants bc = bulk_constants(p);
  const Profile prof = solve_disk(p, 20.0, 2000);
  double dev = 0.0;
  for (double vi : prof.v) dev = std::max(dev, std::abs(vi - bc.v_star));
  return {dev <= 1e-8 * bc.s_plus, "max |v - v_star| = " + fmt("%.2e", dev / bc.s_plus) + " s_plus"};
}

// 2. Nodal monotonicity in all three regimes: u rises; v rises, stays flat, or
//    falls according to the regime.
Outcome criterion2() {
  const double slack_scale = 1e-10;
  std::string detail;
  bool ok = true;
  for (double b2 : {1.0, std::sqrt(3.0), 2.6}) {
    const ModelParams p{1.0, b2, 1.0, 1};
    const BulkConstants bc = bulk_constants(p);
    const Profile prof = solve_disk(p, 20.0, 2000);
    const double slack = slack_scale * bc.s_plus;
    double worst = 0.0;
    const int nn = prof.n_nodes();
    for (int i = 0; i + 1 < nn; ++i) {
      const double du = prof.u[i + 1] - prof.u[i];
      worst = std::max(worst, -du);
      const double dv = prof.v[i + 1] - prof.v[i];
      if (bc.regime == Regime::SubCritical) worst = std::max(worst, -dv);
      if (bc.regime == Regime::Critical) worst = std::max(worst, std::abs(dv));
      if (bc.regime == Regime::SuperCritical) worst = std::max(worst, dv);
    }
    ok = ok && worst <= slack;
    detail += std::string(regime_name(bc.regime)) + " " + fmt("%.1e", worst / bc.s_plus) + "  ";
  }
  return {ok, "worst increment violations (s_plus units): " + detail};
}

// 3. Whole-plane far-field coefficients within 5 percent, with the q1 sign flip.
Outcome criterion3() {
  bool ok = true;
  std::string detail;
  double q_sub = 0.0, q_super = 0.0;
  for (double b2 : {1.0, 2.8}) {
    const ModelParams p{1.0, b2, 1.0, 1};
    const Profile prof = solve_plane(p, 60.0, 2000);
    const DiagnosticsReport d = diagnose(prof);
    ok = ok && d.asymptotics_checked && d.p1_rel_err <= 0.05 && d.q1_rel_err <= 0.05;
    (b2 < 2.0 ? q_sub : q_super) = d.q1_hat;
    detail += fmt("p1 %.1f%%", 100.0 * d.p1_rel_err) + fmt(" q1 %.1f%%  ", 100.0 * d.q1_rel_err);
  }
  ok = ok && q_sub < 0.0 && q_super > 0.0;
  return {ok, detail + "q1_hat signs " + fmt("%+.0e", q_sub) + " / " + fmt("%+.0e", q_super)};
}

// 4. The radial second variation is positive when b^4 <= 3 a^2 c^2 and its
//    lowest eigenvalue is mesh-stable to 1e-6 relative.
Outcome criterion4() {
  bool ok = true;
  std::string detail;
  for (double b2 : {1.0, std::sqrt(3.0)}) {
    std::vector<double> lams;
    for (int n : {1000, 2000, 4000}) {
      const ModelParams p{1.0, b2, 1.0, 1};
      const Profile prof = solve_disk(p, 20.0, n);
      const SpectrumResult sp = lowest_spectrum(assemble_B(prof), 1);
      if (!sp.converged) return {false, "eigensolve did not converge"};
      lams.push_back(sp.eigenvalues[0]);
    }
    const double ref = lams.back();
    double spread = 0.0;
    for (double l : lams) spread = std::max(spread, std::abs(l - ref));
    ok = ok && ref > 0.0 && spread <= 1e-6 * std::abs(ref);
    detail += fmt("lambda %.4f", ref) + fmt(" spread %.1e  ", spread / std::abs(ref));
  }
  return {ok, detail};
}

// 5. Hardy-type identities at 1e-8 relative over 100 random draws each.
Outcome criterion5() {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 1000);
  std::mt19937_64 rng(2024);
  double worst_b = 0.0, worst_split = 0.0, worst_p0 = 0.0;

  for (int draw = 0; draw < 100; ++draw) {
    const std::vector<double> xi = compact_random(prof.mesh, rng);
    const std::vector<double> eta = compact_random(prof.mesh, rng);
    const auto [direct, rewritten] = hardy_certificate_B(prof, xi, eta);
    worst_b = std::max(worst_b, std::abs(direct - rewritten) / (1.0 + std::abs(direct)));
  }
  for (int m : {1, 2, 3}) {
    for (int draw = 0; draw < 100; ++draw) {
      HardyFactors f;
      f.eta = compact_random(prof.mesh, rng);
      f.xi = compact_random(prof.mesh, rng);
      f.zeta = compact_random(prof.mesh, rng);
      const double lhs = pm_value_factors(prof, m, f);
      const HardySplit split = hardy_split_Jm_Im(prof, m, f);
      const double d1 = std::abs(lhs - (split.j_m + split.i_m)) / (1.0 + std::abs(lhs));
      const double d2 = std::abs(split.i_m - split.sos_i_m) / (1.0 + std::abs(split.i_m));
      worst_split = std::max(worst_split, std::max(d1, d2));
    }
  }
  for (int draw = 0; draw < 100; ++draw) {
    const std::vector<double> w0 = compact_random(prof.mesh, rng);
    const std::vector<double> w1 = compact_random(prof.mesh, rng);
    const std::vector<double> w2 = compact_random(prof.mesh, rng);
    const double whole = pm_value(prof, 0, w0, w1, w2);
    const auto [radial_part, w2_part] = split_P0(prof, w0, w1, w2);
    worst_p0 = std::max(worst_p0,
                        std::abs(whole - (radial_part + w2_part)) / (1.0 + std::abs(whole)));
  }
  const bool ok = worst_b <= 1e-8 && worst_split <= 1e-8 && worst_p0 <= 1e-8;
  return {ok, "certificate " + fmt("%.1e", worst_b) + ", J+I splits " + fmt("%.1e", worst_split) +
                  ", P0 split " + fmt("%.1e", worst_p0)};
}

// 6. Unit winding is spectrally nonnegative across regimes and windings +-1:
//    every in-plane mode form down to -1e-8 scale, every out-of-plane pair
//    strictly positive.
Outcome criterion6() {
  bool ok = true;
  double worst_v1 = 1e300, worst_v2 = 1e300;
  for (double b2 : {1.0, std::sqrt(3.0), 2.4}) {
    for (int k : {1, -1}) {
      const ModelParams p{1.0, b2, 1.0, k};
      const BulkConstants bc = bulk_constants(p);
      const double scale = p.a2 + p.b2 * bc.s_plus + p.c2 * bc.s_plus * bc.s_plus;
      const Profile prof = solve_disk(p, 20.0, 800);
      for (int m = 0; m <= 8; ++m) {
        const SpectrumResult sp = lowest_spectrum(assemble_Pm(prof, m), 1);
        if (!sp.converged) return {false, "mode eigensolve did not converge"};
        ok = ok && sp.eigenvalues[0] >= -1e-8 * scale;
        worst_v1 = std::min(worst_v1, sp.eigenvalues[0] / scale);
      }
      for (int n = -2; n <= 3; ++n) {
        const SpectrumResult sp = lowest_spectrum(assemble_V2_pair(prof, n), 1);
        if (!sp.converged) return {false, "pair eigensolve did not converge"};
        ok = ok && sp.eigenvalues[0] > 0.0;
        worst_v2 = std::min(worst_v2, sp.eigenvalues[0] / scale);
      }
    }
  }
  return {ok, "min lambda/scale: in-plane " + fmt("%.2e", worst_v1) + ", out-of-plane " +
                  fmt("%.2e", worst_v2)};
}

// 7. The translation near-kernel Rayleigh quotient decays like R^-2.
Outcome criterion7() {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  std::vector<double> lr, lv;
  for (double r_eff : {30.0, 60.0, 120.0}) {
    const Profile prof = solve_plane(p, r_eff, 1500);
    const double val = kernel_check_m1(prof);
    if (!(val > 0.0)) return {false, "kernel quotient not positive at R_eff " + fmt("%g", r_eff)};
    lr.push_back(std::log(r_eff));
    lv.push_back(std::log(val));
  }
  // Least-squares slope through the three points.
  const double n = 3.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < 3; ++i) {
    sx += lr[i];
    sy += lv[i];
    sxx += lr[i] * lr[i];
    sxy += lr[i] * lv[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool ok = std::abs(slope + 2.0) <= 0.3;
  return {ok, "log-log slope " + fmt("%.3f", slope)};
}

// 8. Double winding is linearly unstable on a large domain; unit winding is not.
Outcome criterion8() {
  const ModelParams bad{1.0, 1.0, 1.0, 2};
  const InstabilityScan scan2 =
      instability_search(bad, build_mesh(bad, Domain::whole_plane(), 1200,
                                         Grading::geometric(1.5), 60.0));
  const ModelParams good{1.0, 1.0, 1.0, 1};
  const InstabilityScan scan1 =
      instability_search(good, build_mesh(good, Domain::whole_plane(), 1200,
                                          Grading::geometric(1.5), 60.0));
  const bool ok = scan2.found_negative && scan2.lambda_min < 0.0 && !scan1.found_negative;
  return {ok, "k=2 lambda_min " + fmt("%.3e", scan2.lambda_min) + " (" + scan2.worst_label +
                  "), k=1 lambda_min " + fmt("%.3e", scan1.lambda_min)};
}

// 9. Direct 2-D quadrature of the second variation equals the azimuthal mode
//    sum on random band-limited perturbations.
Outcome criterion9() {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 600);
  const QTensorField q = reconstruct_Q(prof, 128);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const PerturbationField pf = random_perturbation(q.radii, 128, 12, 5000 + draw);
    const ModeSumCheck msc = mode_sum_check(q, pf, p);
    worst = std::max(worst, std::abs(msc.direct - msc.via_modes) / (1.0 + std::abs(msc.direct)));
  }
  return {worst <= 1e-8, "worst relative mode-sum discrepancy " + fmt("%.2e", worst)};
}

// 10. Eight randomized starts land on one profile.
Outcome criterion10() {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const BulkConstants bc = bulk_constants(p);
  const RadialMesh mesh = build_mesh(p, Domain::disk(15.0), 500, Grading::geometric(1.5));
  const UniquenessProbe probe = uniqueness_probe(p, mesh, 8, 12345);
  const bool ok = probe.n_converged == 8 && probe.distinct_count == 1 &&
                  probe.max_pairwise_deviation <= 1e-8 * bc.s_plus;
  return {ok, std::to_string(probe.distinct_count) + " cluster(s), spread " +
                  fmt("%.2e", probe.max_pairwise_deviation / bc.s_plus) + " s_plus, " +
                  std::to_string(probe.n_converged) + "/8 converged"};
}

// 11. Bulk minimum at a2 = 0, b2 = c2 = 1.
Outcome criterion11() {
  const ModelParams p{0.0, 1.0, 1.0, 1};
  const BulkMinima bm = minima_of_f(p);
  const double target = -0.0023148;
  const bool ok = std::abs(bm.value - target) <= 1e-6;
  return {ok, "min f = " + fmt("%.10f", bm.value) + " (target " + fmt("%.7f", target) + ")"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "critical regime locks v to its far-field constant", 5.0, criterion1},
      {2, "profiles are monotone in all three regimes", 15.0, criterion2},
      {3, "whole-plane tails recover the far-field coefficients", 20.0, criterion3},
      {4, "radial second variation positive and mesh-stable", 30.0, criterion4},
      {5, "hardy identities hold to 1e-8 over random draws", 60.0, criterion5},
      {6, "unit-winding mode spectra are nonnegative in every sector", 60.0, criterion6},
      {7, "translation kernel quotient decays like R^-2", 60.0, criterion7},
      {8, "double winding unstable, unit winding clear", 60.0, criterion8},
      {9, "2-D quadrature equals the azimuthal mode sum", 30.0, criterion9},
      {10, "multistart solves collapse to a single profile", 60.0, criterion10},
      {11, "bulk minimum value at the pure-cubic point", 1.0, criterion11},
  };

  int failures = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.fn();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double elapsed = seconds_since(t0);
    const bool in_budget = elapsed <= e.budget_s;
    const bool pass = out.ok && in_budget;
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d: %s  (%s; %.1fs of %.0fs budget%s)\n",
                pass ? "PASS" : "FAIL", e.id, e.name, out.detail.c_str(), elapsed, e.budget_s,
                in_budget ? "" : " EXCEEDED");
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
