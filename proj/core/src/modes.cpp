#include "defectlab/modes.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "defectlab/errors.hpp"
#include "defectlab/fem.hpp"

namespace defectlab {

namespace {

using std::numbers::sqrt2;

void require_compact_support(const std::vector<double>& s, int nn, const char* name) {
  if (static_cast<int>(s.size()) != nn)
    throw std::invalid_argument(std::string(name) + ": size does not match the mesh nodes");
  if (s[0] != 0.0 || s[1] != 0.0 || s[nn - 1] != 0.0 || s[nn - 2] != 0.0)
    throw std::invalid_argument(std::string(name) +
                                ": samples must vanish at the first and last two nodes");
}

// Singular 1/r^2 block of the mode integrand in plain coordinates.
double singular_terms(int m, int k, double r, double x0, double x1, double x2) {
  const double m2 = static_cast<double>(m) * m;
  const double k2 = static_cast<double>(k) * k;
  const double cross = 4.0 * std::abs(static_cast<double>(m) * k);
  return (m2 * x0 * x0 + (m2 + k2) * (x1 * x1 + x2 * x2) - cross * x1 * x2) / (r * r);
}

}  // namespace

QuadForm assemble_Pm(const Profile& profile, int m) {
  require_converged(profile);
  if (m < 0)
    throw std::invalid_argument("assemble_Pm: the forms for -m and m coincide; pass m >= 0");
  const int k = profile.params.k;
  const double m2 = static_cast<double>(m) * m;
  const double k2 = static_cast<double>(k) * k;

  QuadFormSpec spec;
  spec.label = "Pm(" + std::to_string(m) + ",k=" + std::to_string(k) + ")";
  if (std::abs(k) != 1) spec.label += "/ext";

  if (m == std::abs(k)) {
    // The singular coupling collapses onto d = (w1-w2)/sqrt2 alone, so the
    // rotated pair (s, d) carries the constraints: only d is pinned at r = 0.
    spec.components = {{"w0", m != 0}, {"s", false}, {"d", true}};
    spec.coefficients = [&profile, m2, k2](double r, double* grad, double* pot) {
      const LinearizedPotential lp = linearized_potential(profile, r);
      grad[0] = grad[1] = grad[2] = 1.0;
      const double inv_r2 = 1.0 / (r * r);
      const double cross = lp.uv / sqrt2;
      const double mean = 0.5 * (lp.uu + lp.rotation);
      const double half_gap = 0.5 * (lp.uu - lp.rotation);
      pot[0] = m2 * inv_r2 + lp.vv;
      pot[1] = cross;
      pot[2] = cross;
      pot[3] = cross;
      pot[4] = mean;
      pot[5] = half_gap;
      pot[6] = cross;
      pot[7] = half_gap;
      pot[8] = 4.0 * k2 * inv_r2 + mean;
    };
  } else {
    const double cross_sing = -2.0 * std::abs(static_cast<double>(m) * k);
    spec.components = {{"w0", m != 0}, {"w1", true}, {"w2", true}};
    spec.coefficients = [&profile, m2, k2, cross_sing](double r, double* grad, double* pot) {
      const LinearizedPotential lp = linearized_potential(profile, r);
      grad[0] = grad[1] = grad[2] = 1.0;
      const double inv_r2 = 1.0 / (r * r);
      pot[0] = m2 * inv_r2 + lp.vv;
      pot[1] = lp.uv;
      pot[2] = 0.0;
      pot[3] = lp.uv;
      pot[4] = (m2 + k2) * inv_r2 + lp.uu;
      pot[5] = cross_sing * inv_r2;
      pot[6] = 0.0;
      pot[7] = cross_sing * inv_r2;
      pot[8] = (m2 + k2) * inv_r2 + lp.rotation;
    };
  }
  return QuadForm(profile.mesh, spec, MassKind::L2);
}

double pm_value(const Profile& profile, int m, const std::vector<double>& w0,
                const std::vector<double>& w1, const std::vector<double>& w2) {
  require_converged(profile);
  if (m < 0) throw std::invalid_argument("pm_value: m must be nonnegative");
  const int nn = profile.n_nodes();
  if (static_cast<int>(w0.size()) != nn || static_cast<int>(w1.size()) != nn ||
      static_cast<int>(w2.size()) != nn)
    throw std::invalid_argument("pm_value: sample size does not match the mesh nodes");
  if ((m != 0 && w0[0] != 0.0) || w1[0] != 0.0 || w2[0] != 0.0 || w0[nn - 1] != 0.0 ||
      w1[nn - 1] != 0.0 || w2[nn - 1] != 0.0)
    throw std::invalid_argument("pm_value: samples must satisfy the essential constraints");

  const auto& nodes = profile.mesh.nodes;
  const int k = profile.params.k;
  return integrate_breaks(nodes, 10, [&](double r) {
    const double x0 = interp_p1(nodes, w0, r), d0 = interp_p1_slope(nodes, w0, r);
    const double x1 = interp_p1(nodes, w1, r), d1 = interp_p1_slope(nodes, w1, r);
    const double x2 = interp_p1(nodes, w2, r), d2 = interp_p1_slope(nodes, w2, r);
    const LinearizedPotential lp = linearized_potential(profile, r);
    const double bulk =
        lp.vv * x0 * x0 + lp.uu * x1 * x1 + 2.0 * lp.uv * x0 * x1 + lp.rotation * x2 * x2;
    return (d0 * d0 + d1 * d1 + d2 * d2 + singular_terms(m, k, r, x0, x1, x2) + bulk) * r;
  });
}

double pm_value_nodal(const std::vector<double>& nodes, const ModelParams& params, int m,
                      const std::vector<double>& u, const std::vector<double>& v,
                      const std::vector<double>& w0, const std::vector<double>& w1,
                      const std::vector<double>& w2) {
  params.validate();
  if (m < 0) throw std::invalid_argument("pm_value_nodal: m must be nonnegative");
  const std::size_t nn = nodes.size();
  if (u.size() != nn || v.size() != nn || w0.size() != nn || w1.size() != nn || w2.size() != nn)
    throw std::invalid_argument("pm_value_nodal: array sizes do not match the nodes");

  const CompositeQuad quad = composite_gauss(nodes, 4);
  std::vector<double> terms(quad.r.size());
  for (std::size_t q = 0; q < quad.r.size(); ++q) {
    const double r = quad.r[q];
    const double ui = interp_p1(nodes, u, r);
    const double vi = interp_p1(nodes, v, r);
    const double x0 = interp_p1(nodes, w0, r), d0 = interp_p1_slope(nodes, w0, r);
    const double x1 = interp_p1(nodes, w1, r), d1 = interp_p1_slope(nodes, w1, r);
    const double x2 = interp_p1(nodes, w2, r), d2 = interp_p1_slope(nodes, w2, r);
    const BulkHessian h = bulk_hessian(params, ui, vi);
    const double rot =
        -params.a2 + 2.0 * params.b2 * vi / std::sqrt(6.0) + params.c2 * (ui * ui + vi * vi);
    const double bulk = h.fvv * x0 * x0 + h.fuu * x1 * x1 + 2.0 * h.fuv * x0 * x1 + rot * x2 * x2;
    terms[q] = quad.w[q] *
               (d0 * d0 + d1 * d1 + d2 * d2 + singular_terms(m, params.k, r, x0, x1, x2) + bulk) *
               r;
  }
  return pairwise_sum(terms);
}

double pm_value_factors(const Profile& profile, int m, const HardyFactors& factors) {
  require_converged(profile);
  if (m < 0) throw std::invalid_argument("pm_value_factors: m must be nonnegative");
  const int nn = profile.n_nodes();
  require_compact_support(factors.eta, nn, "pm_value_factors: eta");
  require_compact_support(factors.xi, nn, "pm_value_factors: xi");
  require_compact_support(factors.zeta, nn, "pm_value_factors: zeta");

  const auto& nodes = profile.mesh.nodes;
  const int k = profile.params.k;
  return integrate_breaks(nodes, 10, [&](double r) {
    const double eta = interp_p1(nodes, factors.eta, r);
    const double deta = interp_p1_slope(nodes, factors.eta, r);
    const double xi = interp_p1(nodes, factors.xi, r);
    const double dxi = interp_p1_slope(nodes, factors.xi, r);
    const double zeta = interp_p1(nodes, factors.zeta, r);
    const double dzeta = interp_p1_slope(nodes, factors.zeta, r);
    const double u = profile.eval_u(r), du = profile.eval_du(r), d2u = profile.eval_d2u(r);
    const double dv = profile.eval_dv(r), d2v = profile.eval_d2v(r);
    const double x0 = dv * eta, g0 = d2v * eta + dv * deta;
    const double x1 = du * xi, g1 = d2u * xi + du * dxi;
    const double x2 = u * zeta, g2 = du * zeta + u * dzeta;
    const LinearizedPotential lp = linearized_potential(profile, r);
    const double bulk =
        lp.vv * x0 * x0 + lp.uu * x1 * x1 + 2.0 * lp.uv * x0 * x1 + lp.rotation * x2 * x2;
    return (g0 * g0 + g1 * g1 + g2 * g2 + singular_terms(m, k, r, x0, x1, x2) + bulk) * r;
  });
}

std::pair<double, double> split_P0(const Profile& profile, const std::vector<double>& w0,
                                   const std::vector<double>& w1,
                                   const std::vector<double>& w2) {
  require_converged(profile);
  const int nn = profile.n_nodes();
  require_compact_support(w0, nn, "split_P0: w0");
  require_compact_support(w1, nn, "split_P0: w1");
  require_compact_support(w2, nn, "split_P0: w2");

  const double b_part = b_value(profile, w1, w0);
  const auto& nodes = profile.mesh.nodes;
  const double f_part = integrate_breaks(nodes, 10, [&](double r) {
    const double x2 = interp_p1(nodes, w2, r);
    const double d2 = interp_p1_slope(nodes, w2, r);
    if (x2 == 0.0 && d2 == 0.0) return 0.0;
    const double u = profile.eval_u(r);
    const double num = d2 * u - x2 * profile.eval_du(r);
    return num * num / (u * u) * r;
  });
  return {b_part, f_part};
}

HardySplit hardy_split_Jm_Im(const Profile& profile, int m, const HardyFactors& factors) {
  require_converged(profile);
  if (m < 1) throw std::invalid_argument("hardy_split_Jm_Im: m must be at least 1");
  if (std::abs(profile.params.k) != 1)
    throw std::invalid_argument("hardy_split_Jm_Im: the split identity holds for |k| = 1 only");
  if (profile.constants.regime == Regime::Critical)
    throw CriticalRegimeError(
        "hardy_split_Jm_Im: v' vanishes identically in the Critical regime, so the eta factor "
        "is undefined; the w0 channel decouples there and is nonnegative on its own");
  const int nn = profile.n_nodes();
  require_compact_support(factors.eta, nn, "hardy_split_Jm_Im: eta");
  require_compact_support(factors.xi, nn, "hardy_split_Jm_Im: xi");
  require_compact_support(factors.zeta, nn, "hardy_split_Jm_Im: zeta");

  const auto& nodes = profile.mesh.nodes;
  const ModelParams& mp = profile.params;
  const double md = static_cast<double>(m);

  HardySplit out;
  out.j_m = integrate_breaks(nodes, 10, [&](double r) {
    const double eta = interp_p1(nodes, factors.eta, r);
    const double deta = interp_p1_slope(nodes, factors.eta, r);
    const double xi = interp_p1(nodes, factors.xi, r);
    const double dxi = interp_p1_slope(nodes, factors.xi, r);
    const double u = profile.eval_u(r), du = profile.eval_du(r);
    const double v = profile.eval_v(r), dv = profile.eval_dv(r);
    const double diff = xi - eta;
    return (dv * dv * deta * deta + du * du * dxi * dxi +
            (md * md - 1.0) * dv * dv * eta * eta / (r * r) -
            2.0 * u * dv * du * (mp.b2 / std::sqrt(6.0) + mp.c2 * v) * diff * diff) *
           r;
  });
  out.i_m = integrate_breaks(nodes, 10, [&](double r) {
    const double xi = interp_p1(nodes, factors.xi, r);
    const double zeta = interp_p1(nodes, factors.zeta, r);
    const double dzeta = interp_p1_slope(nodes, factors.zeta, r);
    const double u = profile.eval_u(r), du = profile.eval_du(r);
    const double inv_r2 = 1.0 / (r * r);
    return ((md * md - 1.0) * inv_r2 * du * du * xi * xi + md * md * inv_r2 * u * u * zeta * zeta +
            u * u * dzeta * dzeta + 2.0 / (r * r * r) * u * du * xi * xi -
            4.0 * md * inv_r2 * u * du * xi * zeta) *
           r;
  });
  out.sos_i_m = integrate_breaks(nodes, 10, [&](double r) {
    const double xi = interp_p1(nodes, factors.xi, r);
    const double zeta = interp_p1(nodes, factors.zeta, r);
    const double dzeta = interp_p1_slope(nodes, factors.zeta, r);
    const double u = profile.eval_u(r), du = profile.eval_du(r);
    const double inv_r2 = 1.0 / (r * r);
    const double pin = du * xi - u * zeta;
    const double shear = xi - zeta * r;
    const double stretch = zeta + dzeta * r;
    return ((md - 1.0) * (md - 1.0) * inv_r2 * (du * du * xi * xi + u * u * zeta * zeta) +
            2.0 * (md - 1.0) * inv_r2 * pin * pin + 2.0 * u * du / (r * r * r) * shear * shear +
            u * u * inv_r2 * stretch * stretch) *
           r;
  });
  return out;
}

double kernel_check_m1(const Profile& profile) {
  require_converged(profile);
  if (std::abs(profile.params.k) != 1)
    throw std::invalid_argument("kernel_check_m1: translation directions exist for |k| = 1 only");

  const double r_eff = profile.mesh.r_eff;
  const double plateau = 0.45 * r_eff;
  const double ramp_end = 0.95 * r_eff;
  const auto cutoff = [plateau, ramp_end](double r) {
    if (r <= plateau) return 1.0;
    if (r >= ramp_end) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - plateau) / (ramp_end - plateau));
    return c * c;
  };
  // u/r has a removable singularity at 0; extend by the u ~ alpha r^|k| launch
  // through the first interior node.
  const double launch = std::abs(profile.params.k) * profile.u[1] / profile.mesh.nodes[1];
  const auto u_over_r = [&profile, launch](double r) {
    return r == 0.0 ? launch : profile.eval_u(r) / r;
  };

  QuadForm form = assemble_Pm(profile, 1);
  const std::vector<std::function<double(double)>> fns = {
      [&](double r) { return profile.eval_dv(r) * cutoff(r); },
      [&](double r) { return (profile.eval_du(r) + u_over_r(r)) * cutoff(r) / sqrt2; },
      [&](double r) { return (profile.eval_du(r) - u_over_r(r)) * cutoff(r) / sqrt2; },
  };
  return form.rayleigh(form.project(fns));
}

QuadForm assemble_V2_pair(const Profile& profile, int n) {
  require_converged(profile);
  const int k = profile.params.k;
  const int kn = k - n;
  const double n2 = static_cast<double>(n) * n;
  const double kn2 = static_cast<double>(kn) * kn;

  QuadFormSpec spec;
  spec.label = "V2(" + std::to_string(n) + "|" + std::to_string(kn) + ",k=" + std::to_string(k) +
               ")";
  if (std::abs(k) != 1) spec.label += "/ext";
  spec.components = {{"xi_n", n != 0}, {"xi_kn", kn != 0}};
  spec.coefficients = [&profile, n2, kn2](double r, double* grad, double* pot) {
    const ModelParams& mp = profile.params;
    const double u = profile.eval_u(r);
    const double v = profile.eval_v(r);
    const double well = -mp.a2 - mp.b2 * v / std::sqrt(6.0) + mp.c2 * (u * u + v * v);
    grad[0] = grad[1] = 1.0;
    const double inv_r2 = 1.0 / (r * r);
    pot[0] = n2 * inv_r2 + well;
    pot[1] = -0.5 * sqrt2 * mp.b2 * u;
    pot[2] = pot[1];
    pot[3] = kn2 * inv_r2 + well;
  };
  return QuadForm(profile.mesh, spec, MassKind::L2);
}

std::pair<double, double> v2_lower_bound_check(const Profile& profile, int n,
                                               const std::vector<double>& xi_n,
                                               const std::vector<double>& xi_kn) {
  require_converged(profile);
  if (std::abs(profile.params.k) != 1)
    throw std::invalid_argument("v2_lower_bound_check: the bound is derived for |k| = 1");
  if (n < 2) throw std::invalid_argument("v2_lower_bound_check: n must be at least 2");
  const int nn = profile.n_nodes();
  require_compact_support(xi_n, nn, "v2_lower_bound_check: xi_n");
  require_compact_support(xi_kn, nn, "v2_lower_bound_check: xi_kn");

  const auto& nodes = profile.mesh.nodes;
  const ModelParams& mp = profile.params;
  const int kn = mp.k - n;
  const double n2 = static_cast<double>(n) * n;
  const double kn2 = static_cast<double>(kn) * kn;

  const double lhs = integrate_breaks(nodes, 10, [&](double r) {
    const double xn = interp_p1(nodes, xi_n, r), dxn = interp_p1_slope(nodes, xi_n, r);
    const double xk = interp_p1(nodes, xi_kn, r), dxk = interp_p1_slope(nodes, xi_kn, r);
    const double u = profile.eval_u(r), v = profile.eval_v(r);
    const double well = -mp.a2 - mp.b2 * v / std::sqrt(6.0) + mp.c2 * (u * u + v * v);
    return (dxn * dxn + dxk * dxk + (n2 * xn * xn + kn2 * xk * xk) / (r * r) +
            well * (xn * xn + xk * xk) - sqrt2 * mp.b2 * u * xn * xk) *
           r;
  });
  const double rhs = integrate_breaks(nodes, 10, [&](double r) {
    const double xn = interp_p1(nodes, xi_n, r);
    const double xk = interp_p1(nodes, xi_kn, r);
    const double u = profile.eval_u(r), v = profile.eval_v(r);
    return (mp.b2 / sqrt2) * (-std::sqrt(3.0) * v - u) * (xn * xn + xk * xk) * r;
  });
  return {lhs, rhs};
}

InstabilityScan instability_search(const ModelParams& params, const RadialMesh& mesh) {
  params.validate();
  const Profile profile = solve_profile(params, mesh);
  const double sp = profile.constants.s_plus;

  InstabilityScan scan;
  scan.scale = params.a2 + params.b2 * sp + params.c2 * sp * sp;
  const int ak = std::abs(params.k);
  bool have_worst = false;

  const auto scan_form = [&](const QuadForm& form, const char* sector, int idx) {
    SpectrumResult best;
    bool have = false;
    std::exception_ptr err;
    for (const double shift : {-0.1 * scan.scale, 0.0}) {
      SpectrumOptions opts;
      opts.shift = shift;
      try {
        SpectrumResult res = lowest_spectrum(form, 5, opts);
        if (!have || res.eigenvalues[0] < best.eigenvalues[0]) best = std::move(res);
        have = true;
      } catch (const NonConvergenceError&) {
        err = std::current_exception();
      } catch (const FactorizationError&) {
        err = std::current_exception();
      }
    }
    if (!have) std::rethrow_exception(err);

    ModeScanEntry entry;
    entry.sector = sector;
    entry.m_or_n = idx;
    entry.k = params.k;
    entry.lambda_min = best.eigenvalues[0];
    entry.extension = ak != 1;
    entry.label = form.label();
    scan.entries.push_back(entry);
    if (!have_worst || entry.lambda_min < scan.lambda_min) {
      scan.lambda_min = entry.lambda_min;
      scan.worst_label = entry.label;
      scan.worst = std::move(best);
      have_worst = true;
    }
  };

  for (int m = 0; m <= ak + 2; ++m) scan_form(assemble_Pm(profile, m), "V1", m);

  std::set<int> seen;
  for (int n = -2; n <= ak + 2; ++n) {
    const int lo = std::min(n, params.k - n);
    if (!seen.insert(lo).second) continue;
    scan_form(assemble_V2_pair(profile, lo), "V2", lo);
  }

  scan.found_negative = scan.lambda_min < -1e-8 * scan.scale;
  return scan;
}

}  // namespace defectlab
