#include "defectlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "defectlab/errors.hpp"
#include "defectlab/fem.hpp"

namespace defectlab {

namespace {

void require_compact_support(const std::vector<double>& s, int nn, const char* name) {
  if (static_cast<int>(s.size()) != nn)
    throw std::invalid_argument(std::string(name) + ": size does not match the mesh nodes");
  if (s[0] != 0.0 || s[1] != 0.0 || s[nn - 1] != 0.0 || s[nn - 2] != 0.0)
    throw std::invalid_argument(std::string(name) +
                                ": samples must vanish at the first and last two nodes");
}

double sup_distance(const std::vector<double>& ua, const std::vector<double>& va,
                    const std::vector<double>& ub, const std::vector<double>& vb) {
  double d = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) {
    d = std::max(d, std::abs(ua[i] - ub[i]));
    d = std::max(d, std::abs(va[i] - vb[i]));
  }
  return d;
}

}  // namespace

LinearizedPotential linearized_potential(const Profile& profile, double r) {
  const ModelParams& mp = profile.params;
  if (profile.constants.regime == Regime::Critical) {
    const double u = profile.eval_u(r);
    const double s2 = profile.constants.s_plus * profile.constants.s_plus;
    const double hc = 0.5 * mp.c2;
    return {hc * (6.0 * u * u - s2), hc * (2.0 * u * u + s2), 0.0, hc * (2.0 * u * u - s2)};
  }
  const double u = profile.eval_u(r);
  const double v = profile.eval_v(r);
  const BulkHessian h = bulk_hessian(mp, u, v);
  const double rot = -mp.a2 + 2.0 * mp.b2 * v / std::sqrt(6.0) + mp.c2 * (u * u + v * v);
  return {h.fuu, h.fvv, h.fuv, rot};
}

QuadForm assemble_B(const Profile& profile, MassKind mass_kind) {
  require_converged(profile);
  QuadFormSpec spec;
  spec.label = "B";
  spec.components = {{"xi", true}, {"eta", false}};
  const double k2 = static_cast<double>(profile.params.k) * profile.params.k;
  spec.coefficients = [&profile, k2](double r, double* grad, double* pot) {
    const LinearizedPotential lp = linearized_potential(profile, r);
    grad[0] = 1.0;
    grad[1] = 1.0;
    pot[0] = k2 / (r * r) + lp.uu;
    pot[1] = lp.uv;
    pot[2] = lp.uv;
    pot[3] = lp.vv;
  };
  return QuadForm(profile.mesh, spec, mass_kind);
}

double b_value(const Profile& profile, const std::vector<double>& xi,
               const std::vector<double>& eta) {
  require_converged(profile);
  const int nn = profile.n_nodes();
  if (static_cast<int>(xi.size()) != nn || static_cast<int>(eta.size()) != nn)
    throw std::invalid_argument("b_value: sample size does not match the mesh nodes");
  if (xi[0] != 0.0 || xi[nn - 1] != 0.0 || eta[nn - 1] != 0.0)
    throw std::invalid_argument("b_value: samples must satisfy the essential constraints");
  const auto& nodes = profile.mesh.nodes;
  const double k2 = static_cast<double>(profile.params.k) * profile.params.k;
  return integrate_breaks(profile.mesh.nodes, 10, [&](double r) {
    const double x = interp_p1(nodes, xi, r), dx = interp_p1_slope(nodes, xi, r);
    const double e = interp_p1(nodes, eta, r), de = interp_p1_slope(nodes, eta, r);
    const LinearizedPotential lp = linearized_potential(profile, r);
    return (dx * dx + k2 / (r * r) * x * x + de * de + lp.uu * x * x + lp.vv * e * e +
            2.0 * lp.uv * x * e) *
           r;
  });
}

std::pair<double, double> hardy_certificate_B(const Profile& profile,
                                              const std::vector<double>& xi_t,
                                              const std::vector<double>& eta_t) {
  require_converged(profile);
  const int nn = profile.n_nodes();
  require_compact_support(xi_t, nn, "hardy_certificate_B xi_t");
  require_compact_support(eta_t, nn, "hardy_certificate_B eta_t");
  const auto& nodes = profile.mesh.nodes;
  const ModelParams& mp = profile.params;
  const double k2 = static_cast<double>(mp.k) * mp.k;
  const double sqrt6 = std::sqrt(6.0);

  const double direct = integrate_breaks(profile.mesh.nodes, 10, [&](double r) {
    const double xt = interp_p1(nodes, xi_t, r), dxt = interp_p1_slope(nodes, xi_t, r);
    const double et = interp_p1(nodes, eta_t, r), det = interp_p1_slope(nodes, eta_t, r);
    const double u = profile.eval_u(r), du = profile.eval_du(r);
    const double v = profile.eval_v(r), dv = profile.eval_dv(r);
    const double xi = u * xt, dxi = du * xt + u * dxt;
    const double eta = v * et, deta = dv * et + v * det;
    const LinearizedPotential lp = linearized_potential(profile, r);
    return (dxi * dxi + k2 / (r * r) * xi * xi + deta * deta + lp.uu * xi * xi +
            lp.vv * eta * eta + 2.0 * lp.uv * xi * eta) *
           r;
  });

  const double rewritten = integrate_breaks(profile.mesh.nodes, 10, [&](double r) {
    const double xt = interp_p1(nodes, xi_t, r), dxt = interp_p1_slope(nodes, xi_t, r);
    const double et = interp_p1(nodes, eta_t, r), det = interp_p1_slope(nodes, eta_t, r);
    const double u = profile.eval_u(r);
    const double v = profile.eval_v(r);
    const double xi = u * xt, eta = v * et;
    const double eta_pot = -mp.b2 * (v * v + u * u) / (v * sqrt6) + 2.0 * mp.c2 * v * v;
    return (u * u * dxt * dxt + v * v * det * det + eta_pot * eta * eta +
            2.0 * mp.c2 * u * u * xi * xi +
            4.0 * u * (mp.b2 / sqrt6 + mp.c2 * v) * xi * eta) *
           r;
  });
  return {direct, rewritten};
}

UniquenessProbe uniqueness_probe(const ModelParams& params, const RadialMesh& mesh,
                                 int n_starts, std::uint64_t seed) {
  if (n_starts < 2) throw std::invalid_argument("uniqueness_probe: n_starts must be >= 2");
  params.validate();
  const BulkConstants bc = bulk_constants(params);
  const auto [u0, v0] = initial_guess(params, mesh);
  const int nn = static_cast<int>(mesh.nodes.size());
  const double r_end = mesh.r_eff;

  SolveOptions opts;
  opts.tol = 1e-12;
  opts.polish = false;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.35, 0.35);

  UniquenessProbe out;
  std::vector<std::vector<double>> sol_u, sol_v;
  for (int s = 0; s < n_starts; ++s) {
    double au[4], av[4];
    for (int j = 0; j < 4; ++j) au[j] = amp(rng);
    for (int j = 0; j < 4; ++j) av[j] = 0.5 * amp(rng);
    std::vector<double> us(nn), vs(nn);
    for (int i = 0; i < nn; ++i) {
      const double t = mesh.nodes[i] / r_end;
      double mu = 1.0, bump_v = 0.0;
      for (int j = 1; j <= 4; ++j) {
        mu += au[j - 1] * std::sin(j * std::numbers::pi * t);
        bump_v += av[j - 1] * std::cos((j - 0.5) * std::numbers::pi * t);
      }
      us[i] = std::max(u0[i] * mu, 0.0);
      vs[i] = std::min(v0[i] + std::abs(bc.v_star) * bump_v, 0.0);
    }
    try {
      Profile p = solve_profile(params, mesh, us, vs, opts);
      out.energies.push_back(p.energy);
      sol_u.push_back(std::move(p.u));
      sol_v.push_back(std::move(p.v));
      ++out.n_converged;
    } catch (const NonConvergenceError&) {
      ++out.n_failed;
    }
  }

  const double cluster_tol = 1e-6 * bc.s_plus;
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < out.n_converged; ++i) {
    bool placed = false;
    for (auto& cl : clusters) {
      if (sup_distance(sol_u[i], sol_v[i], sol_u[cl[0]], sol_v[cl[0]]) <= cluster_tol) {
        cl.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({i});
  }
  out.distinct_count = static_cast<int>(clusters.size());

  const std::vector<int>* principal = nullptr;
  std::size_t largest = 0;
  for (const auto& cl : clusters)
    if (cl.size() > largest) {
      largest = cl.size();
      principal = &cl;
    }
  if (principal) {
    double dev = 0.0;
    for (std::size_t a = 0; a < principal->size(); ++a)
      for (std::size_t b = a + 1; b < principal->size(); ++b)
        dev = std::max(dev, sup_distance(sol_u[(*principal)[a]], sol_v[(*principal)[a]],
                                         sol_u[(*principal)[b]], sol_v[(*principal)[b]]));
    out.max_pairwise_deviation = dev;
  }
  return out;
}

}  // namespace defectlab
