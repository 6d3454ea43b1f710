#include "defectlab/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "defectlab/banded.hpp"
#include "defectlab/errors.hpp"
#include "defectlab/fem.hpp"

namespace defectlab {

namespace {

struct BoundaryData {
  double u_r = 0.0;
  double v_r = 0.0;
};

BoundaryData boundary_data(const ModelParams& params, const RadialMesh& mesh) {
  const BulkConstants bc = bulk_constants(params);
  BoundaryData out{bc.u_star, bc.v_star};
  if (mesh.domain.kind == Domain::Kind::WholePlane) {
    const AsymptoticCoeffs ac = asymptotic_coeffs(params);
    out.u_r += ac.p1 / (mesh.r_eff * mesh.r_eff);
    out.v_r += ac.q1 / (mesh.r_eff * mesh.r_eff);
  }
  return out;
}

double force_scale(const ModelParams& params, const BulkConstants& bc) {
  return (params.a2 + params.b2 * bc.s_plus + params.c2 * bc.s_plus * bc.s_plus) * bc.s_plus;
}

// Weak-form assembly of the coupled pair on the interleaved vector x[2i]=u_i, x[2i+1]=v_i.
class Assembler {
 public:
  Assembler(const ModelParams& params, const RadialMesh& mesh, BoundaryData bd)
      : params_(params), mesh_(mesh), bd_(bd), nn_(static_cast<int>(mesh.nodes.size())),
        k2_(static_cast<double>(params.k) * params.k) {
    lumped_.assign(nn_, 0.0);
    const GaussRule& g = gauss_rule(2);
    for (int e = 0; e < nn_ - 1; ++e) {
      const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1];
      const double half = 0.5 * (b - a);
      for (int q = 0; q < 2; ++q) {
        const double r = 0.5 * (a + b) + half * g.x[q];
        const double w = half * g.w[q];
        const double pb = (r - a) / (b - a);
        lumped_[e] += w * r * (1.0 - pb);
        lumped_[e + 1] += w * r * pb;
      }
    }
    double total = 0.0;
    for (double m : lumped_) total += m;
    mass_floor_ = 1e-3 * total / nn_;
  }

  int n_dofs() const { return 2 * nn_; }
  int last_node() const { return nn_ - 1; }

  bool is_dirichlet(int dof) const {
    return dof == 0 || dof == 2 * (nn_ - 1) || dof == 2 * (nn_ - 1) + 1;
  }
  double dirichlet_value(int dof) const {
    if (dof == 0) return 0.0;
    return dof == 2 * (nn_ - 1) ? bd_.u_r : bd_.v_r;
  }

  void apply_dirichlet(std::vector<double>& x) const {
    x[0] = 0.0;
    x[2 * (nn_ - 1)] = bd_.u_r;
    x[2 * (nn_ - 1) + 1] = bd_.v_r;
  }

  void residual(const std::vector<double>& x, std::vector<double>& f) const {
    f.assign(2 * nn_, 0.0);
    const GaussRule& g = gauss_rule(2);
    for (int e = 0; e < nn_ - 1; ++e) {
      const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1];
      const double h = b - a, half = 0.5 * h;
      const double du = (x[2 * (e + 1)] - x[2 * e]) / h;
      const double dv = (x[2 * (e + 1) + 1] - x[2 * e + 1]) / h;
      for (int q = 0; q < 2; ++q) {
        const double r = 0.5 * (a + b) + half * g.x[q];
        const double w = half * g.w[q];
        const double pb = (r - a) / h, pa = 1.0 - pb;
        const double uq = pa * x[2 * e] + pb * x[2 * (e + 1)];
        const double vq = pa * x[2 * e + 1] + pb * x[2 * (e + 1) + 1];
        double hq, gq;
        bulk_grad(params_, uq, vq, hq, gq);
        const double sing = k2_ / (r * r) * uq;
        f[2 * e] += w * r * (du * (-1.0 / h) + (sing + hq) * pa);
        f[2 * (e + 1)] += w * r * (du * (1.0 / h) + (sing + hq) * pb);
        f[2 * e + 1] += w * r * (dv * (-1.0 / h) + gq * pa);
        f[2 * (e + 1) + 1] += w * r * (dv * (1.0 / h) + gq * pb);
      }
    }
    for (int dof : {0, 2 * (nn_ - 1), 2 * (nn_ - 1) + 1})
      f[dof] = x[dof] - dirichlet_value(dof);
  }

  void jacobian(const std::vector<double>& x, BandedGeneral& jac) const {
    jac.zero();
    const GaussRule& g = gauss_rule(2);
    for (int e = 0; e < nn_ - 1; ++e) {
      const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1];
      const double h = b - a, half = 0.5 * h;
      const int dofs[4] = {2 * e, 2 * e + 1, 2 * (e + 1), 2 * (e + 1) + 1};
      for (int q = 0; q < 2; ++q) {
        const double r = 0.5 * (a + b) + half * g.x[q];
        const double w = half * g.w[q];
        const double pb = (r - a) / h, pa = 1.0 - pb;
        const double phi[2] = {pa, pb};
        const double dphi[2] = {-1.0 / h, 1.0 / h};
        const double uq = pa * x[dofs[0]] + pb * x[dofs[2]];
        const double vq = pa * x[dofs[1]] + pb * x[dofs[3]];
        const BulkHessian hess = bulk_hessian(params_, uq, vq);
        for (int i = 0; i < 2; ++i) {
          const int ru = dofs[2 * i], rv = dofs[2 * i + 1];
          if (!is_dirichlet(ru)) {
            for (int j = 0; j < 2; ++j) {
              jac.add(ru, dofs[2 * j],
                      w * r * (dphi[i] * dphi[j] + (k2_ / (r * r) + hess.fuu) * phi[i] * phi[j]));
              jac.add(ru, dofs[2 * j + 1], w * r * hess.fuv * phi[i] * phi[j]);
            }
          }
          if (!is_dirichlet(rv)) {
            for (int j = 0; j < 2; ++j) {
              jac.add(rv, dofs[2 * j + 1],
                      w * r * (dphi[i] * dphi[j] + hess.fvv * phi[i] * phi[j]));
              jac.add(rv, dofs[2 * j], w * r * hess.fuv * phi[i] * phi[j]);
            }
          }
        }
      }
    }
    for (int dof : {0, 2 * (nn_ - 1), 2 * (nn_ - 1) + 1}) jac.add(dof, dof, 1.0);
  }

  // Stiffness plus the k^2/r^2 mass, used by the semi-implicit flow.
  void linear_operator(BandedGeneral& mat, double tau) const {
    mat.zero();
    const GaussRule& g = gauss_rule(2);
    for (int e = 0; e < nn_ - 1; ++e) {
      const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1];
      const double h = b - a, half = 0.5 * h;
      const int dofs[4] = {2 * e, 2 * e + 1, 2 * (e + 1), 2 * (e + 1) + 1};
      for (int q = 0; q < 2; ++q) {
        const double r = 0.5 * (a + b) + half * g.x[q];
        const double w = half * g.w[q];
        const double pb = (r - a) / h, pa = 1.0 - pb;
        const double phi[2] = {pa, pb};
        const double dphi[2] = {-1.0 / h, 1.0 / h};
        for (int i = 0; i < 2; ++i) {
          if (!is_dirichlet(dofs[2 * i])) {
            for (int j = 0; j < 2; ++j)
              mat.add(dofs[2 * i], dofs[2 * j],
                      w * r * (dphi[i] * dphi[j] + k2_ / (r * r) * phi[i] * phi[j]));
          }
          if (!is_dirichlet(dofs[2 * i + 1])) {
            for (int j = 0; j < 2; ++j)
              mat.add(dofs[2 * i + 1], dofs[2 * j + 1], w * r * dphi[i] * dphi[j]);
          }
        }
      }
    }
    for (int i = 0; i < nn_; ++i) {
      if (!is_dirichlet(2 * i)) mat.add(2 * i, 2 * i, lumped_[i] / tau);
      if (!is_dirichlet(2 * i + 1)) mat.add(2 * i + 1, 2 * i + 1, lumped_[i] / tau);
    }
    for (int dof : {0, 2 * (nn_ - 1), 2 * (nn_ - 1) + 1}) mat.add(dof, dof, 1.0);
  }

  double energy(const std::vector<double>& x) const {
    const BulkConstants bc = bulk_constants(params_);
    const double fref = bulk_f(params_, bc.u_star, bc.v_star);
    const GaussRule& g = gauss_rule(2);
    double total = 0.0;
    for (int e = 0; e < nn_ - 1; ++e) {
      const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1];
      const double h = b - a, half = 0.5 * h;
      const double du = (x[2 * (e + 1)] - x[2 * e]) / h;
      const double dv = (x[2 * (e + 1) + 1] - x[2 * e + 1]) / h;
      for (int q = 0; q < 2; ++q) {
        const double r = 0.5 * (a + b) + half * g.x[q];
        const double w = half * g.w[q];
        const double pb = (r - a) / h, pa = 1.0 - pb;
        const double uq = pa * x[2 * e] + pb * x[2 * (e + 1)];
        const double vq = pa * x[2 * e + 1] + pb * x[2 * (e + 1) + 1];
        total += w * r * (0.5 * (du * du + dv * dv) + 0.5 * k2_ / (r * r) * uq * uq +
                          bulk_f(params_, uq, vq) - fref);
      }
    }
    return total;
  }

  // Max over free dofs of |f_i| / (mass_i * force scale).  Nodal masses carry the
  // r weight and vanish near the axis much faster than assembly roundoff in f_i,
  // so the divisor is floored at a small fraction of the mean mass.
  double scaled_norm(const std::vector<double>& f, double fscale) const {
    double worst = 0.0;
    for (int i = 0; i < nn_; ++i) {
      const double m = std::max(lumped_[i], mass_floor_);
      if (!is_dirichlet(2 * i)) worst = std::max(worst, std::abs(f[2 * i]) / (m * fscale));
      if (!is_dirichlet(2 * i + 1)) worst = std::max(worst, std::abs(f[2 * i + 1]) / (m * fscale));
    }
    return worst;
  }

 private:
  const ModelParams& params_;
  const RadialMesh& mesh_;
  BoundaryData bd_;
  int nn_;
  double k2_;
  std::vector<double> lumped_;
  double mass_floor_ = 0.0;
};

void check_finite(const std::vector<double>& x) {
  for (double t : x)
    if (!std::isfinite(t)) throw NumericError("radial solve: iterate became non-finite");
}

// Semi-implicit descent steps until the scaled residual drops below target.
void flow_rescue(const Assembler& as, std::vector<double>& x, double fscale, double target,
                 int budget) {
  const int n = static_cast<int>(x.size());
  BandedGeneral mat(n, 3, 3);
  std::vector<double> f(n), rhs(n), trial(n);
  double tau = 0.2 / fscale;
  double e_cur = as.energy(x);
  for (int it = 0; it < budget; ++it) {
    as.residual(x, f);
    if (as.scaled_norm(f, fscale) <= target) return;
    as.linear_operator(mat, tau);
    rhs = f;
    mat.solve(rhs);
    for (int i = 0; i < n; ++i) trial[i] = x[i] - rhs[i];
    check_finite(trial);
    const double e_new = as.energy(trial);
    if (e_new <= e_cur + 1e-12 * (std::abs(e_cur) + 1.0)) {
      x.swap(trial);
      e_cur = e_new;
      tau *= 1.25;
    } else {
      tau *= 0.4;
      if (tau < 1e-12 / fscale) throw NonConvergenceError("gradient flow: step collapsed");
    }
  }
  throw NonConvergenceError("gradient flow: residual target not reached");
}

struct StageStats {
  int iterations = 0;
  bool used_flow = false;
  double residual = 0.0;
};

StageStats newton_stage(const Assembler& as, std::vector<double>& x, const SolveOptions& opts,
                        double fscale) {
  StageStats stats;
  const int n = static_cast<int>(x.size());
  BandedGeneral jac(n, 3, 3);
  std::vector<double> f(n), delta(n), trial(n), ft(n);
  bool flow_tried = false;
  as.residual(x, f);
  double rn = as.scaled_norm(f, fscale);
  for (int it = 0; it < opts.max_newton; ++it) {
    if (rn <= opts.tol) {
      stats.residual = rn;
      return stats;
    }
    as.jacobian(x, jac);
    delta = f;
    jac.solve(delta);
    ++stats.iterations;
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 11; ++ls) {
      for (int i = 0; i < n; ++i) trial[i] = x[i] - t * delta[i];
      check_finite(trial);
      as.residual(trial, ft);
      const double rt = as.scaled_norm(ft, fscale);
      if (rt < rn * (1.0 - 0.2 * t) || rt <= opts.tol) {
        x.swap(trial);
        f.swap(ft);
        rn = rt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!opts.flow_fallback || flow_tried)
        throw NonConvergenceError("radial Newton stalled at scaled residual " +
                                  std::to_string(rn));
      flow_rescue(as, x, fscale, std::max(rn * 0.1, opts.tol), 500);
      stats.used_flow = true;
      flow_tried = true;
      as.residual(x, f);
      rn = as.scaled_norm(f, fscale);
    }
  }
  if (rn <= opts.tol) {
    stats.residual = rn;
    return stats;
  }
  throw NonConvergenceError("radial Newton: iteration budget exhausted, scaled residual " +
                            std::to_string(rn));
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> initial_guess(const ModelParams& params,
                                                                  const RadialMesh& mesh) {
  params.validate();
  const BulkConstants bc = bulk_constants(params);
  const BoundaryData bd = boundary_data(params, mesh);
  const int nn = static_cast<int>(mesh.nodes.size());
  const int ka = std::abs(params.k);
  const double ell2 = 1.0 / (params.c2 * bc.s_plus * bc.s_plus);
  const double r_end = mesh.r_eff;

  std::vector<double> u0(nn), v0(nn);
  const double shape_end = std::pow(r_end * r_end / (r_end * r_end + ell2), 0.5 * ka);
  const double amp = bd.u_r / shape_end;
  for (int i = 0; i < nn; ++i) {
    const double r = mesh.nodes[i];
    u0[i] = amp * std::pow(r * r / (r * r + ell2), 0.5 * ka);
    v0[i] = bc.v_star + (bd.v_r - bc.v_star) * (r * r) / (r_end * r_end);
  }
  u0[0] = 0.0;
  u0[nn - 1] = bd.u_r;
  v0[nn - 1] = bd.v_r;
  return {std::move(u0), std::move(v0)};
}

namespace {

Profile solve_impl(const ModelParams& params, const RadialMesh& mesh,
                   const std::vector<double>* u_start, const std::vector<double>* v_start,
                   const SolveOptions& opts) {
  params.validate();
  const BulkConstants bc = bulk_constants(params);
  const int nn = static_cast<int>(mesh.nodes.size());

  // Supercritical runs ramp b2 up from the critical value; others solve directly.
  // An explicit start skips the ramp entirely.
  std::vector<double> b2_stages;
  if (!u_start && bc.regime == Regime::SuperCritical && opts.continuation_steps > 0) {
    const double b2_crit = std::sqrt(3.0 * params.a2 * params.c2);
    if (b2_crit > 0.0 && b2_crit < params.b2) {
      for (int s = 0; s <= opts.continuation_steps; ++s)
        b2_stages.push_back(b2_crit +
                            (params.b2 - b2_crit) * s / static_cast<double>(opts.continuation_steps));
    }
  }
  if (b2_stages.empty()) b2_stages.push_back(params.b2);

  std::vector<double> x(2 * nn);
  if (u_start) {
    if (static_cast<int>(u_start->size()) != nn || static_cast<int>(v_start->size()) != nn)
      throw std::invalid_argument("solve_profile: start vectors must match the mesh nodes");
    for (int i = 0; i < nn; ++i) {
      x[2 * i] = (*u_start)[i];
      x[2 * i + 1] = (*v_start)[i];
    }
  } else {
    ModelParams first = params;
    first.b2 = b2_stages.front();
    auto [u0, v0] = initial_guess(first, mesh);
    for (int i = 0; i < nn; ++i) {
      x[2 * i] = u0[i];
      x[2 * i + 1] = v0[i];
    }
  }
  ModelParams stage = params;

  int total_iters = 0;
  bool used_flow = false;
  double final_residual = 0.0;
  for (double b2v : b2_stages) {
    stage.b2 = b2v;
    const BulkConstants sbc = bulk_constants(stage);
    const BoundaryData bd = boundary_data(stage, mesh);
    Assembler as(stage, mesh, bd);
    as.apply_dirichlet(x);
    const StageStats stats = newton_stage(as, x, opts, force_scale(stage, sbc));
    total_iters += stats.iterations;
    used_flow |= stats.used_flow;
    final_residual = stats.residual;
  }

  Profile out;
  out.mesh = mesh;
  out.params = params;
  out.constants = bc;
  const BoundaryData bd = boundary_data(params, mesh);
  out.u_boundary = bd.u_r;
  out.v_boundary = bd.v_r;
  out.residual_norm = final_residual;
  out.newton_iterations = total_iters;
  out.used_flow_fallback = used_flow;
  out.u.resize(nn);
  out.v.resize(nn);
  for (int i = 0; i < nn; ++i) {
    out.u[i] = x[2 * i];
    out.v[i] = x[2 * i + 1];
  }

  const double sign_tol = 1e-10 * bc.s_plus;
  for (int i = 1; i + 1 < nn; ++i) {
    if (out.u[i] < -sign_tol || out.v[i] > sign_tol)
      throw SignViolationError("converged profile leaves the cone u >= 0, v <= 0 at node " +
                               std::to_string(i));
  }

  {
    Assembler as(params, mesh, bd);
    out.energy = as.energy(x);
  }

  if (opts.polish) {
    const auto& nodes = mesh.nodes;
    auto u_init = [&nodes, &out](double r) { return interp_p1(nodes, out.u, r); };
    auto v_init = [&nodes, &out](double r) { return interp_p1(nodes, out.v, r); };
    out.refined = RefinedProfile::fit(params, mesh.r_eff, bd.u_r, bd.v_r, u_init, v_init,
                                      opts.refine);
  }

  out.du.resize(nn);
  out.dv.resize(nn);
  if (out.refined) {
    for (int i = 0; i < nn; ++i) {
      out.du[i] = out.refined->du(mesh.nodes[i]);
      out.dv[i] = out.refined->dv(mesh.nodes[i]);
    }
  } else {
    for (int i = 0; i < nn; ++i) {
      const int lo = std::max(0, i - 1), hi = std::min(nn - 1, i + 1);
      out.du[i] = (out.u[hi] - out.u[lo]) / (mesh.nodes[hi] - mesh.nodes[lo]);
      out.dv[i] = (out.v[hi] - out.v[lo]) / (mesh.nodes[hi] - mesh.nodes[lo]);
    }
  }
  return out;
}

}  // namespace

Profile solve_profile(const ModelParams& params, const RadialMesh& mesh,
                      const SolveOptions& opts) {
  return solve_impl(params, mesh, nullptr, nullptr, opts);
}

Profile solve_profile(const ModelParams& params, const RadialMesh& mesh,
                      const std::vector<double>& u_start, const std::vector<double>& v_start,
                      const SolveOptions& opts) {
  return solve_impl(params, mesh, &u_start, &v_start, opts);
}

double profile_energy(const ModelParams& params, const RadialMesh& mesh,
                      const std::vector<double>& u, const std::vector<double>& v) {
  const BoundaryData bd = boundary_data(params, mesh);
  Assembler as(params, mesh, bd);
  const int nn = static_cast<int>(mesh.nodes.size());
  std::vector<double> x(2 * nn);
  for (int i = 0; i < nn; ++i) {
    x[2 * i] = u[i];
    x[2 * i + 1] = v[i];
  }
  return as.energy(x);
}

DiagnosticsReport diagnose(const Profile& p) {
  const BulkConstants& bc = p.constants;
  DiagnosticsReport rep;
  rep.regime = bc.regime;
  const int nn = p.n_nodes();
  const double s = bc.s_plus;
  const double tol = 1e-9 * s;

  const double v_lo = std::min(bc.v_star, 2.0 * bc.s_minus / std::sqrt(6.0));
  const double v_hi = std::max(bc.v_star, 2.0 * bc.s_minus / std::sqrt(6.0));
  bool box_ok = true, sign_ok = true, sqrt3_ok = true;
  for (int i = 1; i + 1 < nn; ++i) {
    if (!(p.u[i] > -tol && p.u[i] < bc.u_star + tol)) box_ok = false;
    if (bc.regime != Regime::Critical && !(p.v[i] > v_lo - tol && p.v[i] < v_hi + tol))
      box_ok = false;
    if (p.u[i] < -tol || p.v[i] > tol) sign_ok = false;
    if (std::sqrt(3.0) * p.v[i] + p.u[i] >= tol) sqrt3_ok = false;
  }
  rep.box_bounds_ok = box_ok;
  rep.sign_ok = sign_ok;
  rep.sqrt3_bound_ok = sqrt3_ok;

  const double ell = 1.0 / std::sqrt(p.params.c2 * s * s);
  int core_nodes = 0;
  for (int i = 1; i < nn; ++i)
    if (p.mesh.nodes[i] < ell) ++core_nodes;
  rep.core_resolution_ok = core_nodes >= 8;

  // Nodal-increment monotonicity with the per-node allowance.
  const double inc_tol = 1e-10 * s;
  double worst = 0.0;
  bool u_ok = true, v_ok = true;
  for (int i = 0; i + 1 < nn; ++i) {
    const double du = p.u[i + 1] - p.u[i];
    if (du < -inc_tol) {
      u_ok = false;
      worst = std::max(worst, -du);
    }
    const double dv = p.v[i + 1] - p.v[i];
    if (bc.regime == Regime::SubCritical && dv < -inc_tol) {
      v_ok = false;
      worst = std::max(worst, -dv);
    } else if (bc.regime == Regime::SuperCritical && dv > inc_tol) {
      v_ok = false;
      worst = std::max(worst, dv);
    }
  }
  if (bc.regime == Regime::Critical) {
    double dev = 0.0;
    for (int i = 0; i < nn; ++i) dev = std::max(dev, std::abs(p.v[i] - bc.v_star));
    rep.critical_v_deviation = dev;
    v_ok = dev <= 1e-8 * s;
  }
  rep.monotonicity = {u_ok, v_ok, worst};

  // Strong residual through 3-point stencils, skipping the near-origin zone where
  // the stencil itself is ill-conditioned against the k^2/r^2 term.
  const double fscale = force_scale(p.params, bc);
  const double k2 = static_cast<double>(p.params.k) * p.params.k;
  double max_res = 0.0;
  for (int i = 1; i + 1 < nn; ++i) {
    const double r = p.mesh.nodes[i];
    const double hm = p.mesh.nodes[i] - p.mesh.nodes[i - 1];
    const double hp = p.mesh.nodes[i + 1] - p.mesh.nodes[i];
    if (r < 4.0 * std::max(hm, hp)) continue;
    const double d2u = 2.0 * ((p.u[i + 1] - p.u[i]) / hp - (p.u[i] - p.u[i - 1]) / hm) / (hm + hp);
    const double d2v = 2.0 * ((p.v[i + 1] - p.v[i]) / hp - (p.v[i] - p.v[i - 1]) / hm) / (hm + hp);
    const double du1 = (p.u[i + 1] - p.u[i - 1]) / (hm + hp);
    const double dv1 = (p.v[i + 1] - p.v[i - 1]) / (hm + hp);
    double hq, gq;
    bulk_grad(p.params, p.u[i], p.v[i], hq, gq);
    const double ru = d2u + du1 / r - k2 / (r * r) * p.u[i] - hq;
    const double rv = d2v + dv1 / r - gq;
    max_res = std::max({max_res, std::abs(ru), std::abs(rv)});
  }
  rep.max_residual = max_res / fscale;

  if (p.mesh.domain.kind == Domain::Kind::WholePlane) {
    rep.asymptotics_checked = true;
    const AsymptoticCoeffs ac = asymptotic_coeffs(p.params);
    const double lo = p.mesh.r_eff / 4.0, hi = p.mesh.r_eff / 2.0;
    double suu = 0.0, suy = 0.0, svy = 0.0;
    for (int i = 0; i < nn; ++i) {
      const double r = p.mesh.nodes[i];
      if (r < lo || r > hi) continue;
      const double basis = 1.0 / (r * r);
      const double uval = p.refined ? p.refined->u(r) : p.u[i];
      const double vval = p.refined ? p.refined->v(r) : p.v[i];
      suu += basis * basis;
      suy += basis * (uval - bc.u_star);
      svy += basis * (vval - bc.v_star);
    }
    rep.p1_hat = suu > 0.0 ? suy / suu : 0.0;
    rep.q1_hat = suu > 0.0 ? svy / suu : 0.0;
    rep.p1_rel_err = std::abs(rep.p1_hat - ac.p1) / std::abs(ac.p1);
    rep.q1_rel_err = ac.q1 != 0.0 ? std::abs(rep.q1_hat - ac.q1) / std::abs(ac.q1) : 0.0;
  }
  return rep;
}

}  // namespace defectlab
