#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/fem.hpp"
#include "defectlab/mesh.hpp"
#include "defectlab/radial_solver.hpp"

using namespace defectlab;

namespace {

// Independent oracle: two-sided shooting on the strong ODE pair with RK4 and a
// dense 4x4 Newton on (alpha, beta, gamma, delta) = (core slope coefficient,
// v(0), u'(R), v'(R)). No finite-element machinery is involved.
struct ShootingOracle {
  ModelParams p;
  double r_match = 10.0;
  double r0 = 1e-3;
  double R = 20.0;
  double u_b = 0.0, v_b = 0.0;

  using State = std::array<double, 4>;  // u, u', v, v'

  State rhs(double r, const State& y) const {
    const double k2 = static_cast<double>(p.k) * p.k;
    double h, g;
    bulk_grad(p, y[0], y[2], h, g);
    return {y[1], -y[1] / r + k2 * y[0] / (r * r) + h, y[3], -y[3] / r + g};
  }

  State rk4(double a, double b, int nsteps, State y) const {
    const double h = (b - a) / nsteps;
    double r = a;
    for (int s = 0; s < nsteps; ++s) {
      // Far off the connecting orbit the cubic terms blow up in finite time;
      // freeze such trajectories so the Newton line search rejects the step.
      for (double yi : y)
        if (!std::isfinite(yi) || std::abs(yi) > 50.0) return {1e6, 1e6, 1e6, 1e6};
      const State k1 = rhs(r, y);
      State t;
      for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5 * h * k1[i];
      const State k2 = rhs(r + 0.5 * h, t);
      for (int i = 0; i < 4; ++i) t[i] = y[i] + 0.5 * h * k2[i];
      const State k3 = rhs(r + 0.5 * h, t);
      for (int i = 0; i < 4; ++i) t[i] = y[i] + h * k3[i];
      const State k4 = rhs(r + h, t);
      for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      r += h;
    }
    return y;
  }

  // Series start at r0: u = alpha r^ka (1 + c r^2), v = beta + g0 r^2 / 4.
  State left_state(double alpha, double beta) const {
    const int ka = std::abs(p.k);
    double h0, g0;
    bulk_grad(p, 0.0, beta, h0, g0);
    // A(0, beta) read off from the u-equation coefficient at u -> 0.
    const double eps = 1e-7;
    double he, ge;
    bulk_grad(p, eps, beta, he, ge);
    const double au = he / eps;
    const double c = au / (4.0 * ka + 4.0);
    const double rk = std::pow(r0, ka);
    State y;
    y[0] = alpha * rk * (1.0 + c * r0 * r0);
    y[1] = alpha * (ka * rk / r0 * (1.0 + c * r0 * r0) + rk * 2.0 * c * r0);
    y[2] = beta + 0.25 * g0 * r0 * r0;
    y[3] = 0.5 * g0 * r0;
    return y;
  }

  std::array<double, 4> mismatch(const std::array<double, 4>& x, int n_left, int n_right) const {
    const State yl = rk4(r0, r_match, n_left, left_state(x[0], x[1]));
    const State yr = rk4(R, r_match, n_right, State{u_b, x[2], v_b, x[3]});
    return {yl[0] - yr[0], yl[1] - yr[1], yl[2] - yr[2], yl[3] - yr[3]};
  }

  // Returns (alpha, beta, gamma, delta); fails the test on Newton breakdown.
  std::array<double, 4> solve(std::array<double, 4> x, double s_plus) const {
    const int n_left = 50000, n_right = 50000;
    auto norm = [](const std::array<double, 4>& f) {
      return std::max(std::max(std::abs(f[0]), std::abs(f[1])),
                      std::max(std::abs(f[2]), std::abs(f[3])));
    };
    std::array<double, 4> f = mismatch(x, n_left, n_right);
    for (int it = 0; it < 25; ++it) {
      if (norm(f) <= 1e-11 * s_plus) return x;
      double jac[4][4];
      for (int j = 0; j < 4; ++j) {
        std::array<double, 4> xp = x;
        const double eps = 1e-7 * std::max(1.0, std::abs(x[j]));
        xp[j] += eps;
        const std::array<double, 4> fp = mismatch(xp, n_left, n_right);
        for (int i = 0; i < 4; ++i) jac[i][j] = (fp[i] - f[i]) / eps;
      }
      std::array<double, 4> d = f;
      for (int c = 0; c < 4; ++c) {  // partial pivoting
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
          if (std::abs(jac[r][c]) > std::abs(jac[piv][c])) piv = r;
        std::swap(jac[c], jac[piv]);
        std::swap(d[c], d[piv]);
        for (int r = c + 1; r < 4; ++r) {
          const double fac = jac[r][c] / jac[c][c];
          for (int j = c; j < 4; ++j) jac[r][j] -= fac * jac[c][j];
          d[r] -= fac * d[c];
        }
      }
      for (int r = 3; r >= 0; --r) {
        for (int j = r + 1; j < 4; ++j) d[r] -= jac[r][j] * d[j];
        d[r] /= jac[r][r];
      }
      double t = 1.0;
      for (int ls = 0; ls < 8; ++ls) {
        std::array<double, 4> xt = x;
        for (int i = 0; i < 4; ++i) xt[i] -= t * d[i];
        const std::array<double, 4> ft = mismatch(xt, n_left, n_right);
        if (norm(ft) < norm(f)) {
          x = xt;
          f = ft;
          break;
        }
        t *= 0.5;
      }
    }
    REQUIRE(norm(f) <= 1e-10 * s_plus);
    return x;
  }

  double u_at(double r, const std::array<double, 4>& x) const {
    if (r <= r_match) return rk4(r0, r, 30000, left_state(x[0], x[1]))[0];
    return rk4(R, r, 30000, State{u_b, x[2], v_b, x[3]})[0];
  }
  double v_at(double r, const std::array<double, 4>& x) const {
    if (r <= r_match) return rk4(r0, r, 30000, left_state(x[0], x[1]))[2];
    return rk4(R, r, 30000, State{u_b, x[2], v_b, x[3]})[2];
  }
};

Profile solve_disk(const ModelParams& p, double radius, int n, bool polish = true) {
  SolveOptions opts;
  opts.polish = polish;
  return solve_profile(p, build_mesh(p, Domain::disk(radius), n, Grading::geometric(1.5)), opts);
}

}  // namespace

TEST_CASE("finite-element profile matches the shooting oracle") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const BulkConstants bc = bulk_constants(p);
  const Profile prof = solve_disk(p, 20.0, 1500);

  ShootingOracle oracle;
  oracle.p = p;
  oracle.u_b = prof.u_boundary;
  oracle.v_b = prof.v_boundary;
  // Seed near the finite-element answer; the converged point is fixed by the
  // matching equations alone.
  const auto x = oracle.solve(
      {prof.eval_du(0.0), prof.eval_v(0.0), prof.eval_du(20.0), prof.eval_dv(20.0)}, bc.s_plus);

  // Regression anchors for the oracle itself.
  CHECK(x[0] == doctest::Approx(0.636305).epsilon(2e-5));
  CHECK(x[1] == doctest::Approx(-0.731422).epsilon(2e-5));

  for (double r : {0.3, 1.0, 1.9, 2.5, 5.0, 12.0}) {
    CHECK(std::abs(prof.eval_u(r) - oracle.u_at(r, x)) <= 1e-6 * bc.s_plus);
    CHECK(std::abs(prof.eval_v(r) - oracle.v_at(r, x)) <= 1e-6 * bc.s_plus);
  }
  CHECK(std::abs(prof.eval_du(0.0) - x[0]) <= 1e-5 * bc.s_plus);
}

TEST_CASE("profile bounds and monotonicity across regimes and windings") {
  for (double b2 : {0.6, std::sqrt(3.0), 2.6}) {
    for (int k : {1, -1, 2, 3}) {
      const ModelParams p{1.0, b2, 1.0, k};
      const Profile prof = solve_disk(p, 20.0, 800);
      const DiagnosticsReport d = diagnose(prof);
      CAPTURE(b2);
      CAPTURE(k);
      CHECK(d.box_bounds_ok);
      CHECK(d.sign_ok);
      CHECK(d.sqrt3_bound_ok);
      CHECK(d.core_resolution_ok);
      CHECK(d.monotonicity.u_ok);
      CHECK(d.monotonicity.v_ok);
      CHECK_FALSE(prof.used_flow_fallback);
    }
  }
}

TEST_CASE("critical regime locks v to the far-field constant") {
  const ModelParams p{1.0, std::sqrt(3.0), 1.0, 1};
  const BulkConstants bc = bulk_constants(p);
  const Profile prof = solve_disk(p, 20.0, 1200);
  double dev = 0.0;
  for (double vi : prof.v) dev = std::max(dev, std::abs(vi - bc.v_star));
  CHECK(dev <= 1e-9 * bc.s_plus);
  CHECK(diagnose(prof).critical_v_deviation <= 1e-9 * bc.s_plus);
}

TEST_CASE("nodal convergence is second order") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile ref = solve_disk(p, 20.0, 3000);
  std::vector<double> errs;
  for (int n : {250, 500, 1000}) {
    SolveOptions opts;
    opts.polish = false;
    const Profile prof =
        solve_profile(p, build_mesh(p, Domain::disk(20.0), n, Grading::uniform()), opts);
    // Max-norm over a fixed sample set, so the in-element probe position does
    // not bias the rate between resolutions.
    double err = 0.0;
    for (int s = 0; s < 400; ++s) {
      const double r = 0.5 + (15.0 - 0.5) * s / 399.0;
      err = std::max(err, std::abs(interp_p1(prof.mesh.nodes, prof.u, r) - ref.eval_u(r)));
      err = std::max(err, std::abs(interp_p1(prof.mesh.nodes, prof.v, r) - ref.eval_v(r)));
    }
    errs.push_back(err);
  }
  const double rate1 = std::log2(errs[0] / errs[1]);
  const double rate2 = std::log2(errs[1] / errs[2]);
  CHECK(rate1 >= 1.7);
  CHECK(rate2 >= 1.7);
  CHECK(rate1 <= 2.6);
}

TEST_CASE("solves are deterministic") {
  const ModelParams p{0.7, 1.4, 0.9, 2};
  const Profile a = solve_disk(p, 15.0, 700);
  const Profile b = solve_disk(p, 15.0, 700);
  REQUIRE(a.n_nodes() == b.n_nodes());
  for (int i = 0; i < a.n_nodes(); ++i) {
    CHECK(a.u[i] == b.u[i]);
    CHECK(a.v[i] == b.v[i]);
  }
  CHECK(a.energy == b.energy);
}

TEST_CASE("whole-plane far-field coefficients are recovered within five percent") {
  for (double b2 : {0.6, 2.8}) {
    const ModelParams p{1.0, b2, 1.0, 1};
    SolveOptions opts;
    const RadialMesh mesh = build_mesh(p, Domain::whole_plane(), 2000, Grading::geometric(1.5),
                                       60.0);
    const Profile prof = solve_profile(p, mesh, opts);
    const DiagnosticsReport d = diagnose(prof);
    CAPTURE(b2);
    REQUIRE(d.asymptotics_checked);
    CHECK(d.p1_rel_err <= 0.05);
    CHECK(d.q1_rel_err <= 0.05);
    const AsymptoticCoeffs ac = asymptotic_coeffs(p);
    CHECK(d.q1_hat * ac.q1 > 0.0);
  }
}

TEST_CASE("initial guess respects the boundary data") {
  const ModelParams p{1.0, 2.0, 1.0, 2};
  const RadialMesh mesh = build_mesh(p, Domain::disk(12.0), 300, Grading::geometric(1.5));
  const auto [u0, v0] = initial_guess(p, mesh);
  const Profile prof = solve_profile(p, mesh);
  CHECK(u0.front() == 0.0);
  CHECK(u0.back() == doctest::Approx(prof.u_boundary).epsilon(1e-12));
  CHECK(v0.back() == doctest::Approx(prof.v_boundary).epsilon(1e-12));
  const BulkConstants bc = bulk_constants(p);
  for (double ui : u0) CHECK(ui >= 0.0);
  for (double vi : v0) CHECK(vi <= 1e-12 * bc.s_plus);
}

TEST_CASE("energy is mesh-stable and boundary values sit at the far field") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const BulkConstants bc = bulk_constants(p);
  const Profile a = solve_disk(p, 20.0, 1000);
  const Profile b = solve_disk(p, 20.0, 2000);
  CHECK(std::abs(a.energy - b.energy) <= 1e-3 * std::abs(b.energy));
  CHECK(a.u_boundary == doctest::Approx(bc.u_star).epsilon(1e-12));
  CHECK(a.v_boundary == doctest::Approx(bc.v_star).epsilon(1e-12));
  CHECK(a.residual_norm <= 1e-10);
}
