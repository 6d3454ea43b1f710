#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "defectlab/errors.hpp"
#include "defectlab/mesh.hpp"
#include "defectlab/modes.hpp"
#include "defectlab/radial_solver.hpp"

using namespace defectlab;

namespace {

Profile solve_disk(const ModelParams& p, double radius, int n) {
  return solve_profile(p, build_mesh(p, Domain::disk(radius), n, Grading::geometric(1.5)));
}

double pencil_scale(const ModelParams& p) {
  const BulkConstants bc = bulk_constants(p);
  return p.a2 + p.b2 * bc.s_plus + p.c2 * bc.s_plus * bc.s_plus;
}

std::vector<double> compact_random(const RadialMesh& mesh, std::mt19937_64& rng,
                                   double decay = 0.15) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> s(mesh.nodes.size(), 0.0);
  for (std::size_t i = 2; i + 2 < mesh.nodes.size(); ++i)
    s[i] = unif(rng) * std::exp(-decay * mesh.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("mode spectra stay nonnegative for unit winding across regimes") {
  for (double b2 : {0.8, std::sqrt(3.0), 2.4}) {
    const ModelParams p{1.0, b2, 1.0, 1};
    const Profile prof = solve_disk(p, 20.0, 500);
    const double scale = pencil_scale(p);
    for (int m = 0; m <= 5; ++m) {
      const SpectrumResult sp = lowest_spectrum(assemble_Pm(prof, m), 1);
      REQUIRE(sp.converged);
      CAPTURE(b2);
      CAPTURE(m);
      CHECK(sp.eigenvalues[0] >= -1e-8 * scale);
    }
  }
}

TEST_CASE("mode eigenvalues are nondecreasing in m beyond the kernel modes") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 500);
  double prev = -1e300;
  for (int m = 2; m <= 6; ++m) {
    const SpectrumResult sp = lowest_spectrum(assemble_Pm(prof, m), 1);
    REQUIRE(sp.converged);
    CHECK(sp.eigenvalues[0] >= prev - 1e-10);
    prev = sp.eigenvalues[0];
  }
}

TEST_CASE("m = 0 value splits into the radial pair form plus a derivative square") {
  const ModelParams p{1.0, 1.2, 0.9, 1};
  const Profile prof = solve_disk(p, 20.0, 500);
  std::mt19937_64 rng(5);
  for (int draw = 0; draw < 40; ++draw) {
    std::vector<double> w0 = compact_random(prof.mesh, rng);
    std::vector<double> w1 = compact_random(prof.mesh, rng);
    std::vector<double> w2 = compact_random(prof.mesh, rng);
    const double whole = pm_value(prof, 0, w0, w1, w2);
    const auto [radial_part, w2_part] = split_P0(prof, w0, w1, w2);
    CHECK(std::abs(whole - (radial_part + w2_part)) <= 1e-9 * (1.0 + std::abs(whole)));
    CHECK(w2_part >= 0.0);
  }
}

TEST_CASE("hardy split reassembles the factor value with a nonnegative rewrite") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 500);
  std::mt19937_64 rng(17);
  for (int m : {1, 2, 3}) {
    CAPTURE(m);
    for (int draw = 0; draw < 25; ++draw) {
      HardyFactors f;
      f.eta = compact_random(prof.mesh, rng);
      f.xi = compact_random(prof.mesh, rng);
      f.zeta = compact_random(prof.mesh, rng);
      const double lhs = pm_value_factors(prof, m, f);
      const HardySplit split = hardy_split_Jm_Im(prof, m, f);
      CHECK(std::abs(lhs - (split.j_m + split.i_m)) <= 1e-8 * (1.0 + std::abs(lhs)));
      CHECK(std::abs(split.i_m - split.sos_i_m) <= 1e-8 * (1.0 + std::abs(split.i_m)));
      CHECK(split.sos_i_m >= 0.0);
      CHECK(split.j_m >= 0.0);
    }
  }
}

TEST_CASE("hardy split rejects unsupported inputs") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 12.0, 300);
  HardyFactors f;
  f.eta.assign(prof.n_nodes(), 0.0);
  f.xi.assign(prof.n_nodes(), 0.0);
  f.zeta.assign(prof.n_nodes(), 0.0);
  CHECK_THROWS_AS(hardy_split_Jm_Im(prof, 0, f), std::invalid_argument);

  const ModelParams p2{1.0, 1.0, 1.0, 2};
  const Profile prof2 = solve_disk(p2, 12.0, 300);
  HardyFactors f2;
  f2.eta.assign(prof2.n_nodes(), 0.0);
  f2.xi.assign(prof2.n_nodes(), 0.0);
  f2.zeta.assign(prof2.n_nodes(), 0.0);
  CHECK_THROWS_AS(hardy_split_Jm_Im(prof2, 1, f2), std::invalid_argument);

  const ModelParams pc{1.0, std::sqrt(3.0), 1.0, 1};
  const Profile profc = solve_disk(pc, 12.0, 300);
  HardyFactors fc;
  fc.eta.assign(profc.n_nodes(), 0.0);
  fc.xi.assign(profc.n_nodes(), 0.0);
  fc.zeta.assign(profc.n_nodes(), 0.0);
  CHECK_THROWS_AS(hardy_split_Jm_Im(profc, 1, fc), CriticalRegimeError);
}

TEST_CASE("translation direction sits near the bottom of the m = 1 form") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const double v15 = kernel_check_m1(solve_disk(p, 15.0, 400));
  const double v30 = kernel_check_m1(solve_disk(p, 30.0, 700));
  CHECK(v15 > 0.0);
  CHECK(v30 > 0.0);
  // Truncation gap closes like 1/R^2.
  const double ratio = v15 / v30;
  CHECK(ratio >= 2.2);
  CHECK(ratio <= 7.0);
}

TEST_CASE("kernel check requires unit winding") {
  const ModelParams p{1.0, 1.0, 1.0, 2};
  const Profile prof = solve_disk(p, 12.0, 300);
  CHECK_THROWS_AS(kernel_check_m1(prof), std::invalid_argument);
}

TEST_CASE("out-of-plane pair forms are positive for unit winding") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 500);
  for (int n = -2; n <= 3; ++n) {
    const SpectrumResult sp = lowest_spectrum(assemble_V2_pair(prof, n), 1);
    REQUIRE(sp.converged);
    CAPTURE(n);
    CHECK(sp.eigenvalues[0] > 0.0);
  }
}

TEST_CASE("pair values dominate the pointwise lower bound") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 500);
  std::mt19937_64 rng(23);
  for (int n : {2, 3}) {
    CAPTURE(n);
    for (int draw = 0; draw < 25; ++draw) {
      const std::vector<double> xi_n = compact_random(prof.mesh, rng);
      const std::vector<double> xi_kn = compact_random(prof.mesh, rng);
      const auto [lhs, rhs] = v2_lower_bound_check(prof, n, xi_n, xi_kn);
      CHECK(rhs > 0.0);
      CHECK(lhs + 1e-10 * (1.0 + std::abs(lhs)) >= rhs);
    }
  }
}

TEST_CASE("pair bound rejects small indices and non-unit winding") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 12.0, 300);
  const std::vector<double> z(prof.n_nodes(), 0.0);
  CHECK_THROWS_AS(v2_lower_bound_check(prof, 1, z, z), std::invalid_argument);

  const ModelParams p2{1.0, 1.0, 1.0, 3};
  const Profile prof2 = solve_disk(p2, 12.0, 300);
  const std::vector<double> z2(prof2.n_nodes(), 0.0);
  CHECK_THROWS_AS(v2_lower_bound_check(prof2, 2, z2, z2), std::invalid_argument);
}

TEST_CASE("direct quadrature agrees with the nodal engine on matching backgrounds") {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  const Profile prof = solve_disk(p, 20.0, 800);
  std::mt19937_64 rng(31);
  for (int m : {0, 1, 2}) {
    std::vector<double> w0 = compact_random(prof.mesh, rng);
    std::vector<double> w1 = compact_random(prof.mesh, rng);
    std::vector<double> w2 = compact_random(prof.mesh, rng);
    const double direct = pm_value(prof, m, w0, w1, w2);
    const double nodal = pm_value_nodal(prof.mesh.nodes, p, m, prof.u, prof.v, w0, w1, w2);
    CAPTURE(m);
    CHECK(std::abs(direct - nodal) <= 2e-3 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("instability scan flags the double winding and clears unit winding") {
  const ModelParams bad{1.0, 1.0, 1.0, 2};
  const RadialMesh mesh =
      build_mesh(bad, Domain::whole_plane(), 900, Grading::geometric(1.5), 60.0);
  const InstabilityScan scan = instability_search(bad, mesh);
  CHECK(scan.found_negative);
  CHECK(scan.lambda_min < 0.0);

  const ModelParams good{1.0, 1.0, 1.0, 1};
  const RadialMesh mesh1 =
      build_mesh(good, Domain::whole_plane(), 900, Grading::geometric(1.5), 60.0);
  const InstabilityScan scan1 = instability_search(good, mesh1);
  CHECK_FALSE(scan1.found_negative);
}
