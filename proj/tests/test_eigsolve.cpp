#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "defectlab/eigsolve.hpp"
#include "defectlab/mesh.hpp"
#include "defectlab/quadform.hpp"

using namespace defectlab;

namespace {

// Dirichlet Laplacian on the unit disk, axisymmetric sector: eigenvalues are
// the squared zeros of the Bessel function J0.
constexpr double kJ0Zero1Sq = 5.783185962946785;
constexpr double kJ0Zero2Sq = 30.471262343662087;
constexpr double kJ0Zero3Sq = 74.88700679069543;

QuadForm disk_laplacian(const RadialMesh& mesh) {
  QuadFormSpec spec;
  spec.label = "disk laplacian";
  spec.components = {{"w", false}};
  spec.coefficients = [](double, double* grad, double* pot) {
    grad[0] = 1.0;
    pot[0] = 0.0;
  };
  return QuadForm(mesh, spec, MassKind::L2);
}

RadialMesh unit_disk(int ne) {
  const ModelParams p{1.0, 1.0, 1.0, 1};
  return build_mesh(p, Domain::disk(1.0), ne, Grading::uniform());
}

}  // namespace

TEST_CASE("lowest eigenvalues match the squared bessel zeros") {
  const RadialMesh mesh = unit_disk(160);
  const QuadForm form = disk_laplacian(mesh);
  const SpectrumResult sp = lowest_spectrum(form, 3);

  REQUIRE(sp.converged);
  REQUIRE(sp.eigenvalues.size() == 3);
  CHECK(sp.eigenvalues[0] == doctest::Approx(kJ0Zero1Sq).epsilon(1e-7));
  CHECK(sp.eigenvalues[1] == doctest::Approx(kJ0Zero2Sq).epsilon(1e-6));
  CHECK(sp.eigenvalues[2] == doctest::Approx(kJ0Zero3Sq).epsilon(1e-5));
  for (double r : sp.residuals) CHECK(r <= 1e-8 * sp.eigenvalues.back());
  CHECK(sp.eigenvalues[0] < sp.eigenvalues[1]);
  CHECK(sp.eigenvalues[1] < sp.eigenvalues[2]);
}

TEST_CASE("eigenvalue error decreases under refinement") {
  double coarse = 0.0, fine = 0.0;
  {
    const QuadForm form = disk_laplacian(unit_disk(40));
    coarse = std::abs(lowest_spectrum(form, 1).eigenvalues[0] - kJ0Zero1Sq);
  }
  {
    const QuadForm form = disk_laplacian(unit_disk(80));
    fine = std::abs(lowest_spectrum(form, 1).eigenvalues[0] - kJ0Zero1Sq);
  }
  CHECK(fine < coarse);
  // Quadratic elements converge like h^4 for eigenvalues.
  CHECK(std::log2(coarse / fine) >= 3.0);
}

TEST_CASE("rayleigh quotient of a returned vector equals its eigenvalue") {
  const QuadForm form = disk_laplacian(unit_disk(100));
  const SpectrumResult sp = lowest_spectrum(form, 2);
  REQUIRE(sp.converged);
  for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i) {
    CHECK(form.rayleigh(sp.vectors[i]) ==
          doctest::Approx(sp.eigenvalues[i]).epsilon(1e-10));
  }
}

TEST_CASE("indefinite pencils are handled by marching the shift") {
  // Subtract a constant so the lowest eigenvalue is negative; the default
  // small negative shift no longer factors and must be lowered internally.
  const RadialMesh mesh = unit_disk(120);
  QuadFormSpec spec;
  spec.label = "shifted laplacian";
  spec.components = {{"w", false}};
  spec.coefficients = [](double, double* grad, double* pot) {
    grad[0] = 1.0;
    pot[0] = -20.0;
  };
  const QuadForm form(mesh, spec, MassKind::L2);
  const SpectrumResult sp = lowest_spectrum(form, 2);
  REQUIRE(sp.converged);
  CHECK(sp.eigenvalues[0] == doctest::Approx(kJ0Zero1Sq - 20.0).epsilon(1e-7));
  CHECK(sp.eigenvalues[1] == doctest::Approx(kJ0Zero2Sq - 20.0).epsilon(1e-7));
  CHECK(sp.eigenvalues[0] < 0.0);
}

TEST_CASE("small problems agree with the dense fallback") {
  const RadialMesh mesh = unit_disk(30);  // 59 free dofs, below the dense cutoff
  const QuadForm form = disk_laplacian(mesh);

  SpectrumOptions dense_opts;
  dense_opts.dense_fallback_max = 4096;
  const SpectrumResult dense = lowest_spectrum(form, 3, dense_opts);

  SpectrumOptions iter_opts;
  iter_opts.dense_fallback_max = 0;
  const SpectrumResult iter = lowest_spectrum(form, 3, iter_opts);

  REQUIRE(dense.converged);
  REQUIRE(iter.converged);
  for (int i = 0; i < 3; ++i)
    CHECK(dense.eigenvalues[i] == doctest::Approx(iter.eigenvalues[i]).epsilon(1e-9));
}

TEST_CASE("results are independent of the seed") {
  const QuadForm form = disk_laplacian(unit_disk(90));
  SpectrumOptions a, b;
  a.seed = 1;
  b.seed = 999;
  const SpectrumResult sa = lowest_spectrum(form, 2, a);
  const SpectrumResult sb = lowest_spectrum(form, 2, b);
  REQUIRE(sa.converged);
  REQUIRE(sb.converged);
  CHECK(sa.eigenvalues[0] == doctest::Approx(sb.eigenvalues[0]).epsilon(1e-10));
  CHECK(sa.eigenvalues[1] == doctest::Approx(sb.eigenvalues[1]).epsilon(1e-10));
}
