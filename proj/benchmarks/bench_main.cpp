#include <benchmark/benchmark.h>

#include "defectlab/eigsolve.hpp"
#include "defectlab/field2d.hpp"
#include "defectlab/mesh.hpp"
#include "defectlab/modes.hpp"
#include "defectlab/radial_solver.hpp"
#include "defectlab/stability.hpp"

namespace {

using namespace defectlab;

const ModelParams kParams{1.0, 1.0, 1.0, 1};

Profile solved(int n_elements) {
  return solve_profile(
      kParams, build_mesh(kParams, Domain::disk(20.0), n_elements, Grading::geometric(1.5)));
}

void BM_SolveProfile(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const RadialMesh mesh = build_mesh(kParams, Domain::disk(20.0), n, Grading::geometric(1.5));
  for (auto _ : state) {
    Profile prof = solve_profile(kParams, mesh);
    benchmark::DoNotOptimize(prof.residual_norm);
  }
}
BENCHMARK(BM_SolveProfile)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ModeSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Profile prof = solved(n);
  for (auto _ : state) {
    const QuadForm form = assemble_Pm(prof, 2);
    const SpectrumResult sp = lowest_spectrum(form, 1);
    benchmark::DoNotOptimize(sp.eigenvalues[0]);
  }
}
BENCHMARK(BM_ModeSpectrum)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SecondVariation2D(benchmark::State& state) {
  const int n_phi = static_cast<int>(state.range(0));
  const Profile prof = solved(400);
  const QTensorField q = reconstruct_Q(prof, n_phi);
  const PerturbationField pf = random_perturbation(q.radii, n_phi, 12, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(L_direct(q, pf, kParams));
  }
}
BENCHMARK(BM_SecondVariation2D)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
