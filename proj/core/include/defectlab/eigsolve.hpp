#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defectlab/quadform.hpp"

namespace defectlab {

struct SpectrumOptions {
  // Spectral shift for the inverse iteration; defaults to a small negative
  // multiple of the pencil scale so indefinite forms still factor.
  std::optional<double> shift;
  int max_iterations = 400;
  double tol = 1e-11;
  int extra_block = 3;
  std::uint64_t seed = 0x5eedULL;
  int dense_fallback_max = 512;
};

struct SpectrumResult {
  std::string label;
  std::vector<double> eigenvalues;           // ascending
  std::vector<std::vector<double>> vectors;  // reduced coordinates, M-orthonormal
  std::vector<double> residuals;             // ||A x - lambda M x||_2 / ||x||_2
  bool converged = false;
  int iterations = 0;
};

// Lowest eigenpairs of stiffness(x) = lambda mass(x) on the constrained space.
SpectrumResult lowest_spectrum(const QuadForm& form, int count,
                               const SpectrumOptions& opts = {});

}  // namespace defectlab
