#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace defectlab {

struct GaussRule {
  std::vector<double> x;  // nodes on (-1, 1)
  std::vector<double> w;  // weights, sum = 2
};

// Legendre-Gauss rule, exact for polynomials of degree 2n-1.
const GaussRule& gauss_rule(int n);

// Quadrature points of a composite rule over [breaks.front(), breaks.back()].
struct CompositeQuad {
  std::vector<double> r;
  std::vector<double> w;
};
CompositeQuad composite_gauss(const std::vector<double>& breaks, int points_per_cell);

// Fixed pairwise-tree reduction; result is independent of how terms were produced
// (used where bit-stable parallel sums are required).
double pairwise_sum(const std::vector<double>& terms);

// Piecewise-linear interpolation helpers on an ascending node vector.
int find_cell(const std::vector<double>& nodes, double r);
double interp_p1(const std::vector<double>& nodes, const std::vector<double>& values, double r);
double interp_p1_slope(const std::vector<double>& nodes, const std::vector<double>& values,
                       double r);

// Composite-Gauss integral of f over the breaks with a pairwise-stable total.
double integrate_breaks(const std::vector<double>& breaks, int points_per_cell,
                        const std::function<double(double)>& f);

// Thread budget: min(hardware, DEFECTLAB_THREADS if set, cap if > 0).
int thread_budget(int cap = 0);

// Runs fn(begin, end) over [0, n) split in contiguous blocks on up to thread_budget(cap) threads.
void parallel_blocks(int n, int cap, const std::function<void(int, int)>& fn);

}  // namespace defectlab
