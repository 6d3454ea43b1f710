#include "defectlab/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace defectlab {

namespace {

GaussRule make_gauss(int n) {
  // Newton iteration on Legendre polynomials from the Chebyshev initial guess.
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[n - 1 - i] = x;
    rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

CompositeQuad composite_gauss(const std::vector<double>& breaks, int points_per_cell) {
  const GaussRule& g = gauss_rule(points_per_cell);
  CompositeQuad q;
  const int cells = static_cast<int>(breaks.size()) - 1;
  q.r.reserve(cells * points_per_cell);
  q.w.reserve(cells * points_per_cell);
  for (int e = 0; e < cells; ++e) {
    const double mid = 0.5 * (breaks[e] + breaks[e + 1]);
    const double half = 0.5 * (breaks[e + 1] - breaks[e]);
    for (int j = 0; j < points_per_cell; ++j) {
      q.r.push_back(mid + half * g.x[j]);
      q.w.push_back(half * g.w[j]);
    }
  }
  return q;
}

double pairwise_sum(const std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> level(terms);
  while (level.size() > 1) {
    const std::size_t half = level.size() / 2;
    std::vector<double> next(half + (level.size() & 1));
    for (std::size_t i = 0; i < half; ++i) next[i] = level[2 * i] + level[2 * i + 1];
    if (level.size() & 1) next[half] = level.back();
    level.swap(next);
  }
  return level[0];
}

int find_cell(const std::vector<double>& nodes, double r) {
  if (r <= nodes.front()) return 0;
  if (r >= nodes.back()) return static_cast<int>(nodes.size()) - 2;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  return static_cast<int>(it - nodes.begin()) - 1;
}

double interp_p1(const std::vector<double>& nodes, const std::vector<double>& values, double r) {
  const int e = find_cell(nodes, r);
  const double h = nodes[e + 1] - nodes[e];
  const double t = h > 0.0 ? (r - nodes[e]) / h : 0.0;
  return (1.0 - t) * values[e] + t * values[e + 1];
}

double interp_p1_slope(const std::vector<double>& nodes, const std::vector<double>& values,
                       double r) {
  const int e = find_cell(nodes, r);
  return (values[e + 1] - values[e]) / (nodes[e + 1] - nodes[e]);
}

double integrate_breaks(const std::vector<double>& breaks, int points_per_cell,
                        const std::function<double(double)>& f) {
  const CompositeQuad q = composite_gauss(breaks, points_per_cell);
  std::vector<double> terms(q.r.size());
  for (std::size_t i = 0; i < q.r.size(); ++i) terms[i] = q.w[i] * f(q.r[i]);
  return pairwise_sum(terms);
}

int thread_budget(int cap) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("DEFECTLAB_THREADS")) {
    const int lim = std::atoi(env);
    if (lim >= 1) n = std::min(n, lim);
  }
  if (cap > 0) n = std::min(n, cap);
  return n;
}

void parallel_blocks(int n, int cap, const std::function<void(int, int)>& fn) {
  const int workers = std::min(thread_budget(cap), std::max(1, n));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace defectlab
