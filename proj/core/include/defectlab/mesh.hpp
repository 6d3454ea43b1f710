#pragma once

#include <vector>

#include "defectlab/model.hpp"

namespace defectlab {

struct Domain {
  enum class Kind { Disk, WholePlane };
  Kind kind = Kind::Disk;
  double radius = 10.0;  // Disk only

  static Domain disk(double r) { return {Kind::Disk, r}; }
  static Domain whole_plane() { return {Kind::WholePlane, 0.0}; }
};

struct Grading {
  enum class Kind { Uniform, Geometric };
  Kind kind = Kind::Geometric;
  double ratio = 1.5;       // successive element size ratio, smallest at r = 0
  double span_cap = 1e3;    // stop grading once h_i/h_1 reaches this, continue uniformly

  static Grading uniform() { return {Kind::Uniform, 1.0, 1e3}; }
  static Grading geometric(double ratio, double span_cap = 1e3) {
    return {Kind::Geometric, ratio, span_cap};
  }
};

struct RadialMesh {
  std::vector<double> nodes;  // ascending, nodes.front() == 0
  double r_eff = 0.0;         // nodes.back()
  Domain domain;

  int n_elements() const { return static_cast<int>(nodes.size()) - 1; }
  double h(int e) const { return nodes[e + 1] - nodes[e]; }
};

// For WholePlane the truncation radius defaults to the smallest R with
// |p1|/R^2 <= 1e-3 s_plus; pass r_eff_override > 0 to pin it instead.
RadialMesh build_mesh(const ModelParams& params, const Domain& domain, int n_elements,
                      const Grading& grading, double r_eff_override = 0.0);

}  // namespace defectlab
