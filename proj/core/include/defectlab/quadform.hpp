#pragma once

#include <functional>
#include <string>
#include <vector>

#include "defectlab/banded.hpp"
#include "defectlab/mesh.hpp"

namespace defectlab {

enum class MassKind { L2, HardyWeighted };

struct ComponentSpec {
  std::string name;
  bool fixed_at_origin = true;
};

// Radial quadratic form over several coupled scalar components:
//   sum_c grad[c] (w_c')^2  +  sum_{c,d} pot[c*n+d] w_c w_d,   integrated r dr.
// The callback fills grad and the symmetric pot matrix at a radius, including
// any 1/r^2 couplings; quadrature points never sit at r = 0.
struct QuadFormSpec {
  std::string label;
  std::vector<ComponentSpec> components;
  std::function<void(double r, double* grad, double* pot)> coefficients;
};

// Quadratic Lagrange elements on the radial mesh (vertices plus midpoints).
// Essential constraints: fixed components at r = 0, every component at r_eff.
class QuadForm {
 public:
  QuadForm(const RadialMesh& mesh, const QuadFormSpec& spec, MassKind mass_kind);

  const BandedSym& stiffness() const { return stiffness_; }
  const BandedSym& mass() const { return mass_; }
  const std::string& label() const { return label_; }
  MassKind mass_kind() const { return mass_kind_; }

  int n_components() const { return static_cast<int>(components_.size()); }
  const std::vector<ComponentSpec>& components() const { return components_; }
  int n_points() const { return n_points_; }
  double point_radius(int p) const;
  int free_index(int point, int comp) const;  // -1 when constrained
  int n_free() const { return n_free_; }

  // Fill a reduced coefficient vector by sampling per-component functions at
  // the element points; constrained slots are dropped.
  std::vector<double> project(
      const std::vector<std::function<double(double)>>& fns) const;

  // Scatter a reduced vector back to per-component point arrays (zeros at
  // constrained slots).
  std::vector<std::vector<double>> expand(const std::vector<double>& x) const;

  double rayleigh(const std::vector<double>& x) const;

  const RadialMesh& mesh() const { return *mesh_; }

 private:
  const RadialMesh* mesh_;
  std::string label_;
  std::vector<ComponentSpec> components_;
  MassKind mass_kind_;
  int n_points_ = 0;
  int n_free_ = 0;
  std::vector<int> free_index_;
  BandedSym stiffness_;
  BandedSym mass_;
};

// Quadratic interpolation of per-point values (as produced by expand) at an
// arbitrary radius.
double eval_point_values(const RadialMesh& mesh, const std::vector<double>& values,
                         double r);

}  // namespace defectlab
