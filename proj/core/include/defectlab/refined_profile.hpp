#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "defectlab/model.hpp"

namespace defectlab {

struct RefineOptions {
  int elements = 80;
  int degree = 12;
  double newton_tol = 1e-12;  // on the scaled Newton update
  int max_newton = 40;
  double residual_tol = 1e-8;  // accepted scaled strong residual
  int max_refine = 2;          // element-doubling passes if the residual stays above tol
};

// Piecewise-Chebyshev collocation representation of a converged profile pair.
// u is carried as r^|k| * w(r), which makes the origin a regular point, so the
// stored derivatives satisfy the strong equations pointwise to ~1e-11. Identity
// certificates and form coefficients read the profile through this class.
class RefinedProfile {
 public:
  double u(double r) const;
  double du(double r) const;
  double d2u(double r) const;
  double v(double r) const;
  double dv(double r) const;
  double d2v(double r) const;

  // max over off-collocation samples of the strong residual, scaled by the bulk force scale
  double strong_residual() const { return residual_; }
  const std::vector<double>& breaks() const { return breaks_; }
  int degree() const { return degree_; }

  // u_init/v_init seed Newton (typically the finite-element interpolant).
  static std::shared_ptr<const RefinedProfile> fit(
      const ModelParams& params, double r_eff, double u_boundary, double v_boundary,
      const std::function<double(double)>& u_init, const std::function<double(double)>& v_init,
      const RefineOptions& opts = {});

 private:
  struct Elem {
    std::vector<double> w, dw, d2w;  // values at the element's Chebyshev-Lobatto nodes
    std::vector<double> v, dv, d2v;
  };

  int k_abs_ = 1;
  int degree_ = 12;
  double residual_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> ref_nodes_;  // Lobatto nodes on [-1,1], ascending
  std::vector<double> ref_bw_;     // barycentric weights
  std::vector<Elem> elems_;

  double eval(double r, int which) const;  // 0..5: w,dw,d2w,v,dv,d2v
};

}  // namespace defectlab
