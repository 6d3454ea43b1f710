#include "defectlab/refined_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "defectlab/banded.hpp"
#include "defectlab/errors.hpp"
#include "defectlab/fem.hpp"

namespace defectlab {

namespace {

const double kSqrt6 = std::sqrt(6.0);

// Barycentric weights for Chebyshev-Lobatto nodes (ascending order).
std::vector<double> lobatto_weights(int p) {
  std::vector<double> w(p + 1);
  for (int j = 0; j <= p; ++j) w[j] = (j % 2 == 0) ? 1.0 : -1.0;
  w[0] *= 0.5;
  w[p] *= 0.5;
  return w;
}

std::vector<double> lobatto_nodes(int p) {  // on [-1, 1], ascending
  std::vector<double> x(p + 1);
  for (int j = 0; j <= p; ++j) x[j] = -std::cos(M_PI * j / p);
  x[0] = -1.0;
  x[p] = 1.0;
  return x;
}

// Dense differentiation matrix for the given nodes/barycentric weights.
std::vector<double> diff_matrix(const std::vector<double>& x, const std::vector<double>& bw) {
  const int n = static_cast<int>(x.size());
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dij = (bw[j] / bw[i]) / (x[i] - x[j]);
      d[static_cast<std::size_t>(i) * n + j] = dij;
      diag -= dij;
    }
    d[static_cast<std::size_t>(i) * n + i] = diag;
  }
  return d;
}

// Barycentric interpolation row at point t.
void bary_row(const std::vector<double>& x, const std::vector<double>& bw, double t,
              std::vector<double>& row) {
  const int n = static_cast<int>(x.size());
  row.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (t == x[j]) {
      row[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    row[j] = bw[j] / (t - x[j]);
    denom += row[j];
  }
  for (int j = 0; j < n; ++j) row[j] /= denom;
}

double bary_eval(const std::vector<double>& x, const std::vector<double>& bw,
                 const std::vector<double>& vals, double t) {
  const int n = static_cast<int>(x.size());
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dt = t - x[j];
    if (dt == 0.0) return vals[j];
    const double c = bw[j] / dt;
    num += c * vals[j];
    den += c;
  }
  return num / den;
}

struct Workspace {
  int p;
  std::vector<double> ref_nodes;   // [-1,1]
  std::vector<double> ref_bw;      // barycentric weights
  std::vector<double> d1;          // (p+1)^2 reference diff matrix
  std::vector<double> colloc;      // p-1 interior Gauss points on (-1,1)
  std::vector<std::vector<double>> c_val, c_d1, c_d2;  // rows at collocation points
};

Workspace make_workspace(int p) {
  Workspace ws;
  ws.p = p;
  ws.ref_nodes = lobatto_nodes(p);
  ws.ref_bw = lobatto_weights(p);
  ws.d1 = diff_matrix(ws.ref_nodes, ws.ref_bw);
  const GaussRule& g = gauss_rule(p - 1);
  ws.colloc = g.x;
  const int n = p + 1;
  std::vector<double> row;
  for (double t : ws.colloc) {
    bary_row(ws.ref_nodes, ws.ref_bw, t, row);
    ws.c_val.push_back(row);
    // first-derivative row: row * D, second: row * D^2
    std::vector<double> r1(n, 0.0), r2(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) r1[j] += row[i] * ws.d1[static_cast<std::size_t>(i) * n + j];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) r2[j] += r1[i] * ws.d1[static_cast<std::size_t>(i) * n + j];
    ws.c_d1.push_back(r1);
    ws.c_d2.push_back(r2);
  }
  return ws;
}

struct FitState {
  std::vector<double> breaks;
  std::vector<double> x;  // unknowns: per element [w values, v values]
};

}  // namespace

std::shared_ptr<const RefinedProfile> RefinedProfile::fit(
    const ModelParams& params, double r_eff, double u_boundary, double v_boundary,
    const std::function<double(double)>& u_init, const std::function<double(double)>& v_init,
    const RefineOptions& opts) {
  params.validate();
  const BulkConstants bc = bulk_constants(params);
  const int ka = std::abs(params.k);
  const double force_scale =
      (params.a2 + params.b2 * bc.s_plus + params.c2 * bc.s_plus * bc.s_plus) * bc.s_plus;

  const Workspace ws = make_workspace(opts.degree);
  const int p = opts.degree;
  const int n_per = p + 1;

  // Element boundaries: geometric toward 0, capped span, like the solver mesh.
  auto make_breaks = [&](int ne) {
    std::vector<double> br(ne + 1);
    const double ratio = 1.6, cap = 100.0;
    int graded = ne;
    const double max_span = std::log(cap) / std::log(ratio);
    if (static_cast<double>(ne - 1) > max_span) graded = static_cast<int>(max_span) + 1;
    const double geo = (std::pow(ratio, graded) - 1.0) / (ratio - 1.0);
    const double tail = static_cast<double>(ne - graded) * std::pow(ratio, graded - 1);
    const double h1 = r_eff / (geo + tail);
    br[0] = 0.0;
    double h = h1;
    for (int i = 1; i <= ne; ++i) {
      br[i] = br[i - 1] + h;
      if (i < graded) h *= ratio;
    }
    br[ne] = r_eff;
    return br;
  };

  const double w_boundary = u_boundary / std::pow(r_eff, ka);

  std::shared_ptr<RefinedProfile> best;
  int ne = opts.elements;
  for (int attempt = 0; attempt <= opts.max_refine; ++attempt, ne *= 2) {
    FitState st;
    st.breaks = make_breaks(ne);
    const int nun = 2 * ne * n_per;
    st.x.assign(nun, 0.0);

    // physical nodes per element
    std::vector<std::vector<double>> phys(ne, std::vector<double>(n_per));
    for (int e = 0; e < ne; ++e) {
      const double a = st.breaks[e], b = st.breaks[e + 1];
      for (int j = 0; j < n_per; ++j) phys[e][j] = 0.5 * (a + b) + 0.5 * (b - a) * ws.ref_nodes[j];
    }

    const double r_floor = std::max(1e-8 * r_eff, st.breaks[1] * 1e-3);
    for (int e = 0; e < ne; ++e) {
      for (int j = 0; j < n_per; ++j) {
        const double r = std::max(phys[e][j], r_floor);
        st.x[(2 * e) * n_per + j] = u_init(r) / std::pow(r, ka);
        st.x[(2 * e + 1) * n_per + j] = v_init(phys[e][j]);
      }
    }

    const int band = 4 * n_per;
    BandedGeneral jac(nun, band, band);
    std::vector<double> res(nun);

    auto assemble = [&](const std::vector<double>& x, std::vector<double>& r_out,
                        BandedGeneral* j_out) {
      if (j_out) j_out->zero();
      std::fill(r_out.begin(), r_out.end(), 0.0);
      int row = 0;
      for (int e = 0; e < ne; ++e) {
        const int wb = (2 * e) * n_per;      // w block start
        const int vb = (2 * e + 1) * n_per;  // v block start
        const double half = 0.5 * (st.breaks[e + 1] - st.breaks[e]);
        const double sc1 = 1.0 / half;        // d/dr scale
        const double sc2 = sc1 * sc1;

        auto d_row = [&](int node) {  // physical first-derivative row at a Lobatto node
          std::vector<double> out(n_per);
          for (int j2 = 0; j2 < n_per; ++j2)
            out[j2] = sc1 * ws.d1[static_cast<std::size_t>(node) * n_per + j2];
          return out;
        };

        if (e == 0) {
          // w'(0) = 0 and v'(0) = 0
          const std::vector<double> d0 = d_row(0);
          for (int j2 = 0; j2 < n_per; ++j2) {
            r_out[row] += d0[j2] * x[wb + j2];
            r_out[row + 1] += d0[j2] * x[vb + j2];
            if (j_out) {
              j_out->add(row, wb + j2, d0[j2]);
              j_out->add(row + 1, vb + j2, d0[j2]);
            }
          }
          row += 2;
        } else {
          // continuity of value and derivative with element e-1, both variables
          const int wbp = (2 * (e - 1)) * n_per;
          const int vbp = (2 * (e - 1) + 1) * n_per;
          const double halfp = 0.5 * (st.breaks[e] - st.breaks[e - 1]);
          const double sc1p = 1.0 / halfp;
          r_out[row] = x[wbp + p] - x[wb + 0];
          r_out[row + 2] = x[vbp + p] - x[vb + 0];
          if (j_out) {
            j_out->add(row, wbp + p, 1.0);
            j_out->add(row, wb + 0, -1.0);
            j_out->add(row + 2, vbp + p, 1.0);
            j_out->add(row + 2, vb + 0, -1.0);
          }
          for (int j2 = 0; j2 < n_per; ++j2) {
            const double dp = sc1p * ws.d1[static_cast<std::size_t>(p) * n_per + j2];
            const double d0 = sc1 * ws.d1[static_cast<std::size_t>(0) * n_per + j2];
            r_out[row + 1] += dp * x[wbp + j2] - d0 * x[wb + j2];
            r_out[row + 3] += dp * x[vbp + j2] - d0 * x[vb + j2];
            if (j_out) {
              j_out->add(row + 1, wbp + j2, dp);
              j_out->add(row + 1, wb + j2, -d0);
              j_out->add(row + 3, vbp + j2, dp);
              j_out->add(row + 3, vb + j2, -d0);
            }
          }
          row += 4;
        }

        // collocation at interior Gauss points
        for (int q = 0; q < p - 1; ++q) {
          const double rq = 0.5 * (st.breaks[e] + st.breaks[e + 1]) + half * ws.colloc[q];
          double w = 0.0, dw = 0.0, d2w = 0.0, vv = 0.0, dvv = 0.0, d2vv = 0.0;
          for (int j2 = 0; j2 < n_per; ++j2) {
            w += ws.c_val[q][j2] * x[wb + j2];
            dw += ws.c_d1[q][j2] * x[wb + j2];
            d2w += ws.c_d2[q][j2] * x[wb + j2];
            vv += ws.c_val[q][j2] * x[vb + j2];
            dvv += ws.c_d1[q][j2] * x[vb + j2];
            d2vv += ws.c_d2[q][j2] * x[vb + j2];
          }
          dw *= sc1;
          d2w *= sc2;
          dvv *= sc1;
          d2vv *= sc2;
          const double u = std::pow(rq, ka) * w;
          const double acoef = -params.a2 + 2.0 / kSqrt6 * params.b2 * vv +
                               params.c2 * (u * u + vv * vv);
          double h, g;
          bulk_grad(params, u, vv, h, g);
          const BulkHessian hess = bulk_hessian(params, u, vv);

          r_out[row] = d2w + (2.0 * ka + 1.0) / rq * dw - w * acoef;
          r_out[row + 1] = d2vv + dvv / rq - g;
          if (j_out) {
            const double dw_w = -(acoef + 2.0 * params.c2 * u * u);  // -(fuu)
            const double dw_v = -w * (2.0 / kSqrt6 * params.b2 + 2.0 * params.c2 * vv);
            const double dv_w = -hess.fuv * std::pow(rq, ka);
            const double dv_v = -hess.fvv;
            for (int j2 = 0; j2 < n_per; ++j2) {
              const double val = ws.c_val[q][j2];
              const double der1 = sc1 * ws.c_d1[q][j2];
              const double der2 = sc2 * ws.c_d2[q][j2];
              j_out->add(row, wb + j2, der2 + (2.0 * ka + 1.0) / rq * der1 + dw_w * val);
              j_out->add(row, vb + j2, dw_v * val);
              j_out->add(row + 1, vb + j2, der2 + der1 / rq + dv_v * val);
              j_out->add(row + 1, wb + j2, dv_w * val);
            }
          }
          row += 2;
        }

        if (e == ne - 1) {
          r_out[row] = x[wb + p] - w_boundary;
          r_out[row + 1] = x[vb + p] - v_boundary;
          if (j_out) {
            j_out->add(row, wb + p, 1.0);
            j_out->add(row + 1, vb + p, 1.0);
          }
          row += 2;
        }
      }
    };

    auto res_norm = [&](const std::vector<double>& r_vec) {
      double m = 0.0;
      for (double t : r_vec) m = std::max(m, std::abs(t));
      return m;
    };

    assemble(st.x, res, nullptr);
    double rn = res_norm(res);
    for (int it = 0; it < opts.max_newton; ++it) {
      assemble(st.x, res, &jac);
      std::vector<double> delta = res;
      jac.solve(delta);
      double t = 1.0;
      bool accepted = false;
      std::vector<double> trial(nun);
      for (int ls = 0; ls < 8; ++ls) {
        for (int i = 0; i < nun; ++i) trial[i] = st.x[i] - t * delta[i];
        std::vector<double> rt(nun);
        assemble(trial, rt, nullptr);
        const double rtn = res_norm(rt);
        if (rtn < rn || rtn < 1e-13 * std::max(1.0, force_scale)) {
          st.x.swap(trial);
          rn = rtn;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      // Once rn sits at the roundoff floor of the second-derivative rows no
      // step can decrease it further; the iterate is as converged as the
      // element scaling allows.
      if (!accepted) break;
      double step = 0.0;
      for (int i = 0; i < nun; ++i) step = std::max(step, std::abs(t * delta[i]));
      if (step < opts.newton_tol * std::max(1.0, bc.s_plus) &&
          rn < 1e-9 * std::max(1.0, force_scale)) break;
    }
    if (rn > 1e-6 * std::max(1.0, force_scale)) {
      if (attempt == opts.max_refine)
        throw NonConvergenceError("profile refinement: collocation Newton stalled");
      continue;
    }

    // Build the result and estimate the off-collocation strong residual.
    auto rp = std::make_shared<RefinedProfile>();
    rp->k_abs_ = ka;
    rp->degree_ = p;
    rp->breaks_ = st.breaks;
    rp->ref_nodes_ = ws.ref_nodes;
    rp->ref_bw_ = ws.ref_bw;
    rp->elems_.resize(ne);
    const int n = n_per;
    for (int e = 0; e < ne; ++e) {
      Elem& el = rp->elems_[e];
      el.w.assign(n, 0.0);
      el.v.assign(n, 0.0);
      for (int j = 0; j < n; ++j) {
        el.w[j] = st.x[(2 * e) * n + j];
        el.v[j] = st.x[(2 * e + 1) * n + j];
      }
      const double sc1 = 2.0 / (st.breaks[e + 1] - st.breaks[e]);
      auto apply_d = [&](const std::vector<double>& vals) {
        std::vector<double> out(n, 0.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            out[i] += sc1 * ws.d1[static_cast<std::size_t>(i) * n + j] * vals[j];
        return out;
      };
      el.dw = apply_d(el.w);
      el.d2w = apply_d(el.dw);
      el.dv = apply_d(el.v);
      el.d2v = apply_d(el.dv);
    }

    double worst = 0.0;
    for (int e = 0; e < ne; ++e) {
      for (int s = 1; s < 2 * p; s += 2) {  // midpoints between Lobatto nodes in parameter space
        const double t = -std::cos(M_PI * s / (2.0 * p));
        const double r = 0.5 * (st.breaks[e] + st.breaks[e + 1]) +
                         0.5 * (st.breaks[e + 1] - st.breaks[e]) * t;
        if (r <= 0.0) continue;
        const double w = bary_eval(ws.ref_nodes, ws.ref_bw, rp->elems_[e].w, t);
        const double dw = bary_eval(ws.ref_nodes, ws.ref_bw, rp->elems_[e].dw, t);
        const double d2w = bary_eval(ws.ref_nodes, ws.ref_bw, rp->elems_[e].d2w, t);
        const double vv = bary_eval(ws.ref_nodes, ws.ref_bw, rp->elems_[e].v, t);
        const double dvv = bary_eval(ws.ref_nodes, ws.ref_bw, rp->elems_[e].dv, t);
        const double d2vv = bary_eval(ws.ref_nodes, ws.ref_bw, rp->elems_[e].d2v, t);
        const double u = std::pow(r, ka) * w;
        double h, g;
        bulk_grad(params, u, vv, h, g);
        const double acoef = (-params.a2 + 2.0 / kSqrt6 * params.b2 * vv +
                              params.c2 * (u * u + vv * vv));
        const double res_u = std::pow(r, ka) * (d2w + (2.0 * ka + 1.0) / r * dw - w * acoef);
        const double res_v = d2vv + dvv / r - g;
        worst = std::max({worst, std::abs(res_u), std::abs(res_v)});
      }
    }
    rp->residual_ = worst / force_scale;
    if (rp->residual_ <= opts.residual_tol) return rp;
    // Halving every element doubles the derivative scaling, so once the
    // residual stops dropping it is floor-bound and the best fit stands.
    if (best && rp->residual_ >= 0.5 * best->residual_) return best;
    if (!best || rp->residual_ < best->residual_) best = rp;
    if (attempt == opts.max_refine) return best;
  }
  throw NonConvergenceError("profile refinement: unreachable");
}

double RefinedProfile::eval(double r, int which) const {
  const int e = find_cell(breaks_, r);
  const double a = breaks_[e], b = breaks_[e + 1];
  const double t = 2.0 * (r - a) / (b - a) - 1.0;
  const Elem& el = elems_[e];
  const std::vector<double>* vals = nullptr;
  switch (which) {
    case 0: vals = &el.w; break;
    case 1: vals = &el.dw; break;
    case 2: vals = &el.d2w; break;
    case 3: vals = &el.v; break;
    case 4: vals = &el.dv; break;
    default: vals = &el.d2v; break;
  }
  return bary_eval(ref_nodes_, ref_bw_, *vals, std::clamp(t, -1.0, 1.0));
}

double RefinedProfile::u(double r) const { return std::pow(r, k_abs_) * eval(r, 0); }

double RefinedProfile::du(double r) const {
  const double w = eval(r, 0), dw = eval(r, 1);
  if (r == 0.0) return k_abs_ == 1 ? w : 0.0;
  return k_abs_ * std::pow(r, k_abs_ - 1) * w + std::pow(r, k_abs_) * dw;
}

double RefinedProfile::d2u(double r) const {
  const double w = eval(r, 0), dw = eval(r, 1), d2w = eval(r, 2);
  if (r == 0.0) {
    if (k_abs_ == 1) return 2.0 * dw;
    if (k_abs_ == 2) return 2.0 * w;
    return 0.0;
  }
  return k_abs_ * (k_abs_ - 1) * std::pow(r, k_abs_ - 2) * w +
         2.0 * k_abs_ * std::pow(r, k_abs_ - 1) * dw + std::pow(r, k_abs_) * d2w;
}

double RefinedProfile::v(double r) const { return eval(r, 3); }
double RefinedProfile::dv(double r) const { return eval(r, 4); }
double RefinedProfile::d2v(double r) const { return eval(r, 5); }

}  // namespace defectlab
