#include "defectlab/field2d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "defectlab/fem.hpp"
#include "defectlab/modes.hpp"

namespace defectlab {

namespace {

using std::numbers::pi;
using std::numbers::sqrt2;

Mat3 basis_e0() {
  const double w = std::sqrt(1.5);
  Mat3 m;
  m.a[0][0] = -w / 3.0;
  m.a[1][1] = -w / 3.0;
  m.a[2][2] = 2.0 * w / 3.0;
  return m;
}

// In-plane uniaxial element at director angle theta.
Mat3 basis_e1(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m.a[0][0] = sqrt2 * (c * c - 0.5);
  m.a[1][1] = sqrt2 * (s * s - 0.5);
  m.a[0][1] = m.a[1][0] = sqrt2 * c * s;
  return m;
}

// In-plane biaxial element, the theta-derivative direction of basis_e1.
Mat3 basis_e2(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  // (n tensor m + m tensor n)/sqrt2 with n = (c,s,0), m = (-s,c,0).
  Mat3 m;
  m.a[0][0] = -sqrt2 * c * s;
  m.a[1][1] = sqrt2 * c * s;
  m.a[0][1] = m.a[1][0] = (c * c - s * s) / sqrt2;
  return m;
}

Mat3 basis_e3() {
  Mat3 m;
  m.a[0][2] = m.a[2][0] = 1.0 / sqrt2;
  return m;
}

Mat3 basis_e4() {
  Mat3 m;
  m.a[1][2] = m.a[2][1] = 1.0 / sqrt2;
  return m;
}

void require_same_grid(const QTensorField& q, const PerturbationField& p) {
  if (q.n_phi != p.n_phi || q.radii != p.radii)
    throw std::invalid_argument("field grids do not match");
  if (q.u.size() != q.radii.size() || q.v.size() != q.radii.size())
    throw std::invalid_argument("tensor field profile arrays do not match its radii");
}

void require_band_ok(const PerturbationField& p, int k) {
  if (p.band_limit < 0) throw std::invalid_argument("band limit must be nonnegative");
  if (p.band_limit > p.n_phi / 2 - 2)
    throw std::invalid_argument("band limit " + std::to_string(p.band_limit) +
                                " aliases on " + std::to_string(p.n_phi) + " angles");
  if (2 * p.band_limit + std::abs(k) >= p.n_phi)
    throw std::invalid_argument(
        "integrand band 2M+|k| reaches the angle count; the trapezoid rule would alias");
}

void require_outer_ring_zero(const PerturbationField& p) {
  const int nn = static_cast<int>(p.radii.size());
  for (int l = 0; l < 5; ++l)
    for (int j = 0; j < p.n_phi; ++j)
      if (p.at(l, nn - 1, j) != 0.0)
        throw std::invalid_argument("perturbation must vanish on the outer ring");
}

// Spectral differentiation weights on n uniform periodic points (n even):
// (Df)_j = sum_p dmat[p] f_{j-p mod n}.
std::vector<double> spectral_diff_weights(int n) {
  std::vector<double> d(n, 0.0);
  for (int p = 1; p < n; ++p) {
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    d[p] = 0.5 * sign / std::tan(pi * static_cast<double>(p) / n);
  }
  return d;
}

// Cos/sin coefficient pair of one azimuthal mode of one grid row.
struct FourierPair {
  std::vector<double> a;  // cos coefficients per radius
  std::vector<double> b;  // sin coefficients per radius
};

FourierPair ring_coefficients(const PerturbationField& p, int comp, int m) {
  const int nn = static_cast<int>(p.radii.size());
  const int nphi = p.n_phi;
  FourierPair out;
  out.a.assign(nn, 0.0);
  out.b.assign(nn, 0.0);
  const double scale = (m == 0 ? 1.0 : 2.0) / nphi;
  for (int i = 0; i < nn; ++i) {
    double ca = 0.0, cb = 0.0;
    for (int j = 0; j < nphi; ++j) {
      const double ang = 2.0 * pi * static_cast<double>(m) * j / nphi;
      const double val = p.at(comp, i, j);
      ca += val * std::cos(ang);
      cb += val * std::sin(ang);
    }
    out.a[i] = scale * ca;
    out.b[i] = scale * cb;
  }
  return out;
}

}  // namespace

double QTensorField::phi(int j) const { return 2.0 * pi * static_cast<double>(j) / n_phi; }

Mat3 QTensorField::matrix(int i, int j) const {
  Mat3 m = basis_e1(0.5 * k * phi(j));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m.a[r][c] *= u[i];
  m.add_scaled(basis_e0(), v[i]);
  return m;
}

QTensorField reconstruct_Q(const Profile& profile, int n_phi) {
  require_converged(profile);
  if (n_phi < 8 || n_phi % 2 != 0)
    throw std::invalid_argument("reconstruct_Q: n_phi must be even and at least 8");
  QTensorField f;
  f.radii = profile.mesh.nodes;
  f.n_phi = n_phi;
  f.k = profile.params.k;
  f.u = profile.u;
  f.v = profile.v;
  return f;
}

PerturbationField PerturbationField::zeros(const std::vector<double>& radii, int n_phi,
                                           int band_limit) {
  if (radii.size() < 2 || n_phi < 8 || n_phi % 2 != 0)
    throw std::invalid_argument("perturbation grid must have n_phi even >= 8");
  PerturbationField p;
  p.radii = radii;
  p.n_phi = n_phi;
  p.band_limit = band_limit;
  for (auto& comp : p.w) comp.assign(radii.size() * static_cast<std::size_t>(n_phi), 0.0);
  return p;
}

PerturbationField random_perturbation(const std::vector<double>& radii, int n_phi,
                                      int band_limit, std::uint64_t seed) {
  PerturbationField p = PerturbationField::zeros(radii, n_phi, band_limit);
  const int nn = static_cast<int>(radii.size());
  if (nn < 6) throw std::invalid_argument("random_perturbation: too few radii");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const double r_lo = radii[2];
  const double r_hi = radii[nn - 3];
  std::vector<double> t(nn);
  for (int i = 0; i < nn; ++i)
    t[i] = std::clamp((radii[i] - r_lo) / (r_hi - r_lo), 0.0, 1.0);

  for (int l = 0; l < 5; ++l) {
    for (int m = 0; m <= band_limit; ++m) {
      const double ca = unit(rng) / (1.0 + m);
      const double cb = m == 0 ? 0.0 : unit(rng) / (1.0 + m);
      const int wave = 1 + (l + m) % 3;
      for (int i = 0; i < nn; ++i) {
        if (t[i] <= 0.0 || t[i] >= 1.0) continue;
        const double s = std::sin(pi * t[i]);
        const double bump = s * s * std::cos(0.5 * pi * wave * t[i]);
        if (bump == 0.0) continue;
        for (int j = 0; j < n_phi; ++j) {
          const double ang = 2.0 * pi * static_cast<double>(m) * j / n_phi;
          p.at(l, i, j) += bump * (ca * std::cos(ang) + cb * std::sin(ang));
        }
      }
    }
  }
  return p;
}

double el_residual(const QTensorField& qfield, const ModelParams& params) {
  params.validate();
  const int nn = qfield.n_r();
  const int nphi = qfield.n_phi;
  if (nn < 3) throw std::invalid_argument("el_residual: need at least three radii");
  if (qfield.u.size() != qfield.radii.size() || qfield.v.size() != qfield.radii.size())
    throw std::invalid_argument("el_residual: tensor field profile arrays do not match its radii");

  std::vector<Mat3> grid(static_cast<std::size_t>(nn) * nphi);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nphi; ++j) grid[static_cast<std::size_t>(i) * nphi + j] = qfield.matrix(i, j);

  const double dphi = 2.0 * pi / nphi;
  double worst = 0.0;
  for (int i = 1; i + 1 < nn; ++i) {
    const double r = qfield.radii[i];
    const double hm = r - qfield.radii[i - 1];
    const double hp = qfield.radii[i + 1] - r;
    const double denom = hm * hp * (hm + hp);
    for (int j = 0; j < nphi; ++j) {
      const Mat3& q = grid[static_cast<std::size_t>(i) * nphi + j];
      const Mat3& qm = grid[static_cast<std::size_t>(i - 1) * nphi + j];
      const Mat3& qp = grid[static_cast<std::size_t>(i + 1) * nphi + j];
      const Mat3& ql = grid[static_cast<std::size_t>(i) * nphi + (j + nphi - 1) % nphi];
      const Mat3& qr = grid[static_cast<std::size_t>(i) * nphi + (j + 1) % nphi];

      const Mat3 q2 = q.mul(q);
      const double norm2 = q.dot(q);
      double fro2 = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double d2r = 2.0 * (hp * qm.a[a][b] + hm * qp.a[a][b] - (hm + hp) * q.a[a][b]) /
                             denom;
          const double d1r = (hm * hm * qp.a[a][b] - hp * hp * qm.a[a][b] +
                              (hp * hp - hm * hm) * q.a[a][b]) /
                             denom;
          const double d2phi = (ql.a[a][b] - 2.0 * q.a[a][b] + qr.a[a][b]) / (dphi * dphi);
          const double lap = d2r + d1r / r + d2phi / (r * r);
          const double bulk = params.a2 * q.a[a][b] +
                              params.b2 * (q2.a[a][b] - (a == b ? norm2 / 3.0 : 0.0)) -
                              params.c2 * norm2 * q.a[a][b];
          const double res = lap + bulk;
          fro2 += res * res;
        }
      worst = std::max(worst, std::sqrt(fro2));
    }
  }
  return worst;
}

double L_direct(const QTensorField& qfield, const PerturbationField& pfield,
                const ModelParams& params) {
  params.validate();
  if (qfield.k != params.k)
    throw std::invalid_argument("tensor field winding differs from the model parameters");
  require_same_grid(qfield, pfield);
  require_band_ok(pfield, params.k);
  require_outer_ring_zero(pfield);

  const int nn = qfield.n_r();
  const int nphi = qfield.n_phi;
  const double kd = static_cast<double>(params.k);

  // Spectral phi-derivative of every component at the grid nodes.
  const std::vector<double> dmat = spectral_diff_weights(nphi);
  std::array<std::vector<double>, 5> dphi_w;
  for (int l = 0; l < 5; ++l) {
    dphi_w[l].assign(pfield.w[l].size(), 0.0);
    for (int i = 0; i < nn; ++i) {
      const double* row = &pfield.w[l][static_cast<std::size_t>(i) * nphi];
      double* out = &dphi_w[l][static_cast<std::size_t>(i) * nphi];
      for (int j = 0; j < nphi; ++j) {
        double s = 0.0;
        for (int q = 0; q < nphi; ++q) s += dmat[(j - q + nphi) % nphi] * row[q];
        out[j] = s;
      }
    }
  }

  std::vector<Mat3> e1(nphi), e2(nphi);
  for (int j = 0; j < nphi; ++j) {
    const double theta = 0.5 * kd * (2.0 * pi * j / nphi);
    e1[j] = basis_e1(theta);
    e2[j] = basis_e2(theta);
  }
  const Mat3 e0 = basis_e0(), e3 = basis_e3(), e4 = basis_e4();

  const CompositeQuad quad = composite_gauss(qfield.radii, 4);
  const int nq = static_cast<int>(quad.r.size());
  std::vector<double> terms(nq);

  parallel_blocks(nq, 0, [&](int begin, int end) {
    for (int q = begin; q < end; ++q) {
      const int e = q / 4;
      const double r = quad.r[q];
      const double a = qfield.radii[e];
      const double h = qfield.radii[e + 1] - a;
      const double t = (r - a) / h;
      const double s0 = 1.0 - t, s1 = t;
      const double inv_h = 1.0 / h;
      const double inv_r2 = 1.0 / (r * r);

      const double uq = qfield.u[e] * s0 + qfield.u[e + 1] * s1;
      const double vq = qfield.v[e] * s0 + qfield.v[e + 1] * s1;
      const double qnorm2 = uq * uq + vq * vq;

      double ring = 0.0;
      for (int j = 0; j < nphi; ++j) {
        double wv[5], wr[5], wp[5];
        for (int l = 0; l < 5; ++l) {
          const double lo = pfield.w[l][static_cast<std::size_t>(e) * nphi + j];
          const double hi = pfield.w[l][static_cast<std::size_t>(e + 1) * nphi + j];
          wv[l] = lo * s0 + hi * s1;
          wr[l] = (hi - lo) * inv_h;
          wp[l] = dphi_w[l][static_cast<std::size_t>(e) * nphi + j] * s0 +
                  dphi_w[l][static_cast<std::size_t>(e + 1) * nphi + j] * s1;
        }
        const double grad =
            wr[0] * wr[0] + wr[1] * wr[1] + wr[2] * wr[2] + wr[3] * wr[3] + wr[4] * wr[4] +
            inv_r2 * (wp[0] * wp[0] + (wp[1] - kd * wv[2]) * (wp[1] - kd * wv[2]) +
                      (wp[2] + kd * wv[1]) * (wp[2] + kd * wv[1]) + wp[3] * wp[3] +
                      wp[4] * wp[4]);

        Mat3 pm;
        pm.add_scaled(e0, wv[0]);
        pm.add_scaled(e1[j], wv[1]);
        pm.add_scaled(e2[j], wv[2]);
        pm.add_scaled(e3, wv[3]);
        pm.add_scaled(e4, wv[4]);
        Mat3 qm;
        qm.add_scaled(e1[j], uq);
        qm.add_scaled(e0, vq);

        const double pnorm2 = pm.dot(pm);
        const double tr_p2q = pm.mul(pm).dot(qm);
        const double tr_qp = qm.dot(pm);
        const double bulk = -params.a2 * pnorm2 - 2.0 * params.b2 * tr_p2q +
                            params.c2 * (qnorm2 * pnorm2 + 2.0 * tr_qp * tr_qp);
        ring += grad + bulk;
      }
      terms[q] = quad.w[q] * r * ring * (2.0 * pi / nphi);
    }
  });
  return pairwise_sum(terms);
}

ModeSumCheck mode_sum_check(const QTensorField& qfield, const PerturbationField& pfield,
                            const ModelParams& params) {
  ModeSumCheck out;
  out.direct = L_direct(qfield, pfield, params);

  const auto& radii = qfield.radii;
  const int nn = qfield.n_r();
  const int mmax = pfield.band_limit;
  const double sk = params.k >= 0 ? 1.0 : -1.0;

  // In-plane sector: cos/sin mode triples through the radial mode form.
  double via = 0.0;
  {
    const FourierPair f0 = ring_coefficients(pfield, 0, 0);
    const FourierPair f1 = ring_coefficients(pfield, 1, 0);
    const FourierPair f2 = ring_coefficients(pfield, 2, 0);
    std::vector<double> w2(f2.a);
    for (double& x : w2) x *= sk;
    via += 2.0 * pi * pm_value_nodal(radii, params, 0, qfield.u, qfield.v, f0.a, f1.a, w2);
  }
  for (int m = 1; m <= mmax; ++m) {
    const FourierPair f0 = ring_coefficients(pfield, 0, m);
    const FourierPair f1 = ring_coefficients(pfield, 1, m);
    const FourierPair f2 = ring_coefficients(pfield, 2, m);
    std::vector<double> cos_w2(f2.b), sin_w2(f2.a);
    for (double& x : cos_w2) x *= -sk;
    for (double& x : sin_w2) x *= sk;
    via += pi * pm_value_nodal(radii, params, m, qfield.u, qfield.v, f0.a, f1.a, cos_w2);
    via += pi * pm_value_nodal(radii, params, m, qfield.u, qfield.v, f0.b, f1.b, sin_w2);
  }

  // Out-of-plane sector: complex modes xi_n of w3 + i w4, indexed n + mmax.
  const int nmodes = 2 * mmax + 1;
  std::vector<std::vector<double>> re(nmodes, std::vector<double>(nn, 0.0));
  std::vector<std::vector<double>> im(nmodes, std::vector<double>(nn, 0.0));
  {
    const FourierPair z0_3 = ring_coefficients(pfield, 3, 0);
    const FourierPair z0_4 = ring_coefficients(pfield, 4, 0);
    re[mmax] = z0_3.a;
    im[mmax] = z0_4.a;
    for (int n = 1; n <= mmax; ++n) {
      const FourierPair f3 = ring_coefficients(pfield, 3, n);
      const FourierPair f4 = ring_coefficients(pfield, 4, n);
      for (int i = 0; i < nn; ++i) {
        re[mmax + n][i] = 0.5 * (f3.a[i] + f4.b[i]);
        im[mmax + n][i] = 0.5 * (f4.a[i] - f3.b[i]);
        re[mmax - n][i] = 0.5 * (f3.a[i] - f4.b[i]);
        im[mmax - n][i] = 0.5 * (f4.a[i] + f3.b[i]);
      }
    }
  }

  const CompositeQuad quad = composite_gauss(radii, 4);
  std::vector<double> terms(quad.r.size());
  for (std::size_t q = 0; q < quad.r.size(); ++q) {
    const double r = quad.r[q];
    const double uq = interp_p1(radii, qfield.u, r);
    const double vq = interp_p1(radii, qfield.v, r);
    const double well = -params.a2 - params.b2 * vq / std::sqrt(6.0) +
                        params.c2 * (uq * uq + vq * vq);
    double acc = 0.0;
    for (int n = -mmax; n <= mmax; ++n) {
      const std::vector<double>& rn = re[mmax + n];
      const std::vector<double>& in = im[mmax + n];
      const double xr = interp_p1(radii, rn, r), dxr = interp_p1_slope(radii, rn, r);
      const double xi = interp_p1(radii, in, r), dxi = interp_p1_slope(radii, in, r);
      const double n2 = static_cast<double>(n) * n;
      acc += dxr * dxr + dxi * dxi + (n2 / (r * r) + well) * (xr * xr + xi * xi);
      const int partner = params.k - n;
      if (partner < -mmax || partner > mmax) continue;
      const std::vector<double>& rp = re[mmax + partner];
      const std::vector<double>& ip = im[mmax + partner];
      const double yr = interp_p1(radii, rp, r);
      const double yi = interp_p1(radii, ip, r);
      acc -= params.b2 / sqrt2 * uq * (xr * yr - xi * yi);
    }
    terms[q] = quad.w[q] * r * acc;
  }
  via += 2.0 * pi * pairwise_sum(terms);

  out.via_modes = via;
  return out;
}

}  // namespace defectlab
