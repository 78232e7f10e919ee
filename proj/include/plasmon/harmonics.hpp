// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_HARMONICS_HPP
#define PLASMON_HARMONICS_HPP

// Orthonormal spherical harmonics (Condon-Shortley phase), their surface
// gradients, and a Gauss-Legendre x trapezoid product rule on the sphere.
//
// Tangential fields are expanded in U = grad_S Y and V = grad_S Y x nu, with
// grad_S the gradient on the *unit* sphere. ||U||^2 = ||V||^2 = n(n+1).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace plasmon
{

struct HarmonicIndex
{
  int n = 0;
  int m = 0;
  bool operator==(const HarmonicIndex &) const = default;
};

// Packed position of (n, m), n >= 1, in coefficient vectors.
inline int mode_index(int n, int m)
{
  return n * n - 1 + m + n;
}
inline int mode_count(int n_max)
{
  return n_max * (n_max + 2);
}
inline HarmonicIndex mode_at(int idx)
{
  int n = static_cast<int>(std::sqrt(double(idx + 1)));
  while (n * n - 1 > idx) --n;
  while ((n + 1) * (n + 1) - 1 <= idx) ++n;
  return {n, idx - (n * n - 1) - n};
}

inline void validate(const HarmonicIndex &idx)
{
  if (idx.n < 0 || std::abs(idx.m) > idx.n)
    throw DegenerateIndex("(n, m) = (" + std::to_string(idx.n) + ", " + std::to_string(idx.m) + ")");
}

// Local spherical frame at a unit vector.
struct SphericalFrame
{
  double cos_t, sin_t, phi;
  Vec3 r_hat, t_hat, p_hat;

  explicit SphericalFrame(const Vec3 &p)
  {
    const Vec3 u = p.normalized();
    cos_t = std::clamp(u.z(), -1.0, 1.0);
    sin_t = std::hypot(u.x(), u.y());
    phi = (sin_t > 0.0) ? std::atan2(u.y(), u.x()) : 0.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    r_hat = u;
    t_hat = Vec3(cos_t * cp, cos_t * sp, -sin_t);
    p_hat = Vec3(-sp, cp, 0.0);
  }
};

// Normalized associated Legendre values at one polar angle, 0 <= m <= n <= n_max:
//   P  = Pbar_n^m(cos t)   with Y_n^m = P e^{i m phi}
//   Q  = P / sin t         (m >= 1, finite at the poles)
//   dP = d P / d t
class LegendreTable
{
public:
  LegendreTable(int n_max, double cos_t, double sin_t)
      : n_max_(n_max), P_(packed(n_max + 1)), Q_(packed(n_max + 1)), dP_(packed(n_max + 1))
  {
    const int N = n_max + 1;  // one extra degree for the ladder in dP
    const double x = cos_t, s = sin_t;
    double pmm = 1.0 / std::sqrt(4.0 * pi), qmm = 0.0;
    for (int m = 0; m <= N; ++m) {
      if (m == 1) {
        qmm = -std::sqrt(1.5) * pmm;
        pmm = -std::sqrt(1.5) * s * pmm;
      } else if (m > 1) {
        const double f = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        pmm *= f * s;
        qmm *= f * s;
      }
      at(P_, m, m) = pmm;
      at(Q_, m, m) = qmm;
      if (m + 1 <= N) {
        const double c = std::sqrt(2.0 * m + 3.0);
        at(P_, m + 1, m) = c * x * pmm;
        at(Q_, m + 1, m) = c * x * qmm;
      }
      for (int n = m + 2; n <= N; ++n) {
        const double a = std::sqrt((4.0 * n * n - 1.0) / (double(n) * n - double(m) * m));
        const double b = std::sqrt((double(n - 1) * (n - 1) - double(m) * m) / (4.0 * (n - 1) * (n - 1) - 1.0));
        at(P_, n, m) = a * (x * at(P_, n - 1, m) - b * at(P_, n - 2, m));
        at(Q_, n, m) = a * (x * at(Q_, n - 1, m) - b * at(Q_, n - 2, m));
      }
    }
    for (int n = 0; n <= n_max; ++n) {
      at(dP_, n, 0) = (n >= 1) ? std::sqrt(double(n) * (n + 1)) * at(P_, n, 1) : 0.0;
      for (int m = 1; m <= n; ++m) {
        const double up = (m + 1 <= n) ? std::sqrt(double(n - m) * (n + m + 1)) * at(P_, n, m + 1) : 0.0;
        const double dn = std::sqrt(double(n + m) * (n - m + 1)) * at(P_, n, m - 1);
        at(dP_, n, m) = 0.5 * (up - dn);
      }
    }
  }

  int n_max() const { return n_max_; }

  // Signed-order accessors: Pbar_n^{-m} = (-1)^m Pbar_n^m, likewise Q and dP.
  double P(int n, int m) const { return sgn(m) * at(P_, n, std::abs(m)); }
  double Q(int n, int m) const { return sgn(m) * at(Q_, n, std::abs(m)); }
  double dP(int n, int m) const { return sgn(m) * at(dP_, n, std::abs(m)); }

private:
  static std::size_t packed(int N) { return std::size_t(N + 1) * (N + 2) / 2; }
  static double &at(std::vector<double> &v, int n, int m) { return v[std::size_t(n) * (n + 1) / 2 + m]; }
  static double at(const std::vector<double> &v, int n, int m) { return v[std::size_t(n) * (n + 1) / 2 + m]; }
  static double sgn(int m) { return (m < 0 && (m & 1)) ? -1.0 : 1.0; }

  int n_max_;
  std::vector<double> P_, Q_, dP_;
};

inline cplx eval_Y(const HarmonicIndex &idx, const Vec3 &point)
{
  validate(idx);
  const SphericalFrame f(point);
  const LegendreTable t(idx.n, f.cos_t, f.sin_t);
  return t.P(idx.n, idx.m) * std::polar(1.0, idx.m * f.phi);
}

struct TangentialBasisSample
{
  HarmonicIndex index;
  Vec3 point;
  CVec3 grad;
  CVec3 grad_cross_nu;
};

// grad = (1/R) grad_S Y, the surface gradient on the sphere of radius R.
inline TangentialBasisSample eval_tangential_basis(const HarmonicIndex &idx, const Vec3 &point,
                                                   double R = 1.0)
{
  validate(idx);
  if (idx.n == 0) throw DegenerateIndex("tangential basis is empty at n = 0");
  const SphericalFrame f(point);
  const LegendreTable t(idx.n, f.cos_t, f.sin_t);
  const cplx e = std::polar(1.0, idx.m * f.phi);
  const cplx gt = t.dP(idx.n, idx.m) * e;
  const cplx gp = I * double(idx.m) * t.Q(idx.n, idx.m) * e;
  TangentialBasisSample s;
  s.index = idx;
  s.point = f.r_hat;
  s.grad = (gt * to_complex(f.t_hat) + gp * to_complex(f.p_hat)) / R;
  // t_hat x r_hat = -p_hat, p_hat x r_hat = t_hat
  s.grad_cross_nu = (gp * to_complex(f.t_hat) - gt * to_complex(f.p_hat)) / R;
  return s;
}

struct VectorHarmonics
{
  CVec3 I_n, T_n, N_n;
};

// I_n = grad_S Y_{n+1} + (n+1) Y_{n+1} nu, T_n = grad_S Y_n x nu,
// N_n = -grad_S Y_{n-1} + n Y_{n-1} nu; the order m is shared, and a term
// whose degree cannot carry that order is zero.
inline VectorHarmonics eval_vector_harmonics(const HarmonicIndex &idx, const Vec3 &point)
{
  validate(idx);
  if (idx.n < 1) throw DegenerateIndex("T_n and N_n need n >= 1");
  const SphericalFrame f(point);
  const LegendreTable t(idx.n + 1, f.cos_t, f.sin_t);
  const cplx e = std::polar(1.0, idx.m * f.phi);
  const CVec3 th = to_complex(f.t_hat), ph = to_complex(f.p_hat), nu = to_complex(f.r_hat);
  auto grad = [&](int n) -> CVec3 {
    return t.dP(n, idx.m) * e * th + I * double(idx.m) * t.Q(n, idx.m) * e * ph;
  };
  auto Y = [&](int n) -> cplx { return t.P(n, idx.m) * e; };
  VectorHarmonics v;
  v.I_n = grad(idx.n + 1) + double(idx.n + 1) * Y(idx.n + 1) * nu;
  v.T_n = (I * double(idx.m) * t.Q(idx.n, idx.m) * e) * th - (t.dP(idx.n, idx.m) * e) * ph;
  if (std::abs(idx.m) <= idx.n - 1)
    v.N_n = -grad(idx.n - 1) + double(idx.n) * Y(idx.n - 1) * nu;
  else
    v.N_n = CVec3::Zero();
  return v;
}

// Every Y, U, V up to degree n_max at one point, packed by mode_index.
struct PointHarmonics
{
  int n_max = 0;
  SphericalFrame frame{Vec3(0, 0, 1)};
  std::vector<cplx> Y;
  std::vector<CVec3> U, V;
};

inline PointHarmonics point_harmonics(int n_max, const Vec3 &point)
{
  PointHarmonics h;
  h.n_max = n_max;
  h.frame = SphericalFrame(point);
  const auto &f = h.frame;
  const LegendreTable t(n_max, f.cos_t, f.sin_t);
  const int cnt = mode_count(n_max);
  h.Y.resize(cnt);
  h.U.resize(cnt);
  h.V.resize(cnt);
  const CVec3 th = to_complex(f.t_hat), ph = to_complex(f.p_hat);
  for (int m = -n_max; m <= n_max; ++m) {
    const cplx e = std::polar(1.0, m * f.phi);
    for (int n = std::max(1, std::abs(m)); n <= n_max; ++n) {
      const int k = mode_index(n, m);
      const cplx gt = t.dP(n, m) * e, gp = I * double(m) * t.Q(n, m) * e;
      h.Y[k] = t.P(n, m) * e;
      h.U[k] = gt * th + gp * ph;
      h.V[k] = gp * th - gt * ph;
    }
  }
  return h;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w)
{
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      // refresh derivative at the converged node
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Product rule: n_theta Gauss-Legendre rings in cos(theta), n_phi = 2 n_theta
// equispaced azimuths. Nodes are stored ring-major.
struct SphereQuadrature
{
  double radius = 1.0;
  int n_theta = 0, n_phi = 0;
  std::vector<double> cos_t, sin_t, w_ring;  // w_ring excludes the azimuthal factor
  std::vector<double> phi;
  std::vector<Vec3> nodes;     // unit vectors
  std::vector<double> weights; // sum to 4 pi R^2

  static SphereQuadrature make(int n_max, double R = 1.0, int extra = 8)
  {
    return with_rings(n_max + extra, R);
  }

  static SphereQuadrature with_rings(int n_theta, double R = 1.0)
  {
    SphereQuadrature q;
    q.radius = R;
    q.n_theta = n_theta;
    q.n_phi = 2 * n_theta;
    gauss_legendre(n_theta, q.cos_t, q.w_ring);
    q.sin_t.resize(n_theta);
    for (int i = 0; i < n_theta; ++i) q.sin_t[i] = std::sqrt(std::max(0.0, 1.0 - q.cos_t[i] * q.cos_t[i]));
    q.phi.resize(q.n_phi);
    for (int j = 0; j < q.n_phi; ++j) q.phi[j] = 2.0 * pi * j / q.n_phi;
    const double dphi = 2.0 * pi / q.n_phi;
    for (int i = 0; i < n_theta; ++i)
      for (int j = 0; j < q.n_phi; ++j) {
        q.nodes.emplace_back(q.sin_t[i] * std::cos(q.phi[j]), q.sin_t[i] * std::sin(q.phi[j]), q.cos_t[i]);
        q.weights.push_back(q.w_ring[i] * dphi * R * R);
      }
    return q;
  }

  std::size_t size() const { return nodes.size(); }
  // highest degree whose products with conjugates are integrated exactly
  int exact_degree() const { return std::min(n_theta - 1, n_phi / 2 - 1); }
};

// Tangential coefficients c_grad (on U) and c_cross (on V), packed by mode_index.
struct TangentialCoefficients
{
  int n_max = 0;
  std::vector<cplx> c_grad, c_cross;
  double reconstruction_error = 0.0;
  bool truncation_warning = false;

  explicit TangentialCoefficients(int n = 0)
      : n_max(n), c_grad(mode_count(n), 0.0), c_cross(mode_count(n), 0.0)
  {
  }
};

inline std::vector<CVec3> synthesize(const SphereQuadrature &q, const TangentialCoefficients &c)
{
  const int N = c.n_max;
  std::vector<CVec3> out(q.size(), CVec3::Zero());
  std::vector<cplx> ft(2 * N + 1), fp(2 * N + 1);
  for (int i = 0; i < q.n_theta; ++i) {
    const LegendreTable t(N, q.cos_t[i], q.sin_t[i]);
    for (int m = -N; m <= N; ++m) {
      cplx a = 0.0, b = 0.0;
      for (int n = std::max(1, std::abs(m)); n <= N; ++n) {
        const int k = mode_index(n, m);
        const double dp = t.dP(n, m), qq = t.Q(n, m);
        // U = dP th + i m Q ph,  V = i m Q th - dP ph
        a += c.c_grad[k] * dp + c.c_cross[k] * (I * double(m) * qq);
        b += c.c_grad[k] * (I * double(m) * qq) - c.c_cross[k] * dp;
      }
      ft[m + N] = a;
      fp[m + N] = b;
    }
    for (int j = 0; j < q.n_phi; ++j) {
      cplx vt = 0.0, vp = 0.0;
      for (int m = -N; m <= N; ++m) {
        const cplx e = std::polar(1.0, m * q.phi[j]);
        vt += ft[m + N] * e;
        vp += fp[m + N] * e;
      }
      const SphericalFrame f(q.nodes[i * q.n_phi + j]);
      out[i * q.n_phi + j] = vt * to_complex(f.t_hat) + vp * to_complex(f.p_hat);
    }
  }
  return out;
}

// Project a tangential field sampled at the quadrature nodes.
inline TangentialCoefficients project_tangential(const SphereQuadrature &q, const std::vector<CVec3> &field,
                                                 int n_max, double tangential_tol = 1e-8,
                                                 double truncation_tol = 1e-6)
{
  if (field.size() != q.size()) throw Error("field sample count does not match quadrature");
  double fmax = 0.0;
  for (const auto &v : field) fmax = std::max(fmax, cnorm(v));
  std::vector<cplx> Ft(field.size()), Fp(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) {
    const SphericalFrame f(q.nodes[k]);
    const cplx radial = field[k].dot(to_complex(f.r_hat));  // dot() conjugates the left side
    if (std::abs(radial) > tangential_tol * std::max(fmax, 1e-300))
      throw NotTangential("radial component " + std::to_string(std::abs(radial)) + " at node " +
                          std::to_string(k));
    Ft[k] = to_complex(f.t_hat).dot(field[k]);
    Fp[k] = to_complex(f.p_hat).dot(field[k]);
  }

  const int N = n_max;
  TangentialCoefficients c(N);
  const double dphi = 2.0 * pi / q.n_phi;
  std::vector<cplx> ht(2 * N + 1), hp(2 * N + 1);
  for (int i = 0; i < q.n_theta; ++i) {
    for (int m = -N; m <= N; ++m) {
      cplx a = 0.0, b = 0.0;
      for (int j = 0; j < q.n_phi; ++j) {
        const cplx e = std::polar(1.0, -m * q.phi[j]);
        a += Ft[i * q.n_phi + j] * e;
        b += Fp[i * q.n_phi + j] * e;
      }
      ht[m + N] = a * dphi;
      hp[m + N] = b * dphi;
    }
    const LegendreTable t(N, q.cos_t[i], q.sin_t[i]);
    const double w = q.w_ring[i];
    for (int m = -N; m <= N; ++m)
      for (int n = std::max(1, std::abs(m)); n <= N; ++n) {
        const int k = mode_index(n, m);
        const double dp = t.dP(n, m), qq = t.Q(n, m);
        // conj(U) = dP th - i m Q ph,  conj(V) = -i m Q th - dP ph
        c.c_grad[k] += w * (ht[m + N] * dp - I * double(m) * qq * hp[m + N]);
        c.c_cross[k] += w * (-I * double(m) * qq * ht[m + N] - dp * hp[m + N]);
      }
  }
  for (int n = 1; n <= N; ++n)
    for (int m = -n; m <= n; ++m) {
      const int k = mode_index(n, m);
      c.c_grad[k] /= double(n) * (n + 1);
      c.c_cross[k] /= double(n) * (n + 1);
    }

  const auto rec = synthesize(q, c);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < field.size(); ++k) {
    num += q.weights[k] * (field[k] - rec[k]).squaredNorm();
    den += q.weights[k] * field[k].squaredNorm();
  }
  c.reconstruction_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
  c.truncation_warning = c.reconstruction_error > truncation_tol;
  return c;
}

}  // namespace plasmon

#endif  // PLASMON_HARMONICS_HPP
