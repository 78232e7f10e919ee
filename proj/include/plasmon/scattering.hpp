// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_SCATTERING_HPP
#define PLASMON_SCATTERING_HPP

// Incident fields, their traces in the eigenbasis, the spectral density solve
// and the resulting fields inside and outside the sphere.
//
// Densities live on the sphere of radius R and are expanded as
//   psi = sum psi_U U_nm + psi_V V_nm,  phi = sum phi_U U_nm + phi_V V_nm
// with U = grad_S Y on the unit sphere and V = U x nu. Channels 1/2 carry
// (psi_V, phi_U), channels 3/4 carry (psi_U, phi_V); each eigenvector is
// stored as (psi part, phi part).

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "extrapolate.hpp"
#include "harmonics.hpp"
#include "parallel.hpp"
#include "specfun.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace plasmon
{

inline constexpr double delta_min_fraction = 0.02;
// a coefficient counts as excited above this fraction of the largest one
inline constexpr double nonzero_fraction = 1e-12;
inline constexpr double near_singular_tau = 1e-14;

struct PlaneWave
{
  CVec3 amplitude = CVec3(4.0, -4.0, 0.0);
  Vec3 direction = Vec3(1.0, 1.0, 0.0).normalized();
};

// Incident field whose trace is amplitude * (eigenvector of `channel` at idx).
struct SpectralMultipole
{
  int channel = 3;
  HarmonicIndex index{1, 0};
  cplx amplitude = 1.0;
};

// E = (amplitude/omega) j_1(k_m r) (y, -x, 0)/r
struct VortexField
{
  double amplitude = 100.0;
};

using IncidentField = std::variant<PlaneWave, SpectralMultipole, VortexField>;

struct FieldValue
{
  CVec3 E = CVec3::Zero();
  CVec3 H = CVec3::Zero();
};

namespace detail
{
// Radial profile f = a j_n(kr) + b h_n(kr): value and (r f)'/r.
struct Profile
{
  cplx f, drf;
};

inline Profile profile(const RadialTable &t, int n, cplx k, double r, cplx a, cplx b)
{
  const cplx f = a * t.j[n] + b * t.h[n];
  const cplx fp = k * (a * t.jp[n] + b * t.hp[n]);
  return {f, f / r + fp};
}

// Transverse-electric field E = f V, H = curl E / (i omega mu).
inline FieldValue te_field(int n, const Profile &p, double r, cplx Y, const CVec3 &U, const CVec3 &V,
                           const Vec3 &rhat, double omega, cplx mu)
{
  const double nn = double(n) * (n + 1);
  FieldValue v;
  v.E = p.f * V;
  v.H = (nn * p.f / r * Y * to_complex(rhat) + p.drf * U) / (I * omega * mu);
  return v;
}

// Transverse-magnetic field E = curl(f V)/k, H = k f V/(i omega mu).
inline FieldValue tm_field(int n, const Profile &p, double r, cplx k, cplx Y, const CVec3 &U, const CVec3 &V,
                           const Vec3 &rhat, double omega, cplx mu)
{
  const double nn = double(n) * (n + 1);
  FieldValue v;
  v.E = (nn * p.f / r * Y * to_complex(rhat) + p.drf * U) / k;
  v.H = k * p.f * V / (I * omega * mu);
  return v;
}

// Plane-wave expansion coefficients of the TE and TM profiles a * j_n(k r):
//   TM: 4 pi i^(n-1) / (n(n+1)) p . conj(U_nm(d))
//   TE: 4 pi i^n     / (n(n+1)) (d x p) . conj(U_nm(d))
inline void plane_wave_profiles(const PlaneWave &w, int n_max, std::vector<cplx> &a_te, std::vector<cplx> &a_tm)
{
  const auto ph = point_harmonics(n_max, w.direction.normalized());
  const CVec3 p = w.amplitude;
  const CVec3 q = cross(to_complex(w.direction.normalized()), p);
  a_te.assign(mode_count(n_max), 0.0);
  a_tm.assign(mode_count(n_max), 0.0);
  cplx in = I;  // i^n
  for (int n = 1; n <= n_max; ++n, in *= I) {
    const double s = 4.0 * pi / (double(n) * (n + 1));
    for (int m = -n; m <= n; ++m) {
      const int k = mode_index(n, m);
      const CVec3 Uc = ph.U[k].conjugate();
      a_tm[k] = s * in / I * (p.transpose() * Uc)(0);
      a_te[k] = s * in * (q.transpose() * Uc)(0);
    }
  }
}

// (a, b) with a j + b h reproducing trace values (g, dg) of f and (r f)'/r at R.
inline std::array<cplx, 2> match_profile(const RadialTable &t, int n, cplx k, double R, cplx g, cplx dg)
{
  const cplx dj = t.j[n] / R + k * t.jp[n], dh = t.h[n] / R + k * t.hp[n];
  const cplx det = t.j[n] * dh - t.h[n] * dj;
  return {(g * dh - t.h[n] * dg) / det, (t.j[n] * dg - g * dj) / det};
}
}  // namespace detail

inline double delta_min(const MediumConfig &cfg)
{
  return delta_min_fraction * cfg.R;
}

// R(1 - delta_min) must itself pass, so the guard allows rounding slack
inline bool too_close(const MediumConfig &cfg, double r)
{
  return std::abs(r - cfg.R) < delta_min(cfg) * (1.0 - 1e-12);
}

// Vortex prefactor g(r) = (A/omega) j1(kr)/r and g'(r)/r, stable at r -> 0.
namespace detail
{
inline std::array<cplx, 2> vortex_radial(double amplitude, double omega, cplx k, double r)
{
  const double A = amplitude / omega;
  const cplx z = k * r;
  cplx j1_over_z, j2_over_z2;
  if (std::abs(z) < 1e-3) {
    const cplx z2 = z * z;
    j1_over_z = 1.0 / 3.0 - z2 / 30.0;
    j2_over_z2 = 1.0 / 15.0 - z2 / 210.0;
  } else {
    const auto t = radial_table(2, z);
    j1_over_z = t.j[1] / z;
    j2_over_z2 = t.j[2] / (z * z);
  }
  // (j1(z)/z)' = -j2(z)/z
  return {A * k * j1_over_z, -A * k * k * k * j2_over_z2};
}
}  // namespace detail

// The spectral multipole needs eigenvectors, so it takes the record of its degree.
inline FieldValue incident_eval(const IncidentField &f, const Vec3 &x, const MediumConfig &cfg,
                                const SpectrumRecord *record = nullptr)
{
  const cplx k = cfg.k_m();
  if (const auto *w = std::get_if<PlaneWave>(&f)) {
    const Vec3 d = w->direction.normalized();
    FieldValue v;
    v.E = w->amplitude * std::exp(I * k * d.dot(x));
    v.H = k / (cfg.omega * cfg.mu_m) * cross(to_complex(d), v.E);
    return v;
  }
  if (const auto *vx = std::get_if<VortexField>(&f)) {
    const double r = x.norm();
    const auto [g, gp_over_r] = detail::vortex_radial(vx->amplitude, cfg.omega, k, r);
    const CVec3 a(x.y(), -x.x(), 0.0);
    // curl(g a) = g'/r (x cross a) + g (0, 0, -2)
    const CVec3 xa(x.x() * x.z(), x.y() * x.z(), -(x.x() * x.x() + x.y() * x.y()));
    FieldValue v;
    v.E = g * a;
    v.H = (gp_over_r * xa + g * CVec3(0.0, 0.0, -2.0)) / (I * cfg.omega * cfg.mu_m);
    return v;
  }
  const auto &mp = std::get<SpectralMultipole>(f);
  const double r = x.norm();
  if (r < 1e-10) throw SingularPoint("multipole incident fields contain h_n and are singular at the origin");
  validate(mp.index);
  const int n = mp.index.n;
  if (n < 1) throw DegenerateIndex("multipoles start at n = 1");
  if (mp.channel < 1 || mp.channel > 4) throw Error("channel must be 1..4");
  const SpectrumRecord rec = record ? *record : tau_exact(cfg, n);
  const Eigen::Vector2cd v = mp.amplitude * rec.eigvec(mp.channel);
  const auto tR = radial_table(n, k * cfg.R), tr = radial_table(n, k * r);
  const auto ph = point_harmonics(n, x.normalized());
  const int id = mode_index(n, mp.index.m);
  if (mp.channel <= 2) {
    // TM: trace rows are -(1/k)(rf)'/r on V and (k/mu) f on U
    const auto ab = detail::match_profile(tR, n, k, cfg.R, v(1) * cfg.mu_m / k, -k * v(0));
    const auto p = detail::profile(tr, n, k, r, ab[0], ab[1]);
    return detail::tm_field(n, p, r, k, ph.Y[id], ph.U[id], ph.V[id], ph.frame.r_hat, cfg.omega, cfg.mu_m);
  }
  // TE: trace rows are f on U and -(1/mu)(rf)'/r on V
  const auto ab = detail::match_profile(tR, n, k, cfg.R, v(0), -cfg.mu_m * v(1));
  const auto p = detail::profile(tr, n, k, r, ab[0], ab[1]);
  return detail::te_field(n, p, r, ph.Y[id], ph.U[id], ph.V[id], ph.frame.r_hat, cfg.omega, cfg.mu_m);
}

// Tangential traces nu x E (row 1) and i omega nu x H (row 2) on r = R,
// each as (U coefficient, V coefficient) per mode.
struct TraceModes
{
  int n_max = 0;
  // [row1 U, row1 V, row2 U, row2 V] by mode_index
  std::vector<std::array<cplx, 4>> rows;
  double reconstruction_error = 0.0;
  bool truncation_warning = false;

  explicit TraceModes(int n = 0) : n_max(n), rows(mode_count(n), {0.0, 0.0, 0.0, 0.0}) {}
};

// Traces from the closed-form mode content of each incident kind.
inline TraceModes incident_trace_analytic(const IncidentField &f, const MediumConfig &cfg, int n_max,
                                          const std::vector<SpectrumRecord> *spectrum = nullptr)
{
  TraceModes tm(n_max);
  const cplx k = cfg.k_m(), mu = cfg.mu_m;
  const double R = cfg.R;
  const auto t = radial_table(n_max, k * R);
  auto put_te = [&](int id, int n, cplx a) {
    const cplx dj = t.j[n] / R + k * t.jp[n];
    tm.rows[id][0] += a * t.j[n];
    tm.rows[id][3] += -a * dj / mu;
  };
  auto put_tm = [&](int id, int n, cplx a) {
    const cplx dj = t.j[n] / R + k * t.jp[n];
    tm.rows[id][1] += -a * dj / k;
    tm.rows[id][2] += k / mu * a * t.j[n];
  };

  if (const auto *w = std::get_if<PlaneWave>(&f)) {
    std::vector<cplx> a_te, a_tm;
    detail::plane_wave_profiles(*w, n_max, a_te, a_tm);
    for (int n = 1; n <= n_max; ++n)
      for (int m = -n; m <= n; ++m) {
        const int id = mode_index(n, m);
        put_te(id, n, a_te[id]);
        put_tm(id, n, a_tm[id]);
      }
    // remainder above n_max decays like |kR|^n / (2n+1)!!
    return tm;
  }
  if (const auto *vx = std::get_if<VortexField>(&f)) {
    // (y, -x, 0)/r = -V_10 / sqrt(3/(4 pi))
    if (n_max >= 1) put_te(mode_index(1, 0), 1, -vx->amplitude / cfg.omega * std::sqrt(4.0 * pi / 3.0));
    return tm;
  }
  const auto &mp = std::get<SpectralMultipole>(f);
  validate(mp.index);
  if (mp.index.n < 1 || mp.index.n > n_max) {
    tm.truncation_warning = mp.index.n > n_max;
    tm.reconstruction_error = tm.truncation_warning ? 1.0 : 0.0;
    return tm;
  }
  const SpectrumRecord rec = spectrum ? (*spectrum)[mp.index.n - 1] : tau_exact(cfg, mp.index.n);
  const Eigen::Vector2cd v = mp.amplitude * rec.eigvec(mp.channel);
  auto &row = tm.rows[mode_index(mp.index.n, mp.index.m)];
  if (mp.channel <= 2) {
    row[1] = v(0);
    row[2] = v(1);
  } else {
    row[0] = v(0);
    row[3] = v(1);
  }
  return tm;
}

// Traces by sampling the field on a sphere quadrature and projecting.
inline TraceModes incident_trace_quadrature(const IncidentField &f, const MediumConfig &cfg, int n_max,
                                            int n_theta = 0)
{
  const auto q = SphereQuadrature::with_rings(n_theta > 0 ? n_theta : n_max + 8, cfg.R);
  std::optional<SpectrumRecord> rec;
  if (const auto *mp = std::get_if<SpectralMultipole>(&f)) rec = tau_exact(cfg, mp->index.n);
  std::vector<CVec3> r1(q.size()), r2(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec3 nu = q.nodes[i];
    const auto v = incident_eval(f, cfg.R * nu, cfg, rec ? &*rec : nullptr);
    const CVec3 nc = to_complex(nu);
    r1[i] = cross(nc, v.E);
    r2[i] = I * cfg.omega * cross(nc, v.H);
  }
  const auto c1 = project_tangential(q, r1, n_max), c2 = project_tangential(q, r2, n_max);
  TraceModes tm(n_max);
  for (int id = 0; id < mode_count(n_max); ++id)
    tm.rows[id] = {c1.c_grad[id], c1.c_cross[id], c2.c_grad[id], c2.c_cross[id]};
  tm.reconstruction_error = std::max(c1.reconstruction_error, c2.reconstruction_error);
  tm.truncation_warning = c1.truncation_warning || c2.truncation_warning;
  return tm;
}

// f_{i,n,m}: trace coefficients in the eigenbasis.
struct SourceCoefficients
{
  int n_max = 0;
  std::vector<std::array<cplx, 4>> f;  // channels 1..4 at [0..3], by mode_index
  double residual = 0.0;
  bool truncation_warning = false;

  explicit SourceCoefficients(int n = 0) : n_max(n), f(mode_count(n), {0.0, 0.0, 0.0, 0.0}) {}
  cplx at(int channel, const HarmonicIndex &idx) const { return f[mode_index(idx.n, idx.m)][channel - 1]; }
};

namespace detail
{
// Solve c0 v0 + c1 v1 = rhs for two 2-vectors.
inline std::array<cplx, 2> solve_pair(const Eigen::Vector2cd &v0, const Eigen::Vector2cd &v1, cplx r0, cplx r1)
{
  const cplx det = v0(0) * v1(1) - v0(1) * v1(0);
  return {(r0 * v1(1) - r1 * v1(0)) / det, (v0(0) * r1 - v0(1) * r0) / det};
}
}  // namespace detail

inline SourceCoefficients source_from_trace(const TraceModes &tm, const std::vector<SpectrumRecord> &spectrum)
{
  const int N = tm.n_max;
  if (static_cast<int>(spectrum.size()) < N) throw Error("spectrum table shorter than the trace degree");
  SourceCoefficients s(N);
  s.residual = tm.reconstruction_error;
  s.truncation_warning = tm.truncation_warning;
  double scale = 0.0;
  for (const auto &r : tm.rows)
    for (const auto &v : r) scale = std::max(scale, std::abs(v));
  const double thr = nonzero_fraction * scale;

  double solve_res = 0.0;
  for (int n = 1; n <= N; ++n) {
    const auto &rec = spectrum[n - 1];
    for (int m = -n; m <= n; ++m) {
      const int id = mode_index(n, m);
      const auto &row = tm.rows[id];
      const cplx a0 = row[1], a1 = row[2];  // psi_V, phi_U
      const cplx b0 = row[0], b1 = row[3];  // psi_U, phi_V
      const double mag_a = std::hypot(std::abs(a0), std::abs(a1));
      if (rec.defective_A && mag_a > thr)
        throw DefectiveMode("channels 1/2 are defective at n = " + std::to_string(n));
      // tiny but nonzero rows are still expanded; only the defective check is thresholded
      if (mag_a > 0.0 && !rec.defective_A) {
        const auto c = detail::solve_pair(rec.vec[0], rec.vec[1], a0, a1);
        s.f[id][0] = c[0];
        s.f[id][1] = c[1];
        const Eigen::Vector2cd back = c[0] * rec.vec[0] + c[1] * rec.vec[1];
        solve_res = std::max(solve_res, std::hypot(std::abs(back(0) - a0), std::abs(back(1) - a1)));
      }
      const double mag_b = std::hypot(std::abs(b0), std::abs(b1));
      if (rec.defective_B && mag_b > thr)
        throw DefectiveMode("channels 3/4 are defective at n = " + std::to_string(n));
      // tiny but nonzero rows are still expanded; only the defective check is thresholded
      if (mag_b > 0.0 && !rec.defective_B) {
        const auto c = detail::solve_pair(rec.vec[2], rec.vec[3], b0, b1);
        s.f[id][2] = c[0];
        s.f[id][3] = c[1];
        const Eigen::Vector2cd back = c[0] * rec.vec[2] + c[1] * rec.vec[3];
        solve_res = std::max(solve_res, std::hypot(std::abs(back(0) - b0), std::abs(back(1) - b1)));
      }
    }
  }
  s.residual = std::max(s.residual, scale > 0.0 ? solve_res / scale : 0.0);
  return s;
}

enum class TraceMethod
{
  analytic,
  quadrature
};

inline SourceCoefficients incident_trace_coeffs(const IncidentField &f, const MediumConfig &cfg, int n_max,
                                                const std::vector<SpectrumRecord> &spectrum,
                                                TraceMethod method = TraceMethod::analytic)
{
  const auto tm = method == TraceMethod::analytic ? incident_trace_analytic(f, cfg, n_max, &spectrum)
                                                  : incident_trace_quadrature(f, cfg, n_max);
  return source_from_trace(tm, spectrum);
}

struct DensitySolution
{
  MediumConfig cfg;
  int n_max = 0;
  std::shared_ptr<const std::vector<SpectrumRecord>> spectrum;
  std::vector<std::array<cplx, 4>> coeff;  // f / tau, channels 1..4
  double min_tau = std::numeric_limits<double>::infinity();
  double max_amplification = 0.0;  // max |1/tau| over excited modes
  int excited = 0;

  // (psi_U, psi_V, phi_U, phi_V) of one mode
  std::array<cplx, 4> density(int id) const
  {
    const int n = mode_at(id).n;
    const auto &r = (*spectrum)[n - 1];
    const auto &c = coeff[id];
    const Eigen::Vector2cd a = c[0] * r.vec[0] + c[1] * r.vec[1];
    const Eigen::Vector2cd b = c[2] * r.vec[2] + c[3] * r.vec[3];
    return {b(0), a(0), a(1), b(1)};
  }
};

inline DensitySolution solve_densities(const SourceCoefficients &src,
                                       std::shared_ptr<const std::vector<SpectrumRecord>> spectrum,
                                       const MediumConfig &cfg)
{
  DensitySolution d;
  d.cfg = cfg;
  d.n_max = src.n_max;
  d.spectrum = spectrum;
  d.coeff.assign(src.f.size(), {0.0, 0.0, 0.0, 0.0});
  double scale = 0.0;
  for (const auto &v : src.f)
    for (const auto &c : v) scale = std::max(scale, std::abs(c));
  const double thr = nonzero_fraction * scale;
  for (std::size_t id = 0; id < src.f.size(); ++id) {
    const int n = mode_at(static_cast<int>(id)).n;
    for (int ch = 0; ch < 4; ++ch) {
      const cplx f = src.f[id][ch];
      if (f == 0.0) continue;
      const cplx tau = (*spectrum)[n - 1].tau[ch];
      const bool excited = std::abs(f) > thr;
      if (std::abs(tau) < near_singular_tau) {
        if (excited)
          throw NearSingularMode("|tau_" + std::to_string(ch + 1) + "," + std::to_string(n) + "| = " +
                                 std::to_string(std::abs(tau)));
        continue;
      }
      d.coeff[id][ch] = f / tau;
      if (!excited) continue;
      d.min_tau = std::min(d.min_tau, std::abs(tau));
      d.max_amplification = std::max(d.max_amplification, 1.0 / std::abs(tau));
      ++d.excited;
    }
  }
  return d;
}

// Field of the layer potentials alone (no incident part) at one point.
// Closed forms: with z = h_n outside and j_n inside, rho = k r,
//   M = z V,  N = n(n+1) z/rho Y rhat + ((rho z)'/rho) U,
// and the single-layer weights c, kappa of each side.
class LayerEvaluator
{
public:
  explicit LayerEvaluator(const DensitySolution &d) : cfg_(d.cfg)
  {
    for (int id = 0; id < static_cast<int>(d.coeff.size()); ++id) {
      const auto &c = d.coeff[id];
      if (c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0) continue;
      ids_.push_back(id);
      dens_.push_back(d.density(id));
      n_top_ = std::max(n_top_, mode_at(id).n);
    }
    if (n_top_ > 0) {
      out_R_ = radial_table(n_top_, cfg_.k_m() * cfg_.R);
      in_R_ = radial_table(n_top_, cfg_.k_c() * cfg_.R);
    }
  }

  int top_degree() const { return n_top_; }

  FieldValue operator()(const Vec3 &x_in) const
  {
    const double R = cfg_.R;
    Vec3 x = x_in;
    double r = x.norm();
    if (too_close(cfg_, r))
      throw TooCloseToSurface("|r - R| = " + std::to_string(std::abs(r - R)) + " below " +
                              std::to_string(delta_min(cfg_)));
    FieldValue v;
    if (n_top_ == 0) return v;
    // the interior field is smooth at the centre; evaluate just off it
    if (r < 1e-9 * R) {
      x = Vec3(0.0, 0.0, 1e-9 * R);
      r = x.norm();
    }
    const bool outside = r > R;
    const cplx k = outside ? cfg_.k_m() : cfg_.k_c();
    const cplx mu = outside ? cfg_.mu_m : cfg_.mu_c;
    const auto t = radial_table(n_top_, k * r);
    const auto &tR = outside ? out_R_ : in_R_;
    const auto ph = point_harmonics(n_top_, x / r);
    const CVec3 rh = to_complex(ph.frame.r_hat);
    const cplx rho = k * r, kR = k * R;
    CVec3 curl = CVec3::Zero();
    for (std::size_t s = 0; s < ids_.size(); ++s) {
      const int id = ids_[s];
      const int n = mode_at(id).n;
      const double nn = double(n) * (n + 1);
      const cplx z = outside ? t.h[n] : t.j[n];
      const cplx zp = outside ? t.hp[n] : t.jp[n];
      const cplx w = outside ? tR.j[n] : tR.h[n];
      const cplx wp = outside ? tR.jp[n] : tR.hp[n];
      const cplx c = -I * k * R * R * w;
      const cplx kap = -I * kR * (w + kR * wp);
      const CVec3 Mv = z * ph.V[id];
      const CVec3 Nv = nn * z / rho * ph.Y[id] * rh + (z / rho + zp) * ph.U[id];
      const auto &q = dens_[s];  // psi_U, psi_V, phi_U, phi_V
      v.E += mu * (q[0] * kap * Mv + q[1] * c * k * Nv) + q[2] * kap * k * Nv + q[3] * c * k * k * Mv;
      curl += mu * (q[0] * kap * k * Nv + q[1] * c * k * k * Mv) + q[2] * kap * k * k * Mv +
              q[3] * c * k * k * k * Nv;
    }
    v.H = curl / (I * cfg_.omega * mu);
    return v;
  }

private:
  MediumConfig cfg_;
  std::vector<int> ids_;
  std::vector<std::array<cplx, 4>> dens_;
  int n_top_ = 0;
  RadialTable out_R_, in_R_;
};

inline FieldValue layer_field(const DensitySolution &d, const Vec3 &x)
{
  return LayerEvaluator(d)(x);
}

// Same fields by direct quadrature of the layer potentials with the kernel
// G = -exp(ik|x-y|)/(4 pi |x-y|). Used to cross-check the closed forms.
class LayerQuadrature
{
public:
  LayerQuadrature(const DensitySolution &d, int n_theta) : cfg_(d.cfg), q_(SphereQuadrature::with_rings(n_theta, d.cfg.R))
  {
    psi_.assign(q_.size(), CVec3::Zero());
    phi_.assign(q_.size(), CVec3::Zero());
    std::vector<int> ids;
    for (int id = 0; id < static_cast<int>(d.coeff.size()); ++id) {
      const auto &c = d.coeff[id];
      if (c[0] != 0.0 || c[1] != 0.0 || c[2] != 0.0 || c[3] != 0.0) ids.push_back(id);
    }
    int top = 0;
    for (int id : ids) top = std::max(top, mode_at(id).n);
    if (top == 0) return;
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const auto ph = point_harmonics(top, q_.nodes[i]);
      for (int id : ids) {
        const auto dn = d.density(id);
        psi_[i] += dn[0] * ph.U[id] + dn[1] * ph.V[id];
        phi_[i] += dn[2] * ph.U[id] + dn[3] * ph.V[id];
      }
    }
  }

  FieldValue operator()(const Vec3 &x) const
  {
    const double r = x.norm(), R = cfg_.R;
    if (too_close(cfg_, r)) throw TooCloseToSurface("quadrature layer field too close to the surface");
    const bool outside = r > R;
    const cplx k = outside ? cfg_.k_m() : cfg_.k_c();
    const cplx mu = outside ? cfg_.mu_m : cfg_.mu_c;
    CVec3 E = CVec3::Zero(), C = CVec3::Zero();
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const Vec3 dv = x - R * q_.nodes[i];
      const double d = dv.norm();
      const Vec3 e = dv / d;
      const cplx G = -std::exp(I * k * d) / (4.0 * pi * d);
      // grad G = G f (x - y), f = ik/d - 1/d^2
      const cplx f = I * k / d - 1.0 / (d * d);
      const cplx fp = -I * k / (d * d) + 2.0 / (d * d * d);
      const CVec3 grad = G * f * d * to_complex(e);
      // Hess G + k^2 G = G[(f + k^2) I + (f^2 + f'/d) d^2 e e^T]
      const Eigen::Matrix3cd hess_k2 =
          G * ((f + k * k) * Eigen::Matrix3cd::Identity() + (f * f + fp / d) * d * d * (e * e.transpose()).cast<cplx>());
      const double w = q_.weights[i];
      E += w * (mu * cross(grad, psi_[i]) + hess_k2 * phi_[i]);
      C += w * (mu * (hess_k2 * psi_[i]) + k * k * cross(grad, phi_[i]));
    }
    return {E, C / (I * cfg_.omega * mu)};
  }

private:
  MediumConfig cfg_;
  SphereQuadrature q_;
  std::vector<CVec3> psi_, phi_;
};

// Everything one scattering problem needs, computed once.
struct ScatteringSolve
{
  MediumConfig cfg;
  IncidentField incident;
  int n_max = 0;
  std::shared_ptr<const std::vector<SpectrumRecord>> spectrum;
  SourceCoefficients source;
  DensitySolution density;
  std::shared_ptr<const LayerEvaluator> layer;

  FieldValue incident_at(const Vec3 &x) const
  {
    const SpectrumRecord *rec = nullptr;
    if (const auto *mp = std::get_if<SpectralMultipole>(&incident); mp && mp->index.n <= n_max)
      rec = &(*spectrum)[mp->index.n - 1];
    return incident_eval(incident, x, cfg, rec);
  }
  FieldValue scattered_at(const Vec3 &x) const { return (*layer)(x); }
  // incident plus layer field outside, layer field inside
  FieldValue total_at(const Vec3 &x) const
  {
    auto v = (*layer)(x);
    if (x.norm() > cfg.R) {
      const auto i = incident_at(x);
      v.E += i.E;
      v.H += i.H;
    }
    return v;
  }
};

inline ScatteringSolve solve_scattering(const IncidentField &f, const MediumConfig &cfg, int n_max,
                                        TraceMethod method = TraceMethod::analytic)
{
  ScatteringSolve s;
  s.cfg = cfg;
  s.incident = f;
  s.n_max = n_max;
  s.spectrum = std::make_shared<const std::vector<SpectrumRecord>>(spectrum_table(cfg, n_max));
  s.source = incident_trace_coeffs(f, cfg, n_max, *s.spectrum, method);
  s.density = solve_densities(s.source, s.spectrum, cfg);
  s.layer = std::make_shared<const LayerEvaluator>(s.density);
  return s;
}

enum class Region
{
  interior,
  exterior,
  excluded
};

inline const char *region_name(Region r)
{
  switch (r) {
    case Region::interior: return "interior";
    case Region::exterior: return "exterior";
    default: return "excluded";
  }
}

struct FieldGrid
{
  std::vector<Vec3> points;
  std::vector<Region> region;
  std::vector<CVec3> E, H;        // total field
  std::vector<CVec3> E_inc;       // incident field (zero inside)
  std::vector<Vec3> excluded;     // dropped points in the surface band
  int n_max = 0;
  int quadrature_order = 0;       // 0: closed-form layer fields
  MediumConfig cfg;

  // max |E - E_inc| / max |E_inc| over exterior points
  double scattered_ratio() const
  {
    double es = 0.0, ei = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (region[i] != Region::exterior) continue;
      es = std::max(es, cnorm(E[i] - E_inc[i]));
      ei = std::max(ei, cnorm(E_inc[i]));
    }
    return ei > 0.0 ? es / ei : 0.0;
  }
};

// quadrature_order > 0 evaluates the layer fields by direct quadrature with
// that many rings instead of the closed forms.
inline FieldGrid full_solution_grid(const ScatteringSolve &s, const std::vector<Vec3> &grid, int threads = 0,
                                    int quadrature_order = 0)
{
  FieldGrid g;
  g.cfg = s.cfg;
  g.n_max = s.n_max;
  g.quadrature_order = quadrature_order;
  std::optional<LayerQuadrature> quad;
  if (quadrature_order > 0) quad.emplace(s.density, quadrature_order);
  for (const auto &p : grid) {
    if (too_close(s.cfg, p.norm()))
      g.excluded.push_back(p);
    else
      g.points.push_back(p);
  }
  const std::size_t n = g.points.size();
  g.region.resize(n);
  g.E.resize(n);
  g.H.resize(n);
  g.E_inc.assign(n, CVec3::Zero());
  parallel_for(n, threads, [&](std::size_t i) {
    const Vec3 &x = g.points[i];
    const bool out = x.norm() > s.cfg.R;
    g.region[i] = out ? Region::exterior : Region::interior;
    auto v = quad ? (*quad)(x) : (*s.layer)(x);
    if (out) {
      const auto inc = s.incident_at(x);
      v.E += inc.E;
      v.H += inc.H;
      g.E_inc[i] = inc.E;
    }
    g.E[i] = v.E;
    g.H[i] = v.H;
  });
  return g;
}

inline FieldGrid full_solution_grid(const IncidentField &f, const MediumConfig &cfg, const std::vector<Vec3> &grid,
                                    int n_max, int threads = 0)
{
  return full_solution_grid(solve_scattering(f, cfg, n_max), grid, threads);
}

// Planar slice: fixed coordinate `axis` at `level`, the other two swept
// over [lo, hi] with `count` points each (first varies slowest).
inline std::vector<Vec3> slice_grid(int axis, double level, double lo1, double hi1, int n1, double lo2, double hi2,
                                    int n2)
{
  std::vector<Vec3> pts;
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      Vec3 p;
      p[axis] = level;
      p[a1] = n1 > 1 ? lo1 + (hi1 - lo1) * i / (n1 - 1) : lo1;
      p[a2] = n2 > 1 ? lo2 + (hi2 - lo2) * j / (n2 - 1) : lo2;
      pts.push_back(p);
    }
  return pts;
}

// Directions for surface checks: one sphere quadrature's nodes.
inline std::vector<Vec3> check_directions(int rings = 8)
{
  return SphereQuadrature::with_rings(rings).nodes;
}

struct TransmissionResidual
{
  double res_E = 0.0, res_H = 0.0;
  double scale_E = 0.0, scale_H = 0.0;  // max extrapolated |nu x E|, |nu x H| outside
};

// Tangential traces from both sides at R(1 +- h), h in `deltas`, extrapolated
// to the surface; returns max mismatch relative to the largest trace.
inline TransmissionResidual transmission_residual(const ScatteringSolve &s, const std::vector<double> &deltas,
                                                  int rings = 8)
{
  for (double d : deltas)
    if (d * s.cfg.R < delta_min(s.cfg) * (1.0 - 1e-12))
      throw TooCloseToSurface("extrapolation offsets must stay at or above delta_min");
  TransmissionResidual out;
  const auto dirs = check_directions(rings);
  std::vector<double> h(deltas.begin(), deltas.end());
  double mE = 0.0, mH = 0.0;
  for (const auto &u : dirs) {
    const CVec3 nu = to_complex(u);
    std::vector<CVec3> eo, ei, ho, hi;
    for (double d : deltas) {
      const auto o = s.total_at(s.cfg.R * (1.0 + d) * u);
      const auto in = s.total_at(s.cfg.R * (1.0 - d) * u);
      eo.push_back(cross(nu, o.E));
      ho.push_back(cross(nu, o.H));
      ei.push_back(cross(nu, in.E));
      hi.push_back(cross(nu, in.H));
    }
    const CVec3 Eo = neville_at_zero(h, eo), Ei = neville_at_zero(h, ei);
    const CVec3 Ho = neville_at_zero(h, ho), Hi = neville_at_zero(h, hi);
    mE = std::max(mE, cnorm(Eo - Ei));
    mH = std::max(mH, cnorm(Ho - Hi));
    out.scale_E = std::max(out.scale_E, cnorm(Eo));
    out.scale_H = std::max(out.scale_H, cnorm(Ho));
  }
  out.res_E = out.scale_E > 0.0 ? mE / out.scale_E : mE;
  out.res_H = out.scale_H > 0.0 ? mH / out.scale_H : mH;
  return out;
}

// `count` offsets evenly spaced from delta down to delta_min (relative to R).
// Inside a strongly negative inclusion the field varies on a scale of
// 1/|k_c|, so a few levels are not enough; nine reach rounding level at
// |k_c| R of about 13.
inline std::vector<double> extrapolation_levels(double delta, int count = 9)
{
  if (delta < delta_min_fraction * (1.0 - 1e-12))
    throw TooCloseToSurface("offset below delta_min");
  if (count < 2 || delta <= delta_min_fraction) return {delta};
  std::vector<double> h;
  for (int i = 0; i < count; ++i) h.push_back(delta + (delta_min_fraction - delta) * i / (count - 1));
  return h;
}

inline TransmissionResidual transmission_residual(const IncidentField &f, const MediumConfig &cfg, int n_max,
                                                  double delta = 3.0 * delta_min_fraction)
{
  return transmission_residual(solve_scattering(f, cfg, n_max), extrapolation_levels(delta));
}

// max over directions of |x| |sqrt(mu_m) H^s x xhat - sqrt(eps_m) E^s|, per radius.
inline std::vector<double> radiation_residual(const DensitySolution &d, const std::vector<double> &radii,
                                              int rings = 8)
{
  const LayerEvaluator layer(d);
  const auto dirs = check_directions(rings);
  const cplx sm = std::sqrt(d.cfg.mu_m), se = std::sqrt(d.cfg.eps_m);
  std::vector<double> out;
  for (double r : radii) {
    double worst = 0.0;
    for (const auto &u : dirs) {
      const auto v = layer(r * u);
      worst = std::max(worst, r * cnorm(sm * cross(v.H, to_complex(u)) - se * v.E));
    }
    out.push_back(worst);
  }
  return out;
}

}  // namespace plasmon

#endif  // PLASMON_SCATTERING_HPP
