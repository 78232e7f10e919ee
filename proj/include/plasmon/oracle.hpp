// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_ORACLE_HPP
#define PLASMON_ORACLE_HPP

// Brute-force checks of the closed-form layer-operator eigenvalues. Nothing
// here is used by the solver; tests and `verify` compare against it.
//
// Potentials are integrated off the surface at r = R(1 +- delta) and the
// one-sided values are extrapolated to delta -> 0. Averaging the two limits
// removes the jump, so no singular surface quadrature is ever needed.

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "extrapolate.hpp"
#include "harmonics.hpp"
#include "parallel.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace plasmon
{

struct OracleOptions
{
  // relative offsets, strictly decreasing, smallest >= delta_min / R
  std::vector<double> offsets{0.06, 0.055, 0.05, 0.045, 0.04, 0.035, 0.03, 0.025, 0.02};
  double delta_min = 0.02;       // relative to R
  double first_panel = 0.004;    // polar width of the innermost panel
  int panel_order = 20;          // Gauss points per polar panel
  double unstable_tol = 1e-5;    // last two extrapolation levels
  double leakage_tol = 1e-4;
};

namespace detail
{
// Sphere rule whose pole sits on `axis`, with polar panels doubling from
// `first` so that the kernel peak near the pole is resolved at any offset
// down to about `first`.
struct PoleRule
{
  std::vector<Vec3> nodes;  // unit vectors
  std::vector<double> weights;  // on the unit sphere
};

inline PoleRule pole_rule(const Vec3 &axis, int azimuths, double first, int order)
{
  const Vec3 ez = axis.normalized();
  const Vec3 tmp = std::abs(ez.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 ex = (tmp - tmp.dot(ez) * ez).normalized();
  const Vec3 ey = ez.cross(ex);
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  std::vector<double> br{0.0};
  for (double b = first; b < pi; b *= 2.0) br.push_back(b);
  br.push_back(pi);
  PoleRule r;
  const double dphi = 2.0 * pi / azimuths;
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double a = br[p], b = br[p + 1];
    for (int i = 0; i < order; ++i) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
      const double w = 0.5 * (b - a) * gw[i] * std::sin(t) * dphi;
      for (int j = 0; j < azimuths; ++j) {
        const double f = dphi * j;
        r.nodes.push_back(std::sin(t) * (std::cos(f) * ex + std::sin(f) * ey) + std::cos(t) * ez);
        r.weights.push_back(w);
      }
    }
  }
  return r;
}

// Potentials of Y, U, V of one mode at x, from the nodes of a rule.
struct ModePotentials
{
  cplx S = 0.0;                      // S[Y]
  CVec3 grad_S = CVec3::Zero();      // grad S[Y]
  CVec3 A_U = CVec3::Zero(), A_V = CVec3::Zero();
  CVec3 curl_U = CVec3::Zero(), curl_V = CVec3::Zero();
};

struct NodeDensity
{
  cplx Y;
  CVec3 U, V;
};

inline std::vector<NodeDensity> node_density(const PoleRule &rule, const HarmonicIndex &idx)
{
  std::vector<NodeDensity> d;
  d.reserve(rule.nodes.size());
  const int id = mode_index(idx.n, idx.m);
  for (const auto &y : rule.nodes) {
    const auto ph = point_harmonics(idx.n, y);
    d.push_back({ph.Y[id], ph.U[id], ph.V[id]});
  }
  return d;
}

// Y_0^0 has no tangential part; handled separately so n = 0 works for S.
inline std::vector<NodeDensity> node_density_scalar(const PoleRule &rule, const HarmonicIndex &idx)
{
  if (idx.n >= 1) return node_density(rule, idx);
  std::vector<NodeDensity> d(rule.nodes.size(), {1.0 / std::sqrt(4.0 * pi), CVec3::Zero(), CVec3::Zero()});
  return d;
}

inline ModePotentials potentials(const PoleRule &rule, const std::vector<NodeDensity> &dens, cplx k, double R,
                                 const Vec3 &x)
{
  ModePotentials p;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec3 dv = x - R * rule.nodes[i];
    const double d = dv.norm();
    const cplx G = -std::exp(I * k * d) / (4.0 * pi * d);
    const cplx w = rule.weights[i] * R * R;
    // grad_x G = G (ik/d - 1/d^2) (x - y)
    const CVec3 g = (G * (I * k / d - 1.0 / (d * d))) * to_complex(dv);
    const auto &q = dens[i];
    p.S += w * G * q.Y;
    p.grad_S += w * q.Y * g;
    p.A_U += w * G * q.U;
    p.A_V += w * G * q.V;
    p.curl_U += w * cross(g, q.U);
    p.curl_V += w * cross(g, q.V);
  }
  return p;
}

// Fixed generic probe directions; none sits on a coordinate axis.
inline std::vector<Vec3> probe_directions()
{
  return {Vec3(0.31, 0.52, 0.79).normalized(), Vec3(-0.62, 0.23, -0.75).normalized(),
          Vec3(0.81, -0.46, 0.12).normalized(), Vec3(-0.21, -0.88, 0.37).normalized()};
}

// Least-squares fit v_i = a U_i + b V_i over the probes.
struct TangentFit
{
  cplx a = 0.0, b = 0.0;
  double residual = 0.0;
};

inline TangentFit fit_tangent(const std::vector<CVec3> &v, const std::vector<CVec3> &U, const std::vector<CVec3> &V)
{
  Eigen::MatrixXcd M(3 * v.size(), 2);
  Eigen::VectorXcd rhs(3 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    M.block(3 * i, 0, 3, 1) = U[i];
    M.block(3 * i, 1, 3, 1) = V[i];
    rhs.segment(3 * i, 3) = v[i];
  }
  const Eigen::Vector2cd c = M.colPivHouseholderQr().solve(rhs);
  TangentFit f{c(0), c(1), (M * c - rhs).norm()};
  return f;
}

struct ScalarFit
{
  cplx a = 0.0;
  double residual = 0.0;
};

inline ScalarFit fit_scalar(const std::vector<cplx> &v, const std::vector<cplx> &Y)
{
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += std::conj(Y[i]) * v[i];
    den += std::norm(Y[i]);
  }
  ScalarFit f{num / den, 0.0};
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) r += std::norm(v[i] - f.a * Y[i]);
  f.residual = std::sqrt(r);
  return f;
}
}  // namespace detail

struct JumpExtrapolation
{
  std::vector<double> offsets;
  std::vector<cplx> samples_out, samples_in;
  cplx extrapolated_out = 0.0, extrapolated_in = 0.0;
  cplx jump = 0.0;     // out - in
  cplx average = 0.0;
  double level_change = 0.0;  // |last - previous| of the two tableaux, worst side
};

namespace detail
{
inline void check_offsets(const OracleOptions &o)
{
  if (o.offsets.size() < 2) throw Error("oracle needs at least two offsets");
  for (std::size_t i = 0; i < o.offsets.size(); ++i) {
    if (o.offsets[i] < o.delta_min * (1.0 - 1e-12)) throw TooCloseToSurface("oracle offset below delta_min");
    if (i && !(o.offsets[i] < o.offsets[i - 1])) throw Error("oracle offsets must strictly decrease");
  }
}

inline JumpExtrapolation extrapolate(const OracleOptions &o, std::vector<cplx> out, std::vector<cplx> in,
                                     const std::string &what)
{
  JumpExtrapolation j;
  j.offsets = o.offsets;
  const auto dout = neville_diagonal(o.offsets, out), din = neville_diagonal(o.offsets, in);
  j.samples_out = std::move(out);
  j.samples_in = std::move(in);
  j.extrapolated_out = dout.back();
  j.extrapolated_in = din.back();
  j.jump = j.extrapolated_out - j.extrapolated_in;
  j.average = 0.5 * (j.extrapolated_out + j.extrapolated_in);
  const std::size_t L = dout.size();
  j.level_change = std::max(std::abs(dout[L - 1] - dout[L - 2]), std::abs(din[L - 1] - din[L - 2]));
  const double scale = std::max({1.0, std::abs(j.extrapolated_out), std::abs(j.extrapolated_in)});
  if (j.level_change > o.unstable_tol * scale)
    throw ExtrapolationUnstable(what + ": last levels differ by " + std::to_string(j.level_change));
  return j;
}

// Potentials at every probe and offset, both sides.
struct ProbeSamples
{
  std::vector<Vec3> dirs;
  std::vector<PointHarmonics> at;               // harmonics at each probe
  std::vector<std::vector<ModePotentials>> out, in;  // [level][probe]
};

inline ProbeSamples sample_probes(const HarmonicIndex &idx, cplx k, double R, const OracleOptions &o)
{
  check_offsets(o);
  ProbeSamples s;
  s.dirs = probe_directions();
  const int az = 2 * idx.n + 12;
  s.out.assign(o.offsets.size(), std::vector<ModePotentials>(s.dirs.size()));
  s.in = s.out;
  for (std::size_t p = 0; p < s.dirs.size(); ++p) {
    const auto rule = pole_rule(s.dirs[p], az, o.first_panel, o.panel_order);
    const auto dens = node_density_scalar(rule, idx);
    s.at.push_back(point_harmonics(std::max(idx.n, 1), s.dirs[p]));
    for (std::size_t l = 0; l < o.offsets.size(); ++l) {
      s.out[l][p] = potentials(rule, dens, k, R, R * (1.0 + o.offsets[l]) * s.dirs[p]);
      s.in[l][p] = potentials(rule, dens, k, R, R * (1.0 - o.offsets[l]) * s.dirs[p]);
    }
  }
  return s;
}

inline cplx probe_Y(const ProbeSamples &s, std::size_t p, const HarmonicIndex &idx)
{
  return idx.n == 0 ? cplx(1.0 / std::sqrt(4.0 * pi)) : s.at[p].Y[mode_index(idx.n, idx.m)];
}
}  // namespace detail

// Direct quadrature of S[Y](x) = int G(x, y) Y(y) ds(y) on the sphere of radius R.
inline cplx oracle_single_layer(const HarmonicIndex &idx, cplx k, double R, const Vec3 &x,
                                const OracleOptions &o = {})
{
  validate(idx);
  const double r = x.norm();
  if (std::abs(r - R) < o.delta_min * R * (1.0 - 1e-12)) throw TooCloseToSurface("oracle point too close to the surface");
  const Vec3 axis = r > 0.0 ? Vec3(x / r) : Vec3::UnitZ();
  const auto rule = detail::pole_rule(axis, 2 * idx.n + 12, o.first_panel, o.panel_order);
  const auto dens = detail::node_density_scalar(rule, idx);
  return detail::potentials(rule, dens, k, R, x).S;
}

// lambda from the two one-sided limits of d/dr S[Y]: they are lambda +- 1/2.
// The overloads taking samples let one quadrature pass serve every identity.
inline JumpExtrapolation oracle_lambda(const detail::ProbeSamples &s, const HarmonicIndex &idx, const OracleOptions &o)
{
  std::vector<cplx> out, in, Y;
  for (std::size_t p = 0; p < s.dirs.size(); ++p) Y.push_back(detail::probe_Y(s, p, idx));
  for (std::size_t l = 0; l < o.offsets.size(); ++l) {
    std::vector<cplx> vo, vi;
    for (std::size_t p = 0; p < s.dirs.size(); ++p) {
      const CVec3 nu = to_complex(s.dirs[p]);
      vo.push_back((nu.transpose() * s.out[l][p].grad_S)(0));
      vi.push_back((nu.transpose() * s.in[l][p].grad_S)(0));
    }
    out.push_back(detail::fit_scalar(vo, Y).a);
    in.push_back(detail::fit_scalar(vi, Y).a);
  }
  return detail::extrapolate(o, out, in, "lambda");
}

// chi from the surface limit of S[Y]; the two sides agree.
inline JumpExtrapolation oracle_chi(const detail::ProbeSamples &s, const HarmonicIndex &idx, const OracleOptions &o)
{
  std::vector<cplx> out, in, Y;
  for (std::size_t p = 0; p < s.dirs.size(); ++p) Y.push_back(detail::probe_Y(s, p, idx));
  for (std::size_t l = 0; l < o.offsets.size(); ++l) {
    std::vector<cplx> vo, vi;
    for (std::size_t p = 0; p < s.dirs.size(); ++p) {
      vo.push_back(s.out[l][p].S);
      vi.push_back(s.in[l][p].S);
    }
    out.push_back(detail::fit_scalar(vo, Y).a);
    in.push_back(detail::fit_scalar(vi, Y).a);
  }
  return detail::extrapolate(o, out, in, "chi");
}

enum class DensityKind
{
  grad,           // U = grad_S Y
  grad_cross_nu   // V = U x nu
};

struct OracleML
{
  // M keeps each density in its own direction; L swaps them.
  JumpExtrapolation M, L;
  double M_leakage = 0.0, L_leakage = 0.0;  // off-diagonal and fit residual, relative
  cplx m() const { return M.average; }
  cplx l() const { return L.average; }
};

// M[phi] = average of nu x curl A[phi] over both sides; L[phi] =
// nu x (k^2 A[phi] + grad S[div phi]), continuous across the surface, with
// div (grad_S Y x nu) = 0 and, since grad_S is the unit-sphere gradient,
// div grad_S Y = Laplace_S Y / R = -n(n+1) Y / R on the sphere of radius R.
inline OracleML oracle_M_L(const detail::ProbeSamples &s, const HarmonicIndex &idx, DensityKind which, cplx k,
                           double R, const OracleOptions &o)
{
  if (idx.n < 1) throw DegenerateIndex("tangential densities need n >= 1");
  const int id = mode_index(idx.n, idx.m);
  const double nn = double(idx.n) * (idx.n + 1);
  const bool g = which == DensityKind::grad;
  std::vector<CVec3> U, V;
  for (const auto &h : s.at) {
    U.push_back(h.U[id]);
    V.push_back(h.V[id]);
  }
  std::vector<cplx> mo, mi, lo, li;
  std::vector<cplx> mo_off, mi_off, lo_off, li_off;
  double resid_M = 0.0, resid_L = 0.0;
  for (std::size_t l = 0; l < o.offsets.size(); ++l) {
    for (int side = 0; side < 2; ++side) {
      const auto &pot = side == 0 ? s.out[l] : s.in[l];
      std::vector<CVec3> vm, vl;
      for (std::size_t p = 0; p < s.dirs.size(); ++p) {
        const CVec3 nu = to_complex(s.dirs[p]);
        const auto &q = pot[p];
        vm.push_back(cross(nu, g ? q.curl_U : q.curl_V));
        const CVec3 inner = k * k * (g ? q.A_U : q.A_V) + (g ? -nn / R : 0.0) * q.grad_S;
        vl.push_back(cross(nu, inner));
      }
      const auto fm = detail::fit_tangent(vm, U, V), fl = detail::fit_tangent(vl, U, V);
      resid_M = std::max(resid_M, fm.residual);
      resid_L = std::max(resid_L, fl.residual);
      // M: diagonal on the density's own direction; L: on the other one
      const cplx m_diag = g ? fm.a : fm.b, m_off = g ? fm.b : fm.a;
      const cplx l_diag = g ? fl.b : fl.a, l_off = g ? fl.a : fl.b;
      (side == 0 ? mo : mi).push_back(m_diag);
      (side == 0 ? mo_off : mi_off).push_back(m_off);
      (side == 0 ? lo : li).push_back(l_diag);
      (side == 0 ? lo_off : li_off).push_back(l_off);
    }
  }
  OracleML r;
  r.M = detail::extrapolate(o, mo, mi, "M");
  r.L = detail::extrapolate(o, lo, li, "L");
  const cplx m_off = 0.5 * (neville_at_zero(o.offsets, mo_off) + neville_at_zero(o.offsets, mi_off));
  const cplx l_off = 0.5 * (neville_at_zero(o.offsets, lo_off) + neville_at_zero(o.offsets, li_off));
  // the fit residual is scaled by the probe basis norm
  double basis = 0.0;
  for (std::size_t p = 0; p < U.size(); ++p) basis += std::pow(cnorm(U[p]), 2);
  basis = std::sqrt(basis);
  const double ms = std::max(std::abs(r.m()), 1e-300), ls = std::max(std::abs(r.l()), 1e-300);
  r.M_leakage = std::max(std::abs(m_off), resid_M / basis) / ms;
  r.L_leakage = std::max(std::abs(l_off), resid_L / basis) / ls;
  if (r.M_leakage > o.leakage_tol) throw LeakageExcessive("M leaves its invariant direction: " + std::to_string(r.M_leakage));
  if (r.L_leakage > o.leakage_tol) throw LeakageExcessive("L leaves its target direction: " + std::to_string(r.L_leakage));
  return r;
}

inline JumpExtrapolation oracle_lambda(const HarmonicIndex &idx, cplx k, double R, const OracleOptions &o = {})
{
  validate(idx);
  return oracle_lambda(detail::sample_probes(idx, k, R, o), idx, o);
}

inline JumpExtrapolation oracle_chi(const HarmonicIndex &idx, cplx k, double R, const OracleOptions &o = {})
{
  validate(idx);
  return oracle_chi(detail::sample_probes(idx, k, R, o), idx, o);
}

inline OracleML oracle_M_L(const HarmonicIndex &idx, DensityKind which, cplx k, double R, const OracleOptions &o = {})
{
  validate(idx);
  if (idx.n < 1) throw DegenerateIndex("tangential densities need n >= 1");
  return oracle_M_L(detail::sample_probes(idx, k, R, o), idx, which, k, R, o);
}

// ---- verification report

struct VerifyEntry
{
  std::string identity;
  int n = 0;
  cplx k;
  double R = 1.0;
  cplx oracle, closed_form;
  double abs_error = 0.0, rel_error = 0.0;
  bool pass = false;
  std::string error;  // set when the oracle itself failed
};

struct VerifyReport
{
  std::vector<VerifyEntry> entries;
  double tolerance = 1e-4;
  double seconds = 0.0;
  bool pass() const
  {
    for (const auto &e : entries)
      if (!e.pass) return false;
    return !entries.empty();
  }
  double worst() const
  {
    double w = 0.0;
    for (const auto &e : entries) w = std::max(w, e.error.empty() ? e.rel_error : INFINITY);
    return w;
  }
};

struct VerifySpec
{
  int cases = 20;
  int n_max = 6;
  std::uint64_t seed = 1;
  double k_abs_lo = 0.5, k_abs_hi = 5.0;
  double k_arg_hi = pi / 4;
  double R_lo = 0.5, R_hi = 1.5;
  double tolerance = 1e-4;
  bool tangential = true;  // m1, m2, l1, l2 as well as lambda and chi
};

// Draws (k, R) pairs; only this depends on the seed.
inline std::vector<std::pair<cplx, double>> verify_points(const VerifySpec &v)
{
  std::mt19937_64 rng(v.seed);
  std::uniform_real_distribution<double> ka(v.k_abs_lo, v.k_abs_hi), kp(0.0, v.k_arg_hi), rr(v.R_lo, v.R_hi);
  std::vector<std::pair<cplx, double>> pts;
  for (int i = 0; i < v.cases; ++i) {
    const double a = ka(rng), p = kp(rng), R = rr(rng);
    pts.emplace_back(std::polar(a, p), R);
  }
  return pts;
}

inline std::vector<VerifyEntry> verify_case(cplx k, double R, int n_max, double tol, const OracleOptions &o = {},
                                            bool tangential = true)
{
  std::vector<VerifyEntry> out;
  auto add = [&](const std::string &name, int n, auto &&oracle_fn, auto &&closed_fn) {
    VerifyEntry e;
    e.identity = name;
    e.n = n;
    e.k = k;
    e.R = R;
    try {
      e.closed_form = closed_fn();
      e.oracle = oracle_fn();
      e.abs_error = std::abs(e.oracle - e.closed_form);
      e.rel_error = e.abs_error / std::max(std::abs(e.closed_form), 1e-300);
      e.pass = e.rel_error <= tol;
    } catch (const Error &ex) {
      e.error = ex.what();
      e.pass = false;
    }
    out.push_back(std::move(e));
  };
  for (int n = 1; n <= n_max; ++n) {
    // a closed form that fails its own consistency check is recorded, not thrown
    std::optional<WaveCoeffs> wc;
    auto w = [&]() -> const WaveCoeffs & {
      if (!wc) wc = wave_coeffs(n, k, R);
      return *wc;
    };
    // the closed forms do not depend on m; a mid-range order exercises the azimuth
    const HarmonicIndex idx{n, n / 2};
    std::optional<detail::ProbeSamples> smp;
    std::optional<OracleML> g, c;
    auto samples = [&]() -> const detail::ProbeSamples & {
      if (!smp) smp = detail::sample_probes(idx, k, R, o);
      return *smp;
    };
    auto grad = [&]() -> const OracleML & {
      if (!g) g = oracle_M_L(samples(), idx, DensityKind::grad, k, R, o);
      return *g;
    };
    auto crs = [&]() -> const OracleML & {
      if (!c) c = oracle_M_L(samples(), idx, DensityKind::grad_cross_nu, k, R, o);
      return *c;
    };
    add("lambda", n, [&] { return oracle_lambda(samples(), idx, o).average; }, [&] { return w().lc.lambda; });
    add("chi", n, [&] { return oracle_chi(samples(), idx, o).average; }, [&] { return w().lc.chi; });
    if (!tangential) continue;
    add("m1", n, [&] { return crs().m(); }, [&] { return w().m1; });
    add("m2", n, [&] { return grad().m(); }, [&] { return w().m2; });
    add("l1", n, [&] { return crs().l(); }, [&] { return w().l1; });
    add("l2", n, [&] { return grad().l(); }, [&] { return w().l2; });
  }
  return out;
}

inline VerifyReport verify_identities(const VerifySpec &v, int threads = 0, const OracleOptions &o = {})
{
  VerifyReport rep;
  rep.tolerance = v.tolerance;
  const auto pts = verify_points(v);
  std::vector<std::vector<VerifyEntry>> per(pts.size());
  parallel_for(pts.size(), threads,
               [&](std::size_t i) { per[i] = verify_case(pts[i].first, pts[i].second, v.n_max, v.tolerance, o, v.tangential); });
  for (auto &p : per)
    for (auto &e : p) rep.entries.push_back(std::move(e));
  return rep;
}

// ---- Wronskian and the two lambda forms, no quadrature involved

struct DualSpec
{
  int cases = 500;
  int n_max = 80;
  std::uint64_t seed = 1;
  double k_abs_lo = 0.1, k_abs_hi = 20.0;
  double k_arg_hi = pi / 2;
  double R_lo = 0.5, R_hi = 2.0;
  double tolerance = 1e-10;
};

// Per case: j h' - j' h against i/z^2, and the two lambda forms against each other.
inline VerifyReport dual_lambda_suite(const DualSpec &v)
{
  VerifyReport rep;
  rep.tolerance = v.tolerance;
  std::mt19937_64 rng(v.seed);
  std::uniform_int_distribution<int> nd(0, v.n_max);
  std::uniform_real_distribution<double> ka(v.k_abs_lo, v.k_abs_hi), kp(0.0, v.k_arg_hi), rr(v.R_lo, v.R_hi);
  for (int i = 0; i < v.cases; ++i) {
    const int n = nd(rng);
    const cplx k = std::polar(ka(rng), kp(rng));
    const double R = rr(rng);
    VerifyEntry w, d;
    w.identity = "wronskian";
    d.identity = "dual_lambda";
    w.n = d.n = n;
    w.k = d.k = k;
    w.R = d.R = R;
    try {
      const auto t = radial_table(n, k * R);
      const cplx z = k * R;
      w.oracle = t.j[n] * t.hp[n] - t.jp[n] * t.h[n];
      w.closed_form = I / (z * z);
      const auto lc = lambda_chi_from(t, n, k, R, false);
      d.oracle = lc.lambda_dual;
      d.closed_form = lc.lambda;
      for (auto *e : {&w, &d}) {
        e->abs_error = std::abs(e->oracle - e->closed_form);
        e->rel_error = e->abs_error / std::max(std::abs(e->closed_form), 1e-300);
        e->pass = e->rel_error <= v.tolerance;
      }
    } catch (const Error &ex) {
      w.error = d.error = ex.what();
    }
    rep.entries.push_back(std::move(w));
    rep.entries.push_back(std::move(d));
  }
  return rep;
}

}  // namespace plasmon

#endif  // PLASMON_ORACLE_HPP
