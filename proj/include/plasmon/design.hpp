// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_DESIGN_HPP
#define PLASMON_DESIGN_HPP

// Drude dispersion, the sufficient conditions for resonance and cloaking, and
// grid scanners over inclusion parameters.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace plasmon
{

struct DrudeParams
{
  double eps0 = 1.0, mu0 = 1.0;
  double omega_p_sq = 1.0;
  double tau_damp = 1e-4;
  double filling = 0.0;
  double omega0 = 2.0;
};

struct DrudeValues
{
  cplx eps_c, mu_c;
};

inline constexpr double drude_pole_tol = 1e-12;

inline DrudeValues drude_forward(const DrudeParams &p, double omega)
{
  if (!(omega > 0.0)) throw Error("drude frequency must be positive");
  const cplx pole = omega * omega - p.omega0 * p.omega0 + I * p.tau_damp * omega;
  if (std::abs(pole) < drude_pole_tol) throw NearPole("omega^2 - omega0^2 + i tau omega vanishes");
  DrudeValues v;
  v.eps_c = p.eps0 * (1.0 - p.omega_p_sq / (omega * (omega + I * p.tau_damp)));
  v.mu_c = p.mu0 * (1.0 - p.filling * omega * omega / pole);
  return v;
}

struct DrudeInverse
{
  DrudeParams params;
  // imaginary parts the real parameters cannot carry
  double omega_p_sq_leak = 0.0, filling_leak = 0.0;
  // |forward - target|
  double residual_eps = 0.0, residual_mu = 0.0;
};

inline DrudeInverse drude_inverse(cplx target_eps, cplx target_mu, double omega, double tau_damp, double omega0,
                                  double eps0 = 1.0, double mu0 = 1.0)
{
  if (!(omega > 0.0) || !(tau_damp > 0.0)) throw Error("omega and tau must be positive");
  DrudeInverse out;
  out.params.eps0 = eps0;
  out.params.mu0 = mu0;
  out.params.tau_damp = tau_damp;
  out.params.omega0 = omega0;
  const cplx wp2 = omega * (omega + I * tau_damp) * (1.0 - target_eps / eps0);
  const cplx pole = omega * omega - omega0 * omega0 + I * tau_damp * omega;
  if (std::abs(pole) < drude_pole_tol) throw NearPole("omega^2 - omega0^2 + i tau omega vanishes");
  const cplx fill = (1.0 - target_mu / mu0) * pole / (omega * omega);
  if (!(wp2.real() > 0.0)) throw Unreachable("required plasma frequency squared is not positive");
  // tiny negative round-off in the filling factor is still zero
  const double f = std::abs(fill.real()) < 1e-15 ? 0.0 : fill.real();
  if (f < 0.0 || f >= 1.0) throw Unreachable("required filling factor leaves [0, 1)");
  out.params.omega_p_sq = wp2.real();
  out.params.filling = f;
  out.omega_p_sq_leak = wp2.imag();
  out.filling_leak = fill.imag();
  const auto back = drude_forward(out.params, omega);
  out.residual_eps = std::abs(back.eps_c - target_eps);
  out.residual_mu = std::abs(back.mu_c - target_mu);
  return out;
}

enum class RegimeKind
{
  resonance_cf1,
  resonance_cf2,
  resonance_cf3,
  resonance_cf4,
  cloak_re01,
  cloak_re02,
  cloak_re03,
  cloak_re04,
  cloak_cc1,
  none
};

inline const char *regime_name(RegimeKind k)
{
  switch (k) {
    case RegimeKind::resonance_cf1: return "resonance_cf1";
    case RegimeKind::resonance_cf2: return "resonance_cf2";
    case RegimeKind::resonance_cf3: return "resonance_cf3";
    case RegimeKind::resonance_cf4: return "resonance_cf4";
    case RegimeKind::cloak_re01: return "cloak_re01";
    case RegimeKind::cloak_re02: return "cloak_re02";
    case RegimeKind::cloak_re03: return "cloak_re03";
    case RegimeKind::cloak_re04: return "cloak_re04";
    case RegimeKind::cloak_cc1: return "cloak_cc1";
    default: return "none";
  }
}

struct Margin
{
  std::string name;
  double value;
};

struct RegimeVerdict
{
  RegimeKind kind = RegimeKind::none;
  bool satisfied = false;
  std::vector<Margin> margins;
};

struct RegimeThresholds
{
  double theta_big = 10.0;
  double theta_small = 1e-2;
  double equality_tol = 1e-9;
  double strict_slack = 1e-12;
};

// Every margin is >= 0 exactly when its inequality holds.
inline std::vector<RegimeVerdict> check_regime(const MediumConfig &cfg, const RegimeThresholds &th = {})
{
  const double w2 = cfg.omega * cfg.omega;
  const cplx mu_sum = cfg.mu_c + cfg.mu_m;
  const cplx eps_w2 = (cfg.eps_c + cfg.eps_m) * w2;
  const double split = (mu_sum - eps_w2).real();
  const double eps_zero = th.equality_tol - std::abs(cfg.eps_c + cfg.eps_m);
  const double mu_zero = th.equality_tol - std::abs(cfg.mu_c + cfg.mu_m);
  const double big_eps = std::abs(eps_w2) - th.theta_big - th.strict_slack;
  const double big_mu = std::abs(mu_sum) - th.theta_big - th.strict_slack;

  auto make = [](RegimeKind k, std::vector<Margin> m) {
    RegimeVerdict v{k, true, std::move(m)};
    for (const auto &x : v.margins) v.satisfied = v.satisfied && x.value >= 0.0;
    return v;
  };
  return {
      make(RegimeKind::resonance_cf1, {{"eps_c + eps_m = 0", eps_zero}, {"Re(mu_c + mu_m) >= 0", mu_sum.real()}}),
      make(RegimeKind::resonance_cf2, {{"mu_c + mu_m = 0", mu_zero}, {"Re((eps_c + eps_m) w^2) >= 0", eps_w2.real()}}),
      make(RegimeKind::resonance_cf3, {{"eps_m + eps_c = 0", eps_zero}, {"Re(mu_c + mu_m) <= 0", -mu_sum.real()}}),
      make(RegimeKind::resonance_cf4, {{"mu_m + mu_c = 0", mu_zero}, {"Re((eps_c + eps_m) w^2) <= 0", -eps_w2.real()}}),
      make(RegimeKind::cloak_re01, {{"Re(mu_sum - eps_sum w^2) >= 0", split}, {"|eps_sum w^2| > theta", big_eps}}),
      make(RegimeKind::cloak_re02,
           {{"Re(mu_sum - eps_sum w^2) < 0", -split - th.strict_slack}, {"|mu_sum| > theta", big_mu}}),
      make(RegimeKind::cloak_re03, {{"Re(mu_sum - eps_sum w^2) >= 0", split}, {"|mu_sum| > theta", big_mu}}),
      make(RegimeKind::cloak_re04,
           {{"Re(mu_sum - eps_sum w^2) < 0", -split - th.strict_slack}, {"|eps_sum w^2| > theta", big_eps}}),
      make(RegimeKind::cloak_cc1, {{"|mu_sum| > theta", big_mu}, {"|eps_sum w^2| > theta", big_eps}}),
  };
}

inline const RegimeVerdict &verdict_of(const std::vector<RegimeVerdict> &v, RegimeKind k)
{
  for (const auto &x : v)
    if (x.kind == k) return x;
  throw Error("no verdict of that kind");
}

// ---- scans

enum class SweepParam
{
  eps_c_re,
  eps_c_im,
  mu_c_re,
  omega
};

inline const char *sweep_name(SweepParam p)
{
  switch (p) {
    case SweepParam::eps_c_re: return "eps_c_re";
    case SweepParam::eps_c_im: return "eps_c_im";
    case SweepParam::mu_c_re: return "mu_c_re";
    default: return "omega";
  }
}

// Evenly spaced [lo, hi]; with a step, the count is chosen so the grid lands on hi.
struct SweepAxis
{
  SweepParam param = SweepParam::eps_c_re;
  double lo = 0.0, hi = 0.0;
  int count = 0;

  static SweepAxis stepped(SweepParam p, double lo, double hi, double step)
  {
    if (!(step > 0.0)) throw Error("sweep step must be positive");
    return {p, lo, hi, static_cast<int>(std::llround((hi - lo) / step)) + 1};
  }
  double at(int i) const { return count > 1 ? lo + (hi - lo) * i / (count - 1) : lo; }
};

inline void apply_param(MediumConfig &c, SweepParam p, double v)
{
  switch (p) {
    case SweepParam::eps_c_re: c.eps_c.real(v); break;
    case SweepParam::eps_c_im: c.eps_c.imag(v); break;
    case SweepParam::mu_c_re: c.mu_c.real(v); break;
    case SweepParam::omega: c.omega = v; break;
  }
}

struct ScanSpec
{
  std::vector<SweepAxis> axes;
  std::vector<int> channels{1};  // 1..4
  int n_lo = 1, n_hi = 60;
};

struct ScanPoint
{
  std::vector<double> params;  // one per axis
  int channel = 0;
  int n_star = 0;
  double objective = 0.0;
  std::vector<RegimeVerdict> verdicts;
};

struct ScanSkip
{
  std::vector<double> params;
  std::string reason;
};

struct ScanResult
{
  std::vector<SweepParam> axes;
  std::vector<ScanPoint> points;  // ranked
  std::vector<ScanSkip> skipped;
};

// (channel, n, |tau|) minimizing |tau| over the requested channels and degrees.
struct ModeExtreme
{
  int channel = 0, n = 0;
  double value = 0.0;
};

// Only the 2x2 blocks, without the closed-form cross checks of make_record.
inline std::vector<std::array<cplx, 4>> tau_range(const MediumConfig &cfg, int n_lo, int n_hi)
{
  if (n_lo < 1 || n_hi < n_lo) throw DegenerateIndex("degree range must satisfy 1 <= lo <= hi");
  const auto tm = radial_table(n_hi + 1, cfg.k_m() * cfg.R);
  const auto tc = radial_table(n_hi + 1, cfg.k_c() * cfg.R);
  std::vector<std::array<cplx, 4>> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto M = mode_matrices_from(cfg, n, wave_coeffs_from(tm, n, cfg.k_m(), cfg.R),
                                      wave_coeffs_from(tc, n, cfg.k_c(), cfg.R));
    const auto a = block_eigen(M.A), b = block_eigen(M.B);
    out.push_back({a.tau[0], a.tau[1], b.tau[0], b.tau[1]});
  }
  return out;
}

inline ModeExtreme min_tau(const std::vector<std::array<cplx, 4>> &taus, int n_lo, const std::vector<int> &channels)
{
  ModeExtreme e;
  e.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (int ch : channels) {
      const double v = std::abs(taus[i][ch - 1]);
      if (v < e.value) e = {ch, n_lo + static_cast<int>(i), v};
    }
  return e;
}

namespace detail
{
inline std::vector<std::vector<double>> sweep_points(const std::vector<SweepAxis> &axes)
{
  std::vector<std::vector<double>> pts;
  if (axes.empty()) return pts;
  for (const auto &a : axes)
    if (a.count <= 0) return pts;
  std::vector<int> idx(axes.size(), 0);
  for (;;) {
    std::vector<double> p;
    for (std::size_t k = 0; k < axes.size(); ++k) p.push_back(axes[k].at(idx[k]));
    pts.push_back(std::move(p));
    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].count) break;
      idx[k] = 0;
      if (k == 0) return pts;
    }
  }
}

template <class Better>
ScanResult run_scan(const MediumConfig &base, const ScanSpec &spec, int threads, const RegimeThresholds &th,
                    Better better)
{
  for (int ch : spec.channels)
    if (ch < 1 || ch > 4) throw Error("scan channels must be 1..4");
  if (spec.channels.empty()) throw Error("scan needs at least one channel");
  ScanResult res;
  for (const auto &a : spec.axes) res.axes.push_back(a.param);
  const auto pts = sweep_points(spec.axes);
  struct Slot
  {
    bool ok = false;
    ScanPoint point;
    std::string reason;
  };
  std::vector<Slot> slots(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    MediumConfig c = base;
    for (std::size_t k = 0; k < spec.axes.size(); ++k) apply_param(c, spec.axes[k].param, pts[i][k]);
    Slot &s = slots[i];
    s.point.params = pts[i];
    try {
      if (!(c.omega > 0.0)) throw Error("frequency must be positive");
      const auto adm = check_admissible(c, spec.n_hi);
      if (!adm.ok()) throw AdmissibilityViolation(adm.reason());
      const auto e = min_tau(tau_range(c, spec.n_lo, spec.n_hi), spec.n_lo, spec.channels);
      s.point.channel = e.channel;
      s.point.n_star = e.n;
      s.point.objective = e.value;
      s.point.verdicts = check_regime(c, th);
      s.ok = true;
    } catch (const Error &ex) {
      s.reason = ex.what();
    }
  });
  for (auto &s : slots) {
    if (s.ok)
      res.points.push_back(std::move(s.point));
    else
      res.skipped.push_back({std::move(s.point.params), std::move(s.reason)});
  }
  std::stable_sort(res.points.begin(), res.points.end(), [&](const ScanPoint &a, const ScanPoint &b) {
    if (a.objective != b.objective) return better(a.objective, b.objective);
    return a.params < b.params;
  });
  return res;
}
}  // namespace detail

// Ascending by min |tau| over the channels and degrees of `spec`.
inline ScanResult scan_resonance(const MediumConfig &base, const ScanSpec &spec, int threads = 0,
                                 const RegimeThresholds &th = {})
{
  return detail::run_scan(base, spec, threads, th, std::less<double>());
}

// Descending by the same objective; `spec.channels` should list only the
// channels the incident field excites.
inline ScanResult scan_cloaking(const MediumConfig &base, const ScanSpec &spec, int threads = 0,
                                const RegimeThresholds &th = {})
{
  return detail::run_scan(base, spec, threads, th, std::greater<double>());
}

}  // namespace plasmon

#endif  // PLASMON_DESIGN_HPP
