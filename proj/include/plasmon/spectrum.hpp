// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_SPECTRUM_HPP
#define PLASMON_SPECTRUM_HPP

// Closed-form spectrum of the boundary operator I + K on a sphere: per degree
// n the operator splits into two 2x2 blocks.
//
//   A acts on (psi along V, phi along U)   -> channels 1, 2
//   B acts on (psi along U, phi along V)   -> channels 3, 4
//
// with U = grad_S Y_n, V = U x nu.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"
#include "types.hpp"

namespace plasmon
{

struct MediumConfig
{
  double R = 1.0;
  cplx eps_m = 1.0, mu_m = 1.0;
  cplx eps_c = 1.0, mu_c = 1.0;
  double omega = 1.0;

  // omega sqrt(eps mu), branch with Im k >= 0
  static cplx wave_number(double omega, cplx eps, cplx mu)
  {
    cplx k = omega * std::sqrt(eps * mu);
    if (k.imag() < 0.0) k = -k;
    return k;
  }
  cplx k_m() const { return wave_number(omega, eps_m, mu_m); }
  cplx k_c() const { return wave_number(omega, eps_c, mu_c); }
};

// Scalar layer-operator eigenvalues of degree n at one wave number.
struct LambdaChi
{
  cplx lambda;       // 1/2 - i k^2 R^2 j_n' h_n
  cplx lambda_dual;  // -1/2 - i k^2 R^2 j_n h_n'
  cplx chi;          // -i k R^2 h_n j_n
  double discrepancy = 0.0;
};

inline constexpr double dual_lambda_tol = 1e-8;

inline LambdaChi lambda_chi_from(const RadialTable &t, int n, cplx k, double R, bool check = true)
{
  LambdaChi r;
  const cplx k2R2 = k * k * R * R;
  r.lambda = 0.5 - I * k2R2 * t.jp[n] * t.h[n];
  r.lambda_dual = -0.5 - I * k2R2 * t.j[n] * t.hp[n];
  r.chi = -I * k * R * R * t.h[n] * t.j[n];
  if (!std::isfinite(std::abs(r.lambda_dual)) || !std::isfinite(std::abs(r.chi)))
    throw OrderOverflow("h_n overflows at n = " + std::to_string(n) + " for |kR| = " + std::to_string(std::abs(k * R)));
  r.discrepancy = std::abs(r.lambda - r.lambda_dual) / std::max(std::abs(r.lambda), 1e-300);
  if (check && !(r.discrepancy <= dual_lambda_tol))
    throw AdmissibilityViolation("dual lambda forms disagree by " + std::to_string(r.discrepancy) +
                                 " at n = " + std::to_string(n));
  return r;
}

inline LambdaChi lambda_chi(int n, cplx k, double R)
{
  return lambda_chi_from(radial_table(n, k * R), n, k, R);
}

// Everything Props. of the M and L operators need at one (n, k, R).
struct WaveCoeffs
{
  cplx k;
  LambdaChi lc;
  std::array<cplx, 4> pi{}, sigma{};
  cplx m1, m2, l1, l2;
};

inline WaveCoeffs wave_coeffs_from(const RadialTable &t, int n, cplx k, double R, bool check = true)
{
  if (n < 1) throw DegenerateIndex("vector coefficients need n >= 1");
  WaveCoeffs w;
  w.k = k;
  const auto lm = lambda_chi_from(t, n - 1, k, R, check);
  const auto l0 = lambda_chi_from(t, n, k, R, check);
  const auto lp = lambda_chi_from(t, n + 1, k, R, check);
  w.lc = l0;
  const double d = 2.0 * n + 1.0, nn = double(n) * (n + 1);
  w.pi[0] = (double(n + 1) * lm.lambda + double(n) * lp.lambda) / d;
  w.pi[1] = nn / d * (lm.lambda - lp.lambda);
  w.pi[2] = (lm.lambda - lp.lambda) / d;
  w.pi[3] = (double(n + 1) * lp.lambda + double(n) * lm.lambda) / d;
  w.sigma[0] = (double(n + 1) * lm.chi + double(n) * lp.chi) / d;
  w.sigma[1] = nn / d * (lm.chi - lp.chi);
  w.sigma[2] = (lm.chi - lp.chi) / d;
  w.sigma[3] = (double(n + 1) * lp.chi + double(n) * lm.chi) / d;
  w.m1 = w.pi[0] + (w.sigma[0] - nn * w.sigma[2]) / R;
  w.m2 = l0.lambda + l0.chi / R;
  w.l1 = k * k * l0.chi;
  w.l2 = nn * l0.chi / (R * R) - k * k * w.sigma[0];
  return w;
}

inline WaveCoeffs wave_coeffs(int n, cplx k, double R)
{
  return wave_coeffs_from(radial_table(n + 1, k * R), n, k, R);
}

struct ModeMatrix
{
  int n = 0;
  Eigen::Matrix2cd A, B;
};

inline ModeMatrix mode_matrices_from(const MediumConfig &cfg, int n, const WaveCoeffs &out, const WaveCoeffs &in)
{
  const cplx mc = cfg.mu_c, mm = cfg.mu_m, kc = in.k, km = out.k;
  const cplx id1 = (mc + mm) / 2.0;
  const cplx id2 = kc * kc / (2.0 * mc) + km * km / (2.0 * mm);
  ModeMatrix M;
  M.n = n;
  M.A << id1 + mc * in.m1 - mm * out.m1, in.l2 - out.l2,
         in.l1 - out.l1, id2 + kc * kc / mc * in.m2 - km * km / mm * out.m2;
  M.B << id1 + mc * in.m2 - mm * out.m2, in.l1 - out.l1,
         in.l2 - out.l2, id2 + kc * kc / mc * in.m1 - km * km / mm * out.m1;
  return M;
}

inline ModeMatrix mode_matrices(const MediumConfig &cfg, int n)
{
  const auto out = wave_coeffs(n, cfg.k_m(), cfg.R);
  const auto in = wave_coeffs(n, cfg.k_c(), cfg.R);
  return mode_matrices_from(cfg, n, out, in);
}

// Eigenpairs of one 2x2 block. Slot 0 is (tr - s)/2, slot 1 is (tr + s)/2,
// s the principal root of the discriminant. Eigenvectors are scaled so the
// phi component is 1 (alpha = psi component); if that component vanishes the
// vector is (1, 0) and alpha is reported as infinite.
struct BlockEigen
{
  std::array<cplx, 2> tau;
  std::array<Eigen::Vector2cd, 2> vec;
  std::array<cplx, 2> alpha;
  cplx discriminant;
  bool defective = false;
  double residual = 0.0;
};

inline BlockEigen block_eigen(const Eigen::Matrix2cd &M)
{
  const cplx a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
  const cplx tr = a + d, det = a * d - b * c;
  BlockEigen e;
  e.discriminant = tr * tr - 4.0 * det;
  const cplx s = std::sqrt(e.discriminant);
  // larger root directly, smaller from the determinant
  const cplx lo = (tr - s) / 2.0, hi = (tr + s) / 2.0;
  if (std::abs(tr - s) >= std::abs(tr + s)) {
    e.tau[0] = lo;
    e.tau[1] = (lo != 0.0) ? det / lo : hi;
  } else {
    e.tau[1] = hi;
    e.tau[0] = (hi != 0.0) ? det / hi : lo;
  }

  const double scale = M.cwiseAbs().maxCoeff();
  for (int i = 0; i < 2; ++i) {
    const cplx t = e.tau[i];
    Eigen::Vector2cd v1(b, t - a), v2(t - d, c);
    Eigen::Vector2cd v = (v1.norm() >= v2.norm()) ? v1 : v2;
    if (v.norm() <= 1e-14 * std::max(scale, 1e-300)) {
      // diagonal block: pick the coordinate axis whose entry equals tau
      v = (std::abs(t - d) <= std::abs(t - a)) ? Eigen::Vector2cd(0.0, 1.0) : Eigen::Vector2cd(1.0, 0.0);
      if (i == 1 && std::abs(a - d) <= 1e-14 * std::max(scale, 1e-300)) {
        // scalar block: keep the two axes distinct
        v = (e.vec[0](1) != 0.0) ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
      }
    }
    if (std::abs(v(1)) > 1e-14 * v.norm()) {
      v /= v(1);
      e.alpha[i] = v(0);
    } else {
      v /= v(0);
      e.alpha[i] = cplx(std::numeric_limits<double>::infinity(), 0.0);
    }
    e.vec[i] = v;
    e.residual = std::max(e.residual, ((M - t * Eigen::Matrix2cd::Identity()) * v).norm() / v.norm());
  }
  const cplx cr = e.vec[0](0) * e.vec[1](1) - e.vec[0](1) * e.vec[1](0);
  e.defective = std::abs(cr) <= 1e-10 * e.vec[0].norm() * e.vec[1].norm();
  return e;
}

// The printed closed forms: tau = alpha * l-difference + (phi-phi entry), with
// alpha = (num +- sqrt(beta)) / (4 l-difference mu_c mu_m). "printed" squares
// the numerator without its +mu_m term, "corrected" keeps it.
struct ClosedForm
{
  cplx numerator;
  cplx beta_printed, beta_corrected;
  std::array<cplx, 2> tau_printed, tau_corrected;  // (+sqrt beta, -sqrt beta)
};

inline ClosedForm closed_form_block(const MediumConfig &cfg, const WaveCoeffs &out, const WaveCoeffs &in,
                                    bool swapped)
{
  const cplx mc = cfg.mu_c, mm = cfg.mu_m, kc = in.k, km = out.k;
  // swapped = channels 3/4: m1 <-> m2 and l1 <-> l2
  const cplx m1c = swapped ? in.m2 : in.m1, m1m = swapped ? out.m2 : out.m1;
  const cplx m2c = swapped ? in.m1 : in.m2, m2m = swapped ? out.m1 : out.m2;
  const cplx lcol = swapped ? (in.l2 - out.l2) : (in.l1 - out.l1);
  const cplx lrow = swapped ? (in.l1 - out.l1) : (in.l2 - out.l2);
  const cplx d = kc * kc / (2.0 * mc) + km * km / (2.0 * mm) + kc * kc / mc * m2c - km * km / mm * m2m;

  ClosedForm f;
  f.numerator = km * km * (2.0 * m2m - 1.0) * mc +
                mm * (mc * (mc + 2.0 * m1c * mc + mm - 2.0 * m1m * mm) - kc * kc * (2.0 * m2c + 1.0));
  const cplx short_num = km * km * (2.0 * m2m - 1.0) * mc +
                         mm * (mc * (mc + 2.0 * m1c * mc - 2.0 * m1m * mm) - kc * kc * (2.0 * m2c + 1.0));
  const cplx lead = 16.0 * lcol * lrow * mc * mc * mm * mm;
  f.beta_printed = lead + short_num * short_num;
  f.beta_corrected = lead + f.numerator * f.numerator;
  const cplx den = 4.0 * lcol * mc * mm;
  for (int sgn = 0; sgn < 2; ++sgn) {
    const double s = sgn == 0 ? 1.0 : -1.0;
    f.tau_printed[sgn] = (f.numerator + s * std::sqrt(f.beta_printed)) / den * lcol + d;
    f.tau_corrected[sgn] = (f.numerator + s * std::sqrt(f.beta_corrected)) / den * lcol + d;
  }
  return f;
}

// Set distance between a closed-form pair and the exact pair, relative.
inline double pair_discrepancy(const std::array<cplx, 2> &cf, const std::array<cplx, 2> &ex)
{
  const double sc = std::max({std::abs(ex[0]), std::abs(ex[1]), 1e-300});
  const double same = std::max(std::abs(cf[0] - ex[0]), std::abs(cf[1] - ex[1]));
  const double swap = std::max(std::abs(cf[0] - ex[1]), std::abs(cf[1] - ex[0]));
  return std::min(same, swap) / sc;
}

// Leading-order eigenvalues for large n. The second value of each pair in the
// printed source carries (eps_c mu_c + eps_m mu_m)^2 in its discriminant; the
// default here uses the minus sign like the other three, the printed variant
// is kept in tau2_printed.
struct AsymptoticTau
{
  std::array<cplx, 4> tau;
  cplx tau2_printed;
};

inline AsymptoticTau tau_asymptotic(const MediumConfig &cfg, int n)
{
  const double nn = n, w2 = cfg.omega * cfg.omega, R = cfg.R;
  const cplx ec = cfg.eps_c, em = cfg.eps_m, mc = cfg.mu_c, mm = cfg.mu_m;
  const double frac = (4.0 * nn * nn + 4.0 * nn + 3.0) / (4.0 * nn * nn + 4.0 * nn - 3.0);
  const double pre = 1.0 / (2.0 * (2.0 * nn + 1.0));
  auto root = [&](cplx mu_part, cplx eps_part, cplx prod) {
    const cplx diff = mu_part - eps_part * w2;
    return std::sqrt(diff * diff - 4.0 * prod * prod * frac * w2 * w2 * R * R);
  };
  const cplx mu12 = (nn + 1) * mc + nn * mm, eps12 = (nn + 1) * em + nn * ec;
  const cplx mu34 = (nn + 1) * mm + nn * mc, eps34 = (nn + 1) * ec + nn * em;
  const cplx minus = ec * mc - em * mm, plus = ec * mc + em * mm;
  const cplx s12 = root(mu12, eps12, minus), s34 = root(mu34, eps34, minus);
  AsymptoticTau a;
  a.tau[0] = pre * (mu12 + eps12 * w2 - s12);
  a.tau[1] = pre * (mu12 + eps12 * w2 + s12);
  a.tau[2] = pre * (mu34 + eps34 * w2 - s34);
  a.tau[3] = pre * (mu34 + eps34 * w2 + s34);
  a.tau2_printed = pre * (mu12 + eps12 * w2 + root(mu12, eps12, plus));
  return a;
}

struct SpectrumRecord
{
  int n = 0;
  WaveCoeffs outer, inner;  // at k_m and k_c
  ModeMatrix modes;
  std::array<cplx, 4> tau{}, alpha{}, tau_asym{};
  std::array<Eigen::Vector2cd, 4> vec;
  cplx tau2_asym_printed;
  cplx beta1, beta2;                 // corrected
  cplx beta1_printed, beta2_printed;
  std::array<cplx, 4> tau_closed_printed{}, tau_closed_corrected{};
  double closed_discrepancy_printed = 0.0, closed_discrepancy_corrected = 0.0;
  bool admissible = true;
  bool defective_A = false, defective_B = false;
  double eigen_residual = 0.0;

  bool defective() const { return defective_A || defective_B; }
  // channel 1..4 -> slot in tau/alpha/vec
  const Eigen::Vector2cd &eigvec(int channel) const { return vec[channel - 1]; }
};

// Admissibility: j_m(kR) != j_{m+2}(kR) for m <= n_max.
inline bool bessel_admissible(const RadialTable &t, int n_max, double margin = 1e-12)
{
  for (int m = 0; m + 2 <= t.n_max() && m <= n_max; ++m) {
    const double sc = std::max(std::abs(t.j[m]), std::abs(t.j[m + 2]));
    if (!(std::abs(t.j[m] - t.j[m + 2]) > margin * sc)) return false;
  }
  return true;
}

inline SpectrumRecord make_record(const MediumConfig &cfg, int n, const RadialTable &tm, const RadialTable &tc)
{
  SpectrumRecord r;
  r.n = n;
  r.outer = wave_coeffs_from(tm, n, cfg.k_m(), cfg.R);
  r.inner = wave_coeffs_from(tc, n, cfg.k_c(), cfg.R);
  r.modes = mode_matrices_from(cfg, n, r.outer, r.inner);
  const auto eA = block_eigen(r.modes.A), eB = block_eigen(r.modes.B);
  for (int i = 0; i < 2; ++i) {
    r.tau[i] = eA.tau[i];
    r.tau[i + 2] = eB.tau[i];
    r.alpha[i] = eA.alpha[i];
    r.alpha[i + 2] = eB.alpha[i];
    r.vec[i] = eA.vec[i];
    r.vec[i + 2] = eB.vec[i];
  }
  r.defective_A = eA.defective;
  r.defective_B = eB.defective;
  r.eigen_residual = std::max(eA.residual, eB.residual);

  const auto cA = closed_form_block(cfg, r.outer, r.inner, false);
  const auto cB = closed_form_block(cfg, r.outer, r.inner, true);
  r.beta1 = cA.beta_corrected;
  r.beta2 = cB.beta_corrected;
  r.beta1_printed = cA.beta_printed;
  r.beta2_printed = cB.beta_printed;
  r.tau_closed_printed = {cA.tau_printed[0], cA.tau_printed[1], cB.tau_printed[0], cB.tau_printed[1]};
  r.tau_closed_corrected = {cA.tau_corrected[0], cA.tau_corrected[1], cB.tau_corrected[0], cB.tau_corrected[1]};
  r.closed_discrepancy_printed = std::max(pair_discrepancy(cA.tau_printed, eA.tau), pair_discrepancy(cB.tau_printed, eB.tau));
  r.closed_discrepancy_corrected =
      std::max(pair_discrepancy(cA.tau_corrected, eA.tau), pair_discrepancy(cB.tau_corrected, eB.tau));

  const auto asym = tau_asymptotic(cfg, n);
  r.tau_asym = asym.tau;
  r.tau2_asym_printed = asym.tau2_printed;
  return r;
}

inline SpectrumRecord tau_exact(const MediumConfig &cfg, int n)
{
  if (n < 1) throw DegenerateIndex("spectrum degrees start at 1");
  return make_record(cfg, n, radial_table(n + 1, cfg.k_m() * cfg.R), radial_table(n + 1, cfg.k_c() * cfg.R));
}

struct AdmissibilityReport
{
  bool lossy_signs = true;  // Im eps_c >= 0 and Im mu_c >= 0
  bool bessel_outer = true, bessel_inner = true;
  cplx k_m, k_c;
  bool ok() const { return lossy_signs && bessel_outer && bessel_inner; }
  std::string reason() const
  {
    if (!lossy_signs) return "inclusion parameters need nonnegative imaginary parts";
    if (!bessel_outer) return "j_m(k_m R) = j_{m+2}(k_m R) for some m";
    if (!bessel_inner) return "j_m(k_c R) = j_{m+2}(k_c R) for some m";
    return "admissible";
  }
};

inline AdmissibilityReport check_admissible(const MediumConfig &cfg, int n_max)
{
  AdmissibilityReport a;
  a.k_m = cfg.k_m();
  a.k_c = cfg.k_c();
  a.lossy_signs = cfg.eps_c.imag() >= 0.0 && cfg.mu_c.imag() >= 0.0;
  a.bessel_outer = bessel_admissible(radial_table(n_max + 2, a.k_m * cfg.R), n_max);
  a.bessel_inner = bessel_admissible(radial_table(n_max + 2, a.k_c * cfg.R), n_max);
  return a;
}

// Records n = 1..n_max in order.
inline std::vector<SpectrumRecord> spectrum_table(const MediumConfig &cfg, int n_max)
{
  const auto tm = radial_table(n_max + 2, cfg.k_m() * cfg.R);
  const auto tc = radial_table(n_max + 2, cfg.k_c() * cfg.R);
  std::vector<SpectrumRecord> out;
  out.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    auto r = make_record(cfg, n, tm, tc);
    r.admissible = std::abs(tm.j[n] - tm.j[n + 2]) > 1e-12 * std::max(std::abs(tm.j[n]), std::abs(tm.j[n + 2])) &&
                   std::abs(tc.j[n] - tc.j[n + 2]) > 1e-12 * std::max(std::abs(tc.j[n]), std::abs(tc.j[n + 2]));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace plasmon

#endif  // PLASMON_SPECTRUM_HPP
