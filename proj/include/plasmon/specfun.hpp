// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_SPECFUN_HPP
#define PLASMON_SPECFUN_HPP

// Spherical Bessel j_n and Hankel h_n^(1) of complex argument, with derivatives
// and the leading-order large-n forms.

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace plasmon
{

inline constexpr double z_min_default = 1e-12;
inline constexpr int order_cap_default = 512;

struct RadialPair
{
  int order = 0;
  cplx argument;
  cplx j, j_prime;
  cplx h1, h1_prime;
};

// All orders 0..n_max at one argument.
struct RadialTable
{
  cplx z;
  std::vector<cplx> j, jp, h, hp;

  int n_max() const { return static_cast<int>(j.size()) - 1; }
  RadialPair pair(int n) const { return {n, z, j[n], jp[n], h[n], hp[n]}; }
};

namespace detail
{
// Relative perturbation applied to every j_n a table produces. Zero in
// production; the verify command's fault injection sets it.
inline double &fault_scale()
{
  static double s = 0.0;
  return s;
}

inline void check_args(int n, cplx z, int cap, double z_min)
{
  if (n < 0 || n > cap)
    throw OrderOverflow("order " + std::to_string(n) + " outside [0, " + std::to_string(cap) + "]");
  if (std::abs(z) < z_min)
    throw DegenerateArgument("|z| = " + std::to_string(std::abs(z)) + " below guard");
}
}  // namespace detail

// j by downward ratio recurrence (Miller), anchored at whichever of j0, j1 is
// larger so a zero of the anchor never divides; h by upward recurrence.
inline RadialTable radial_table(int n_max, cplx z, int cap = order_cap_default,
                                double z_min = z_min_default)
{
  detail::check_args(n_max, z, cap, z_min);
  RadialTable t;
  t.z = z;
  const int len = n_max + 2;  // one spare order for the derivative of n_max
  t.j.resize(n_max + 1);
  t.jp.resize(n_max + 1);
  t.h.resize(n_max + 1);
  t.hp.resize(n_max + 1);

  const cplx s = std::sin(z), c = std::cos(z);
  const cplx j0 = s / z;
  const cplx j1 = s / (z * z) - c / z;

  // ratio[k] = j_k / j_{k-1}
  const int start = len + 32 + static_cast<int>(std::ceil(std::abs(z)));
  std::vector<cplx> ratio(len + 1);
  cplx r = 0.0;
  for (int k = start; k >= 1; --k) {
    r = 1.0 / (double(2 * k + 1) / z - r);
    if (k <= len) ratio[k] = r;
  }
  std::vector<cplx> jj(len + 1);
  if (std::abs(j0) >= std::abs(j1)) {
    jj[0] = j0;
    for (int k = 1; k <= len; ++k) jj[k] = jj[k - 1] * ratio[k];
  } else {
    jj[1] = j1;
    jj[0] = j1 / ratio[1];
    for (int k = 2; k <= len; ++k) jj[k] = jj[k - 1] * ratio[k];
  }
  if (const double f = detail::fault_scale(); f != 0.0)
    for (auto &v : jj) v *= 1.0 + f;

  std::vector<cplx> hh(len + 1);
  const cplx e = std::exp(I * z);
  hh[0] = -I * e / z;
  if (len >= 1) hh[1] = -e * (z + I) / (z * z);
  for (int k = 1; k < len; ++k) hh[k + 1] = double(2 * k + 1) / z * hh[k] - hh[k - 1];

  for (int n = 0; n <= n_max; ++n) {
    t.j[n] = jj[n];
    t.h[n] = hh[n];
    if (n == 0) {
      t.jp[0] = -jj[1];
      t.hp[0] = -hh[1];
    } else {
      t.jp[n] = jj[n - 1] - double(n + 1) / z * jj[n];
      t.hp[n] = hh[n - 1] - double(n + 1) / z * hh[n];
    }
  }
  return t;
}

inline RadialPair radial_pair(int n, cplx z, int cap = order_cap_default,
                              double z_min = z_min_default)
{
  detail::check_args(n, z, cap, z_min);
  return radial_table(n, z, cap, z_min).pair(n);
}

// log of 1*3*...*(2n+1)
inline double log_odd_factorial(int n)
{
  // (2n+1)!! = (2n+1)! / (2^n n!)
  return std::lgamma(2.0 * n + 2.0) - n * std::log(2.0) - std::lgamma(n + 1.0);
}

// Leading monomials j ~ z^n/(2n+1)!!, h ~ (2n-1)!!/(i z^(n+1)).
inline RadialPair radial_pair_asymptotic(int n, cplx z, int cap = order_cap_default,
                                         double z_min = z_min_default)
{
  detail::check_args(n, z, cap, z_min);
  if (n < 1) throw OrderOverflow("asymptotic form needs n >= 1");
  const cplx lz = std::log(z);
  RadialPair p;
  p.order = n;
  p.argument = z;
  p.j = std::exp(double(n) * lz - log_odd_factorial(n));
  p.h1 = std::exp(log_odd_factorial(n - 1) - double(n + 1) * lz) / I;
  p.j_prime = double(n) / z * p.j;
  p.h1_prime = -double(n + 1) / z * p.h1;
  return p;
}

}  // namespace plasmon

#endif  // PLASMON_SPECFUN_HPP
