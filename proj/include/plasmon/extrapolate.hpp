// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_EXTRAPOLATE_HPP
#define PLASMON_EXTRAPOLATE_HPP

#include <vector>

namespace plasmon
{

// Polynomial extrapolation to h = 0 through (h_i, y_i) by Neville's scheme.
// Returns the full tableau diagonal: diag[k] uses the first k+1 samples.
template <class T>
std::vector<T> neville_diagonal(const std::vector<double> &h, const std::vector<T> &y)
{
  std::vector<T> p = y;
  std::vector<T> diag{p[0]};
  const std::size_t n = h.size();
  for (std::size_t lvl = 1; lvl < n; ++lvl) {
    for (std::size_t i = 0; i + lvl < n; ++i) {
      // p[i] over [i, i+lvl], evaluated at 0
      p[i] = (h[i + lvl] * p[i] - h[i] * p[i + 1]) / (h[i + lvl] - h[i]);
    }
    diag.push_back(p[0]);
  }
  return diag;
}

template <class T>
T neville_at_zero(const std::vector<double> &h, const std::vector<T> &y)
{
  return neville_diagonal(h, y).back();
}

}  // namespace plasmon

#endif  // PLASMON_EXTRAPOLATE_HPP
