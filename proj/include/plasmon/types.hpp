// SPDX-License-Identifier: Apache-2.0
#ifndef PLASMON_TYPES_HPP
#define PLASMON_TYPES_HPP

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace plasmon
{

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Real 3-vector promoted to complex.
inline CVec3 to_complex(const Vec3 &v)
{
  return v.cast<cplx>();
}

// Hermitian norm of a complex 3-vector.
inline double cnorm(const CVec3 &v)
{
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

// Non-conjugating cross product of complex vectors.
inline CVec3 cross(const CVec3 &a, const CVec3 &b)
{
  return CVec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

}  // namespace plasmon

#endif  // PLASMON_TYPES_HPP
