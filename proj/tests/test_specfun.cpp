#include <catch_amalgamated.hpp>

#include <random>

#include "plasmon/specfun.hpp"

using namespace plasmon;
using Catch::Approx;

namespace
{
double rel(cplx a, cplx b)
{
  return std::abs(a - b) / std::abs(b);
}
}  // namespace

TEST_CASE("elementary orders", "[specfun]")
{
  const auto p = radial_pair(0, 1.0);
  CHECK(p.j.real() == Approx(0.8414709848).epsilon(1e-10));
  CHECK(std::abs(p.j.imag()) < 1e-15);
  CHECK(p.h1.real() == Approx(0.8414709848).epsilon(1e-10));
  CHECK(p.h1.imag() == Approx(-0.5403023059).epsilon(1e-10));
  CHECK(p.j_prime.real() == Approx(-0.3011686789).epsilon(1e-9));

  // closed forms of order 2
  const cplx z(2.3, 0.7);
  const cplx j2 = (3.0 / (z * z) - 1.0) * std::sin(z) / z - 3.0 * std::cos(z) / (z * z);
  const cplx h2 = I * std::exp(I * z) / z * (1.0 + 3.0 * I / z - 3.0 / (z * z));
  const auto q = radial_pair(2, z);
  CHECK(rel(q.j, j2) < 1e-13);
  CHECK(rel(q.h1, h2) < 1e-13);
}

TEST_CASE("Wronskian over an (n, z) lattice", "[specfun]")
{
  SECTION("order 3 at 2+0.5i")
  {
    const cplx z(2.0, 0.5);
    const auto p = radial_pair(3, z);
    CHECK(rel(p.j * p.h1_prime - p.j_prime * p.h1, I / (z * z)) < 1e-12);
  }
  SECTION("lattice")
  {
    double worst = 0.0;
    for (double mod : {0.1, 0.5, 1.0, 3.0, 7.5, 20.0, 50.0, 100.0})
      for (double arg : {0.0, 0.3, 0.8, 1.2, 1.5707963267948966}) {
        const cplx z = std::polar(mod, arg);
        const auto t = radial_table(80, z);
        for (int n = 0; n <= 80; ++n) {
          const cplx w = t.j[n] * t.hp[n] - t.jp[n] * t.h[n];
          worst = std::max(worst, rel(w, I / (z * z)));
        }
      }
    INFO("worst Wronskian deviation " << worst);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("three-term recurrence", "[specfun]")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mod(0.1, 40.0), arg(0.0, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx z = std::polar(mod(rng), arg(rng));
    const auto t = radial_table(81, z);
    for (int n = 1; n <= 80; ++n) {
      const cplx rhs_j = double(2 * n + 1) / z * t.j[n];
      const cplx rhs_h = double(2 * n + 1) / z * t.h[n];
      const double sj = std::abs(t.j[n - 1]) + std::abs(t.j[n + 1]);
      const double sh = std::abs(t.h[n - 1]) + std::abs(t.h[n + 1]);
      CHECK(std::abs(t.j[n - 1] + t.j[n + 1] - rhs_j) <= 1e-10 * sj);
      CHECK(std::abs(t.h[n - 1] + t.h[n + 1] - rhs_h) <= 1e-10 * sh);
    }
  }
}

TEST_CASE("table and single pair agree", "[specfun]")
{
  const cplx z(4.49340945790906, 0.0);  // near the first zero of j1
  const auto t = radial_table(10, z);
  for (int n = 0; n <= 10; ++n) {
    const auto p = radial_pair(n, z);
    CHECK(std::abs(p.j - t.j[n]) <= 1e-14 * (std::abs(t.j[n]) + 1e-300));
  }
  CHECK(std::abs(t.j[1]) < 1e-14);
}

TEST_CASE("large-order asymptotics", "[specfun]")
{
  SECTION("(50, 1): j near 1/(1*3*...*101)")
  {
    const auto e = radial_pair(50, 1.0);
    const auto a = radial_pair_asymptotic(50, 1.0);
    const double dev = std::abs(e.j / a.j - 1.0);
    CHECK(dev * 50 < 1.0);
    CHECK(std::abs(std::log(a.j.real()) + log_odd_factorial(50)) < 1e-12);
  }
  SECTION("(1, 1e-3)")
  {
    const auto a = radial_pair_asymptotic(1, 1e-3);
    CHECK(a.j.real() == Approx(1e-3 / 3).epsilon(1e-14));
  }
  SECTION("(10, 2): h from 1*3*...*19 / (i 2^11)")
  {
    const auto a = radial_pair_asymptotic(10, 2.0);
    const double df = 654729075.0;  // 19!!
    CHECK(rel(a.h1, df / (I * std::pow(2.0, 11))) < 1e-12);
    const auto e = radial_pair(10, 2.0);
    CHECK(std::abs(e.h1 / a.h1 - 1.0) * 10 < 2.0);
  }
  SECTION("fitted constant on a compact set")
  {
    // The leading correction is -z^2 / (2(2n+3)), so n*dev tends to |z|^2/4.
    double c_fit = 0.0;
    for (int n = 30; n <= 120; n += 10)
      for (double mod : {0.5, 1.0, 2.0, 5.0})
        for (double arg : {0.0, 0.7, 1.4}) {
          const cplx z = std::polar(mod, arg);
          const auto e = radial_pair(n, z);
          const auto a = radial_pair_asymptotic(n, z);
          c_fit = std::max(c_fit, n * std::abs(e.j / a.j - 1.0));
          c_fit = std::max(c_fit, n * std::abs(e.h1 / a.h1 - 1.0));
        }
    WARN("fitted asymptotic constant C over |z|<=5, n in [30,120]: " << c_fit);
    CHECK(c_fit <= 25.0 / 4.0 * 1.2);
  }
  SECTION("(60, 5): deviation explained by the first correction")
  {
    const auto e = radial_pair(60, 5.0);
    const auto a = radial_pair_asymptotic(60, 5.0);
    const cplx dev = e.j / a.j - 1.0;
    const double first = -25.0 / (2.0 * 123.0);
    // 60*|dev| is about 5.8, so a bound C <= 5 does not hold at |z| = 5
    CHECK(60 * std::abs(dev) == Approx(5.8).margin(0.1));
    CHECK(std::abs(dev.real() - first) < 0.01);
  }
}

TEST_CASE("argument and order guards", "[specfun]")
{
  CHECK_THROWS_AS(radial_pair(2, 1e-13), DegenerateArgument);
  CHECK_THROWS_AS(radial_pair(-1, 1.0), OrderOverflow);
  CHECK_THROWS_AS(radial_pair(81, 1.0, 80), OrderOverflow);
  CHECK_NOTHROW(radial_pair(80, 1.0, 80));
}
