#include <catch_amalgamated.hpp>

#include <random>

#include "plasmon/design.hpp"

using namespace plasmon;
using Catch::Approx;

namespace
{
DrudeParams drude(double wp2, double tau, double fill)
{
  DrudeParams p;
  p.omega_p_sq = wp2;
  p.tau_damp = tau;
  p.filling = fill;
  p.omega0 = 2.0;
  return p;
}
}  // namespace

TEST_CASE("drude forward", "[design]")
{
  SECTION("resonance set without filling")
  {
    const auto v = drude_forward(drude(51.0045, 1e-4, 0.0), 5.0);
    CHECK(v.eps_c.real() == Approx(-1.04018).epsilon(1e-6));
    CHECK(v.eps_c.imag() == Approx(4.08e-5).epsilon(1e-3));
    CHECK(v.mu_c == cplx(1.0, 0.0));
  }
  SECTION("resonance set with filling")
  {
    const auto v = drude_forward(drude(51.518, 1e-5, 0.1), 5.0);
    CHECK(v.eps_c.real() == Approx(-1.06072).epsilon(1e-6));
    CHECK(v.eps_c.imag() == Approx(4.1e-6).epsilon(2e-2));
    CHECK(v.mu_c.real() == Approx(0.880952).epsilon(1e-6));
    CHECK(v.mu_c.imag() == Approx(2.8e-7).epsilon(2e-2));
  }
  SECTION("cloaking set with filling")
  {
    const auto v = drude_forward(drude(186.769, 1e-5, 0.02), 5.0);
    CHECK(v.eps_c.real() == Approx(-6.47076).epsilon(1e-6));
    CHECK(v.eps_c.imag() == Approx(1.494e-5).epsilon(1e-3));
    CHECK(v.mu_c.real() == Approx(0.97619).epsilon(1e-5));
    CHECK(v.mu_c.imag() == Approx(5.66893e-8).epsilon(1e-5));
  }
  SECTION("lossy signs")
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int t = 0; t < 100; ++t) {
      auto p = drude(u(rng) * 10, u(rng) * 1e-3, u(rng) / 11);
      const auto v = drude_forward(p, u(rng));
      CHECK(v.eps_c.imag() >= 0.0);
      CHECK(v.mu_c.imag() >= 0.0);
    }
  }
  SECTION("pole and bad frequency")
  {
    // omega = omega0 with no damping puts the permeability on its pole
    auto p = drude(10.0, 1e-14, 0.1);
    CHECK_THROWS_AS(drude_forward(p, 2.0), NearPole);
    CHECK_THROWS_AS(drude_forward(p, 0.0), Error);
  }
}

TEST_CASE("drude inverse", "[design]")
{
  SECTION("printed parameter sets")
  {
    const auto a = drude_inverse({-1.04018, 4e-5}, 1.0, 5.0, 1e-4, 2.0);
    CHECK(a.params.omega_p_sq == Approx(51.0045).epsilon(1e-6));
    CHECK(a.params.filling == 0.0);
    const auto b = drude_inverse({-6.55806, 1e-6}, 1.0, 5.0, 6.615e-7, 2.0);
    CHECK(b.params.omega_p_sq == Approx(188.952).epsilon(5e-6));
    CHECK(std::abs(b.omega_p_sq_leak) < 1e-6);
    const auto c = drude_inverse({-1.06072, 4.1e-6}, {0.880952, 2.8e-7}, 5.0, 1e-5, 2.0);
    CHECK(c.params.omega_p_sq == Approx(51.518).epsilon(1e-6));
    CHECK(c.params.filling == Approx(0.1).epsilon(1e-5));
  }
  SECTION("round trip on reachable targets")
  {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> wp(1.0, 300.0), fl(0.0, 0.9), w(0.5, 8.0), tau(1e-6, 1e-2);
    for (int t = 0; t < 200; ++t) {
      const double om = w(rng);
      if (std::abs(om - 2.0) < 0.05) continue;
      const auto p = drude(wp(rng), tau(rng), fl(rng));
      const auto v = drude_forward(p, om);
      const auto inv = drude_inverse(v.eps_c, v.mu_c, om, p.tau_damp, p.omega0);
      CHECK(inv.residual_eps < 1e-9 * std::max(1.0, std::abs(v.eps_c)));
      CHECK(inv.residual_mu < 1e-9);
      CHECK(inv.params.omega_p_sq == Approx(p.omega_p_sq).epsilon(1e-10));
    }
  }
  SECTION("unreachable targets")
  {
    CHECK_THROWS_AS(drude_inverse({2.0, 0.0}, 1.0, 5.0, 1e-4, 2.0), Unreachable);
    CHECK_THROWS_AS(drude_inverse({-1.0, 0.0}, 3.0, 5.0, 1e-4, 2.0), Unreachable);
  }
}

TEST_CASE("regime verdicts", "[design]")
{
  SECTION("eps_c = -eps_m with real positive mu")
  {
    MediumConfig c;
    c.omega = 2.0;
    c.eps_c = -1.0;
    c.mu_c = 1.5;
    const auto v = check_regime(c);
    CHECK(verdict_of(v, RegimeKind::resonance_cf1).satisfied);
    CHECK_FALSE(verdict_of(v, RegimeKind::resonance_cf3).satisfied);
    CHECK_FALSE(verdict_of(v, RegimeKind::resonance_cf2).satisfied);
  }
  SECTION("cloaking point")
  {
    MediumConfig c;
    c.omega = 5.0;
    c.eps_c = {-6.55806, 1e-6};
    const auto v = check_regime(c);
    const auto &re01 = verdict_of(v, RegimeKind::cloak_re01);
    CHECK(re01.satisfied);
    // |(eps_c + eps_m) w^2| - theta
    CHECK(re01.margins[1].value == Approx(5.55806 * 25 - 10).epsilon(1e-6));
    CHECK_FALSE(verdict_of(v, RegimeKind::cloak_cc1).satisfied);
  }
  SECTION("identical media satisfy nothing")
  {
    MediumConfig c;
    for (const auto &x : check_regime(c)) CHECK_FALSE(x.satisfied);
  }
  SECTION("satisfied iff every margin is nonnegative")
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 50; ++t) {
      MediumConfig c;
      c.omega = 1.0 + std::abs(u(rng));
      c.eps_c = {u(rng), std::abs(u(rng)) / 10};
      c.mu_c = {u(rng) * 4, 0.0};
      for (const auto &x : check_regime(c)) {
        bool all = true;
        for (const auto &m : x.margins) all = all && m.value >= 0.0;
        CHECK(x.satisfied == all);
      }
    }
  }
  SECTION("verdict flips at the margin zero crossing")
  {
    // |(eps_c + 1) w^2| crosses theta = 10 at eps_c = -1 - 10/w^2
    MediumConfig c;
    c.omega = 2.0;
    auto sat = [&](double e) {
      c.eps_c = e;
      return verdict_of(check_regime(c), RegimeKind::cloak_re01).satisfied;
    };
    double lo = -4.0, hi = -3.0;  // satisfied at lo, not at hi
    REQUIRE(sat(lo));
    REQUIRE_FALSE(sat(hi));
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (sat(mid) ? lo : hi) = mid;
    }
    CHECK(lo == Approx(-3.5).margin(1e-9));
  }
}

TEST_CASE("scans", "[design]")
{
  MediumConfig base;
  base.omega = 5.0;
  base.eps_c = {-1.04018, 4e-5};

  SECTION("empty sweep")
  {
    ScanSpec s;
    CHECK(scan_resonance(base, s).points.empty());
    s.axes = {{SweepParam::eps_c_re, -1.1, -1.0, 0}};
    CHECK(scan_resonance(base, s).points.empty());
  }

  SECTION("ranking and determinism across thread counts")
  {
    ScanSpec s;
    s.axes = {SweepAxis::stepped(SweepParam::eps_c_re, -1.1, -1.0, 1e-3)};
    s.n_hi = 45;
    const auto a = scan_resonance(base, s, 1), b = scan_resonance(base, s, 4);
    REQUIRE(a.points.size() == 101);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].params == b.points[i].params);
      CHECK(a.points[i].objective == b.points[i].objective);
      if (i) CHECK(a.points[i - 1].objective <= a.points[i].objective);
    }
  }

  SECTION("halving the step never worsens the best objective")
  {
    ScanSpec s;
    s.n_hi = 30;
    double prev = std::numeric_limits<double>::infinity();
    for (double step : {4e-2, 2e-2, 1e-2, 5e-3}) {
      s.axes = {SweepAxis::stepped(SweepParam::eps_c_re, -1.2, -0.9, step)};
      const double best = scan_resonance(base, s).points.front().objective;
      CHECK(best <= prev);
      prev = best;
    }
  }

  SECTION("inadmissible points are skipped")
  {
    ScanSpec s;
    s.axes = {{SweepParam::eps_c_im, -0.1, 0.1, 3}};
    s.n_hi = 5;
    const auto r = scan_resonance(base, s);
    CHECK(r.points.size() == 2);
    REQUIRE(r.skipped.size() == 1);
    CHECK(r.skipped[0].params[0] == -0.1);
  }

  SECTION("two-axis sweep keeps lexicographic ties")
  {
    ScanSpec s;
    s.axes = {{SweepParam::omega, 4.0, 5.0, 3}, {SweepParam::eps_c_re, -1.1, -1.0, 3}};
    s.n_hi = 10;
    CHECK(scan_resonance(base, s).points.size() == 9);
  }

  SECTION("cloaking objective")
  {
    MediumConfig c = base;
    c.eps_c = {-6.55806, 1e-6};
    ScanSpec s;
    s.axes = {SweepAxis::stepped(SweepParam::eps_c_re, -6.6, -6.5, 1e-2)};
    s.channels = {3};
    s.n_lo = s.n_hi = 1;
    const auto r = scan_cloaking(c, s);
    for (std::size_t i = 1; i < r.points.size(); ++i) CHECK(r.points[i - 1].objective >= r.points[i].objective);
    const auto e = min_tau(tau_range(c, 1, 1), 1, {3});
    CHECK(e.value > 10.0);
  }
}

TEST_CASE("eps_c = -eps_m drives tau_1 down with the degree", "[design]")
{
  MediumConfig c;
  c.omega = 2.0;
  c.eps_c = -1.0;
  c.mu_c = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int N : {10, 20, 40}) {
    const double m = min_tau(tau_range(c, N, 2 * N), N, {1}).value;
    CHECK(m < prev);
    prev = m;
  }
}
