#include <catch_amalgamated.hpp>

#include <random>

#include "plasmon/harmonics.hpp"

using namespace plasmon;
using Catch::Approx;

namespace
{
Vec3 from_angles(double t, double p)
{
  return Vec3(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
}

cplx Y_at(int n, int m, double t, double p)
{
  return eval_Y({n, m}, from_angles(t, p));
}
}  // namespace

TEST_CASE("scalar harmonics", "[harmonics]")
{
  CHECK(eval_Y({0, 0}, Vec3(0.3, -0.2, 0.9)).real() == Approx(0.2820947918).epsilon(1e-10));
  CHECK(eval_Y({1, 0}, Vec3(0, 0, 1)).real() == Approx(std::sqrt(3.0 / (4.0 * pi))).epsilon(1e-14));

  SECTION("closed forms with Condon-Shortley phase")
  {
    const double t = 0.7, p = 1.1;
    const cplx y11 = -std::sqrt(3.0 / (8.0 * pi)) * std::sin(t) * std::polar(1.0, p);
    const cplx y22 = 0.25 * std::sqrt(15.0 / (2.0 * pi)) * std::pow(std::sin(t), 2) * std::polar(1.0, 2 * p);
    CHECK(std::abs(Y_at(1, 1, t, p) - y11) < 1e-14);
    CHECK(std::abs(Y_at(2, 2, t, p) - y22) < 1e-14);
    CHECK(std::abs(Y_at(2, -1, t, p) + std::conj(Y_at(2, 1, t, p))) < 1e-14);
  }

  SECTION("orthonormality through the quadrature")
  {
    const int N = 12;
    const auto q = SphereQuadrature::make(N);
    double sum_w = 0.0;
    for (double w : q.weights) sum_w += w;
    CHECK(sum_w == Approx(4.0 * pi).epsilon(1e-13));

    std::vector<std::vector<cplx>> vals;
    std::vector<HarmonicIndex> ids;
    for (int n = 0; n <= N; ++n)
      for (int m = -n; m <= n; ++m) {
        ids.push_back({n, m});
        std::vector<cplx> v(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) v[k] = eval_Y({n, m}, q.nodes[k]);
        vals.push_back(std::move(v));
      }
    double worst = 0.0;
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a; b < ids.size(); ++b) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * vals[a][k] * std::conj(vals[b][k]);
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
    CHECK(worst < 1e-10);
  }

  SECTION("|Y_5^3|^2 integrates to one")
  {
    const auto q = SphereQuadrature::make(5);
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * std::norm(eval_Y({5, 3}, q.nodes[k]));
    CHECK(std::abs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("tangential basis", "[harmonics]")
{
  SECTION("equator, (1,0)")
  {
    const auto s = eval_tangential_basis({1, 0}, Vec3(1, 0, 0));
    // grad_S cos(t) = -sin(t) t_hat and t_hat = -z at the equator
    CHECK(std::abs(s.grad[2] - std::sqrt(3.0 / (4.0 * pi))) < 1e-14);
    CHECK(std::abs(s.grad[0]) + std::abs(s.grad[1]) < 1e-14);
    const auto s2 = eval_tangential_basis({1, 0}, Vec3(1, 0, 0), 2.0);
    CHECK(std::abs(s2.grad[2] - 0.5 * std::sqrt(3.0 / (4.0 * pi))) < 1e-14);
  }

  SECTION("gradient matches finite differences, radial part vanishes")
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(0.2, pi - 0.2), up(0.0, 2 * pi);
    const double h = 1e-6;
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 1 + trial % 7;
      const int m = (trial % (2 * n + 1)) - n;
      const double t = ut(rng), p = up(rng);
      const auto s = eval_tangential_basis({n, m}, from_angles(t, p));
      const SphericalFrame f(from_angles(t, p));
      const cplx dt = (Y_at(n, m, t + h, p) - Y_at(n, m, t - h, p)) / (2 * h);
      const cplx dp = (Y_at(n, m, t, p + h) - Y_at(n, m, t, p - h)) / (2 * h) / std::sin(t);
      CHECK(std::abs(to_complex(f.t_hat).dot(s.grad) - dt) < 1e-7);
      CHECK(std::abs(to_complex(f.p_hat).dot(s.grad) - dp) < 1e-7);
      CHECK(std::abs(to_complex(f.r_hat).dot(s.grad)) < 1e-12);
      CHECK(std::abs(to_complex(f.r_hat).dot(s.grad_cross_nu)) < 1e-12);
      // U . V = 0 without conjugation
      CHECK(std::abs(s.grad.cwiseProduct(s.grad_cross_nu).sum()) < 1e-12);
    }
  }

  SECTION("||grad_S Y||^2 = n(n+1)")
  {
    const int N = 9;
    const auto q = SphereQuadrature::make(N);
    for (int n = 1; n <= N; ++n)
      for (int m : {-n, 0, n / 2, n}) {
        double s = 0.0, sv = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
          const auto b = eval_tangential_basis({n, m}, q.nodes[k]);
          s += q.weights[k] * b.grad.squaredNorm();
          sv += q.weights[k] * b.grad_cross_nu.squaredNorm();
        }
        CHECK(s == Approx(n * (n + 1.0)).epsilon(1e-12));
        CHECK(sv == Approx(n * (n + 1.0)).epsilon(1e-12));
      }
  }

  SECTION("finite-difference Laplace-Beltrami of Y_4^2")
  {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0.3, pi - 0.3), up(0.0, 2 * pi);
    const double h = 1e-4;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double t = ut(rng), p = up(rng);
      const cplx y = Y_at(4, 2, t, p);
      const double sp = std::sin(t + h / 2), sm = std::sin(t - h / 2);
      const cplx dtt = (sp * (Y_at(4, 2, t + h, p) - y) - sm * (y - Y_at(4, 2, t - h, p))) / (h * h * std::sin(t));
      const cplx dpp = (Y_at(4, 2, t, p + h) - 2.0 * y + Y_at(4, 2, t, p - h)) / (h * h * std::pow(std::sin(t), 2));
      worst = std::max(worst, std::abs(dtt + dpp + 20.0 * y) / std::abs(20.0 * y));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("vectorial harmonics", "[harmonics]")
{
  const Vec3 x = from_angles(1.1, 0.4);
  SECTION("T_n is grad x nu")
  {
    const auto v = eval_vector_harmonics({3, -2}, x);
    const auto b = eval_tangential_basis({3, -2}, x);
    CHECK(cnorm(v.T_n - b.grad_cross_nu) < 1e-14);
  }
  SECTION("N_1 carries only the radial part of Y_0")
  {
    const auto v = eval_vector_harmonics({1, 0}, x);
    const CVec3 expect = to_complex(x.normalized()) / std::sqrt(4.0 * pi);
    CHECK(cnorm(v.N_n - expect) < 1e-14);
  }
  SECTION("I_n and T_{n+1} are orthogonal")
  {
    const auto q = SphereQuadrature::make(8);
    for (int n = 1; n <= 5; ++n) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        const auto a = eval_vector_harmonics({n, 1}, q.nodes[k]);
        const auto b = eval_vector_harmonics({n + 1, 1}, q.nodes[k]);
        s += q.weights[k] * b.T_n.dot(a.I_n);
      }
      CHECK(std::abs(s) < 1e-12);
    }
  }
  CHECK_THROWS_AS(eval_vector_harmonics({0, 0}, x), DegenerateIndex);
  CHECK_THROWS_AS(eval_tangential_basis({0, 0}, x), DegenerateIndex);
  CHECK_THROWS_AS(eval_Y({2, 3}, x), DegenerateIndex);
}

TEST_CASE("tangential projection", "[harmonics]")
{
  const int N = 8;
  const auto q = SphereQuadrature::make(N);

  auto sample = [&](auto fn) {
    std::vector<CVec3> f(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) f[k] = fn(q.nodes[k]);
    return f;
  };

  SECTION("grad_S Y_3^1 is one-hot")
  {
    const auto c = project_tangential(q, sample([](const Vec3 &p) { return eval_tangential_basis({3, 1}, p).grad; }), N);
    for (int k = 0; k < mode_count(N); ++k) {
      const double expect = (k == mode_index(3, 1)) ? 1.0 : 0.0;
      CHECK(std::abs(c.c_grad[k] - expect) < 1e-10);
      CHECK(std::abs(c.c_cross[k]) < 1e-10);
    }
    CHECK(c.reconstruction_error < 1e-12);
    CHECK_FALSE(c.truncation_warning);
  }

  SECTION("grad_S Y_2^0 x nu is one-hot")
  {
    const auto c = project_tangential(q, sample([](const Vec3 &p) { return eval_tangential_basis({2, 0}, p).grad_cross_nu; }), N);
    for (int k = 0; k < mode_count(N); ++k) {
      const double expect = (k == mode_index(2, 0)) ? 1.0 : 0.0;
      CHECK(std::abs(c.c_cross[k] - expect) < 1e-10);
      CHECK(std::abs(c.c_grad[k]) < 1e-10);
    }
  }

  SECTION("synthesize then project is the identity")
  {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    TangentialCoefficients c(N);
    for (int k = 0; k < mode_count(N); ++k) {
      c.c_grad[k] = {g(rng), g(rng)};
      c.c_cross[k] = {g(rng), g(rng)};
    }
    const auto back = project_tangential(q, synthesize(q, c), N);
    double worst = 0.0;
    for (int k = 0; k < mode_count(N); ++k)
      worst = std::max({worst, std::abs(back.c_grad[k] - c.c_grad[k]), std::abs(back.c_cross[k] - c.c_cross[k])});
    CHECK(worst < 1e-9);
  }

  SECTION("truncation is reported")
  {
    const auto f = sample([](const Vec3 &p) { return eval_tangential_basis({8, 2}, p).grad; });
    const auto c = project_tangential(q, f, 5);
    CHECK(c.truncation_warning);
    CHECK(c.reconstruction_error == Approx(1.0).epsilon(1e-9));
  }

  SECTION("radial fields are rejected")
  {
    CHECK_THROWS_AS(project_tangential(q, sample([](const Vec3 &p) { return to_complex(p); }), N), NotTangential);
  }

  SECTION("projection is bitwise deterministic")
  {
    const auto f = sample([](const Vec3 &p) { return CVec3(cplx(p.y(), 0.3), cplx(-p.x(), 0.0), 0.0); });
    std::vector<CVec3> ft(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      const Vec3 r = q.nodes[k];
      ft[k] = f[k] - r.cast<cplx>() * r.cast<cplx>().dot(f[k]);
    }
    const auto a = project_tangential(q, ft, N), b = project_tangential(q, ft, N);
    CHECK(a.c_grad == b.c_grad);
    CHECK(a.c_cross == b.c_cross);
  }
}
