#include <cmath>
#include <numbers>

#include <doctest.h>

#include "cosparse/bounds.hpp"
#include "cosparse/errors.hpp"

using cosparse::BoundQuery;

namespace {

BoundQuery desk(int s, int p, double eps) {
  BoundQuery q;
  q.s = s;
  q.p = p;
  q.eps = eps;
  return q;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("e_m matches the closed forms and sandwich") {
    CHECK(std::abs(cosparse::e_m(1) - std::sqrt(2.0 / std::numbers::pi)) <= 1e-12);
    CHECK(std::abs(cosparse::e_m(2) - std::sqrt(std::numbers::pi / 2.0)) <= 1e-12);
    for (int m = 1; m <= 2000; ++m) {
      const double v = cosparse::e_m(m);
      CHECK(v >= m / std::sqrt(m + 1.0) - 1e-12);
      CHECK(v <= std::sqrt(static_cast<double>(m)) + 1e-12);
    }
    CHECK_THROWS_AS(cosparse::e_m(0), cosparse::InvalidArgument);
  }

  TEST_CASE("frozen measurement counts") {
    CHECK(cosparse::m_nonuniform(desk(10, 200, 0.01)) == 145);

    BoundQuery noisy = desk(10, 200, 0.01);
    noisy.tau = 1.0;
    CHECK(cosparse::m_nonuniform_noisy(noisy).m == 170);
    noisy.tau = 2.0;
    CHECK(cosparse::m_nonuniform_noisy(noisy).m == 197);

    BoundQuery uni = desk(5, 50, 0.01);
    uni.rho = 0.9;
    CHECK(cosparse::m_uniform(uni) == 472);
    uni.tau = 2.0;
    CHECK(cosparse::m_uniform_robust(uni).m == 1882);

    CHECK(cosparse::m_nonuniform(desk(3, 50, 0.02)) == 59);
    CHECK(cosparse::m_nonuniform(desk(5, 50, 0.02)) == 74);

    BoundQuery n2 = desk(3, 50, 0.02);
    n2.tau = 1.0;
    CHECK(cosparse::m_nonuniform_noisy(n2).m == 75);

    BoundQuery u2 = desk(3, 50, 0.02);
    u2.rho = 0.9;
    CHECK(cosparse::m_uniform(u2) == 326);
  }

  TEST_CASE("returned m is the first admissible integer") {
    for (int s : {1, 4, 9}) {
      for (double eps : {0.2, 0.01}) {
        BoundQuery q = desk(s, 60, eps);
        q.rho = 0.6;
        q.tau = 2.0;

        const long double r1 = cosparse::rhs_nonuniform(q);
        const int m1 = cosparse::m_nonuniform(q);
        CHECK(cosparse::m_admissible(m1, r1));
        CHECK_FALSE(cosparse::m_admissible(m1 - 1, r1));

        const long double r2 = cosparse::rhs_nonuniform_noisy(q);
        const int m2 = cosparse::m_nonuniform_noisy(q).m;
        CHECK(cosparse::m_admissible(m2, r2));
        CHECK_FALSE(cosparse::m_admissible(m2 - 1, r2));

        const long double r3 = cosparse::rhs_uniform(q);
        const int m3 = cosparse::m_uniform(q);
        CHECK(cosparse::m_admissible(m3, r3));
        CHECK_FALSE(cosparse::m_admissible(m3 - 1, r3));

        const long double r4 = cosparse::rhs_uniform_robust(q);
        const int m4 = cosparse::m_uniform_robust(q).m;
        CHECK(cosparse::m_admissible(m4, r4));
        CHECK_FALSE(cosparse::m_admissible(m4 - 1, r4));
      }
    }
  }

  TEST_CASE("monotonicity in s and eps") {
    int prev = 0;
    for (int s = 1; s <= 12; ++s) {
      const int m = cosparse::m_nonuniform(desk(s, 50, 0.02));
      CHECK(m >= prev);
      prev = m;
    }
    CHECK(cosparse::m_nonuniform(desk(5, 50, 0.001)) >=
          cosparse::m_nonuniform(desk(5, 50, 0.1)));
  }

  TEST_CASE("bounds depend on (A, B) only through B/A") {
    BoundQuery q = desk(6, 80, 0.03);
    q.A = 1.0;
    q.B = 4.0;
    q.rho = 0.7;
    q.tau = 3.0;
    BoundQuery scaled = q;
    scaled.A = 3.7;
    scaled.B = 3.7 * 4.0;
    CHECK(cosparse::m_nonuniform(q) == cosparse::m_nonuniform(scaled));
    CHECK(cosparse::m_nonuniform_noisy(q).m == cosparse::m_nonuniform_noisy(scaled).m);
    CHECK(cosparse::m_uniform(q) == cosparse::m_uniform(scaled));
    CHECK(cosparse::m_uniform_robust(q).m == cosparse::m_uniform_robust(scaled).m);
  }

  TEST_CASE("noisy bound reports the error radius 2 eta / tau") {
    BoundQuery q = desk(4, 50, 0.05);
    q.tau = 2.0;
    q.eta = 0.3;
    CHECK(cosparse::m_nonuniform_noisy(q).error_radius == doctest::Approx(0.3).epsilon(1e-12));
  }

  TEST_CASE("error bound right-hand sides") {
    BoundQuery q;
    q.A = 1.0;
    q.B = 1.0;
    q.s = 4;
    q.p = 50;
    q.rho = 0.5;
    q.tau = 2.0;
    q.eta = 0.0;
    const auto eb = cosparse::error_bounds(q, 1.0, 30);
    // l1: 2 (1 + rho) / (1 - rho) * sigma_s
    CHECK(eb.l1 == doctest::Approx(6.0).epsilon(1e-12));
    // l2: 2 (1 + rho)^2 / (sqrt(A) (1 - rho)) * sigma_s / sqrt(s)
    CHECK(eb.l2 == doctest::Approx(4.5).epsilon(1e-12));
    // No noise: the robust l2 bound collapses onto the same sigma term.
    CHECK(eb.l2_robust == doctest::Approx(eb.l2).epsilon(1e-12));
    CHECK(eb.cone == 0.0);

    q.eta = 0.2;
    const auto raw = cosparse::error_bounds(q, 1.0, 30, false);
    const auto gau = cosparse::error_bounds(q, 1.0, 30, true);
    const double raw_coeff = 2.0 * q.tau * (3.0 + q.rho) / (std::sqrt(q.A) * (1.0 - q.rho));
    const double gau_coeff = raw_coeff * std::sqrt(2.0 * q.B) / std::sqrt(30.0);
    CHECK(raw.l2_robust - raw.l2 == doctest::Approx(raw_coeff * q.eta).epsilon(1e-12));
    CHECK(gau.l2_robust - gau.l2 == doctest::Approx(gau_coeff * q.eta).epsilon(1e-12));
    CHECK(raw.cone == doctest::Approx(2.0 * q.eta / q.tau).epsilon(1e-12));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(cosparse::m_nonuniform(desk(0, 50, 0.01)), cosparse::InvalidArgument);
    CHECK_THROWS_AS(cosparse::m_nonuniform(desk(51, 50, 0.01)), cosparse::InvalidArgument);
    CHECK_THROWS_AS(cosparse::m_nonuniform(desk(5, 50, 0.0)), cosparse::InvalidArgument);
    CHECK_THROWS_AS(cosparse::m_nonuniform(desk(5, 50, 1.0)), cosparse::InvalidArgument);

    BoundQuery bad_frame = desk(5, 50, 0.01);
    bad_frame.A = 0.0;
    CHECK_THROWS_AS(cosparse::m_nonuniform(bad_frame), cosparse::InvalidArgument);
    bad_frame.A = 2.0;
    bad_frame.B = 1.0;
    CHECK_THROWS_AS(cosparse::m_nonuniform(bad_frame), cosparse::InvalidArgument);

    BoundQuery bad_rho = desk(5, 50, 0.01);
    bad_rho.rho = 1.0;
    CHECK_THROWS_AS(cosparse::m_uniform(bad_rho), cosparse::InvalidArgument);

    BoundQuery bad_tau = desk(5, 50, 0.01);
    bad_tau.tau = 1.0;  // robust needs tau > 1
    CHECK_THROWS_AS(cosparse::m_uniform_robust(bad_tau), cosparse::InvalidArgument);
  }
}
