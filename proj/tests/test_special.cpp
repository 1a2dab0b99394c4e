#include <doctest.h>

#include <cmath>

#include "nanocav/special.hpp"

using namespace nanocav::special;

TEST_CASE("J_m on the real axis matches the standard library")
{
    for (int m = 0; m <= 4; ++m)
        for (double x : {0.0, 0.3, 1.0, 2.5, 7.0, 13.0, 25.0}) {
            const double ref = std::cyl_bessel_j(m, x);
            CHECK(std::abs(bessel_j(m, cplx(x, 0.0)) - ref) < 1e-12);
            CHECK(std::abs(bessel_j(m, x) - ref) < 1e-13);
        }
}

TEST_CASE("negative orders and arguments follow the reflection rules")
{
    for (int m = 1; m <= 3; ++m)
        for (double x : {0.7, 3.1}) {
            const double s = (m % 2) ? -1.0 : 1.0;
            CHECK(bessel_j(-m, x) == doctest::Approx(s * std::cyl_bessel_j(m, x)));
            CHECK(bessel_j(m, -x) == doctest::Approx(s * std::cyl_bessel_j(m, x)));
        }
}

TEST_CASE("J_m on the imaginary axis is i^m I_m")
{
    for (int m = 0; m <= 3; ++m)
        for (double x : {0.5, 4.0, 11.0}) {
            const cplx ref = std::pow(cplx(0, 1), m) * std::cyl_bessel_i(m, x);
            CHECK(std::abs(bessel_j(m, cplx(0, x)) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
        }
}

TEST_CASE("J_m satisfies the three-term recurrence off the axes")
{
    for (cplx z : {cplx(1.2, 0.4), cplx(6.0, -2.0), cplx(15.0, 3.0), cplx(0.3, 9.0)})
        for (int m = 1; m <= 3; ++m) {
            const cplx lhs = bessel_j(m - 1, z) + bessel_j(m + 1, z);
            const cplx rhs = 2.0 * double(m) / z * bessel_j(m, z);
            CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
        }
}

TEST_CASE("scaled K_m matches the standard library")
{
    for (int m = 0; m <= 3; ++m)
        for (double x : {0.2, 1.0, 5.0, 40.0, 200.0}) {
            const double ref = std::exp(x) * std::cyl_bessel_k(m, x);
            CHECK(std::abs(bessel_k_scaled(m, cplx(x, 0.0)) - ref) < 1e-11 * ref);
        }
}

TEST_CASE("scaled K_m satisfies the recurrence for complex argument")
{
    for (cplx z : {cplx(2.0, 1.0), cplx(30.0, -12.0), cplx(0.8, 0.5)})
        for (int m = 1; m <= 2; ++m) {
            const cplx lhs = bessel_k_scaled(m + 1, z) - bessel_k_scaled(m - 1, z);
            const cplx rhs = 2.0 * double(m) / z * bessel_k_scaled(m, z);
            CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
        }
}

TEST_CASE("entire J and its derivative")
{
    const double h = 1e-5;
    for (int m = 0; m <= 2; ++m)
        for (cplx q2 : {cplx(0.004, 1e-4), cplx(-0.01, 0.002)}) {
            const double r = 37.0;
            const EntireJ e = entire_j(m, q2, r);
            const cplx fd = (entire_j(m, q2, r + h).f - entire_j(m, q2, r - h).f) / (2 * h);
            CHECK(std::abs(e.df - fd) < 1e-8 * std::max(std::abs(fd), std::abs(e.f) / r));
            CHECK(std::abs(e.f_over_r * r - e.f) < 1e-14 * std::max(1e-300, std::abs(e.f)) + 1e-300);
            const cplx q = std::sqrt(q2);
            CHECK(std::abs(e.f - bessel_j(m, q * r) / std::pow(q, m)) < 1e-10 * std::abs(e.f));
        }
    CHECK(entire_j(0, 0.01, 0.0).f == cplx(1.0, 0.0));
    CHECK(entire_j(1, 0.01, 0.0).f_over_r == cplx(0.5, 0.0));
}

TEST_CASE("Muller finds complex roots")
{
    const auto r = muller([](cplx z) { return z * z + 1.0; }, {0.5, 0.5}, {0.6, 0.9}, {0.1, 1.2});
    REQUIRE(r);
    CHECK(std::abs(*r - cplx(0, 1)) < 1e-12);
    const auto c = muller([](cplx z) { return std::cos(z) - z; }, 0.5, 0.7, 0.8);
    REQUIRE(c);
    CHECK(std::abs(*c - 0.7390851332151607) < 1e-12);
}
