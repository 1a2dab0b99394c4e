#include <doctest.h>

#include <Eigen/Dense>
#include <map>
#include <sstream>

#include "common.hpp"
#include "nanocav/errors.hpp"
#include "nanocav/special.hpp"

using namespace nanocav;
using testing::kLambda;
using testing::kPi;

namespace {

// Characteristic-matrix reflection of a single film, written independently of the library.
cplx film_oracle(double n_t, double lambda, double d, cplx e1, cplx e2, cplx e3, bool p)
{
    auto kz = [&](cplx e) {
        cplx k = std::sqrt(e - n_t * n_t);
        return k.imag() < 0 ? -k : k;
    };
    const double k0 = 2 * kPi / lambda;
    const cplx k1 = kz(e1), k2 = kz(e2), k3 = kz(e3);
    const cplx y1 = p ? e1 / k1 : k1, y2 = p ? e2 / k2 : k2, y3 = p ? e3 / k3 : k3;
    const cplx delta = k0 * k2 * d;
    Eigen::Matrix2cd M;
    M << std::cos(delta), cplx(0, -1) * std::sin(delta) / y2, cplx(0, -1) * y2 * std::sin(delta), std::cos(delta);
    const Eigen::Vector2cd bc = M * Eigen::Vector2cd(1.0, y3);
    return (y1 * bc(0) - bc(1)) / (y1 * bc(0) + bc(1));
}

const GuidedMode& mode(ModeFamily f, double a = 100.0)
{
    static std::map<std::pair<int, double>, GuidedMode> cache;
    const auto key = std::make_pair(static_cast<int>(f), a);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, solve_mode(testing::stack(a), kLambda, f)).first;
    return it->second;
}

CoefficientTable parse_table(const std::string& text, double tol = 1.0)
{
    std::istringstream in(text);
    return load_coefficient_table(in, "inline", tol);
}

// Azimuthally averaged |F|^2 of the transverse aperture field by direct 2D quadrature.
double brute_far_field(const GuidedMode& m, double theta)
{
    const double b = m.stack.a + m.stack.e;
    const double k = m.k0() * std::sin(theta);
    const int nr = 300, nphi = 64, npsi = 16;
    double acc = 0.0;
    for (int ps = 0; ps < npsi; ++ps) {
        const double psi = 2 * kPi * ps / npsi;
        cplx fx = 0.0, fy = 0.0;
        for (int i = 0; i < nr; ++i) {
            const double r = (i + 0.5) * b / nr;
            const FieldPoint f = m.field(r);
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2 * kPi * j / nphi;
                const cplx ph = std::exp(cplx(0, m.m() * phi));
                const cplx er = f.E[0] * ph, ep = f.E[1] * ph;
                const cplx ex = er * std::cos(phi) - ep * std::sin(phi);
                const cplx ey = er * std::sin(phi) + ep * std::cos(phi);
                const cplx w = std::exp(cplx(0, -k * r * std::cos(phi - psi))) * r;
                fx += ex * w;
                fy += ey * w;
            }
        }
        acc += std::norm(fx) + std::norm(fy);
    }
    const double ob = 0.5 * (1 + std::cos(theta));
    return ob * ob * acc / npsi;
}

}  // namespace

TEST_CASE("thin-film reflection matches the characteristic-matrix oracle")
{
    const cplx e1 = 11.9025, e2 = 3.8025, e3(-36.9, 2.5);
    for (bool p : {false, true})
        for (double n : {0.0, 1.5, 2.9, 3.4})
            for (double d : {0.0, 5.0, 40.0}) {
                const cplx r = thin_film_reflection(n, kLambda, d, e1, e2, e3, p);
                CHECK(std::abs(r - film_oracle(n, kLambda, d, e1, e2, e3, p)) < 1e-12);
            }
    // Normal incidence without a film is the two-media Fresnel formula.
    const cplx n3 = std::sqrt(e3);
    const cplx fres = (3.45 - n3) / (3.45 + n3);
    CHECK(std::abs(thin_film_reflection(0.0, kLambda, 0.0, e1, e2, e3, false) - fres) < 1e-12);
}

TEST_CASE("lossless metal mirror reflects fully")
{
    const auto pec = testing::metal_from_eps(-1e6);
    for (ModeFamily f : {ModeFamily::TE11, ModeFamily::TM01}) {
        const cplx r = bottom_reflection(mode(f), 5.0, kLambda, pec.get());
        CHECK(std::abs(std::abs(r) - 1.0) < 1e-6);
    }
    const auto lossless = testing::metal_from_eps(-36.9);
    CHECK(std::abs(std::abs(bottom_reflection(mode(ModeFamily::TE11), 5.0, kLambda, lossless.get())) - 1.0) < 1e-6);
}

TEST_CASE("shell does not lower the bottom reflectance")
{
    const GuidedMode& m = mode(ModeFamily::TE11);
    CHECK(std::abs(bottom_reflection(m, 5.0, kLambda)) >= std::abs(bottom_reflection(m, 0.0, kLambda)) - 0.01);
}

TEST_CASE("bottom reflectance is nearly radius independent")
{
    double lo = 1.0, hi = 0.0;
    for (double a = 80.0; a <= 200.0; a += 20.0) {
        const double R = std::norm(bottom_reflection(mode(ModeFamily::TE11, a), 5.0, kLambda));
        lo = std::min(lo, R);
        hi = std::max(hi, R);
    }
    CHECK(hi - lo < 0.05);
    CHECK(lo >= 0.91);
}

TEST_CASE("bottom reflectance stays below 0.99 up to 200 nm" * doctest::may_fail())
{
    for (double a = 80.0; a <= 200.0; a += 20.0)
        CHECK(std::norm(bottom_reflection(mode(ModeFamily::TE11, a), 5.0, kLambda)) <= 0.99);
}

TEST_CASE("bottom reflection past the core light line")
{
    // A branch with Re n_eff above the core index has no propagating plane-wave incidence.
    GuidedMode m = mode(ModeFamily::TE11, 250.0);
    REQUIRE(m.n_eff.real() > kGaAsIndex);
    CHECK(bottom_reflection(m, 5.0, kLambda) == cplx(-1.0));
    m.family = ModeFamily::TM01;
    CHECK(bottom_reflection(m, 5.0, kLambda) == cplx(1.0));
    for (double a : {220.0, 240.0, 260.0}) {
        const InterfaceCoefficients c = interface_coefficients(mode(ModeFamily::TM01, a));
        CHECK(std::abs(c.r_b) <= 1.0);
    }
}

TEST_CASE("top reflection")
{
    SUBCASE("large-radius asymptote")
    {
        for (TopModel t : {TopModel::p, TopModel::s}) {
            const double R = std::norm(top_reflection(mode(ModeFamily::TE11, 2000.0), t));
            CHECK(R == doctest::Approx(0.30).epsilon(0.02 / 0.30));
        }
        const double bulk = std::pow((kGaAsIndex - 1) / (kGaAsIndex + 1), 2);
        CHECK(std::norm(top_reflection(cplx(kGaAsIndex), cplx(kGaAsIndex * kGaAsIndex), TopModel::p)) ==
              doctest::Approx(bulk).epsilon(1e-12));
        CHECK(std::norm(top_reflection(cplx(kGaAsIndex), cplx(kGaAsIndex * kGaAsIndex), TopModel::s)) ==
              doctest::Approx(bulk).epsilon(1e-12));
    }
    SUBCASE("zero-index limit")
    {
        CHECK(std::abs(top_reflection(cplx(1e-9), 11.9025, TopModel::p)) == doctest::Approx(1.0));
        CHECK(std::abs(top_reflection(cplx(1e-9), 11.9025, TopModel::s)) == doctest::Approx(1.0));
    }
    SUBCASE("decreasing with radius")
    {
        double prev = 1.0;
        for (double a = 60.0; a <= 500.0; a += 40.0) {
            const double R = std::norm(top_reflection(mode(ModeFamily::TE11, a)));
            CHECK(R < prev);
            prev = R;
        }
    }
    SUBCASE("model names")
    {
        CHECK(parse_top_model("s") == TopModel::s);
        CHECK(top_model_name(TopModel::p) == "p");
        CHECK_THROWS_AS(parse_top_model("q"), ConfigError);
    }
}

TEST_CASE("plasmon loss anchors")
{
    const auto ag = testing::silver();
    CHECK(plasmon_loss(100.0, kLambda, *ag) == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(plasmon_loss(200.0, kLambda, *ag) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(plasmon_loss(50.0, kLambda, *ag) == doctest::Approx(0.10).epsilon(1e-12));
    const double ratio = permittivity(*ag, 1100).imag() / permittivity(*ag, kLambda).imag();
    CHECK(plasmon_loss(100.0, 1100.0, *ag) == doctest::Approx(std::clamp(0.1 * ratio, 0.0, 0.2)));
    CHECK(plasmon_loss(100.0, kLambda, *testing::metal_from_eps(-1e6)) == 0.0);
    CHECK_THROWS_AS(plasmon_loss(0.0, kLambda, *ag), DomainError);
}

TEST_CASE("energy bookkeeping on every analytic build")
{
    for (ModeFamily f : {ModeFamily::TE11, ModeFamily::TM01})
        for (double a : {60.0, 100.0, 150.0, 200.0}) {
            if (f == ModeFamily::TM01 && a < 100.0)
                continue;
            for (TopModel t : {TopModel::p, TopModel::s}) {
                InterfaceOptions o;
                o.top = t;
                const InterfaceCoefficients c = interface_coefficients(mode(f, a), o);
                CHECK(std::abs(c.R_t() + c.T_total() + c.L_p - 1.0) < 1e-6);
                CHECK(std::abs(c.r_t) <= 1.0);
                CHECK(std::abs(c.r_b) <= 1.0);
                CHECK(c.provenance == Provenance::analytic);
            }
        }
}

TEST_CASE("far-field patterns")
{
    const InterfaceCoefficients te = interface_coefficients(mode(ModeFamily::TE11));
    const InterfaceCoefficients tm = interface_coefficients(mode(ModeFamily::TM01));
    const FarFieldPattern& p = te.pattern;

    SUBCASE("sampling and normalization")
    {
        REQUIRE(p.theta.size() == 181);
        CHECK(p.theta.front() == 0.0);
        CHECK(p.theta.back() == doctest::Approx(kPi / 2));
        double integral = 0.0;
        for (std::size_t j = 1; j < p.theta.size(); ++j)
            integral += kPi * (p.theta[j] - p.theta[j - 1]) *
                        (p.intensity[j] * std::sin(p.theta[j]) + p.intensity[j - 1] * std::sin(p.theta[j - 1]));
        CHECK(integral == doctest::Approx(te.T_total()).epsilon(1e-3));
        for (double v : p.intensity)
            CHECK(v >= 0.0);
    }
    SUBCASE("TE11 peaks on axis, TM01 vanishes on axis")
    {
        CHECK(p.intensity[0] == *std::max_element(p.intensity.begin(), p.intensity.end()));
        CHECK(tm.pattern.intensity[0] < 1e-20);
        CHECK(*std::max_element(tm.pattern.intensity.begin(), tm.pattern.intensity.end()) > 0);
    }
    SUBCASE("shape matches a brute-force aperture integral")
    {
        for (const auto* c : {&te, &tm}) {
            const GuidedMode& m = mode(c->pattern.family);
            const int j0 = 60, j1 = 150;
            const double ref = brute_far_field(m, c->pattern.theta[j1]) / brute_far_field(m, c->pattern.theta[j0]);
            CHECK(c->pattern.intensity[j1] / c->pattern.intensity[j0] == doctest::Approx(ref).epsilon(2e-3));
        }
    }
    SUBCASE("cumulative out-coupling")
    {
        CHECK(outcoupling(p, 0.0) == 0.0);
        CHECK(outcoupling(p, kPi / 2) == doctest::Approx(1.0 - te.R_t() - te.L_p).epsilon(1e-9));
        double prev = -1.0;
        for (int i = 0; i < 50; ++i) {
            const double v = outcoupling(p, 0.5 * kPi * i / 49);
            CHECK(v >= prev);
            prev = v;
        }
        CHECK_THROWS_AS(outcoupling(p, -0.1), DomainError);
        CHECK_THROWS_AS(outcoupling(p, 2.0), DomainError);
    }
    SUBCASE("self overlap is one")
    {
        CHECK(pattern_overlap(p, p) == doctest::Approx(1.0));
    }
}

TEST_CASE("TE11 and TM01 patterns overlap weakly" * doctest::may_fail())
{
    const InterfaceCoefficients te = interface_coefficients(mode(ModeFamily::TE11));
    const InterfaceCoefficients tm = interface_coefficients(mode(ModeFamily::TM01));
    CHECK(pattern_overlap(te.pattern, tm.pattern) < 0.5);
}

TEST_CASE("TM01 reflects more strongly than TE11 at the top facet")
{
    const double te = std::norm(top_reflection(mode(ModeFamily::TE11)));
    const double tm = std::norm(top_reflection(mode(ModeFamily::TM01)));
    CHECK(tm > te);
    InterfaceOptions o;
    o.table = &testing::tm_table();
    const InterfaceCoefficients c = interface_coefficients(mode(ModeFamily::TM01), o);
    CHECK(c.provenance == Provenance::table);
    CHECK(c.R_t() >= 0.9);
    CHECK(c.R_t() > te);
    CHECK(std::abs(c.R_t() + c.T_total() + c.L_p - 1.0) < 1e-6);
}

TEST_CASE("coefficient table ingestion")
{
    const std::string head = "family,a_nm,lambda_nm,re_rt,im_rt,re_rb,im_rb\n";
    SUBCASE("passthrough at the key")
    {
        const auto t = parse_table(head + "TE11,100,950,0.5,0.1,-0.9,0.2\n");
        const InterfaceOptions o{TopModel::p, 181, &t};
        const InterfaceCoefficients c = interface_coefficients(mode(ModeFamily::TE11), o);
        CHECK(c.r_t == cplx(0.5, 0.1));
        CHECK(c.r_b == cplx(-0.9, 0.2));
        CHECK(c.provenance == Provenance::table);
        CHECK(std::abs(c.R_t() + c.T_total() + c.L_p - 1.0) < 1e-6);
    }
    SUBCASE("nearest neighbour within tolerance")
    {
        const auto t = parse_table(head + "TE11,100,950,0.5,0,0.9,0\nTE11,102,950,0.4,0,0.9,0\n");
        REQUIRE(t.lookup(ModeFamily::TE11, 100.4, 950.0));
        CHECK(t.lookup(ModeFamily::TE11, 100.4, 950.0)->a_nm == 100.0);
        CHECK(t.lookup(ModeFamily::TE11, 101.6, 950.0)->a_nm == 102.0);
        CHECK(t.lookup(ModeFamily::TE11, 104.0, 950.0) == nullptr);
        CHECK(t.lookup(ModeFamily::TM01, 100.0, 950.0) == nullptr);
    }
    SUBCASE("validation")
    {
        CHECK_THROWS_AS(parse_table(head + "TE11,100,950,1.2,0,0.9,0\n"), ValidationError);
        CHECK_THROWS_AS(parse_table(head + "TE11,100,950,0.5,0,0.9,0\nTE11,100,950,0.4,0,0.9,0\n"), ValidationError);
        try {
            parse_table(head + "TE11,100,950,0.5,0,0.9\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
        CHECK_THROWS_AS(parse_table(head + "XX11,100,950,0.5,0,0.9,0\n"), ParseError);
    }
    SUBCASE("tabulated out-coupling")
    {
        const auto t = parse_table("family,a_nm,lambda_nm,re_rt,im_rt,re_rb,im_rb,T_30,T_60,T_90\n"
                                   "TE11,100,950,0.6,0,0.95,0,0.1,0.4,0.55\n");
        const InterfaceOptions o{TopModel::p, 181, &t};
        const InterfaceCoefficients c = interface_coefficients(mode(ModeFamily::TE11), o);
        CHECK(c.T_total() == doctest::Approx(0.55));
        CHECK(outcoupling(c.pattern, kPi / 6) == doctest::Approx(0.1).epsilon(1e-9));
        CHECK(c.L_p == doctest::Approx(1.0 - 0.36 - 0.55));
        CHECK_THROWS_AS(parse_table("family,a_nm,lambda_nm,re_rt,im_rt,re_rb,im_rb,T_30,T_90\n"
                                    "TE11,100,950,0.6,0,0.95,0,0.5,0.4\n"),
                        ValidationError);
    }
    SUBCASE("bundled TM01 row")
    {
        const auto& t = testing::tm_table();
        REQUIRE(t.lookup(ModeFamily::TM01, 100.0, 950.0));
        CHECK(std::norm(t.lookup(ModeFamily::TM01, 100.0, 950.0)->r_t) == doctest::Approx(0.99).epsilon(1e-12));
    }
}
