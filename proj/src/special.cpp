#include "nanocav/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nanocav/errors.hpp"

namespace nanocav::special {

namespace {

constexpr double kPi = std::numbers::pi;

// Sum_k (-w)^k / (k! (m+k)!)
cplx bessel_series(int m, cplx w)
{
    double fact_m = 1.0;
    for (int i = 2; i <= m; ++i)
        fact_m *= i;
    cplx term = 1.0 / fact_m;
    cplx sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -w / (double(k) * double(m + k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > std::abs(w))
            break;
    }
    return sum;
}

// J_m(z) = (1/pi) int_0^pi cos(m t - z sin t) dt; the integrand is even and periodic,
// so the trapezoid rule converges geometrically.
cplx bessel_j_integral(int m, cplx z)
{
    const int n = static_cast<int>(std::abs(z)) + 40 + 2 * std::abs(m);
    cplx sum = 0.5 * (std::cos(cplx(0.0)) + std::cos(cplx(m * kPi)));
    for (int j = 1; j < n; ++j) {
        const double t = kPi * j / n;
        sum += std::cos(double(m) * t - z * std::sin(t));
    }
    return sum / double(n);
}

constexpr double kSeriesLimit = 36.0;  // |q r / 2|^2 below which the power series is used

}  // namespace

cplx bessel_j(int m, cplx z)
{
    if (m < 0)
        return (m % 2 == 0 ? 1.0 : -1.0) * bessel_j(-m, z);
    const cplx w = 0.25 * z * z;
    if (std::abs(w) <= kSeriesLimit)
        return std::pow(0.5 * z, m) * bessel_series(m, w);
    return bessel_j_integral(m, z);
}

double bessel_j(int m, double x)
{
    if (m < 0)
        return (m % 2 == 0 ? 1.0 : -1.0) * bessel_j(-m, x);
    if (x < 0)
        return (m % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(double(m), -x);
    return std::cyl_bessel_j(double(m), x);
}

cplx bessel_k_scaled(int m, cplx z)
{
    m = std::abs(m);
    if (!(z.real() > 0))
        throw DomainError("scaled K_m requires Re z > 0");
    const double re = z.real();
    const double az = std::abs(z);
    // Truncate where the integrand has decayed below ~1e-20 of its peak.
    double t_max = 1.0;
    while (re * (std::cosh(t_max) - 1.0) - m * t_max < 46.0 && t_max < 60.0)
        t_max += 0.25;
    double h = std::min(0.1, 0.35 / std::sqrt(az));
    const double osc = std::abs(z.imag()) * std::sinh(t_max);
    if (osc > 0)
        h = std::min(h, 0.5 / osc);
    const int n = static_cast<int>(std::ceil(t_max / h));
    h = t_max / n;
    cplx sum = 0.5;
    for (int j = 1; j <= n; ++j) {
        const double t = j * h;
        sum += std::exp(-z * (std::cosh(t) - 1.0)) * std::cosh(m * t);
    }
    return sum * h;
}

EntireJ entire_j(int m, cplx q2, double r)
{
    const cplx w = 0.25 * q2 * r * r;
    EntireJ out;
    if (std::abs(w) <= kSeriesLimit) {
        const double half = 0.5 * r;
        const cplx s = bessel_series(m, w);
        out.f = std::pow(half, m) * s;
        out.f_over_r = m >= 1 ? 0.5 * std::pow(half, m - 1) * s : cplx(0.0);
        if (m == 0) {
            out.df = -q2 * 0.5 * r * bessel_series(1, w);
        } else {
            const cplx fm1 = std::pow(half, m - 1) * bessel_series(m - 1, w);
            out.df = fm1 - double(m) * out.f_over_r;
        }
        if (m == 0)
            out.f_over_r = r > 0 ? out.f / r : cplx(0.0);
        return out;
    }
    const cplx q = std::sqrt(q2);
    const cplx z = q * r;
    const cplx qm = std::pow(q, m);
    out.f = bessel_j(m, z) / qm;
    out.f_over_r = out.f / r;
    if (m == 0)
        out.df = -q * bessel_j(1, z);
    else
        out.df = bessel_j(m - 1, z) / std::pow(q, m - 1) - double(m) * out.f_over_r;
    return out;
}

std::optional<cplx> muller(const std::function<cplx(cplx)>& f, cplx x0, cplx x1, cplx x2, const MullerOptions& opt)
{
    cplx f0 = f(x0), f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (f2 == 0.0)
            return x2;
        const cplx h1 = x1 - x0;
        const cplx h2 = x2 - x1;
        if (h1 == 0.0 || h2 == 0.0 || h1 + h2 == 0.0)
            return std::nullopt;
        const cplx d1 = (f1 - f0) / h1;
        const cplx d2 = (f2 - f1) / h2;
        const cplx a = (d2 - d1) / (h2 + h1);
        const cplx b = a * h2 + d2;
        const cplx disc = std::sqrt(b * b - 4.0 * a * f2);
        const cplx den = std::abs(b + disc) > std::abs(b - disc) ? b + disc : b - disc;
        if (den == 0.0)
            return std::nullopt;
        const cplx dx = -2.0 * f2 / den;
        x0 = x1;
        x1 = x2;
        x2 = x2 + dx;
        f0 = f1;
        f1 = f2;
        f2 = f(x2);
        if (!std::isfinite(x2.real()) || !std::isfinite(x2.imag()))
            return std::nullopt;
        if (std::abs(dx) < opt.tol * std::max(1.0, std::abs(x2)))
            return x2;
    }
    return std::nullopt;
}

}  // namespace nanocav::special
