#pragma once

#include <complex>
#include <functional>
#include <optional>

namespace nanocav::special {

using cplx = std::complex<double>;

// Integer-order Bessel function of the first kind, complex argument.
cplx bessel_j(int m, cplx z);

// Integer-order Bessel function of the first kind, real argument, any sign of m.
double bessel_j(int m, double x);

// exp(z) K_m(z) for Re z > 0.
cplx bessel_k_scaled(int m, cplx z);

// F(r) = J_m(q r) / q^m and friends, entire in q^2 so the branch of q never matters.
struct EntireJ {
    cplx f;         // J_m(qr)/q^m
    cplx f_over_r;  // f / r (finite at r = 0 for m >= 1)
    cplx df;        // d f / d r
};
EntireJ entire_j(int m, cplx q2, double r);

// Muller iteration for a complex root; nullopt when it does not converge.
struct MullerOptions {
    double tol = 1e-13;
    int max_iter = 100;
};
std::optional<cplx> muller(const std::function<cplx(cplx)>& f, cplx x0, cplx x1, cplx x2,
                           const MullerOptions& opt = {});

}  // namespace nanocav::special
