#include "nanocav/fpcavity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nanocav/errors.hpp"

namespace nanocav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double rad(double d) { return d * kPi / 180.0; }

double antinode_objective(cplx r_t, cplx n, double k0, double h2)
{
    const cplx u = std::exp(kI * k0 * n * h2);
    return std::abs(1.0 + r_t * u * u);
}

}  // namespace

void CavityGeometry::validate() const
{
    if (!(a > 0) || !(H > 0) || !(h1 > 0) || !(h2 > 0) || !(e >= 0))
        throw ValidationError("cavity lengths must be positive (e may be zero)");
    if (std::abs(h1 + h2 - H) > 1e-9 * std::max(1.0, H))
        throw ValidationError("h1 + h2 = " + std::to_string(h1 + h2) + " nm differs from H = " + std::to_string(H) +
                              " nm");
}

PropagationFactors propagation_factors(cplx n_eff, double lambda, double h1, double h2)
{
    if (h1 < 0 || h2 < 0)
        throw DomainError("propagation lengths must be nonnegative");
    const double k0 = 2.0 * kPi / lambda;
    return {std::exp(kI * k0 * n_eff * h1), std::exp(kI * k0 * n_eff * h2)};
}

PropagationFactors propagation_factors(const GuidedMode& mode, double h1, double h2)
{
    return propagation_factors(mode.n_eff, mode.lambda_nm, h1, h2);
}

ModalAmplitudes modal_amplitudes(cplx A_s, cplx r_t, cplx r_b, cplx u_t, cplx u_b)
{
    const cplx uu = u_b * u_t;
    const cplx den = 1.0 - r_t * r_b * uu * uu;
    if (std::abs(den) < 1e-12)
        throw SingularityError("Fabry-Perot denominator vanishes (lossless resonance)");
    return {A_s * (1.0 + r_b * u_b * u_b) / den, A_s * (1.0 + r_t * u_t * u_t) / den};
}

double purcell_factor(const ModalAmplitudes& A, cplx r_t, cplx r_b, cplx u_t, cplx u_b)
{
    const double at = std::norm(u_t), ab = std::norm(u_b);
    return (1.0 - at * at * std::norm(r_t)) * std::norm(A.plus) + (1.0 - ab * ab * std::norm(r_b)) * std::norm(A.minus);
}

double extraction_efficiency(double T_theta, cplx u_t, cplx A_plus, double F_P, double gamma)
{
    const double P_T = F_P + gamma;
    if (!(P_T > 0))
        throw NumericalError("total emission rate is zero");
    return T_theta * std::norm(u_t) * std::norm(A_plus) / P_T;
}

double FPResult::eta_at(double theta) const
{
    return extraction_efficiency(outcoupling(pattern, theta), u_t, A_plus, F_P, gamma);
}

double round_trip_phase(cplx n_eff, double lambda, cplx r_t, cplx r_b, double H)
{
    return std::arg(r_t) + std::arg(r_b) + 2.0 * (2.0 * kPi / lambda) * n_eff.real() * H;
}

CavityGeometry design_resonant_cavity(const GuidedMode& mode, const InterfaceCoefficients& c, const DesignOptions& opt)
{
    const double k0 = mode.k0();
    const double nr = mode.n_eff.real();
    if (!(nr > 0))
        throw BelowCutoffError("design needs a guided mode");
    const double base = -std::arg(c.r_t) - std::arg(c.r_b);
    auto height = [&](int q) { return (2.0 * kPi * q + base) / (2.0 * k0 * nr); };

    int order = opt.order;
    if (order < 0) {
        order = 0;
        while (height(order) <= opt.h2_min)
            ++order;
    } else if (height(order) <= 0) {
        throw InfeasibleError("longitudinal order " + std::to_string(order) + " gives no positive height");
    }
    CavityGeometry g;
    g.a = mode.stack.a;
    g.e = mode.stack.e;
    g.H = height(order);
    const double residual = round_trip_phase(mode.n_eff, mode.lambda_nm, c.r_t, c.r_b, g.H) - 2.0 * kPi * order;
    if (std::abs(residual) > 1e-6)
        throw NumericalError("round-trip phase residual " + std::to_string(residual));

    double lo = opt.h2_min, hi = g.H - opt.h2_min;
    if (hi <= lo)
        lo = hi = 0.5 * g.H;
    // Coarse scan keeping the first maximum, then golden-section refinement around it.
    const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / 0.01)));
    const double step = (hi - lo) / n;
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double v = antinode_objective(c.r_t, mode.n_eff, k0, lo + i * step);
        if (v > best_v * (1 + 1e-12)) {
            best_v = v;
            best = i;
        }
    }
    double x0 = std::max(lo, lo + (best - 1) * step), x1 = std::min(hi, lo + (best + 1) * step);
    if (hi > lo && best > 0 && best < n) {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60; ++it) {
            const double c1 = x1 - gr * (x1 - x0), c2 = x0 + gr * (x1 - x0);
            if (antinode_objective(c.r_t, mode.n_eff, k0, c1) >= antinode_objective(c.r_t, mode.n_eff, k0, c2))
                x1 = c2;
            else
                x0 = c1;
        }
        g.h2 = 0.5 * (x0 + x1);
    } else {
        g.h2 = lo + best * step;
    }
    g.h1 = g.H - g.h2;
    return g;
}

CavityGeometry design_resonant_cavity(const RadialStack& stack, double lambda, const DesignOptions& opt,
                                      const InterfaceOptions& iopt)
{
    const GuidedMode mode = solve_mode(stack, lambda, ModeFamily::TE11);
    return design_resonant_cavity(mode, interface_coefficients(mode, iopt), opt);
}

int design_order(const GuidedMode& mode, const InterfaceCoefficients& c, const CavityGeometry& g)
{
    return static_cast<int>(std::lround(round_trip_phase(mode.n_eff, mode.lambda_nm, c.r_t, c.r_b, g.H) / (2 * kPi)));
}

FPResult evaluate_cavity(const GuidedMode& mode, const InterfaceCoefficients& c, const CavityGeometry& g,
                         const Dipole& dipole, const CavityOptions& opt)
{
    g.validate();
    FPResult res;
    res.geometry = g;
    res.family = mode.family;
    res.lambda_nm = mode.lambda_nm;
    res.n_eff = mode.n_eff;
    res.n_g = mode.n_g;
    res.r_t = c.r_t;
    res.r_b = c.r_b;
    res.L_p = c.L_p;
    res.pattern = c.pattern;
    res.provenance = c.provenance;
    res.gamma = dipole.gamma;

    if (opt.lossless) {
        res.n_eff = mode.n_eff.real();
        res.L_p = 0.0;
        if (std::abs(res.r_b) > 0)
            res.r_b /= std::abs(res.r_b);
        else
            res.r_b = 1.0;
        const double target = 1.0 - std::norm(res.r_t);
        const double total = res.pattern.cumulative.empty() ? 0.0 : res.pattern.cumulative.back();
        const double s = total > 0 ? target / total : 0.0;
        for (auto& v : res.pattern.intensity)
            v *= s;
        for (auto& v : res.pattern.cumulative)
            v *= s;
        res.pattern.total = target;
    }

    res.A_s = std::sqrt(coupling_coefficient(mode, dipole.r0, dipole.phi0, dipole.orientation));
    const PropagationFactors u = propagation_factors(res.n_eff, mode.lambda_nm, g.h1, g.h2);
    res.u_t = u.u_t;
    res.u_b = u.u_b;
    const ModalAmplitudes A = modal_amplitudes(res.A_s, res.r_t, res.r_b, u.u_t, u.u_b);
    res.A_plus = A.plus;
    res.A_minus = A.minus;
    res.F_P = purcell_factor(A, res.r_t, res.r_b, u.u_t, u.u_b);
    res.P_T = res.F_P + res.gamma;
    for (double t : opt.theta_deg) {
        if (!(t >= 0 && t <= 90))
            throw DomainError("collection angle " + std::to_string(t) + " deg outside [0, 90]");
        res.theta_deg.push_back(t);
        res.eta.push_back(res.eta_at(rad(t)));
    }
    return res;
}

FPResult evaluate_cavity(const CavityGeometry& g, const RadialStack& tmpl, double lambda, const Dipole& dipole,
                         const CavityOptions& opt)
{
    g.validate();
    RadialStack stack = tmpl.with_radius(g.a);
    stack.e = g.e;
    const GuidedMode mode = solve_mode(stack, lambda, opt.family, opt.solve);
    return evaluate_cavity(mode, interface_coefficients(mode, opt.interfaces), g, dipole, opt);
}

std::vector<SpectrumPoint> spectrum(const CavityGeometry& g, const RadialStack& tmpl, const std::vector<double>& lambdas,
                                    const Dipole& dipole, const CavityOptions& opt)
{
    g.validate();
    std::vector<SpectrumPoint> out;
    for (double l : lambdas) {
        SpectrumPoint p;
        p.lambda_nm = l;
        try {
            p.result = evaluate_cavity(g, tmpl, l, dipole, opt);
            p.guided = true;
            p.status = "ok";
        } catch (const BelowCutoffError&) {
            p.status = "below_cutoff";
        } catch (const RangeError&) {
            throw;
        } catch (const NumericalError& e) {
            p.status = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

SpectrumStats spectrum_stats(const std::vector<SpectrumPoint>& pts)
{
    SpectrumStats s;
    int ip = -1;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i].guided && (ip < 0 || pts[i].result.F_P > s.peak_F_P)) {
            ip = static_cast<int>(i);
            s.peak_F_P = pts[i].result.F_P;
            s.peak_lambda = pts[i].lambda_nm;
        }
    if (ip < 0)
        return s;
    const double half = 0.5 * s.peak_F_P;
    auto val = [&](int i) { return pts[i].guided ? pts[i].result.F_P : 0.0; };
    auto cross = [&](int i, int j) {
        const double t = (half - val(i)) / (val(j) - val(i));
        return pts[i].lambda_nm + t * (pts[j].lambda_nm - pts[i].lambda_nm);
    };
    double left = pts.front().lambda_nm, right = pts.back().lambda_nm;
    bool lb = false, rb = false;
    for (int i = ip; i > 0; --i)
        if (val(i - 1) < half) {
            left = cross(i - 1, i);
            lb = true;
            break;
        }
    for (int i = ip; i + 1 < static_cast<int>(pts.size()); ++i)
        if (val(i + 1) < half) {
            right = cross(i, i + 1);
            rb = true;
            break;
        }
    s.fwhm = right - left;
    s.fwhm_bounded = lb && rb;
    return s;
}

double eta_relative_std(const std::vector<SpectrumPoint>& pts, double theta_deg, double lo, double hi)
{
    std::vector<double> v;
    for (const auto& p : pts)
        if (p.guided && p.lambda_nm >= lo - 1e-9 && p.lambda_nm <= hi + 1e-9)
            v.push_back(p.result.eta_at(rad(theta_deg)));
    if (v.size() < 2)
        throw NumericalError("too few guided points for a spread estimate");
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v)
        var += (x - mean) * (x - mean);
    var /= v.size();
    return std::sqrt(var) / mean;
}

std::vector<SweepPoint> radius_sweep(double lambda, const RadialStack& tmpl, const std::vector<double>& radii,
                                     const DesignOptions& dopt, const Dipole& dipole, const CavityOptions& opt)
{
    std::vector<SweepPoint> out;
    for (double a : radii) {
        SweepPoint p;
        p.a = a;
        try {
            const GuidedMode mode = solve_mode(tmpl.with_radius(a), lambda, opt.family, opt.solve);
            const InterfaceCoefficients c = interface_coefficients(mode, opt.interfaces);
            const CavityGeometry g = design_resonant_cavity(mode, c, dopt);
            p.order = design_order(mode, c, g);
            p.result = evaluate_cavity(mode, c, g, dipole, opt);
            p.ok = true;
            p.status = "ok";
        } catch (const BelowCutoffError&) {
            p.status = "below_cutoff";
        } catch (const NumericalError& e) {
            p.status = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

double mode_volume(const std::vector<double>& r, const std::vector<double>& density, double H, cplx n_eff, cplx r_b,
                   double lambda, int z_points)
{
    if (r.size() != density.size() || r.size() < 2)
        throw DomainError("mode-volume profile needs matching r and density samples");
    if (!(H > 0) || z_points < 3)
        throw DomainError("mode-volume height must be positive");
    double area = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        peak = std::max(peak, density[i]);
        if (i > 0)
            area += 0.5 * (r[i] - r[i - 1]) * (density[i] * r[i] + density[i - 1] * r[i - 1]);
    }
    area *= 2.0 * kPi;
    const double k0 = 2.0 * kPi / lambda;
    if (z_points % 2 == 0)
        ++z_points;
    const double hz = H / (z_points - 1);
    double lz = 0.0, zmax = 0.0;
    for (int j = 0; j < z_points; ++j) {
        const double z = j * hz;
        const double s = std::norm(1.0 + r_b * std::exp(2.0 * kI * k0 * n_eff * z));
        zmax = std::max(zmax, s);
        lz += s * ((j == 0 || j == z_points - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0));
    }
    lz *= hz / 3.0;
    if (!(peak > 0) || !(zmax > 0))
        throw NumericalError("mode volume of a vanishing field");
    return area * lz / (peak * zmax);
}

double mode_volume(const CavityGeometry& g, const GuidedMode& mode, cplx r_b)
{
    const RadialStack& s = mode.stack;
    const double lambda = mode.lambda_nm;
    const double a = s.a, b = s.a + s.e;
    std::vector<double> r, d;
    auto add = [&](double lo, double hi, int n, double w, bool first_offset) {
        for (int i = 0; i <= n; ++i) {
            double x = lo + (hi - lo) * i / n;
            if (i == 0 && first_offset)
                x = lo * (1 + 1e-12);
            const FieldPoint f = mode.field(x);
            r.push_back(x);
            d.push_back(w * (std::norm(f.E[0]) + std::norm(f.E[1]) + std::norm(f.E[2])));
        }
    };
    add(0.0, a, 800, energy_weight(*s.core, lambda), false);
    if (s.e > 0)
        add(a, b, 40, energy_weight(*s.shell, lambda), true);
    const double wm = energy_weight(*s.cladding, lambda);
    if (mode.grid_max() > b && wm > 0)
        add(b, mode.grid_max(), 400, wm, true);
    return mode_volume(r, d, g.H, mode.n_eff, r_b, lambda);
}

}  // namespace nanocav
