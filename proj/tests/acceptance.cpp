// Acceptance run: one PASS/FAIL line per criterion. Failures are reported, not turned into an exit code.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nanocav/entangle.hpp"
#include "nanocav/errors.hpp"
#include "nanocav/fpcavity.hpp"
#include "nanocav/interfaces.hpp"
#include "nanocav/modesolver.hpp"

using namespace nanocav;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLambda = 950.0;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

MaterialPtr silver()
{
    static const MaterialPtr ag = load_silver(default_silver_path());
    return ag;
}

RadialStack stack(double a = 100.0) { return make_stack(a, 5.0, silver()); }

const CoefficientTable& tm_table()
{
    static const CoefficientTable t = load_coefficient_file(std::string(NANOCAV_DATA_DIR) + "/tm01_coefficients.csv");
    return t;
}

struct DesignPoint {
    GuidedMode mode;
    InterfaceCoefficients coeffs;
    CavityGeometry geometry;
    FPResult result;
};

const DesignPoint& design_point()
{
    static const DesignPoint dp = [] {
        DesignPoint d;
        d.mode = solve_mode(stack(), kLambda, ModeFamily::TE11);
        d.coeffs = interface_coefficients(d.mode);
        d.geometry = design_resonant_cavity(d.mode, d.coeffs);
        d.result = evaluate_cavity(d.mode, d.coeffs, d.geometry);
        return d;
    }();
    return dp;
}

const std::vector<FidelityPoint>& fidelity_curve()
{
    static const std::vector<FidelityPoint> pts = [] {
        InterfaceOptions tm;
        tm.table = &tm_table();
        const BimodeSetup s = prepare_bimode(design_point().geometry, stack(), kLambda, {}, tm);
        std::vector<double> grid;
        for (double a0 = 0.0; a0 <= 95.0; a0 += 1.0)
            grid.push_back(a0);
        return fidelity_vs_offset(s, grid);
    }();
    return pts;
}

// Perfect-conductor TE11 index with the first-order penetration correction of the wall position.
double pec_te11_index(double a, double lambda, double n_core, double eps_metal)
{
    constexpr double x11 = 1.841183781340659;
    const double k0 = 2 * kPi / lambda;
    double aeff = a, n = 0.0;
    for (int it = 0; it < 6; ++it) {
        n = std::sqrt(n_core * n_core - std::pow(x11 / (k0 * aeff), 2));
        const double kappa = k0 * std::sqrt(n * n - eps_metal);
        aeff = a + (1.0 + std::pow(k0 * n * a, 2) / std::pow(x11, 4)) / (kappa * (1.0 - 1.0 / (x11 * x11)));
    }
    return n;
}

Outcome c1()
{
    const double a = cutoff_radius(kLambda, ModeFamily::TE11, stack());
    return {a >= 40 && a <= 60, fmt("cutoff radius %.2f nm, band [40, 60]", a)};
}

Outcome c2()
{
    const double eps = -1e6;
    const auto pec = std::make_shared<const MaterialModel>(MaterialModel::from_permittivity("PEC", cplx(eps)));
    double worst = 0.0;
    for (double a : {90.0, 140.0, 190.0, 240.0, 300.0}) {
        const cplx n = solve_effective_index(make_stack(a, 0.0, pec), kLambda, ModeFamily::TE11);
        const double ref = pec_te11_index(a, kLambda, kGaAsIndex, eps);
        worst = std::max(worst, std::abs(n.real() - ref) / ref);
    }
    return {worst < 1e-4, fmt("max relative deviation %.2e over 5 radii, tolerance 1e-4", worst)};
}

Outcome c3()
{
    const GuidedMode m = solve_mode(stack(2000.0), kLambda, ModeFamily::TE11, {false});
    const double R = std::norm(top_reflection(m));
    return {std::abs(R - 0.30) <= 0.02, fmt("R_t(2000 nm) = %.4f, target 0.30 +- 0.02", R)};
}

Outcome c4()
{
    double lo = 1.0, hi = 0.0;
    for (double a = 80.0; a <= 200.0; a += 20.0) {
        const GuidedMode m = solve_mode(stack(a), kLambda, ModeFamily::TE11, {false});
        const double R = std::norm(bottom_reflection(m, 5.0, kLambda));
        lo = std::min(lo, R);
        hi = std::max(hi, R);
    }
    return {lo >= 0.91 && hi <= 0.99 && hi - lo < 0.05,
            fmt("R_b in [%.4f, %.4f], spread %.4f; required within [0.91, 0.99], spread < 0.05", lo, hi, hi - lo)};
}

Outcome c5()
{
    const double l100 = plasmon_loss(100.0, kLambda, *silver()), l200 = plasmon_loss(200.0, kLambda, *silver());
    return {std::abs(l100 - 0.10) < 1e-12 && std::abs(l200 - 0.05) < 1e-12,
            fmt("L_p(100) = %.12f, L_p(200) = %.12f", l100, l200)};
}

Outcome c6()
{
    const auto& dp = design_point();
    const double H = dp.geometry.H, F = dp.result.F_P, eta = dp.result.eta_at(kPi / 4);
    return {H >= 49 && H <= 81 && F >= 7.5 && F <= 30 && eta >= 0.29 && eta <= 0.59,
            fmt("H = %.2f nm [49, 81], F_P = %.2f [7.5, 30], eta(45) = %.3f [0.29, 0.59]", H, F, eta)};
}

Outcome c7()
{
    std::vector<double> radii;
    for (double a = 52.0; a <= 200.0; a += 2.0)
        radii.push_back(a);
    const auto pts = radius_sweep(kLambda, stack(), radii);
    double best = -1.0, arg = 0.0;
    bool rising = true;
    double prev = -1.0, eta_max = 0.0;
    for (const auto& p : pts) {
        if (!p.ok)
            continue;
        if (p.result.F_P > best) {
            best = p.result.F_P;
            arg = p.a;
        }
        if (p.a >= 150.0) {
            const double e = p.result.eta_at(kPi / 2);
            rising = rising && e >= prev - 1e-12;
            prev = e;
            eta_max = std::max(eta_max, e);
        }
    }
    return {arg >= 45 && arg <= 75 && rising && eta_max <= 1.0,
            fmt("argmax F_P at a = %.0f nm (F_P = %.2f); eta(90) for a >= 150 up to %.3f", arg, best, eta_max) +
                (rising ? ", nondecreasing" : ", not monotone")};
}

Outcome c8()
{
    std::vector<double> lambdas;
    for (double l = 800.0; l <= 1100.0; l += 5.0)
        lambdas.push_back(l);
    const CavityGeometry g;  // fixed 65/57/8 nm geometry
    const auto pts = spectrum(g, stack(), lambdas);
    const SpectrumStats st = spectrum_stats(pts);
    const double sd = eta_relative_std(pts, 45.0, 850.0, 1100.0);
    return {st.fwhm >= 60 && sd < 0.25, fmt("FWHM %.1f nm (>= 60), eta(45) relative std %.3f (< 0.25)", st.fwhm, sd) +
                                            (st.fwhm_bounded ? "" : ", FWHM extends past the scan")};
}

Outcome c9()
{
    const auto& dp = design_point();
    const double V = mode_volume(dp.geometry, dp.mode, dp.coeffs.r_b) / std::pow(kLambda, 3);
    return {V >= 0.0007 && V <= 0.006, fmt("V = %.5f lambda^3, band [0.0007, 0.006]", V)};
}

Outcome c10()
{
    const auto& pts = fidelity_curve();
    bool mono = true;
    for (std::size_t i = 1; i < pts.size() && pts[i].rates.a0 <= 60.0; ++i)
        mono = mono && pts[i].fidelity <= pts[i - 1].fidelity + 1e-12;
    const auto x = first_crossing(pts, 0.85);
    const double f0 = pts.front().fidelity;
    return {std::abs(f0 - 1.0) < 1e-12 && mono && x && *x >= 30 && *x <= 90,
            fmt("F(0) = %.15f, first 0.85 crossing %.2f nm", f0, x ? *x : -1.0) +
                (mono ? ", nonincreasing on [0, 60]" : ", rises somewhere on [0, 60]")};
}

Outcome c11()
{
    InterfaceOptions tm;
    tm.table = &tm_table();
    const BimodeSetup s = prepare_bimode(design_point().geometry, stack(), kLambda, {}, tm);
    const BimodeRates r = offaxis_rates(s, {50.0, DipoleOrientation::radial});
    const CollectionProbabilities p = collection_probabilities(r, s.eta_te, s.eta_tm);
    const bool ok = p.P_TE >= 100.0 * p.P_TM;
    return {ok, fmt("P_TE = %.4g, P_TM = %.4g at a0 = 50 nm", p.P_TE, p.P_TM) +
                    (p.P_TM == 0.0 ? " (TM_C emission fully suppressed)" : fmt(", ratio %.3g", p.P_TE / p.P_TM))};
}

Outcome c12()
{
    double worst = 0.0;
    int builds = 0;
    for (ModeFamily f : {ModeFamily::TE11, ModeFamily::TM01})
        for (double a : {60.0, 80.0, 100.0, 150.0, 200.0, 250.0}) {
            GuidedMode m;
            try {
                m = solve_mode(stack(a), kLambda, f, {false});
            } catch (const BelowCutoffError&) {
                continue;
            }
            for (TopModel t : {TopModel::p, TopModel::s}) {
                InterfaceOptions o;
                o.top = t;
                const InterfaceCoefficients c = interface_coefficients(m, o);
                worst = std::max(worst, std::abs(std::norm(c.r_t) + c.pattern.cumulative.back() + c.L_p - 1.0));
                ++builds;
            }
        }
    return {worst <= 1e-6, fmt("max |R_t + T(90) + L_p - 1| = %.2e over %.0f builds", worst, builds)};
}

Outcome c13()
{
    double worst = 0.0;
    // u = exp(i k0 n h): n = 2, lambda = 800, h = 100 gives i.
    const PropagationFactors u = propagation_factors(cplx(2.0), 800.0, 100.0, 0.0);
    worst = std::max(worst, std::abs(u.u_b - cplx(0.0, 1.0)));
    worst = std::max(worst, std::abs(u.u_t - 1.0));
    // Mirrorless: A+ = A- = A_s and F_P = 2 |A_s|^2.
    const cplx As(0.8, -0.6);
    const ModalAmplitudes m0 = modal_amplitudes(As, 0.0, 0.0, 1.0, 1.0);
    worst = std::max({worst, std::abs(m0.plus - As), std::abs(m0.minus - As)});
    worst = std::max(worst, std::abs(purcell_factor(m0, 0.0, 0.0, 1.0, 1.0) - 2.0 * std::norm(As)));
    // r = 0.5 on both sides, unit propagation: A = 1.5 / 0.75 = 2.
    const ModalAmplitudes m1 = modal_amplitudes(1.0, 0.5, 0.5, 1.0, 1.0);
    worst = std::max({worst, std::abs(m1.plus - 2.0), std::abs(m1.minus - 2.0)});
    worst = std::max(worst, std::abs(purcell_factor(m1, 0.5, 0.5, 1.0, 1.0) - 2.0 * 0.75 * 4.0));
    return {worst <= 1e-12, fmt("max deviation from hand values %.2e", worst)};
}

Outcome c14()
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(0.0, 100.0);
    double worst = 0.0;
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        const double h = d(rng), v = d(rng);
        const Eigen::Matrix4cd rho = density_matrix(h, v);
        check_density_matrix(rho);
        const double closed = 0.5 + std::sqrt(h * v) / (h + v);
        worst = std::max({worst, std::abs(fidelity(rho) - closed), std::abs(fidelity_closed_form(h, v) - closed)});
        ++checked;
    }
    for (const auto& p : fidelity_curve()) {
        check_density_matrix(p.rho);
        ++checked;
    }
    return {worst <= 1e-12, fmt("max matrix/formula deviation %.2e; %.0f density matrices valid", worst, checked)};
}

Outcome c15()
{
    const auto& dp = design_point();
    CavityOptions o;
    o.lossless = true;
    const FPResult r = evaluate_cavity(dp.mode, dp.coeffs, dp.geometry, {}, o);
    const double eta = r.eta_at(kPi / 2);
    return {std::abs(eta - 1.0) <= 1e-3, fmt("lossless eta(90) = %.6f", eta)};
}

Outcome c16()
{
    const GuidedMode m = solve_mode(stack(), kLambda, ModeFamily::TM01, {false});
    double scale = 0.0, ephi = 0.0;
    for (const auto& p : m.profile) {
        scale = std::max({scale, std::abs(p.E[0]), std::abs(p.E[2])});
        ephi = std::max(ephi, std::abs(p.E[1]));
    }
    const double er0 = std::abs(m.field(0.0).E[0]);
    const double tol = 1e-15 * scale;
    return {ephi <= tol && er0 <= tol,
            fmt("max |E_phi| = %.2e, |E_r(0)| = %.2e, field scale %.3g", ephi, er0, scale)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c17()
{
    const fs::path base = fs::temp_directory_path() / "nanocav_acceptance";
    const std::vector<std::string> runs = {"design", "sweep-radius --set a_range=56:96:20",
                                           "spectrum --format both --set lambda_range=900:1000:50"};
    std::string snapshot[2];
    for (int k = 0; k < 2; ++k) {
        const fs::path d = base / ("run" + std::to_string(k));
        fs::remove_all(d);
        fs::create_directories(d);
        for (const auto& r : runs) {
            const std::string cmd = "\"" + std::string(NANOCAV_CLI_PATH) + "\" " + r + " --out \"" + d.string() +
                                    "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0)
                return {false, "command failed: " + r};
        }
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(d))
            files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            snapshot[k] += f.filename().string() + "\n" + slurp(f);
    }
    fs::remove_all(base);
    return {snapshot[0] == snapshot[1] && !snapshot[0].empty(),
            fmt("%.0f bytes compared across two runs", double(snapshot[0].size()))};
}

}  // namespace

int main()
{
    const std::vector<std::function<Outcome()>> criteria = {c1, c2,  c3,  c4,  c5,  c6,  c7,  c8, c9,
                                                            c10, c11, c12, c13, c14, c15, c16, c17};
    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        passed += o.pass;
        std::printf("criterion %2zu: %s  %s  [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("summary: %d/%zu criteria pass\n", passed, criteria.size());
    return 0;
}
