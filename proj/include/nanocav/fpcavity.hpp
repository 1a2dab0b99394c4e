#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nanocav/interfaces.hpp"
#include "nanocav/modesolver.hpp"

namespace nanocav {

struct CavityGeometry {
    double a = 100.0;
    double e = 5.0;
    double H = 65.0;
    double h1 = 57.0;  // dipole to bottom mirror
    double h2 = 8.0;   // dipole to top facet

    // Throws ValidationError unless h1 + h2 = H and the lengths are positive (e >= 0).
    void validate() const;
};

struct PropagationFactors {
    cplx u_b{1.0};
    cplx u_t{1.0};
};

PropagationFactors propagation_factors(cplx n_eff, double lambda_nm, double h1, double h2);
PropagationFactors propagation_factors(const GuidedMode& mode, double h1, double h2);

struct ModalAmplitudes {
    cplx plus{};
    cplx minus{};
};

ModalAmplitudes modal_amplitudes(cplx A_s, cplx r_t, cplx r_b, cplx u_t, cplx u_b);
double purcell_factor(const ModalAmplitudes& A, cplx r_t, cplx r_b, cplx u_t, cplx u_b);
// T_theta is the cumulative out-coupling at the collection angle.
double extraction_efficiency(double T_theta, cplx u_t, cplx A_plus, double F_P, double gamma = 0.0);

// Dipole position in the core cross-section and orientation in the local (r, phi, z) basis.
struct Dipole {
    double r0 = 0.0;
    double phi0 = 0.0;
    Eigen::Vector3d orientation = Eigen::Vector3d::UnitX();
    double gamma = 0.0;  // decay into non-guided channels, in bulk-rate units
};

struct CavityOptions {
    ModeFamily family = ModeFamily::TE11;
    InterfaceOptions interfaces;
    SolveOptions solve;
    std::vector<double> theta_deg{45.0, 90.0};
    // Loss attribution: Im(n_eff) := 0, L_p := 0, |r_b| := 1, T(pi/2) := 1 - |r_t|^2.
    bool lossless = false;
};

struct FPResult {
    CavityGeometry geometry;
    ModeFamily family = ModeFamily::TE11;
    double lambda_nm = 0.0;
    cplx n_eff{};
    double n_g = 0.0;
    cplx A_s{};
    cplx A_plus{};
    cplx A_minus{};
    cplx r_t{};
    cplx r_b{};
    double L_p = 0.0;
    cplx u_t{};
    cplx u_b{};
    double F_P = 0.0;
    double gamma = 0.0;
    double P_T = 0.0;
    Provenance provenance = Provenance::analytic;
    FarFieldPattern pattern;
    std::vector<double> theta_deg;
    std::vector<double> eta;

    double eta_at(double theta_rad) const;
};

double round_trip_phase(cplx n_eff, double lambda_nm, cplx r_t, cplx r_b, double H);

struct DesignOptions {
    int order = -1;  // negative selects the lowest order with H > h2_min
    double h2_min = 5.0;
};

CavityGeometry design_resonant_cavity(const GuidedMode& mode, const InterfaceCoefficients& coeffs,
                                      const DesignOptions& opt = {});
// Solves TE11 on the stack, then designs.
CavityGeometry design_resonant_cavity(const RadialStack& stack, double lambda_nm, const DesignOptions& opt = {},
                                      const InterfaceOptions& iopt = {});
// Longitudinal order used by a design (nearest integer of the round-trip phase over 2 pi).
int design_order(const GuidedMode& mode, const InterfaceCoefficients& coeffs, const CavityGeometry& g);

FPResult evaluate_cavity(const GuidedMode& mode, const InterfaceCoefficients& coeffs, const CavityGeometry& g,
                         const Dipole& dipole = {}, const CavityOptions& opt = {});
FPResult evaluate_cavity(const CavityGeometry& g, const RadialStack& stack_template, double lambda_nm,
                         const Dipole& dipole = {}, const CavityOptions& opt = {});

struct SpectrumPoint {
    double lambda_nm = 0.0;
    bool guided = false;
    std::string status;  // "ok", "below_cutoff" or an error message
    FPResult result;
};

std::vector<SpectrumPoint> spectrum(const CavityGeometry& g, const RadialStack& stack_template,
                                    const std::vector<double>& lambdas, const Dipole& dipole = {},
                                    const CavityOptions& opt = {});

struct SpectrumStats {
    double peak_lambda = 0.0;
    double peak_F_P = 0.0;
    double fwhm = 0.0;
    bool fwhm_bounded = false;  // both half-maximum crossings found inside the range
};

SpectrumStats spectrum_stats(const std::vector<SpectrumPoint>& points);
// Population standard deviation over mean of eta at theta_deg, restricted to [lo, hi].
double eta_relative_std(const std::vector<SpectrumPoint>& points, double theta_deg, double lo, double hi);

struct SweepPoint {
    double a = 0.0;
    bool ok = false;
    std::string status;
    int order = 0;
    FPResult result;
};

std::vector<SweepPoint> radius_sweep(double lambda_nm, const RadialStack& stack_template,
                                     const std::vector<double>& radii, const DesignOptions& dopt = {},
                                     const Dipole& dipole = {}, const CavityOptions& opt = {});

// V = int w|E|^2 dV / max(w|E|^2) over an axisymmetric profile times |1 + r_b exp(2 i k0 n z)|^2 on [0, H].
// density[i] is w|E|^2 at r[i]; the azimuthal integral contributes 2 pi.
double mode_volume(const std::vector<double>& r, const std::vector<double>& density, double H, cplx n_eff,
                   cplx r_b, double lambda_nm, int z_points = 4001);
// w is the electric energy weight of each region; result in nm^3.
double mode_volume(const CavityGeometry& g, const GuidedMode& mode, cplx r_b);

}  // namespace nanocav
