#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nanocav/materials.hpp"

namespace nanocav {

enum class ModeFamily { TE11, TM01, TE21 };

int azimuthal_order(ModeFamily family);
std::string family_name(ModeFamily family);
ModeFamily parse_family(const std::string& label);

// Core of radius a, shell of thickness e, semi-infinite metal cladding.
struct RadialStack {
    double a = 100.0;
    double e = 5.0;
    MaterialPtr core;
    MaterialPtr shell;
    MaterialPtr cladding;

    RadialStack with_radius(double radius) const;
    void validate() const;
};

RadialStack make_stack(double a, double e, MaterialPtr cladding);

// Guided when Re(n) >= 0.01 and the mode propagates more than it decays (Re n > Im n).
bool is_guided(cplx n_eff);

cplx dispersion_residual(cplx n_eff, const RadialStack& stack, double lambda_nm, ModeFamily family);

struct ScanOptions {
    int points = 400;
    double lo = 0.01;
    double hi = 0.0;  // 0 means Re(n_core)
};

// All residual zeros reached from local minima of |residual| on the real axis, highest Re first.
std::vector<cplx> scan_roots(const RadialStack& stack, double lambda_nm, ModeFamily family,
                             const ScanOptions& opt = {});

// factor times the perfect-conductor cutoff radius of the family.
double reference_radius(double lambda_nm, ModeFamily family, const RadialStack& stack, double factor = 1.4);

// Effective index only: reference scan followed by continuation in radius.
cplx solve_effective_index(const RadialStack& stack, double lambda_nm, ModeFamily family);

// Muller refinement from a nearby guess, keeping the branch.
cplx refine_effective_index(const RadialStack& stack, double lambda_nm, ModeFamily family, cplx guess);

class ModeField;

struct FieldPoint {
    double r = 0.0;
    std::array<cplx, 3> E{};  // (E_r, E_phi, E_z)
    std::array<cplx, 3> H{};  // eta0 * (H_r, H_phi, H_z)
    cplx eps{};
};

struct SolveOptions {
    bool group_index = true;
    double group_dlambda = 1.0;
    int grid_points = 600;
    double skin_depths = 3.0;
};

// Fields carry exp(i m phi); normalized so (W_E + W_H)/2 = 1 over the cross-section, which reduces to
// the integral of eps_r |e|^2 for lossless nondispersive media.
struct GuidedMode {
    ModeFamily family = ModeFamily::TE11;
    double lambda_nm = 0.0;
    cplx n_eff{};
    double n_g = 0.0;         // finite-difference group index
    double n_g_energy = 0.0;  // energy over flux
    double flux = 0.0;        // Poynting flux of the normalized mode
    RadialStack stack;
    std::vector<FieldPoint> profile;
    std::shared_ptr<const ModeField> evaluator;

    int m() const { return azimuthal_order(family); }
    double k0() const;
    double grid_max() const { return profile.empty() ? 0.0 : profile.back().r; }
    FieldPoint field(double r) const;
};

GuidedMode build_mode(const RadialStack& stack, double lambda_nm, ModeFamily family, cplx n_eff,
                      const SolveOptions& opt = {});
GuidedMode solve_mode(const RadialStack& stack, double lambda_nm, ModeFamily family, const SolveOptions& opt = {});

double group_index(const RadialStack& stack, double lambda_nm, ModeFamily family, double dlambda = 1.0);
double group_index(const RadialStack& stack, double lambda_nm, ModeFamily family, cplx n_eff, double dlambda);

double cutoff_radius(double lambda_nm, ModeFamily family, const RadialStack& stack_template, double lo = 10.0,
                     double hi = 500.0);
double cutoff_wavelength(double a, ModeFamily family, const RadialStack& stack_template, double lo, double hi);

std::array<cplx, 3> mode_field(const GuidedMode& mode, double r, double phi);

// Orientation is a unit vector in the local (r, phi, z) basis at the emitter.
// For m > 0 the rate is summed over the degenerate +m/-m pair.
double coupling_coefficient(const GuidedMode& mode, double r0, double phi0, const Eigen::Vector3d& orientation);
double coupling_from_field(const Eigen::Vector3cd& field, const Eigen::Vector3d& orientation, double n_g,
                           double norm, double n_bulk, double k0);

}  // namespace nanocav
