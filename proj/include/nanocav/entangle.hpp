#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nanocav/fpcavity.hpp"

namespace nanocav {

enum class DipoleOrientation { radial, orthoradial, unpolarized };

DipoleOrientation parse_orientation(const std::string& s);
std::string orientation_name(DipoleOrientation o);

struct EmitterPlacement {
    double a0 = 0.0;
    DipoleOrientation orientation = DipoleOrientation::radial;
};

// Both cavity modes evaluated in the single geometry designed for TE_C.
struct BimodeSetup {
    CavityGeometry geometry;
    GuidedMode te;
    GuidedMode tm;
    InterfaceCoefficients te_coeffs;
    InterfaceCoefficients tm_coeffs;
    double eta_te = 0.0;  // eta(90 deg) of TE_C
    double eta_tm = 0.0;  // eta(90 deg) of TM_C
};

BimodeSetup prepare_bimode(const CavityGeometry& g, const RadialStack& stack_template, double lambda_nm,
                           const InterfaceOptions& te_opt = {}, const InterfaceOptions& tm_opt = {});

struct BimodeRates {
    double a0 = 0.0;
    double F_TE_radial = 0.0;
    double F_TE_ortho = 0.0;
    double F_TM = 0.0;
    double gamma_H = 0.0;
    double gamma_V = 0.0;
    double beta_TE = 1.0;
    double beta_TM = 0.0;
};

// Cavity-enhanced rate of a dipole into one mode; zero coupling gives zero.
double cavity_rate(const GuidedMode& mode, const InterfaceCoefficients& c, const CavityGeometry& g, double a0,
                   const Eigen::Vector3d& orientation);
// eta(theta) of a mode in the geometry; independent of the coupling strength.
double cavity_efficiency(const GuidedMode& mode, const InterfaceCoefficients& c, const CavityGeometry& g,
                         double theta_rad);

BimodeRates offaxis_rates(const BimodeSetup& setup, const EmitterPlacement& placement);

// Basis {HH, HV, VH, VV}.
Eigen::Matrix4cd density_matrix(double gamma_H, double gamma_V);
Eigen::Vector4cd bell_phi_plus();
double fidelity(const Eigen::Matrix4cd& rho);
double fidelity_closed_form(double gamma_H, double gamma_V);
// Throws ValidationError unless rho is Hermitian, unit-trace and positive semidefinite.
void check_density_matrix(const Eigen::Matrix4cd& rho, double tol = 1e-10);

struct CollectionProbabilities {
    double P_TE = 0.0;
    double P_TM = 0.0;
};

CollectionProbabilities collection_probabilities(const BimodeRates& rates, double eta_te, double eta_tm);

struct FidelityPoint {
    BimodeRates rates;
    double fidelity = 0.0;
    CollectionProbabilities P;
    Eigen::Matrix4cd rho;
};

std::vector<FidelityPoint> fidelity_vs_offset(const BimodeSetup& setup, const std::vector<double>& a0_grid,
                                              DipoleOrientation orientation = DipoleOrientation::radial);

// First offset where the fidelity falls below threshold, linearly interpolated.
std::optional<double> first_crossing(const std::vector<FidelityPoint>& points, double threshold);

}  // namespace nanocav
