#pragma once

#include <cmath>
#include <memory>

#include "nanocav/entangle.hpp"
#include "nanocav/fpcavity.hpp"
#include "nanocav/interfaces.hpp"
#include "nanocav/modesolver.hpp"

namespace testing {

using nanocav::cplx;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLambda = 950.0;

inline nanocav::MaterialPtr silver()
{
    static const nanocav::MaterialPtr ag = nanocav::load_silver(nanocav::default_silver_path());
    return ag;
}

inline nanocav::MaterialPtr metal_from_eps(cplx eps)
{
    return std::make_shared<const nanocav::MaterialModel>(nanocav::MaterialModel::from_permittivity("metal", eps));
}

inline nanocav::RadialStack stack(double a = 100.0, double e = 5.0) { return nanocav::make_stack(a, e, silver()); }

struct DesignPoint {
    nanocav::GuidedMode mode;
    nanocav::InterfaceCoefficients coeffs;
    nanocav::CavityGeometry geometry;
};

inline const DesignPoint& design_point()
{
    static const DesignPoint dp = [] {
        DesignPoint d;
        d.mode = nanocav::solve_mode(stack(), kLambda, nanocav::ModeFamily::TE11);
        d.coeffs = nanocav::interface_coefficients(d.mode);
        d.geometry = nanocav::design_resonant_cavity(d.mode, d.coeffs);
        return d;
    }();
    return dp;
}

inline const nanocav::CoefficientTable& tm_table()
{
    static const nanocav::CoefficientTable t =
        nanocav::load_coefficient_file(std::string(NANOCAV_DATA_DIR) + "/tm01_coefficients.csv");
    return t;
}

}  // namespace testing
