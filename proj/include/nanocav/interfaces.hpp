#pragma once

#include <istream>
#include <string>
#include <vector>

#include "nanocav/modesolver.hpp"

namespace nanocav {

// Top-facet effective-index model. p: (eps_core - n_eff)/(eps_core + n_eff), the transverse-field
// reflection for a TM-like modal admittance eps_core/n_eff. s: (n_eff - 1)/(n_eff + 1).
enum class TopModel { p, s };

TopModel parse_top_model(const std::string& s);
std::string top_model_name(TopModel m);

enum class Provenance { analytic, table };

struct FarFieldPattern {
    ModeFamily family = ModeFamily::TE11;
    std::vector<double> theta;      // rad, uniform on [0, pi/2]
    std::vector<double> intensity;  // per unit solid angle; 2 pi int I sin(theta) dtheta = total
    std::vector<double> cumulative; // T(theta) over the cone of half-angle theta
    double total = 0.0;
};

struct InterfaceCoefficients {
    cplx r_t{};
    cplx r_b{};
    double L_p = 0.0;
    FarFieldPattern pattern;  // cumulative holds T_cum
    Provenance provenance = Provenance::analytic;

    double R_t() const { return std::norm(r_t); }
    double R_b() const { return std::norm(r_b); }
    double T_total() const { return pattern.cumulative.empty() ? 0.0 : pattern.cumulative.back(); }
};

// Plane wave of transverse index n in the core medium on core/shell(e)/cladding; s or p admittances.
cplx thin_film_reflection(double n, double lambda_nm, double e, cplx eps_core, cplx eps_shell, cplx eps_clad,
                          bool p_polarized);

// Uses Re(n_eff); TE families use s, TM uses p. cladding overrides the mode stack's metal when given.
cplx bottom_reflection(const GuidedMode& mode, double e, double lambda_nm, const MaterialModel* cladding = nullptr);

cplx top_reflection(cplx n_eff, cplx eps_core, TopModel model);
cplx top_reflection(const GuidedMode& mode, TopModel model = TopModel::p);

// min(0.1, 0.1 * 100/a) scaled by Im eps_Ag(lambda)/Im eps_Ag(950), clamped to [0, 0.2].
double plasmon_loss(double a, double lambda_nm, const MaterialModel& metal);

// Scalar Fraunhofer pattern of the core+shell aperture field, obliquity (1 + cos)/2, spherical-cap cumulative.
FarFieldPattern far_field_pattern(const GuidedMode& mode, double total, int points = 181);
double outcoupling(const FarFieldPattern& pattern, double theta);
double pattern_overlap(const FarFieldPattern& a, const FarFieldPattern& b);

class CoefficientTable {
public:
    struct Row {
        ModeFamily family;
        double a_nm;
        double lambda_nm;
        cplx r_t;
        cplx r_b;
        std::vector<double> T;  // on theta_deg(), may be empty
    };

    CoefficientTable(std::vector<double> theta_deg, std::vector<Row> rows, double tolerance_nm = 1.0);

    const Row* lookup(ModeFamily family, double a_nm, double lambda_nm) const;
    const std::vector<double>& theta_deg() const { return theta_deg_; }
    const std::vector<Row>& rows() const { return rows_; }
    double tolerance() const { return tol_; }

private:
    std::vector<double> theta_deg_;
    std::vector<Row> rows_;
    double tol_;
};

// Columns family,a_nm,lambda_nm,re_rt,im_rt,re_rb,im_rb[,T_<deg>...]; '#' comments.
CoefficientTable load_coefficient_table(std::istream& in, const std::string& source_name = "stream",
                                        double tolerance_nm = 1.0);
CoefficientTable load_coefficient_file(const std::string& path, double tolerance_nm = 1.0);

struct InterfaceOptions {
    TopModel top = TopModel::p;
    int theta_points = 181;
    const CoefficientTable* table = nullptr;
};

InterfaceCoefficients interface_coefficients(const GuidedMode& mode, const InterfaceOptions& opt = {});

}  // namespace nanocav
