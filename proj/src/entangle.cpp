#include "nanocav/entangle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "nanocav/errors.hpp"

namespace nanocav {

namespace {

const Eigen::Vector3d kRadial = Eigen::Vector3d::UnitX();
const Eigen::Vector3d kOrtho = Eigen::Vector3d::UnitY();

}  // namespace

DipoleOrientation parse_orientation(const std::string& s)
{
    if (s == "radial")
        return DipoleOrientation::radial;
    if (s == "orthoradial")
        return DipoleOrientation::orthoradial;
    if (s == "unpolarized")
        return DipoleOrientation::unpolarized;
    throw ConfigError("unknown orientation '" + s + "' (expected radial, orthoradial or unpolarized)");
}

std::string orientation_name(DipoleOrientation o)
{
    switch (o) {
    case DipoleOrientation::radial:
        return "radial";
    case DipoleOrientation::orthoradial:
        return "orthoradial";
    case DipoleOrientation::unpolarized:
        return "unpolarized";
    }
    return "radial";
}

double cavity_rate(const GuidedMode& mode, const InterfaceCoefficients& c, const CavityGeometry& g, double a0,
                   const Eigen::Vector3d& orientation)
{
    g.validate();
    const cplx A_s = std::sqrt(coupling_coefficient(mode, a0, 0.0, orientation));
    const PropagationFactors u = propagation_factors(mode, g.h1, g.h2);
    return purcell_factor(modal_amplitudes(A_s, c.r_t, c.r_b, u.u_t, u.u_b), c.r_t, c.r_b, u.u_t, u.u_b);
}

double cavity_efficiency(const GuidedMode& mode, const InterfaceCoefficients& c, const CavityGeometry& g,
                         double theta)
{
    g.validate();
    const PropagationFactors u = propagation_factors(mode, g.h1, g.h2);
    const ModalAmplitudes A = modal_amplitudes(1.0, c.r_t, c.r_b, u.u_t, u.u_b);
    return extraction_efficiency(outcoupling(c.pattern, theta), u.u_t, A.plus,
                                 purcell_factor(A, c.r_t, c.r_b, u.u_t, u.u_b));
}

BimodeSetup prepare_bimode(const CavityGeometry& g, const RadialStack& tmpl, double lambda,
                           const InterfaceOptions& te_opt, const InterfaceOptions& tm_opt)
{
    g.validate();
    RadialStack stack = tmpl.with_radius(g.a);
    stack.e = g.e;
    BimodeSetup s;
    s.geometry = g;
    s.te = solve_mode(stack, lambda, ModeFamily::TE11);
    s.tm = solve_mode(stack, lambda, ModeFamily::TM01);
    s.te_coeffs = interface_coefficients(s.te, te_opt);
    s.tm_coeffs = interface_coefficients(s.tm, tm_opt);
    s.eta_te = cavity_efficiency(s.te, s.te_coeffs, g, 0.5 * std::numbers::pi);
    s.eta_tm = cavity_efficiency(s.tm, s.tm_coeffs, g, 0.5 * std::numbers::pi);
    return s;
}

BimodeRates offaxis_rates(const BimodeSetup& s, const EmitterPlacement& p)
{
    if (!(p.a0 >= 0) || !(p.a0 < s.geometry.a))
        throw PlacementError("offset a0 = " + std::to_string(p.a0) + " nm must lie in [0, " +
                             std::to_string(s.geometry.a) + ") nm");
    BimodeRates r;
    r.a0 = p.a0;
    r.F_TE_radial = cavity_rate(s.te, s.te_coeffs, s.geometry, p.a0, kRadial);
    r.F_TE_ortho = cavity_rate(s.te, s.te_coeffs, s.geometry, p.a0, kOrtho);
    // TM01 has no azimuthal field, so only the radial dipole feeds it.
    r.F_TM = cavity_rate(s.tm, s.tm_coeffs, s.geometry, p.a0, kRadial);
    r.gamma_H = r.F_TE_radial + r.F_TM;
    r.gamma_V = r.F_TE_ortho;

    double te = 0.0, tm = 0.0;
    switch (p.orientation) {
    case DipoleOrientation::radial:
        te = r.F_TE_radial;
        tm = r.F_TM;
        break;
    case DipoleOrientation::orthoradial:
        te = r.F_TE_ortho;
        break;
    case DipoleOrientation::unpolarized:
        te = 0.5 * (r.F_TE_radial + r.F_TE_ortho);
        tm = 0.5 * r.F_TM;
        break;
    }
    if (te + tm > 0) {
        r.beta_TE = te / (te + tm);
        r.beta_TM = tm / (te + tm);
    }
    return r;
}

Eigen::Matrix4cd density_matrix(double gH, double gV)
{
    if (gH < 0 || gV < 0)
        throw DomainError("rates must be nonnegative");
    if (!(gH + gV > 0))
        throw NumericalError("both recombination paths have zero rate");
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi(0) = std::sqrt(gH / (gH + gV));
    psi(3) = std::sqrt(gV / (gH + gV));
    return psi * psi.adjoint();
}

Eigen::Vector4cd bell_phi_plus()
{
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

double fidelity(const Eigen::Matrix4cd& rho)
{
    const Eigen::Vector4cd phi = bell_phi_plus();
    return (phi.adjoint() * rho * phi)(0, 0).real();
}

double fidelity_closed_form(double gH, double gV) { return 0.5 + std::sqrt(gH * gV) / (gH + gV); }

void check_density_matrix(const Eigen::Matrix4cd& rho, double tol)
{
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw ValidationError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > tol)
        throw ValidationError("density matrix trace differs from 1");
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    if (es.eigenvalues().minCoeff() < -tol)
        throw ValidationError("density matrix has a negative eigenvalue");
}

CollectionProbabilities collection_probabilities(const BimodeRates& r, double eta_te, double eta_tm)
{
    if (eta_te < 0 || eta_te > 1 + 1e-12 || eta_tm < 0 || eta_tm > 1 + 1e-12)
        throw DomainError("efficiencies must lie in [0, 1]");
    return {eta_te * r.beta_TE, eta_tm * r.beta_TM};
}

std::vector<FidelityPoint> fidelity_vs_offset(const BimodeSetup& s, const std::vector<double>& grid,
                                              DipoleOrientation o)
{
    std::vector<FidelityPoint> out;
    for (double a0 : grid) {
        FidelityPoint p;
        p.rates = offaxis_rates(s, {a0, o});
        p.rho = density_matrix(p.rates.gamma_H, p.rates.gamma_V);
        check_density_matrix(p.rho);
        p.fidelity = fidelity(p.rho);
        p.P = collection_probabilities(p.rates, s.eta_te, s.eta_tm);
        out.push_back(p);
    }
    return out;
}

std::optional<double> first_crossing(const std::vector<FidelityPoint>& pts, double threshold)
{
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].fidelity >= threshold)
            continue;
        if (i == 0)
            return pts[0].rates.a0;
        const double f0 = pts[i - 1].fidelity, f1 = pts[i].fidelity;
        const double t = (f0 - threshold) / (f0 - f1);
        return pts[i - 1].rates.a0 + t * (pts[i].rates.a0 - pts[i - 1].rates.a0);
    }
    return std::nullopt;
}

}  // namespace nanocav
