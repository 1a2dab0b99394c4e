#include "nanocav/interfaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nanocav/errors.hpp"
#include "nanocav/special.hpp"

namespace nanocav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

cplx kz(cplx eps, double n)
{
    cplx k = std::sqrt(eps - n * n);
    if (k.imag() < 0)
        k = -k;
    return k;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
        out.push_back(trim(f));
    return out;
}

double to_double(const std::string& s, std::size_t line)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ParseError("not a number: '" + s + "'", line);
    return v;
}

// Cumulative 2 pi int_0^theta I sin dtheta by the trapezoid rule.
std::vector<double> cumulate(const std::vector<double>& theta, const std::vector<double>& I)
{
    std::vector<double> c(theta.size(), 0.0);
    for (std::size_t j = 1; j < theta.size(); ++j) {
        const double dt = theta[j] - theta[j - 1];
        c[j] = c[j - 1] + 2 * kPi * 0.5 * dt * (I[j] * std::sin(theta[j]) + I[j - 1] * std::sin(theta[j - 1]));
    }
    return c;
}

}  // namespace

TopModel parse_top_model(const std::string& s)
{
    if (s == "p")
        return TopModel::p;
    if (s == "s")
        return TopModel::s;
    throw ConfigError("unknown top_reflection model '" + s + "' (expected p or s)");
}

std::string top_model_name(TopModel m) { return m == TopModel::p ? "p" : "s"; }

cplx thin_film_reflection(double n, double lambda, double e, cplx eps1, cplx eps2, cplx eps3, bool p_pol)
{
    const double k0 = 2 * kPi / lambda;
    const cplx k1 = kz(eps1, n), k2 = kz(eps2, n), k3 = kz(eps3, n);
    const cplx y1 = p_pol ? eps1 / k1 : k1;
    const cplx y2 = p_pol ? eps2 / k2 : k2;
    const cplx y3 = p_pol ? eps3 / k3 : k3;
    const cplx r12 = (y1 - y2) / (y1 + y2);
    const cplx r23 = (y2 - y3) / (y2 + y3);
    const cplx ph = std::exp(2.0 * kI * k0 * k2 * e);
    return (r12 + r23 * ph) / (1.0 + r12 * r23 * ph);
}

cplx bottom_reflection(const GuidedMode& mode, double e, double lambda, const MaterialModel* cladding)
{
    const RadialStack& s = mode.stack;
    const MaterialModel& clad = cladding ? *cladding : *s.cladding;
    const cplx eps_core = permittivity(*s.core, lambda);
    const bool p_pol = mode.family == ModeFamily::TM01;
    // Past the core light line the plane-wave picture has no propagating incidence; use the grazing limit.
    if (mode.n_eff.real() >= std::sqrt(eps_core).real())
        return p_pol ? 1.0 : -1.0;
    return thin_film_reflection(mode.n_eff.real(), lambda, e, eps_core, permittivity(*s.shell, lambda),
                                permittivity(clad, lambda), p_pol);
}

cplx top_reflection(cplx n_eff, cplx eps_core, TopModel model)
{
    if (model == TopModel::s)
        return (n_eff - 1.0) / (n_eff + 1.0);
    return (eps_core - n_eff) / (eps_core + n_eff);
}

cplx top_reflection(const GuidedMode& mode, TopModel model)
{
    return top_reflection(mode.n_eff, permittivity(*mode.stack.core, mode.lambda_nm), model);
}

double plasmon_loss(double a, double lambda, const MaterialModel& metal)
{
    if (!(a > 0))
        throw DomainError("plasmon loss needs a > 0");
    const double ref = permittivity(metal, 950.0).imag();
    const double scale = ref > 0 ? permittivity(metal, lambda).imag() / ref : 0.0;
    const double base = std::min(0.1, 0.1 * 100.0 / a);
    return std::clamp(base * scale, 0.0, 0.2);
}

FarFieldPattern far_field_pattern(const GuidedMode& mode, double total, int points)
{
    if (points < 2)
        throw DomainError("far-field pattern needs at least 2 angles");
    const double a = mode.stack.a;
    const double b = a + mode.stack.e;
    const int m = mode.m();
    const double k0 = mode.k0();

    // Simpson nodes over core and shell; the shell starts just outside the interface.
    std::vector<double> rs, ws;
    auto add = [&](double lo, double hi, int n) {
        const double h = (hi - lo) / n;
        for (int i = 0; i <= n; ++i) {
            const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            rs.push_back(lo + i * h);
            ws.push_back(c * h / 3.0);
        }
    };
    add(0.0, a, 400);
    if (b > a) {
        add(a, b, 20);
        rs[401] = a * (1 + 1e-12);
    }

    struct Harmonic {
        int order;
        std::vector<cplx> g;
    };
    std::vector<Harmonic> hs = {{m + 1, {}}, {m - 1, {}}, {m + 1, {}}, {m - 1, {}}};
    for (double r : rs) {
        const FieldPoint f = mode.field(r);
        const cplx er = f.E[0], ep = f.E[1];
        hs[0].g.push_back(0.5 * (er + kI * ep));
        hs[1].g.push_back(0.5 * (er - kI * ep));
        hs[2].g.push_back(er / (2.0 * kI) + 0.5 * ep);
        hs[3].g.push_back(-er / (2.0 * kI) + 0.5 * ep);
    }

    FarFieldPattern p;
    p.family = mode.family;
    p.total = total;
    for (int j = 0; j < points; ++j) {
        const double th = 0.5 * kPi * j / (points - 1);
        const double s = k0 * std::sin(th);
        const double ob = 0.5 * (1.0 + std::cos(th));
        double sum = 0.0;
        for (const auto& h : hs) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < rs.size(); ++i)
                acc += ws[i] * h.g[i] * special::bessel_j(h.order, s * rs[i]) * rs[i];
            sum += std::norm(acc);
        }
        p.theta.push_back(th);
        p.intensity.push_back(ob * ob * sum);
    }
    const std::vector<double> raw = cumulate(p.theta, p.intensity);
    const double scale = raw.back() > 0 ? total / raw.back() : 0.0;
    for (auto& v : p.intensity)
        v *= scale;
    p.cumulative = cumulate(p.theta, p.intensity);
    p.cumulative.back() = total;
    return p;
}

double outcoupling(const FarFieldPattern& p, double theta)
{
    if (!(theta >= 0 && theta <= 0.5 * kPi + 1e-12))
        throw DomainError("collection half-angle must lie in [0, pi/2]");
    if (p.theta.empty())
        return 0.0;
    if (theta >= p.theta.back())
        return p.cumulative.back();
    const auto it = std::upper_bound(p.theta.begin(), p.theta.end(), theta);
    const std::size_t j = static_cast<std::size_t>(it - p.theta.begin());
    const double t = (theta - p.theta[j - 1]) / (p.theta[j] - p.theta[j - 1]);
    return p.cumulative[j - 1] + t * (p.cumulative[j] - p.cumulative[j - 1]);
}

double pattern_overlap(const FarFieldPattern& a, const FarFieldPattern& b)
{
    if (a.theta.size() != b.theta.size())
        throw DomainError("patterns sampled on different grids");
    std::vector<double> ab(a.theta.size()), aa(a.theta.size()), bb(a.theta.size());
    for (std::size_t j = 0; j < a.theta.size(); ++j) {
        ab[j] = a.intensity[j] * b.intensity[j];
        aa[j] = a.intensity[j] * a.intensity[j];
        bb[j] = b.intensity[j] * b.intensity[j];
    }
    const double sab = cumulate(a.theta, ab).back();
    const double saa = cumulate(a.theta, aa).back();
    const double sbb = cumulate(a.theta, bb).back();
    return saa > 0 && sbb > 0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

CoefficientTable::CoefficientTable(std::vector<double> theta_deg, std::vector<Row> rows, double tol)
    : theta_deg_(std::move(theta_deg)), rows_(std::move(rows)), tol_(tol)
{
    for (std::size_t i = 0; i < theta_deg_.size(); ++i)
        if (!(theta_deg_[i] > 0 && theta_deg_[i] <= 90) || (i > 0 && !(theta_deg_[i] > theta_deg_[i - 1])))
            throw ValidationError("coefficient table angles must increase within (0, 90] deg");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Row& r = rows_[i];
        if (std::abs(r.r_t) > 1.0 + 1e-12 || std::abs(r.r_b) > 1.0 + 1e-12)
            throw ValidationError("coefficient row " + std::to_string(i + 1) + " (" + family_name(r.family) +
                                  ", a = " + std::to_string(r.a_nm) + "): |r| exceeds 1");
        if (!r.T.empty()) {
            if (r.T.size() != theta_deg_.size())
                throw ValidationError("coefficient row " + std::to_string(i + 1) + ": wrong number of T columns");
            double prev = 0.0;
            for (double t : r.T) {
                if (t < prev - 1e-12 || t > 1.0 - std::norm(r.r_t) + 1e-9)
                    throw ValidationError("coefficient row " + std::to_string(i + 1) +
                                          ": T must be nondecreasing and at most 1 - |r_t|^2");
                prev = t;
            }
        }
        for (std::size_t j = 0; j < i; ++j)
            if (rows_[j].family == r.family && rows_[j].a_nm == r.a_nm && rows_[j].lambda_nm == r.lambda_nm)
                throw ValidationError("duplicate coefficient key (" + family_name(r.family) + ", " +
                                      std::to_string(r.a_nm) + ", " + std::to_string(r.lambda_nm) + ")");
    }
}

const CoefficientTable::Row* CoefficientTable::lookup(ModeFamily family, double a, double lambda) const
{
    const Row* best = nullptr;
    double best_d = 0.0;
    for (const Row& r : rows_) {
        if (r.family != family)
            continue;
        const double da = std::abs(r.a_nm - a), dl = std::abs(r.lambda_nm - lambda);
        if (da > tol_ || dl > tol_)
            continue;
        const double d = std::hypot(da, dl);
        if (!best || d < best_d) {
            best = &r;
            best_d = d;
        }
    }
    return best;
}

CoefficientTable load_coefficient_table(std::istream& in, const std::string& source, double tol)
{
    std::vector<double> theta;
    std::vector<CoefficientTable::Row> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto f = split_csv(t);
        if (!header_done && !f.empty() && f[0] == "family") {
            if (f.size() < 7)
                throw ParseError(source + ": header needs 7 base columns", lineno);
            for (std::size_t i = 7; i < f.size(); ++i) {
                if (f[i].rfind("T_", 0) != 0)
                    throw ParseError(source + ": extra column '" + f[i] + "' is not T_<deg>", lineno);
                theta.push_back(to_double(f[i].substr(2), lineno));
            }
            header_done = true;
            continue;
        }
        header_done = true;
        if (f.size() != 7 + theta.size() && !(f.size() == 7))
            throw ParseError(source + ": expected " + std::to_string(7 + theta.size()) + " fields", lineno);
        CoefficientTable::Row r;
        try {
            r.family = parse_family(f[0]);
        } catch (const ConfigError& e) {
            throw ParseError(source + ": " + e.what(), lineno);
        }
        r.a_nm = to_double(f[1], lineno);
        r.lambda_nm = to_double(f[2], lineno);
        r.r_t = {to_double(f[3], lineno), to_double(f[4], lineno)};
        r.r_b = {to_double(f[5], lineno), to_double(f[6], lineno)};
        for (std::size_t i = 7; i < f.size(); ++i)
            r.T.push_back(to_double(f[i], lineno));
        rows.push_back(std::move(r));
    }
    return CoefficientTable(std::move(theta), std::move(rows), tol);
}

CoefficientTable load_coefficient_file(const std::string& path, double tol)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open coefficient table '" + path + "'");
    return load_coefficient_table(in, path, tol);
}

InterfaceCoefficients interface_coefficients(const GuidedMode& mode, const InterfaceOptions& opt)
{
    InterfaceCoefficients c;
    const double lambda = mode.lambda_nm;
    const CoefficientTable::Row* row = opt.table ? opt.table->lookup(mode.family, mode.stack.a, lambda) : nullptr;
    if (row) {
        c.r_t = row->r_t;
        c.r_b = row->r_b;
        c.provenance = Provenance::table;
    } else {
        c.r_t = top_reflection(mode, opt.top);
        c.r_b = bottom_reflection(mode, mode.stack.e, lambda);
    }
    const double rt2 = c.R_t();
    if (row && !row->T.empty()) {
        // Tabulated cumulative out-coupling, linearly interpolated onto the uniform grid.
        std::vector<double> th{0.0}, tv{0.0};
        for (std::size_t i = 0; i < row->T.size(); ++i) {
            th.push_back(opt.table->theta_deg()[i] * kPi / 180.0);
            tv.push_back(row->T[i]);
        }
        FarFieldPattern p;
        p.family = mode.family;
        for (int j = 0; j < opt.theta_points; ++j) {
            const double t = 0.5 * kPi * j / (opt.theta_points - 1);
            p.theta.push_back(t);
            const auto it = std::upper_bound(th.begin(), th.end(), t);
            if (it == th.end()) {
                p.cumulative.push_back(tv.back());
            } else {
                const std::size_t k = static_cast<std::size_t>(it - th.begin());
                const double w = (t - th[k - 1]) / (th[k] - th[k - 1]);
                p.cumulative.push_back(tv[k - 1] + w * (tv[k] - tv[k - 1]));
            }
        }
        p.intensity.assign(p.theta.size(), 0.0);
        for (std::size_t j = 1; j + 1 < p.theta.size(); ++j)
            p.intensity[j] = (p.cumulative[j + 1] - p.cumulative[j - 1]) /
                             (2 * kPi * std::sin(p.theta[j]) * (p.theta[j + 1] - p.theta[j - 1]));
        p.total = p.cumulative.back();
        c.L_p = 1.0 - rt2 - p.total;
        c.pattern = std::move(p);
    } else {
        // Plasmon loss saturates when the facet reflects nearly everything.
        const double lp = plasmon_loss(mode.stack.a, lambda, *mode.stack.cladding);
        const double total = std::max(0.0, 1.0 - rt2 - lp);
        c.L_p = 1.0 - rt2 - total;
        c.pattern = far_field_pattern(mode, total, opt.theta_points);
    }
    const double book = c.R_t() + c.T_total() + c.L_p;
    if (std::abs(book - 1.0) > 1e-6 || std::abs(c.r_t) > 1.0 + 1e-12 || std::abs(c.r_b) > 1.0 + 1e-12)
        throw NumericalError("interface energy bookkeeping violated for " + family_name(mode.family));
    return c;
}

}  // namespace nanocav
