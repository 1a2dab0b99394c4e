#include "nanocav/modesolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nanocav/errors.hpp"
#include "nanocav/special.hpp"

namespace nanocav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

using Vec4 = Eigen::Matrix<cplx, 4, 1>;

bool is_tm_block(ModeFamily f) { return f == ModeFamily::TM01; }

double pec_root(ModeFamily f)
{
    switch (f) {
    case ModeFamily::TE11: return 1.8412;
    case ModeFamily::TM01: return 2.4048;
    case ModeFamily::TE21: return 3.0542;
    }
    return 1.8412;
}

struct Layers {
    double k0;
    cplx beta;
    int m;
    cplx eps1, eps2, eps3;
    cplx q1sq, q2sq, kappa;
    double a, b;
};

Layers make_layers(cplx n_eff, const RadialStack& s, double lambda, int m)
{
    Layers L;
    L.k0 = 2.0 * kPi / lambda;
    L.beta = L.k0 * n_eff;
    L.m = m;
    L.eps1 = permittivity(*s.core, lambda);
    L.eps2 = permittivity(*s.shell, lambda);
    L.eps3 = permittivity(*s.cladding, lambda);
    L.q1sq = L.k0 * L.k0 * L.eps1 - L.beta * L.beta;
    L.q2sq = L.k0 * L.k0 * L.eps2 - L.beta * L.beta;
    L.kappa = std::sqrt(L.beta * L.beta - L.k0 * L.k0 * L.eps3);
    if (L.kappa.real() < 0)
        L.kappa = -L.kappa;
    L.a = s.a;
    L.b = s.a + s.e;
    return L;
}

// Tangential vector (Ez, Hz, Ephi, Hphi) of the two core solutions at r.
std::array<Vec4, 2> core_columns(const Layers& L, double r)
{
    Vec4 ce, ch;
    const double m = L.m;
    if (L.m == 0) {
        const auto j0 = special::entire_j(0, L.q1sq, r);
        const auto j1 = special::entire_j(1, L.q1sq, r);
        ce << j0.f, 0.0, 0.0, -kI * L.k0 * L.eps1 * j1.f;
        ch << 0.0, j0.f, kI * L.k0 * j1.f, 0.0;
    } else {
        const auto j = special::entire_j(L.m, L.q1sq, r);
        ce << L.q1sq * j.f, 0.0, -L.beta * m * j.f_over_r, kI * L.k0 * L.eps1 * j.df;
        ch << 0.0, L.q1sq * j.f, -kI * L.k0 * j.df, -L.beta * m * j.f_over_r;
    }
    return {ce, ch};
}

// Metal solutions with exp(kappa b) K_m(kappa r) radial dependence.
std::array<Vec4, 2> metal_columns(const Layers& L, double r)
{
    const cplx z = L.kappa * r;
    const cplx decay = std::exp(-L.kappa * (r - L.b));
    const cplx km = special::bessel_k_scaled(L.m, z) * decay;
    const cplx kd = -0.5 * (special::bessel_k_scaled(L.m - 1, z) + special::bessel_k_scaled(L.m + 1, z)) * decay;
    const double m = L.m;
    const cplx k2 = L.kappa * L.kappa;
    Vec4 ce, ch;
    ce << km, 0.0, L.beta * m * km / (r * k2), -kI * L.k0 * L.eps3 * kd / L.kappa;
    ch << 0.0, km, kI * L.k0 * kd / L.kappa, L.beta * m * km / (r * k2);
    return {ce, ch};
}

Vec4 shell_rhs(const Layers& L, double r, const Vec4& p)
{
    const double m = L.m;
    const cplx ez = p(0), hz = p(1), ep = p(2), hp = p(3);
    const cplx er = (L.beta * hp - m * hz / r) / (L.k0 * L.eps2);
    const cplx hr = (m * ez / r - L.beta * ep) / L.k0;
    Vec4 d;
    d(0) = (L.q2sq * hp + L.beta * m * hz / r) / (kI * L.k0 * L.eps2);
    d(1) = kI * (L.q2sq * ep + L.beta * m * ez / r) / L.k0;
    d(2) = -ep / r + kI * L.k0 * hz + kI * m * er / r;
    d(3) = -hp / r - kI * L.k0 * L.eps2 * ez + kI * m * hr / r;
    return d;
}

Vec4 rk4_step(const Layers& L, double r, double h, const Vec4& p)
{
    const Vec4 k1 = shell_rhs(L, r, p);
    const Vec4 k2 = shell_rhs(L, r + 0.5 * h, p + 0.5 * h * k1);
    const Vec4 k3 = shell_rhs(L, r + 0.5 * h, p + 0.5 * h * k2);
    const Vec4 k4 = shell_rhs(L, r + h, p + h * k3);
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int shell_steps(double e) { return std::max(8, 2 * static_cast<int>(std::ceil(e / 0.2))); }

Vec4 propagate_shell(const Layers& L, Vec4 p)
{
    const double e = L.b - L.a;
    if (e <= 0)
        return p;
    const int n = shell_steps(e);
    const double h = e / n;
    for (int i = 0; i < n; ++i)
        p = rk4_step(L, L.a + i * h, h, p);
    return p;
}

Eigen::MatrixXcd matching_matrix(const Layers& L, bool tm)
{
    const auto core = core_columns(L, L.a);
    const auto metal = metal_columns(L, L.b);
    if (tm) {
        const Vec4 pe = propagate_shell(L, core[0]);
        Eigen::Matrix2cd M;
        M << pe(0), -metal[0](0), pe(3), -metal[0](3);
        return M;
    }
    Eigen::Matrix4cd M;
    M.col(0) = propagate_shell(L, core[0]);
    M.col(1) = propagate_shell(L, core[1]);
    M.col(2) = -metal[0];
    M.col(3) = -metal[1];
    return M;
}

}  // namespace

int azimuthal_order(ModeFamily family)
{
    switch (family) {
    case ModeFamily::TE11: return 1;
    case ModeFamily::TM01: return 0;
    case ModeFamily::TE21: return 2;
    }
    return 1;
}

std::string family_name(ModeFamily family)
{
    switch (family) {
    case ModeFamily::TE11: return "TE11";
    case ModeFamily::TM01: return "TM01";
    case ModeFamily::TE21: return "TE21";
    }
    return "?";
}

ModeFamily parse_family(const std::string& label)
{
    if (label == "TE11")
        return ModeFamily::TE11;
    if (label == "TM01")
        return ModeFamily::TM01;
    if (label == "TE21")
        return ModeFamily::TE21;
    throw ConfigError("unknown mode family '" + label + "' (expected TE11, TM01 or TE21)");
}

RadialStack RadialStack::with_radius(double radius) const
{
    RadialStack s = *this;
    s.a = radius;
    return s;
}

void RadialStack::validate() const
{
    if (!(a > 0))
        throw ValidationError("core radius must be positive");
    if (!(e >= 0))
        throw ValidationError("shell thickness must be nonnegative");
    if (!core || !shell || !cladding)
        throw ValidationError("radial stack is missing a material");
}

RadialStack make_stack(double a, double e, MaterialPtr cladding)
{
    RadialStack s;
    s.a = a;
    s.e = e;
    s.core = make_gaas();
    s.shell = make_silicon_nitride();
    s.cladding = std::move(cladding);
    return s;
}

bool is_guided(cplx n) { return n.real() >= 0.01 && n.real() > n.imag() && n.imag() > -1e-9; }

cplx dispersion_residual(cplx n_eff, const RadialStack& stack, double lambda, ModeFamily family)
{
    const Layers L = make_layers(n_eff, stack, lambda, azimuthal_order(family));
    const Eigen::MatrixXcd M = matching_matrix(L, is_tm_block(family));
    return M.determinant();
}

std::vector<cplx> scan_roots(const RadialStack& stack, double lambda, ModeFamily family, const ScanOptions& opt)
{
    stack.validate();
    const double hi = opt.hi > 0 ? opt.hi : refractive_index(*stack.core, lambda).real();
    const double lo = opt.lo;
    const int n = std::max(opt.points, 3);
    const double dx = (hi - lo) / (n - 1);
    auto f = [&](cplx x) { return dispersion_residual(x, stack, lambda, family); };
    std::vector<double> xs(n), v(n);
    std::vector<cplx> roots;
    // Lossy branches can sit too far from the real axis to leave a dip there; shifted lines catch them.
    for (double shift : {0.0, 0.15, 0.3}) {
        for (int i = 0; i < n; ++i) {
            xs[i] = lo + i * dx;
            v[i] = std::abs(f(cplx(xs[i], shift)));
        }
        for (int i = 1; i + 1 < n; ++i) {
            if (!(v[i] < v[i - 1] && v[i] < v[i + 1]))
                continue;
            const cplx g(xs[i], shift);
            const auto r = special::muller(f, g, g + 0.5 * dx, g + cplx(0.0, 0.5 * dx));
            if (!r || std::abs(*r - g) > 0.5 || r->real() <= 0)
                continue;
            const bool dup = std::any_of(roots.begin(), roots.end(), [&](cplx o) { return std::abs(o - *r) < 1e-6; });
            if (!dup)
                roots.push_back(*r);
        }
        if (!roots.empty())
            break;
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) { return x.real() > y.real(); });
    return roots;
}

double reference_radius(double lambda, ModeFamily family, const RadialStack& stack, double factor)
{
    const double nc = refractive_index(*stack.core, lambda).real();
    return factor * pec_root(family) * lambda / (2.0 * kPi * nc);
}

cplx refine_effective_index(const RadialStack& stack, double lambda, ModeFamily family, cplx guess)
{
    auto f = [&](cplx x) { return dispersion_residual(x, stack, lambda, family); };
    const double d = 1e-4 * std::max(1.0, std::abs(guess));
    const auto r = special::muller(f, guess, guess + d, guess + cplx(0.0, d));
    if (!r)
        throw NumericalError("root refinement did not converge near n_eff = " + std::to_string(guess.real()) +
                             std::to_string(guess.imag()) + "i");
    return *r;
}

cplx solve_effective_index(const RadialStack& stack, double lambda, ModeFamily family)
{
    stack.validate();
    // The family is identified as the highest guided root at a reference radius a fixed multiple of the
    // perfect-conductor cutoff; smaller multiples are tried when the branch has already left the scan window.
    double a_ref = 0.0;
    std::vector<cplx> roots;
    for (double factor : {1.4, 1.25, 1.1, 1.6}) {
        a_ref = reference_radius(lambda, family, stack, factor);
        roots = scan_roots(stack.with_radius(a_ref), lambda, family);
        roots.erase(std::remove_if(roots.begin(), roots.end(), [](cplx r) { return !is_guided(r); }), roots.end());
        if (!roots.empty())
            break;
    }
    if (roots.empty())
        throw NumericalError("no " + family_name(family) + " root found near the reference radius " +
                             std::to_string(a_ref) + " nm");
    if (roots.size() >= 2 && std::abs(roots[0] - roots[1]) < 1e-3) {
        std::ostringstream msg;
        msg << "ambiguous " << family_name(family) << " roots at reference radius: " << roots[0] << " and "
            << roots[1];
        throw AmbiguityError(msg.str());
    }

    const double target = stack.a;
    const double max_step = 0.01 * lambda;
    const double dir = target >= a_ref ? 1.0 : -1.0;
    double a_cur = a_ref, a_prev = a_ref;
    cplx n_cur = roots[0], n_prev = roots[0];
    bool have_prev = false;
    double step = std::min(max_step, std::abs(target - a_ref));
    while (std::abs(target - a_cur) > 1e-12) {
        const double a_next = std::abs(target - a_cur) <= step ? target : a_cur + dir * step;
        const cplx pred = have_prev ? n_cur + (n_cur - n_prev) * ((a_next - a_cur) / (a_cur - a_prev)) : n_cur;
        const RadialStack s = stack.with_radius(a_next);
        auto f = [&](cplx x) { return dispersion_residual(x, s, lambda, family); };
        const double d = 1e-4;
        const auto r = special::muller(f, pred, pred + d, pred + cplx(0.0, d));
        const double allowed = std::max(0.01, 0.25 * std::abs(pred - n_cur));
        if (r && std::abs(*r - pred) < allowed) {
            n_prev = n_cur;
            a_prev = a_cur;
            n_cur = *r;
            a_cur = a_next;
            have_prev = true;
            step = std::min(max_step, 1.5 * step);
            if (dir < 0 && !is_guided(n_cur))
                break;
        } else {
            step *= 0.5;
            if (step < 1e-3)
                throw NumericalError("lost " + family_name(family) + " branch while tracking to a = " +
                                     std::to_string(target) + " nm (stalled at " + std::to_string(a_cur) + " nm)");
        }
    }
    if (!is_guided(n_cur)) {
        std::ostringstream msg;
        msg << family_name(family) << " below cutoff at a = " << target << " nm, lambda = " << lambda
            << " nm (tracked n_eff = " << n_cur.real() << (n_cur.imag() < 0 ? "-" : "+") << std::abs(n_cur.imag())
            << "i at a = " << a_cur << " nm)";
        throw BelowCutoffError(msg.str());
    }
    return n_cur;
}

// Matched-coefficient field evaluator.
class ModeField {
public:
    ModeField(const RadialStack& stack, double lambda, ModeFamily family, cplx n_eff)
        : L_(make_layers(n_eff, stack, lambda, azimuthal_order(family))), tm_(is_tm_block(family))
    {
        const Eigen::MatrixXcd M = matching_matrix(L_, tm_);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
        const Eigen::VectorXcd x = svd.matrixV().col(M.cols() - 1);
        if (tm_) {
            coef_ = {x(0), 0.0, x(1), 0.0};
        } else {
            coef_ = {x(0), x(1), x(2), x(3)};
        }
        const auto core = core_columns(L_, L_.a);
        Vec4 p = coef_[0] * core[0] + coef_[1] * core[1];
        const double e = L_.b - L_.a;
        const int n = shell_steps(e);
        h_ = e > 0 ? e / n : 0.0;
        nodes_.push_back(p);
        for (int i = 0; i < n && e > 0; ++i) {
            p = rk4_step(L_, L_.a + i * h_, h_, p);
            nodes_.push_back(p);
        }
        metal_w_ = energy_weight(*stack.cladding, lambda);
    }

    const Layers& layers() const { return L_; }
    double metal_weight() const { return metal_w_; }
    const std::vector<Vec4>& shell_nodes() const { return nodes_; }
    double shell_step() const { return h_; }

    static constexpr int kAuto = -1;

    // Unnormalized field; region 0 core, 1 shell, 2 metal, or chosen from r.
    FieldPoint raw(double r, int region = kAuto) const
    {
        if (region == kAuto)
            region = r <= L_.a ? 0 : (r <= L_.b ? 1 : 2);
        FieldPoint out;
        out.r = r;
        const double m = L_.m;
        if (region == 0) {
            out.eps = L_.eps1;
            if (L_.m == 0) {
                const auto j0 = special::entire_j(0, L_.q1sq, r);
                const auto j1 = special::entire_j(1, L_.q1sq, r);
                const cplx ez = coef_[0] * j0.f, hz = coef_[1] * j0.f;
                const cplx ep = coef_[1] * kI * L_.k0 * j1.f;
                const cplx hp = -coef_[0] * kI * L_.k0 * L_.eps1 * j1.f;
                out.E = {L_.beta * hp / (L_.k0 * L_.eps1), ep, ez};
                out.H = {-L_.beta * ep / L_.k0, hp, hz};
            } else {
                const auto j = special::entire_j(L_.m, L_.q1sq, r);
                const cplx ez = coef_[0] * L_.q1sq * j.f, hz = coef_[1] * L_.q1sq * j.f;
                const cplx ez_r = coef_[0] * L_.q1sq * j.f_over_r, hz_r = coef_[1] * L_.q1sq * j.f_over_r;
                const cplx ep = -coef_[0] * L_.beta * m * j.f_over_r - coef_[1] * kI * L_.k0 * j.df;
                const cplx hp = coef_[0] * kI * L_.k0 * L_.eps1 * j.df - coef_[1] * L_.beta * m * j.f_over_r;
                out.E = {(L_.beta * hp - m * hz_r) / (L_.k0 * L_.eps1), ep, ez};
                out.H = {(m * ez_r - L_.beta * ep) / L_.k0, hp, hz};
            }
            return out;
        }
        Vec4 p;
        cplx eps;
        if (region == 1) {
            eps = L_.eps2;
            const int i = std::clamp(static_cast<int>((r - L_.a) / h_), 0, static_cast<int>(nodes_.size()) - 1);
            const double r0 = L_.a + i * h_;
            p = r > r0 ? rk4_step(L_, r0, r - r0, nodes_[i]) : nodes_[i];
        } else {
            eps = L_.eps3;
            const auto mc = metal_columns(L_, r);
            p = coef_[2] * mc[0] + coef_[3] * mc[1];
        }
        out.eps = eps;
        out.E = {(L_.beta * p(3) - m * p(1) / r) / (L_.k0 * eps), p(2), p(0)};
        out.H = {(m * p(0) / r - L_.beta * p(2)) / L_.k0, p(3), p(1)};
        return out;
    }

    FieldPoint operator()(double r) const
    {
        FieldPoint f = raw(r);
        for (auto& c : f.E)
            c *= scale_;
        for (auto& c : f.H)
            c *= scale_;
        return f;
    }

    void set_scale(cplx s) { scale_ = s; }

private:
    Layers L_;
    bool tm_;
    std::array<cplx, 4> coef_{};
    std::vector<Vec4> nodes_;
    double h_ = 0.0;
    double metal_w_ = 0.0;
    cplx scale_ = 1.0;
};

namespace {

struct Integrals {
    double we = 0, wh = 0, flux = 0;
};

void accumulate(Integrals& acc, const FieldPoint& f, double weight, double w_eps)
{
    double e2 = 0, h2 = 0;
    for (int i = 0; i < 3; ++i) {
        e2 += std::norm(f.E[i]);
        h2 += std::norm(f.H[i]);
    }
    const double s = std::real(f.E[0] * std::conj(f.H[1]) - f.E[1] * std::conj(f.H[0]));
    acc.we += weight * w_eps * e2 * f.r;
    acc.wh += weight * h2 * f.r;
    acc.flux += weight * s * f.r;
}

template <class F>
void simpson(Integrals& acc, double lo, double hi, int n, double w_eps, const F& field)
{
    if (hi <= lo)
        return;
    if (n % 2)
        ++n;
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        accumulate(acc, field(lo + i * h), c * h / 3.0, w_eps);
    }
}

Integrals cross_section_integrals(const ModeField& mf)
{
    const Layers& L = mf.layers();
    Integrals acc;
    auto in = [&](int region) { return [&mf, region](double r) { return mf.raw(r, region); }; };
    simpson(acc, 0.0, L.a, 800, L.eps1.real(), in(0));
    simpson(acc, L.a, L.b, 2 * shell_steps(L.b - L.a), L.eps2.real(), in(1));
    const double tail = 25.0 / L.kappa.real();
    simpson(acc, L.b, L.b + tail, 800, mf.metal_weight(), in(2));
    acc.we *= 2 * kPi;
    acc.wh *= 2 * kPi;
    acc.flux *= 2 * kPi;
    return acc;
}

}  // namespace

double GuidedMode::k0() const { return 2.0 * kPi / lambda_nm; }

FieldPoint GuidedMode::field(double r) const
{
    if (!evaluator)
        throw DomainError("mode has no field evaluator");
    return (*evaluator)(r);
}

GuidedMode build_mode(const RadialStack& stack, double lambda, ModeFamily family, cplx n_eff, const SolveOptions& opt)
{
    auto mf = std::make_shared<ModeField>(stack, lambda, family, n_eff);
    const Integrals in = cross_section_integrals(*mf);
    const double norm = 0.5 * (in.we + in.wh);
    if (!(norm > 0) || !std::isfinite(norm))
        throw NumericalError("mode normalization failed for " + family_name(family));
    // Fix the global phase: E_r real and positive at half the core radius.
    const cplx er = mf->raw(0.5 * stack.a).E[0];
    const cplx phase = std::abs(er) > 0 ? std::conj(er) / std::abs(er) : cplx(1.0);
    mf->set_scale(phase / std::sqrt(norm));

    GuidedMode mode;
    mode.family = family;
    mode.lambda_nm = lambda;
    mode.n_eff = n_eff;
    mode.stack = stack;
    mode.n_g_energy = norm / in.flux;
    mode.flux = in.flux / norm;
    mode.n_g = mode.n_g_energy;
    mode.evaluator = mf;

    const double skin = 1.0 / mf->layers().kappa.real();
    const double rmax = stack.a + stack.e + opt.skin_depths * skin;
    const int n = std::max(opt.grid_points, 2);
    mode.profile.reserve(n);
    for (int i = 0; i < n; ++i)
        mode.profile.push_back((*mf)(rmax * i / (n - 1)));
    return mode;
}

GuidedMode solve_mode(const RadialStack& stack, double lambda, ModeFamily family, const SolveOptions& opt)
{
    const cplx n = solve_effective_index(stack, lambda, family);
    GuidedMode mode = build_mode(stack, lambda, family, n, opt);
    if (opt.group_index)
        mode.n_g = group_index(stack, lambda, family, n, opt.group_dlambda);
    return mode;
}

double group_index(const RadialStack& stack, double lambda, ModeFamily family, cplx n_eff, double dl)
{
    if (!(dl > 0))
        throw DomainError("group-index step must be positive");
    const cplx np = refine_effective_index(stack, lambda + dl, family, n_eff);
    const cplx nm = refine_effective_index(stack, lambda - dl, family, n_eff);
    const double jump = std::max(std::abs(np - n_eff), std::abs(nm - n_eff));
    if (jump > 0.1 || !is_guided(np) || !is_guided(nm))
        throw BelowCutoffError("mode lost at lambda +/- " + std::to_string(dl) +
                               " nm near cutoff; use a smaller wavelength step");
    return n_eff.real() - lambda * (np.real() - nm.real()) / (2.0 * dl);
}

double group_index(const RadialStack& stack, double lambda, ModeFamily family, double dl)
{
    const cplx n = solve_effective_index(stack, lambda, family);
    return group_index(stack, lambda, family, n, dl);
}

double cutoff_radius(double lambda, ModeFamily family, const RadialStack& tmpl, double lo, double hi)
{
    auto guided = [&](double a) {
        try {
            solve_effective_index(tmpl.with_radius(a), lambda, family);
            return true;
        } catch (const BelowCutoffError&) {
            return false;
        }
    };
    if (guided(lo) || !guided(hi))
        throw NumericalError("no " + family_name(family) + " cutoff transition in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "] nm");
    while (hi - lo > 0.5) {
        const double mid = 0.5 * (lo + hi);
        (guided(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double cutoff_wavelength(double a, ModeFamily family, const RadialStack& tmpl, double lo, double hi)
{
    const RadialStack s = tmpl.with_radius(a);
    auto guided = [&](double lambda) {
        try {
            solve_effective_index(s, lambda, family);
            return true;
        } catch (const BelowCutoffError&) {
            return false;
        }
    };
    if (!guided(lo) || guided(hi))
        throw NumericalError("no " + family_name(family) + " cutoff wavelength in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "] nm");
    while (hi - lo > 0.5) {
        const double mid = 0.5 * (lo + hi);
        (guided(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::array<cplx, 3> mode_field(const GuidedMode& mode, double r, double phi)
{
    if (r < 0 || r > mode.grid_max())
        throw RangeError("r = " + std::to_string(r) + " nm outside mode grid [0, " + std::to_string(mode.grid_max()) +
                         "] nm");
    const FieldPoint f = mode.field(r);
    const cplx ph = std::exp(kI * double(mode.m()) * phi);
    return {f.E[0] * ph, f.E[1] * ph, f.E[2] * ph};
}

double coupling_from_field(const Eigen::Vector3cd& field, const Eigen::Vector3d& orientation, double n_g,
                           double norm, double n_bulk, double k0)
{
    const cplx proj = orientation.cast<cplx>().dot(field);
    return 3.0 * kPi * n_g * std::norm(proj) / (n_bulk * k0 * k0 * norm);
}

double coupling_coefficient(const GuidedMode& mode, double r0, double phi0, const Eigen::Vector3d& orientation)
{
    if (r0 < 0 || r0 > mode.stack.a)
        throw PlacementError("emitter at r = " + std::to_string(r0) + " nm is outside the core (a = " +
                             std::to_string(mode.stack.a) + " nm)");
    const auto e = mode_field(mode, r0, phi0);
    const double n_bulk = refractive_index(*mode.stack.core, mode.lambda_nm).real();
    const Eigen::Vector3cd plus(e[0], e[1], e[2]);
    double rate = coupling_from_field(plus, orientation, mode.n_g, 1.0, n_bulk, mode.k0());
    if (mode.m() > 0) {
        const Eigen::Vector3cd minus(e[0], -e[1], e[2]);
        rate += coupling_from_field(minus, orientation, mode.n_g, 1.0, n_bulk, mode.k0());
    }
    return rate;
}

}  // namespace nanocav
