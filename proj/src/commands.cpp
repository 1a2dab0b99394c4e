#include "nanocav/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>

#include <CLI11.hpp>
#include <json.hpp>

#include "nanocav/entangle.hpp"
#include "nanocav/errors.hpp"
#include "nanocav/fpcavity.hpp"

namespace nanocav {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

struct Column {
    std::string name;
    std::string unit;
};

struct Table {
    std::string file;  // stem, without extension
    std::vector<Column> columns;
    std::vector<std::vector<json>> rows;
};

std::string cell_text(const json& v)
{
    if (v.is_null())
        return "";
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    return format_number(v.get<double>());
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Writer {
public:
    Writer(const RunConfig& cfg, std::string command, std::ostream& out)
        : cfg_(cfg), command_(std::move(command)), out_(out)
    {
        std::filesystem::create_directories(cfg_.out_dir);
    }

    void write(const Table& t) const
    {
        if (cfg_.format == "csv" || cfg_.format == "both")
            write_csv(t);
        if (cfg_.format == "json" || cfg_.format == "both")
            write_json(t);
    }

    void write_json_doc(const std::string& stem, json body) const
    {
        json doc;
        doc["header"] = header({});
        doc["data"] = std::move(body);
        emit(stem + ".json", doc.dump(2) + "\n");
    }

private:
    json header(const std::vector<Column>& cols) const
    {
        json h;
        h["tool"] = "nanocav";
        h["version"] = kToolVersion;
        h["command"] = command_;
        h["config_hash"] = cfg_.hash();
        json units = json::object();
        for (const auto& c : cols)
            units[c.name] = c.unit;
        h["units"] = units;
        return h;
    }

    void write_csv(const Table& t) const
    {
        std::string s;
        s += "# nanocav " + std::string(kToolVersion) + "\n";
        s += "# command: " + command_ + "\n";
        s += "# config_hash: " + cfg_.hash() + "\n";
        s += "# units:";
        for (const auto& c : t.columns)
            s += " " + c.name + "[" + c.unit + "]";
        s += "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            s += (i ? "," : "") + t.columns[i].name;
        s += "\n";
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                s += (i ? "," : "") + cell_text(r[i]);
            s += "\n";
        }
        emit(t.file + ".csv", s);
    }

    void write_json(const Table& t) const
    {
        json doc;
        doc["header"] = header(t.columns);
        json rows = json::array();
        for (const auto& r : t.rows) {
            json o = json::object();
            for (std::size_t i = 0; i < r.size(); ++i)
                o[t.columns[i].name] = r[i];
            rows.push_back(std::move(o));
        }
        doc["rows"] = std::move(rows);
        emit(t.file + ".json", doc.dump(2) + "\n");
    }

    void emit(const std::string& name, const std::string& content) const
    {
        const std::filesystem::path p = std::filesystem::path(cfg_.out_dir) / name;
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write '" + p.string() + "'");
        f << content;
        out_ << "wrote " << p.string() << "\n";
    }

    const RunConfig& cfg_;
    std::string command_;
    std::ostream& out_;
};

RadialStack build_stack(const RunConfig& cfg)
{
    MaterialPtr clad;
    if (cfg.cladding_eps)
        clad = std::make_shared<const MaterialModel>(MaterialModel::from_permittivity("cladding", *cfg.cladding_eps));
    else
        clad = load_silver(cfg.silver_file);
    RadialStack s = make_stack(cfg.a_nm, cfg.e_nm, clad);
    s.core = make_gaas(cfg.core_index);
    s.shell = make_silicon_nitride(cfg.shell_index);
    s.validate();
    return s;
}

std::unique_ptr<CoefficientTable> load_table(const RunConfig& cfg)
{
    if (cfg.override_coefficients.empty())
        return nullptr;
    return std::make_unique<CoefficientTable>(load_coefficient_file(cfg.override_coefficients));
}

InterfaceOptions interface_options(const RunConfig& cfg, const CoefficientTable* table)
{
    InterfaceOptions o;
    o.top = cfg.top;
    o.theta_points = cfg.theta_points;
    o.table = table;
    return o;
}

CavityOptions cavity_options(const RunConfig& cfg, const CoefficientTable* table)
{
    CavityOptions o;
    o.interfaces = interface_options(cfg, table);
    o.theta_deg = cfg.theta_deg;
    o.lossless = cfg.lossless;
    return o;
}

DesignOptions design_options(const RunConfig& cfg)
{
    DesignOptions d;
    d.order = cfg.order;
    d.h2_min = cfg.h2_min_nm;
    return d;
}

// Geometry from H_nm/h1_nm/h2_nm, completing the third length; defaults to 65/57/8 nm.
CavityGeometry fixed_geometry(const RunConfig& cfg)
{
    CavityGeometry g;
    g.a = cfg.a_nm;
    g.e = cfg.e_nm;
    if (cfg.H_nm || cfg.h1_nm || cfg.h2_nm) {
        if (cfg.H_nm && cfg.h1_nm && cfg.h2_nm) {
            g.H = *cfg.H_nm;
            g.h1 = *cfg.h1_nm;
            g.h2 = *cfg.h2_nm;
        } else if (cfg.H_nm && cfg.h2_nm) {
            g.H = *cfg.H_nm;
            g.h2 = *cfg.h2_nm;
            g.h1 = g.H - g.h2;
        } else if (cfg.H_nm && cfg.h1_nm) {
            g.H = *cfg.H_nm;
            g.h1 = *cfg.h1_nm;
            g.h2 = g.H - g.h1;
        } else {
            g.h1 = *cfg.h1_nm;
            g.h2 = *cfg.h2_nm;
            g.H = g.h1 + g.h2;
        }
    }
    g.validate();
    return g;
}

std::string theta_label(double t) { return "eta_" + format_number(t); }

json cre(cplx z) { return num(z.real()); }
json cim(cplx z) { return num(z.imag()); }

void add_complex(std::vector<Column>& cols, const std::string& name)
{
    cols.push_back({"re_" + name, "1"});
    cols.push_back({"im_" + name, "1"});
}

}  // namespace

void cmd_modes(const RunConfig& cfg, std::ostream& out)
{
    const RadialStack base = build_stack(cfg);
    Writer w(cfg, "modes", out);
    Table t{"modes", {{"family", "-"}, {"a_nm", "nm"}, {"lambda_nm", "nm"}, {"status", "-"}, {"re_neff", "1"},
                      {"im_neff", "1"}, {"n_g", "1"}}, {}};
    for (ModeFamily f : cfg.families)
        for (double a : cfg.a_range.values()) {
            std::vector<json> row{family_name(f), num(a), num(cfg.lambda_nm)};
            try {
                const GuidedMode m = solve_mode(base.with_radius(a), cfg.lambda_nm, f);
                row.insert(row.end(), {"ok", num(m.n_eff.real()), num(m.n_eff.imag()), num(m.n_g)});
            } catch (const BelowCutoffError&) {
                row.insert(row.end(), {"below_cutoff", nullptr, nullptr, nullptr});
            } catch (const NumericalError& e) {
                row.insert(row.end(), {std::string("failed: ") + e.what(), nullptr, nullptr, nullptr});
            }
            t.rows.push_back(std::move(row));
        }
    w.write(t);
}

void cmd_sweep_radius(const RunConfig& cfg, std::ostream& out)
{
    const RadialStack base = build_stack(cfg);
    const auto table = load_table(cfg);
    const CavityOptions opt = cavity_options(cfg, table.get());
    const auto pts = radius_sweep(cfg.lambda_nm, base, cfg.a_range.values(), design_options(cfg), {}, opt);

    Writer w(cfg, "sweep-radius", out);
    Table t{"sweep_radius",
            {{"a_nm", "nm"}, {"status", "-"}, {"order", "1"}, {"H_nm", "nm"}, {"h1_nm", "nm"}, {"h2_nm", "nm"},
             {"re_neff", "1"}, {"im_neff", "1"}, {"R_t", "1"}, {"R_b", "1"}, {"L_p", "1"}, {"T_90", "1"},
             {"F_P", "bulk rate"}},
            {}};
    for (double th : cfg.theta_deg)
        t.columns.push_back({theta_label(th), "1"});
    for (const auto& p : pts) {
        std::vector<json> row{num(p.a), p.status};
        if (p.ok) {
            const FPResult& r = p.result;
            row.insert(row.end(), {p.order, num(r.geometry.H), num(r.geometry.h1), num(r.geometry.h2),
                                   num(r.n_eff.real()), num(r.n_eff.imag()), num(std::norm(r.r_t)),
                                   num(std::norm(r.r_b)), num(r.L_p), num(r.pattern.cumulative.back()), num(r.F_P)});
            for (double e : r.eta)
                row.push_back(num(e));
        } else {
            row.resize(t.columns.size(), nullptr);
        }
        t.rows.push_back(std::move(row));
    }
    w.write(t);
}

void cmd_spectrum(const RunConfig& cfg, std::ostream& out)
{
    const RadialStack base = build_stack(cfg);
    const auto table = load_table(cfg);
    const CavityGeometry g = fixed_geometry(cfg);
    const auto pts = spectrum(g, base, cfg.lambda_range.values(), {}, cavity_options(cfg, table.get()));

    Writer w(cfg, "spectrum", out);
    Table t{"spectrum", {{"lambda_nm", "nm"}, {"status", "-"}, {"re_neff", "1"}, {"im_neff", "1"}}, {}};
    for (const char* c : {"r_t", "r_b", "u_t", "u_b", "A_s", "A_plus", "A_minus"})
        add_complex(t.columns, c);
    t.columns.push_back({"L_p", "1"});
    t.columns.push_back({"F_P", "bulk rate"});
    for (double th : cfg.theta_deg)
        t.columns.push_back({theta_label(th), "1"});
    for (const auto& p : pts) {
        std::vector<json> row{num(p.lambda_nm), p.status};
        if (p.guided) {
            const FPResult& r = p.result;
            row.insert(row.end(), {cre(r.n_eff), cim(r.n_eff)});
            for (cplx z : {r.r_t, r.r_b, r.u_t, r.u_b, r.A_s, r.A_plus, r.A_minus})
                row.insert(row.end(), {cre(z), cim(z)});
            row.insert(row.end(), {num(r.L_p), num(r.F_P)});
            for (double e : r.eta)
                row.push_back(num(e));
        } else {
            row.resize(t.columns.size(), nullptr);
        }
        t.rows.push_back(std::move(row));
    }
    w.write(t);

    const SpectrumStats s = spectrum_stats(pts);
    Table summary{"spectrum_summary",
                  {{"H_nm", "nm"}, {"h1_nm", "nm"}, {"h2_nm", "nm"}, {"peak_lambda_nm", "nm"},
                   {"peak_F_P", "bulk rate"}, {"fwhm_nm", "nm"}, {"fwhm_bounded", "-"}, {"eta_45_rel_std", "1"}},
                  {}};
    json spread = nullptr;
    try {
        spread = num(eta_relative_std(pts, 45.0, std::max(850.0, cfg.lambda_range.lo), cfg.lambda_range.hi));
    } catch (const NumericalError&) {
    }
    summary.rows.push_back({num(g.H), num(g.h1), num(g.h2), num(s.peak_lambda), num(s.peak_F_P), num(s.fwhm),
                            s.fwhm_bounded, spread});
    w.write(summary);
    out << "peak F_P " << format_number(s.peak_F_P) << " at " << format_number(s.peak_lambda) << " nm, FWHM "
        << format_number(s.fwhm) << " nm" << (s.fwhm_bounded ? "" : " (lower bound)") << "\n";
}

void cmd_design(const RunConfig& cfg, std::ostream& out)
{
    const RadialStack stack = build_stack(cfg);
    const auto table = load_table(cfg);
    const GuidedMode mode = solve_mode(stack, cfg.lambda_nm, ModeFamily::TE11);
    const InterfaceCoefficients c = interface_coefficients(mode, interface_options(cfg, table.get()));
    const CavityGeometry g = design_resonant_cavity(mode, c, design_options(cfg));
    const int order = design_order(mode, c, g);
    const double residual = round_trip_phase(mode.n_eff, cfg.lambda_nm, c.r_t, c.r_b, g.H) - 2 * kPi * order;
    const FPResult r = evaluate_cavity(mode, c, g, {}, cavity_options(cfg, table.get()));

    Writer w(cfg, "design", out);
    Table t{"design",
            {{"a_nm", "nm"}, {"e_nm", "nm"}, {"lambda_nm", "nm"}, {"order", "1"}, {"H_nm", "nm"}, {"h1_nm", "nm"},
             {"h2_nm", "nm"}, {"phase_residual_rad", "rad"}, {"re_neff", "1"}, {"im_neff", "1"}, {"F_P", "bulk rate"}},
            {}};
    for (double th : cfg.theta_deg)
        t.columns.push_back({theta_label(th), "1"});
    std::vector<json> row{num(g.a),         num(g.e),         num(cfg.lambda_nm),      order,
                          num(g.H),         num(g.h1),        num(g.h2),               num(residual),
                          cre(mode.n_eff), cim(mode.n_eff), num(r.F_P)};
    for (double e : r.eta)
        row.push_back(num(e));
    t.rows.push_back(std::move(row));
    w.write(t);
    out << "H_nm = " << format_number(g.H) << "\nh1_nm = " << format_number(g.h1) << "\nh2_nm = "
        << format_number(g.h2) << "\norder = " << order << "\nphase_residual_rad = " << format_number(residual)
        << "\n";
}

void cmd_fidelity(const RunConfig& cfg, std::ostream& out)
{
    const RadialStack stack = build_stack(cfg);
    const auto table = load_table(cfg);
    const InterfaceOptions io = interface_options(cfg, table.get());
    CavityGeometry g;
    if (cfg.H_nm || cfg.h1_nm || cfg.h2_nm) {
        g = fixed_geometry(cfg);
    } else {
        const GuidedMode te = solve_mode(stack, cfg.lambda_nm, ModeFamily::TE11);
        g = design_resonant_cavity(te, interface_coefficients(te, io), design_options(cfg));
    }
    const BimodeSetup s = prepare_bimode(g, stack, cfg.lambda_nm, io, io);
    std::vector<double> grid;
    for (double a0 : cfg.a0_range.values())
        if (a0 < g.a)
            grid.push_back(a0);
    const auto pts = fidelity_vs_offset(s, grid, parse_orientation(cfg.orientation));

    Writer w(cfg, "fidelity", out);
    Table t{"fidelity",
            {{"a0_nm", "nm"}, {"F_TE_radial", "bulk rate"}, {"F_TE_ortho", "bulk rate"}, {"F_TM", "bulk rate"},
             {"gamma_H", "bulk rate"}, {"gamma_V", "bulk rate"}, {"beta_TE", "1"}, {"beta_TM", "1"},
             {"fidelity", "1"}, {"P_TE", "1"}, {"P_TM", "1"}},
            {}};
    json rhos = json::array();
    for (const auto& p : pts) {
        const BimodeRates& r = p.rates;
        t.rows.push_back({num(r.a0), num(r.F_TE_radial), num(r.F_TE_ortho), num(r.F_TM), num(r.gamma_H),
                          num(r.gamma_V), num(r.beta_TE), num(r.beta_TM), num(p.fidelity), num(p.P.P_TE),
                          num(p.P.P_TM)});
        json m = json::array();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                m.push_back({num(p.rho(i, j).real()), num(p.rho(i, j).imag())});
        rhos.push_back({{"a0_nm", num(r.a0)}, {"basis", {"HH", "HV", "VH", "VV"}}, {"rho_row_major", m}});
    }
    w.write(t);
    w.write_json_doc("fidelity_rho", rhos);

    Table ff{"far_field", {{"theta_deg", "deg"}, {"I_TE", "1/sr"}, {"I_TM", "1/sr"}, {"T_TE", "1"}, {"T_TM", "1"}},
             {}};
    const FarFieldPattern& a = s.te_coeffs.pattern;
    const FarFieldPattern& b = s.tm_coeffs.pattern;
    for (std::size_t j = 0; j < a.theta.size() && j < b.theta.size(); ++j)
        ff.rows.push_back({num(a.theta[j] * 180 / kPi), num(a.intensity[j]), num(b.intensity[j]),
                           num(a.cumulative[j]), num(b.cumulative[j])});
    w.write(ff);

    const auto cross = first_crossing(pts, 0.85);
    out << "geometry H_nm = " << format_number(g.H) << ", h2_nm = " << format_number(g.h2) << "\n";
    out << "first 0.85 crossing: " << (cross ? format_number(*cross) + " nm" : std::string("none in grid")) << "\n";
}

void cmd_pattern(const RunConfig& cfg, std::ostream& out)
{
    const RadialStack stack = build_stack(cfg);
    const auto table = load_table(cfg);
    Writer w(cfg, "pattern", out);
    for (ModeFamily f : cfg.families) {
        const GuidedMode m = solve_mode(stack, cfg.lambda_nm, f);
        const InterfaceCoefficients c = interface_coefficients(m, interface_options(cfg, table.get()));
        Table t{"pattern_" + family_name(f), {{"theta_deg", "deg"}, {"intensity", "1/sr"}, {"cumulative", "1"}}, {}};
        for (std::size_t j = 0; j < c.pattern.theta.size(); ++j)
            t.rows.push_back({num(c.pattern.theta[j] * 180 / kPi), num(c.pattern.intensity[j]),
                              num(c.pattern.cumulative[j])});
        w.write(t);
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fabry-Perot design toolkit for metal-coated nanocylinder cavities", "nanocav"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, override_path, theta, format;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "Key-value configuration file");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--override-coefficients", override_path, "Coefficient table CSV");
    app.add_option("--theta", theta, "Collection half-angles in degrees, comma separated");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_option("--set", sets, "Override a configuration key (KEY=VALUE)");

    using Handler = std::function<void(const RunConfig&, std::ostream&)>;
    const std::vector<std::pair<std::string, std::pair<std::string, Handler>>> commands = {
        {"modes", {"Effective index versus radius", cmd_modes}},
        {"sweep-radius", {"Resonant design and performance versus radius", cmd_sweep_radius}},
        {"spectrum", {"Purcell factor and efficiency versus wavelength at fixed geometry", cmd_spectrum}},
        {"design", {"Resonant height and dipole depth", cmd_design}},
        {"fidelity", {"Entanglement fidelity versus emitter offset", cmd_fidelity}},
        {"pattern", {"Far-field patterns", cmd_pattern}},
    };
    for (const auto& [name, c] : commands)
        app.add_subcommand(name, c.first);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            load_config_file(config_path, cfg);
        if (!out_dir.empty())
            cfg.set("out_dir", out_dir);
        if (!override_path.empty())
            cfg.set("override_coefficients", override_path);
        if (!theta.empty())
            cfg.set("theta_deg", theta);
        if (!format.empty())
            cfg.set("format", format);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        cfg.validate();
        for (const auto& [name, c] : commands)
            if (app.got_subcommand(name))
                c.second(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RangeError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PlacementError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BelowCutoffError& e) {
        err << "numerical failure: below cutoff: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace nanocav
