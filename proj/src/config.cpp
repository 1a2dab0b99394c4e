#include "nanocav/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nanocav/errors.hpp"

namespace nanocav {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

double number(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(x))
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

int integer(const std::string& key, const std::string& v)
{
    const double x = number(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(x);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, sep))
        out.push_back(trim(f));
    return out;
}

bool boolean(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string range_text(const Range& r)
{
    return format_number(r.lo) + ":" + format_number(r.hi) + ":" + format_number(r.step);
}

}  // namespace

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<double> Range::values() const
{
    std::vector<double> out;
    if (!(step > 0) || hi < lo)
        return out;
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i)
        out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

Range parse_range(const std::string& text)
{
    const auto f = split(text, ':');
    if (f.size() != 3)
        throw ConfigError("range '" + text + "' must be lo:hi:step");
    return {number("range", f[0]), number("range", f[1]), number("range", f[2])};
}

RunConfig::RunConfig() : silver_file(default_silver_path()) {}

void RunConfig::set(const std::string& raw_key, const std::string& value)
{
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    if (key == "wavelength_nm")
        lambda_nm = number(key, v);
    else if (key == "a_nm")
        a_nm = number(key, v);
    else if (key == "e_nm")
        e_nm = number(key, v);
    else if (key == "H_nm")
        H_nm = number(key, v);
    else if (key == "h1_nm")
        h1_nm = number(key, v);
    else if (key == "h2_nm")
        h2_nm = number(key, v);
    else if (key == "families") {
        families.clear();
        for (const auto& f : split(v, ','))
            families.push_back(parse_family(f));
        if (families.empty())
            throw ConfigError("families: at least one family required");
    } else if (key == "silver_file")
        silver_file = v;
    else if (key == "core_index")
        core_index = number(key, v);
    else if (key == "shell_index")
        shell_index = number(key, v);
    else if (key == "cladding_eps") {
        const auto f = split(v, ',');
        if (f.size() == 1)
            cladding_eps = cplx(number(key, f[0]), 0.0);
        else if (f.size() == 2)
            cladding_eps = cplx(number(key, f[0]), number(key, f[1]));
        else
            throw ConfigError("cladding_eps: expected re or re,im");
    } else if (key == "a_range")
        a_range = parse_range(v);
    else if (key == "lambda_range")
        lambda_range = parse_range(v);
    else if (key == "a0_range")
        a0_range = parse_range(v);
    else if (key == "theta_deg") {
        theta_deg.clear();
        for (const auto& f : split(v, ','))
            theta_deg.push_back(number(key, f));
    } else if (key == "out_dir")
        out_dir = v;
    else if (key == "override_coefficients")
        override_coefficients = v;
    else if (key == "top_reflection")
        top = parse_top_model(v);
    else if (key == "format") {
        if (v != "csv" && v != "json" && v != "both")
            throw ConfigError("format: expected csv, json or both");
        format = v;
    } else if (key == "seed") {
        const int s = integer(key, v);
        if (s < 0)
            throw ConfigError("seed must be nonnegative");
        seed = static_cast<std::uint64_t>(s);
    } else if (key == "h2_min_nm")
        h2_min_nm = number(key, v);
    else if (key == "order")
        order = integer(key, v);
    else if (key == "orientation")
        orientation = v;
    else if (key == "lossless")
        lossless = boolean(key, v);
    else if (key == "theta_points")
        theta_points = integer(key, v);
    else
        throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::validate() const
{
    auto positive = [](const char* name, double v) {
        if (!(v > 0))
            throw ValidationError(std::string(name) + " must be positive");
    };
    positive("wavelength_nm", lambda_nm);
    positive("a_nm", a_nm);
    if (!(e_nm >= 0))
        throw ValidationError("e_nm must be nonnegative");
    for (const auto& [name, r] : {std::pair{"a_range", a_range}, {"lambda_range", lambda_range}, {"a0_range", a0_range}})
        if (!(r.step > 0) || r.hi < r.lo)
            throw ValidationError(std::string(name) + " must be nonempty with a positive step");
    if (theta_deg.empty())
        throw ValidationError("theta_deg needs at least one angle");
    for (double t : theta_deg)
        if (!(t > 0 && t <= 90))
            throw ValidationError("collection angle " + format_number(t) + " deg outside (0, 90]");
    if (!(core_index > 0) || !(shell_index > 0))
        throw ValidationError("indices must be positive");
    if (theta_points < 2)
        throw ValidationError("theta_points must be at least 2");
    if (!(h2_min_nm > 0))
        throw ValidationError("h2_min_nm must be positive");
    if (orientation != "radial" && orientation != "orthoradial" && orientation != "unpolarized")
        throw ValidationError("orientation must be radial, orthoradial or unpolarized");
    const int given = H_nm.has_value() + h1_nm.has_value() + h2_nm.has_value();
    if (given != 0 && given < 2)
        throw ValidationError("geometry needs at least two of H_nm, h1_nm, h2_nm");
}

std::map<std::string, std::string> RunConfig::canonical() const
{
    std::map<std::string, std::string> m;
    m["wavelength_nm"] = format_number(lambda_nm);
    m["a_nm"] = format_number(a_nm);
    m["e_nm"] = format_number(e_nm);
    if (H_nm)
        m["H_nm"] = format_number(*H_nm);
    if (h1_nm)
        m["h1_nm"] = format_number(*h1_nm);
    if (h2_nm)
        m["h2_nm"] = format_number(*h2_nm);
    std::string fam;
    for (auto f : families)
        fam += (fam.empty() ? "" : ",") + family_name(f);
    m["families"] = fam;
    m["silver_file"] = silver_file;
    m["core_index"] = format_number(core_index);
    m["shell_index"] = format_number(shell_index);
    if (cladding_eps)
        m["cladding_eps"] = format_number(cladding_eps->real()) + "," + format_number(cladding_eps->imag());
    m["a_range"] = range_text(a_range);
    m["lambda_range"] = range_text(lambda_range);
    m["a0_range"] = range_text(a0_range);
    std::string th;
    for (double t : theta_deg)
        th += (th.empty() ? "" : ",") + format_number(t);
    m["theta_deg"] = th;
    m["override_coefficients"] = override_coefficients;
    m["top_reflection"] = top_model_name(top);
    m["seed"] = std::to_string(seed);
    m["h2_min_nm"] = format_number(h2_min_nm);
    m["order"] = std::to_string(order);
    m["orientation"] = orientation;
    m["lossless"] = lossless ? "true" : "false";
    m["theta_points"] = std::to_string(theta_points);
    return m;
}

std::uint64_t fnv1a64(const std::string& data)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string RunConfig::hash() const
{
    // Output location and format do not change results.
    std::string text;
    for (const auto& [k, v] : canonical())
        text += k + "=" + v + "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

void load_config(std::istream& in, RunConfig& cfg, const std::string& source)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (t.empty())
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(source + ": expected key = value", lineno);
        try {
            cfg.set(t.substr(0, eq), t.substr(eq + 1));
        } catch (const ParseError&) {
            throw;
        } catch (const ConfigError& e) {
            throw ParseError(source + ": " + e.what(), lineno);
        }
    }
}

void load_config_file(const std::string& path, RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    load_config(in, cfg, path);
}

}  // namespace nanocav
