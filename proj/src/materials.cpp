#include "nanocav/materials.hpp"

#include <algorithm>
#include <cmath>
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
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& field, double& out)
{
    const std::string t = trim(field);
    if (t.empty())
        return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

DispersionTable::DispersionTable(std::vector<DispersionEntry> entries, std::string source_name)
    : entries_(std::move(entries)), source_name_(std::move(source_name))
{
    if (entries_.size() < 2)
        throw InsufficientDataError(source_name_ + ": dispersion table needs at least 2 rows, got " +
                                    std::to_string(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!(e.wavelength_nm > 0))
            throw ValidationError(source_name_ + ": wavelength must be positive");
        if (e.n < 0 || e.k < 0)
            throw ValidationError(source_name_ + ": n and k must be nonnegative");
        if (i > 0 && !(e.wavelength_nm > entries_[i - 1].wavelength_nm))
            throw OrderingError(source_name_ + ": wavelengths must be strictly increasing (row " +
                                std::to_string(i + 1) + ")");
    }
}

cplx DispersionTable::index_at(double wl) const
{
    if (!(wl >= min_wavelength() && wl <= max_wavelength())) {
        std::ostringstream msg;
        msg << source_name_ << ": wavelength " << wl << " nm outside table range [" << min_wavelength()
            << ", " << max_wavelength() << "] nm";
        throw RangeError(msg.str());
    }
    auto it = std::lower_bound(entries_.begin(), entries_.end(), wl,
                               [](const DispersionEntry& e, double w) { return e.wavelength_nm < w; });
    if (it->wavelength_nm == wl)
        return {it->n, it->k};
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (wl - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
    return {lo.n + t * (hi.n - lo.n), lo.k + t * (hi.k - lo.k)};
}

DispersionTable load_dispersion_table(std::istream& in, const std::string& source_name)
{
    std::vector<DispersionEntry> rows;
    std::string line;
    std::size_t lineno = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(t);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        double v[3];
        bool numeric = fields.size() == 3;
        for (std::size_t i = 0; numeric && i < 3; ++i)
            numeric = parse_double(fields[i], v[i]);
        if (!numeric) {
            double probe;
            // A single non-numeric first row is accepted as the header.
            if (!seen_data && rows.empty() && fields.size() == 3 && !parse_double(fields[0], probe)) {
                seen_data = true;
                continue;
            }
            throw ParseError(source_name + ": expected 3 numeric fields wavelength_nm,n,k", lineno);
        }
        seen_data = true;
        rows.push_back({v[0], v[1], v[2]});
    }
    return DispersionTable(std::move(rows), source_name);
}

DispersionTable load_dispersion_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open dispersion file '" + path + "'");
    return load_dispersion_table(in, path);
}

MaterialModel::MaterialModel(Kind kind, std::string name, cplx index, std::optional<DispersionTable> table)
    : kind_(kind), name_(std::move(name)), index_(index), table_(std::move(table))
{
}

MaterialModel MaterialModel::constant(std::string name, cplx index)
{
    if (index.real() < 0 || index.imag() < 0)
        throw ValidationError(name + ": constant index must have n >= 0 and k >= 0");
    return MaterialModel(Kind::constant, std::move(name), index, std::nullopt);
}

MaterialModel MaterialModel::from_permittivity(std::string name, cplx eps)
{
    cplx n = std::sqrt(eps);
    if (n.imag() < 0)
        n = -n;
    return constant(std::move(name), n);
}

MaterialModel MaterialModel::tabulated(std::string name, DispersionTable table)
{
    return MaterialModel(Kind::tabulated, std::move(name), cplx{}, std::move(table));
}

cplx MaterialModel::constant_index() const
{
    if (kind_ != Kind::constant)
        throw DomainError(name_ + ": not a constant material");
    return index_;
}

const DispersionTable& MaterialModel::table() const
{
    if (kind_ != Kind::tabulated)
        throw DomainError(name_ + ": not a tabulated material");
    return *table_;
}

bool MaterialModel::covers(double wl) const
{
    return kind_ == Kind::constant || (wl >= table_->min_wavelength() && wl <= table_->max_wavelength());
}

cplx refractive_index(const MaterialModel& material, double wl)
{
    if (material.kind() == MaterialModel::Kind::constant)
        return material.constant_index();
    return material.table().index_at(wl);
}

cplx permittivity(const MaterialModel& material, double wl)
{
    const cplx n = refractive_index(material, wl);
    return n * n;
}

double energy_weight(const MaterialModel& material, double wl)
{
    if (material.kind() == MaterialModel::Kind::constant)
        return permittivity(material, wl).real();
    const auto& t = material.table();
    const double d = 1.0;
    const double lo = std::max(t.min_wavelength(), wl - d);
    const double hi = std::min(t.max_wavelength(), wl + d);
    const double slope = (permittivity(material, hi).real() - permittivity(material, lo).real()) / (hi - lo);
    return permittivity(material, wl).real() - wl * slope;
}

MaterialPtr make_gaas(double index)
{
    return std::make_shared<MaterialModel>(MaterialModel::constant("GaAs", index));
}

MaterialPtr make_silicon_nitride(double index)
{
    return std::make_shared<MaterialModel>(MaterialModel::constant("Si3N4", index));
}

MaterialPtr load_silver(const std::string& path)
{
    return std::make_shared<MaterialModel>(MaterialModel::tabulated("Ag", load_dispersion_file(path)));
}

std::string default_silver_path()
{
    return std::string(NANOCAV_DATA_DIR) + "/silver_rakic_ld.csv";
}

}  // namespace nanocav
