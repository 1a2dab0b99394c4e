#pragma once

#include <complex>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nanocav {

using cplx = std::complex<double>;

inline constexpr double kGaAsIndex = 3.45;
inline constexpr double kSiNIndex = 1.95;

struct DispersionEntry {
    double wavelength_nm;
    double n;
    double k;
};

// Tabulated complex index n + ik, strictly increasing in wavelength.
class DispersionTable {
public:
    DispersionTable(std::vector<DispersionEntry> entries, std::string source_name);

    const std::vector<DispersionEntry>& entries() const { return entries_; }
    const std::string& source_name() const { return source_name_; }
    double min_wavelength() const { return entries_.front().wavelength_nm; }
    double max_wavelength() const { return entries_.back().wavelength_nm; }

    // Linear interpolation of n and k separately; no extrapolation.
    cplx index_at(double wavelength_nm) const;

private:
    std::vector<DispersionEntry> entries_;
    std::string source_name_;
};

// Rows "wavelength_nm,n,k"; '#' comments and one optional header row.
DispersionTable load_dispersion_table(std::istream& in, const std::string& source_name = "stream");
DispersionTable load_dispersion_file(const std::string& path);

class MaterialModel {
public:
    enum class Kind { constant, tabulated };

    static MaterialModel constant(std::string name, cplx index);
    static MaterialModel from_permittivity(std::string name, cplx eps);
    static MaterialModel tabulated(std::string name, DispersionTable table);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    cplx constant_index() const;
    const DispersionTable& table() const;
    bool covers(double wavelength_nm) const;

private:
    MaterialModel(Kind kind, std::string name, cplx index, std::optional<DispersionTable> table);

    Kind kind_;
    std::string name_;
    cplx index_;
    std::optional<DispersionTable> table_;
};

using MaterialPtr = std::shared_ptr<const MaterialModel>;

cplx refractive_index(const MaterialModel& material, double wavelength_nm);
cplx permittivity(const MaterialModel& material, double wavelength_nm);

// Electric energy weight d(omega * Re eps)/d omega = Re eps - lambda d(Re eps)/d lambda.
double energy_weight(const MaterialModel& material, double wavelength_nm);

MaterialPtr make_gaas(double index = kGaAsIndex);
MaterialPtr make_silicon_nitride(double index = kSiNIndex);
MaterialPtr load_silver(const std::string& path);
std::string default_silver_path();

}  // namespace nanocav
