#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nanocav/interfaces.hpp"
#include "nanocav/modesolver.hpp"

namespace nanocav {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    // lo, lo + step, ... up to hi inclusive (within step * 1e-9).
    std::vector<double> values() const;
};

// Parses "lo:hi:step".
Range parse_range(const std::string& text);

struct RunConfig {
    double lambda_nm = 950.0;
    double a_nm = 100.0;
    double e_nm = 5.0;
    std::optional<double> H_nm;
    std::optional<double> h1_nm;
    std::optional<double> h2_nm;
    std::vector<ModeFamily> families{ModeFamily::TE11};

    std::string silver_file;
    double core_index = kGaAsIndex;
    double shell_index = kSiNIndex;
    std::optional<cplx> cladding_eps;  // replaces the silver table, e.g. -1e6 for a perfect conductor

    Range a_range{52.0, 250.0, 2.0};
    Range lambda_range{800.0, 1100.0, 5.0};
    Range a0_range{0.0, 95.0, 5.0};
    std::vector<double> theta_deg{45.0, 90.0};

    std::string out_dir = ".";
    std::string override_coefficients;
    TopModel top = TopModel::p;
    std::string format = "csv";
    std::uint64_t seed = 0;  // reserved; every computation is deterministic
    double h2_min_nm = 5.0;
    int order = -1;
    std::string orientation = "radial";
    bool lossless = false;
    int theta_points = 181;

    RunConfig();

    // Applies one key/value pair; unknown keys and malformed values throw ConfigError.
    void set(const std::string& key, const std::string& value);
    void validate() const;
    // Canonical sorted key=value listing of the resolved configuration.
    std::map<std::string, std::string> canonical() const;
    std::string hash() const;
};

void load_config(std::istream& in, RunConfig& cfg, const std::string& source_name = "config");
void load_config_file(const std::string& path, RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);
std::string format_number(double v);

}  // namespace nanocav
