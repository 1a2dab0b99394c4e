#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nanocav/config.hpp"

namespace nanocav {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

// Each command writes its files under cfg.out_dir and a short report to out.
void cmd_modes(const RunConfig& cfg, std::ostream& out);
void cmd_sweep_radius(const RunConfig& cfg, std::ostream& out);
void cmd_spectrum(const RunConfig& cfg, std::ostream& out);
void cmd_design(const RunConfig& cfg, std::ostream& out);
void cmd_fidelity(const RunConfig& cfg, std::ostream& out);
void cmd_pattern(const RunConfig& cfg, std::ostream& out);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nanocav
