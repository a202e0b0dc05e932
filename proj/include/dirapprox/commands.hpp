#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dirapprox/config.hpp"

namespace dirapprox {

/// Exit codes of the command line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDomain = 2,
  kExitPrecision = 3,
  kExitResource = 4,
};

int exit_code_for(ErrorCode code);

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Subcommand bodies; each writes its files plus manifest.txt into cfg.out.
void cmd_field(const RunConfig& cfg, int threads, std::ostream& out);
void cmd_scan(const RunConfig& cfg, int threads, std::ostream& out);
void cmd_weights(const RunConfig& cfg, int threads, std::ostream& out);
void cmd_measure(const RunConfig& cfg, int threads, std::ostream& out);
void cmd_orbit(const RunConfig& cfg, int threads, std::ostream& out);
void cmd_compare(const RunConfig& cfg, int threads, std::ostream& out);
void cmd_littlewood(const RunConfig& cfg, int threads, std::ostream& out);

}  // namespace dirapprox
