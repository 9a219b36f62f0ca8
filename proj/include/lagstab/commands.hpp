#ifndef LAGSTAB_COMMANDS_HPP
#define LAGSTAB_COMMANDS_HPP

#include "lagstab/config.hpp"
#include "lagstab/geometry.hpp"
#include "lagstab/stability.hpp"

#include <span>
#include <string>
#include <string_view>

namespace lagstab {

// Stable process exit codes.
enum ExitCode : int {
  exit_pass = 0,
  exit_check_failed = 1,
  exit_config_error = 2,
  exit_precondition = 3,
};

struct CommandResult {
  int exit_code = exit_pass;
  std::string report; // JSON or CSV text, newline-terminated
};

// Each command returns a report in the configured format; the JSON form
// carries every check with its verdict. Errors propagate as lagstab::Error.
CommandResult cmd_verify_soliton(const RunConfig& config);
CommandResult cmd_second_variation(const RunConfig& config);
CommandResult cmd_section4(const RunConfig& config);

// Dispatches on "verify-soliton", "second-variation" or "section4" after
// parsing the config, and maps errors to exit codes: config, support,
// domain and invalid-argument errors -> 2, precondition -> 3, anything else
// -> 1. Failed runs get a JSON error report {"command", "error": {code, message}}.
CommandResult run_command(std::string_view command, std::string_view config_text,
                          std::string_view overrides = {});

std::string to_json(const DiagnosticsReport& report);
std::string to_json(const VariationReport& report);
// Header: chart,seed,defect,Fpp_operator,Fpp_divergence,Fpp_square,Fpp_fd,max_pairwise_rel_diff
std::string to_csv(std::span<const VariationReport> reports);

} // namespace lagstab

#endif
