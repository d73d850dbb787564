#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dbf/cli/config.hpp"
#include "dbf/protocol.hpp"

namespace dbf::cli {

/// Bad invocation: unknown names, conflicting or missing options.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

int exit_code_for(ErrorKind kind);

void cmd_generate(const RunConfig& config);
void cmd_discrepancy(const RunConfig& config);
/// Shared by `fit` and `forecast`.
void cmd_fit(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);

nlohmann::json report_to_json(const EvaluationReport& report);

/// Full command-line entry point; returns the process exit code. Diagnostics
/// go to stderr as a single line.
int run(int argc, const char* const* argv);

}  // namespace dbf::cli
