#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace emhd::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3, kCertificateFailure = 4 };

/// numerical failure raised by a command (exit code 3)
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommandContext {
  std::string command;
  nlohmann::json config;  // resolved
  std::string hash;
  std::string out;
  bool strict = false;
};

int cmd_trace(const CommandContext& ctx);
int cmd_certify(const CommandContext& ctx);
int cmd_solve(const CommandContext& ctx);
int cmd_norms(const CommandContext& ctx);
int cmd_smooth(const CommandContext& ctx);
int cmd_psdo_check(const CommandContext& ctx);

/// resolves the config, dispatches and maps exceptions to exit codes; print_config writes the
/// resolved config to stdout instead of running
int run(const std::string& command, const std::string& config_path, const std::string& out_override,
        int threads_override, bool strict, bool print_config = false);

}  // namespace emhd::cli
