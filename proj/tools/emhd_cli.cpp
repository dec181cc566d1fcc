#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "emhd/config.hpp"
#include "emhd/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for resistivity-free electron MHD"};
  app.set_version_flag("--version", emhd::version_string());
  app.require_subcommand(1);

  std::string config_path, out;
  int threads = 0;
  bool strict = false, print_config = false;
  for (const auto& name : emhd::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", strict, "exit 4 when a certificate fails");
    sub->add_flag("--print-config", print_config, "print the resolved config with all defaults and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : emhd::cli::kConfigError;
  }
  for (CLI::App* sub : app.get_subcommands())
    return emhd::cli::run(sub->get_name(), config_path, out, threads, strict, print_config);
  return emhd::cli::kConfigError;
}
