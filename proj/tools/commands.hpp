#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "run_config.hpp"

namespace rsgrove::cli {

/// Settings shared by every subcommand: --config plus one flag per
/// RunConfig key.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  /// Defaults, then the config file, then explicit flags.
  RunConfig resolve() const;
};

/// Registers all subcommands on `app`. After parsing, `run` executes the one
/// that was selected and returns its exit code.
class Commands {
 public:
  explicit Commands(CLI::App& app);
  int run() const;

 private:
  struct Entry {
    CLI::App* sub;
    std::function<int()> action;
  };
  std::vector<Entry> entries_;
  std::vector<std::unique_ptr<ConfigFlags>> flags_;
  std::shared_ptr<void> state_;
};

}  // namespace rsgrove::cli
