#include <CLI11.hpp>
#include <fmt/format.h>

#include <exception>
#include <new>

#include "commands.hpp"
#include "rsgrove/errors.hpp"
#include "rsgrove/version.hpp"

// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
int main(int argc, char** argv) {
  CLI::App app{"rsgrove: balanced spatial partitioning of large datasets"};
  app.set_version_flag("--version", std::string(rsgrove::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  try {
    const rsgrove::cli::Commands commands(app);
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      fmt::print(stderr, "usage error: {}\n", e.what());
      return 1;
    }
    return commands.run();
  } catch (const rsgrove::UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 1;
  } catch (const rsgrove::DataError& e) {
    fmt::print(stderr, "data error: {}\n", e.what());
    return 2;
  } catch (const rsgrove::InternalError& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 3;
  } catch (const std::bad_alloc&) {
    fmt::print(stderr, "internal error: out of memory\n");
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 3;
  }
}
