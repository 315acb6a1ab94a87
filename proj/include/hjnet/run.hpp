#ifndef HJNET_RUN_HPP
#define HJNET_RUN_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace hjnet::cli {

// exit codes of the batch front door
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Validates a subcommand config (strict keys, defaults filled) and returns
// the normalized document. Throws ConfigError on unknown keys or invariant
// violations.
nlohmann::json parse_config(const std::string& subcommand, nlohmann::json doc);

// Runs a validated config; CSV artifacts land in `out` (or the file named by
// the config's "output" key when out == nullptr).
void run(const std::string& subcommand, const nlohmann::json& config, std::ostream* out = nullptr);

// Full command-line entry: hjnet <subcommand> <config.json> [--set k=v]... [-o file]
int main_entry(int argc, const char* const* argv);

}  // namespace hjnet::cli

#endif
