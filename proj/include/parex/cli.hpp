#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "parex/report.hpp"

namespace parex::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFail = 1,
    kExitSchema = 2,
    kExitCapacity = 3,
    kExitInvalidInput = 4,
    kExitNumerical = 5,
};

const std::vector<std::string>& subcommands();

/// Every key a subcommand accepts, with its default value.
nlohmann::json default_config(const std::string& subcommand);

/// Defaults, then the config file, then `key=value` overrides (value parsed as
/// JSON, else taken as a string). Throws SchemaError on unknown keys or types.
nlohmann::json resolve_config(const std::string& subcommand, const std::optional<std::filesystem::path>& config_path,
                              const std::vector<std::string>& overrides);

struct Outcome {
    RunReport report;
    std::map<std::string, std::string> files;  // extra outputs by file name
};

/// Runs one experiment on a resolved config. Writes nothing.
Outcome execute(const std::string& subcommand, const nlohmann::json& config);

struct Request {
    std::string subcommand;
    std::optional<std::filesystem::path> config_path;
    std::vector<std::string> overrides;
    std::filesystem::path out_dir;
    std::optional<std::string> timestamp;  // fixed timestamp, for tests
};

/// Resolves, executes and writes report.json, ledger.csv and any extra files.
/// Prints one verdict line per check to `out` and errors to `err`. Nothing is
/// written when the config is rejected or the run throws.
int run(const Request& request, std::ostream& out, std::ostream& err);

}  // namespace parex::cli
