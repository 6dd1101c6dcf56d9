#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace parex {

/// Config file or override that does not match the subcommand's schema.
struct SchemaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// FNV-1a of the canonical (sorted, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

enum class Status { Pass, Fail, Report };
const char* to_string(Status s);

struct Verdict {
    std::string check;
    Status status = Status::Report;
    double value = 0.0;
    std::optional<double> tolerance;
    std::string note;

    /// "PASS check value=... tol=..." for the console.
    std::string line() const;
    nlohmann::json to_json() const;
};

/// Pass when value <= tol.
Verdict at_most(std::string check, double value, double tol, std::string note = {});
/// Pass when value >= tol.
Verdict at_least(std::string check, double value, double tol, std::string note = {});
Verdict report_only(std::string check, double value, std::string note = {});
Verdict holds(std::string check, bool ok, std::string note = {});

struct RunReport {
    std::string subcommand;
    nlohmann::json config;
    std::string hash;
    std::vector<Verdict> verdicts;
    nlohmann::json results = nlohmann::json::object();

    bool failed() const;
    /// The report document; `timestamp` is the only field that varies between identical runs.
    nlohmann::json to_json(const std::string& timestamp) const;
};

/// UTC time in ISO 8601.
std::string utc_timestamp();

void write_report_json(const std::filesystem::path& path, const RunReport& report, const std::string& timestamp);
/// Appends one row per verdict; writes the schema line and header when the file is new.
void append_ledger(const std::filesystem::path& path, const RunReport& report);

}  // namespace parex
