#include "parex/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace parex {

namespace {

std::string number(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(number(v)); }

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const nlohmann::json& config) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config.dump());
    return os.str();
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Fail: return "FAIL";
        case Status::Report: return "REPORT";
    }
    return "?";
}

std::string Verdict::line() const {
    std::ostringstream os;
    os << to_string(status) << ' ' << check << " value=" << number(value);
    if (tolerance) os << " tol=" << number(*tolerance);
    if (!note.empty()) os << " (" << note << ')';
    return os.str();
}

nlohmann::json Verdict::to_json() const {
    nlohmann::json j{{"check", check}, {"status", to_string(status)}, {"value", json_number(value)}};
    j["tolerance"] = tolerance ? json_number(*tolerance) : nlohmann::json(nullptr);
    if (!note.empty()) j["note"] = note;
    return j;
}

Verdict at_most(std::string check, double value, double tol, std::string note) {
    return {std::move(check), value <= tol ? Status::Pass : Status::Fail, value, tol, std::move(note)};
}

Verdict at_least(std::string check, double value, double tol, std::string note) {
    return {std::move(check), value >= tol ? Status::Pass : Status::Fail, value, tol, std::move(note)};
}

Verdict report_only(std::string check, double value, std::string note) {
    return {std::move(check), Status::Report, value, std::nullopt, std::move(note)};
}

Verdict holds(std::string check, bool ok, std::string note) {
    return {std::move(check), ok ? Status::Pass : Status::Fail, ok ? 1.0 : 0.0, std::nullopt, std::move(note)};
}

bool RunReport::failed() const {
    for (const auto& v : verdicts)
        if (v.status == Status::Fail) return true;
    return false;
}

nlohmann::json RunReport::to_json(const std::string& timestamp) const {
    nlohmann::json j;
    j["schema"] = 1;
    j["subcommand"] = subcommand;
    j["config_hash"] = hash;
    j["config"] = config;
    j["timestamp"] = timestamp;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts) j["verdicts"].push_back(v.to_json());
    j["results"] = results;
    return j;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_report_json(const std::filesystem::path& path, const RunReport& report, const std::string& timestamp) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << report.to_json(timestamp).dump(2) << '\n';
}

void append_ledger(const std::filesystem::path& path, const RunReport& report) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    if (fresh) os << "# schema=1\nconfig_hash,subcommand,check,status,value,tolerance,note\n";
    for (const auto& v : report.verdicts)
        os << report.hash << ',' << report.subcommand << ',' << csv_field(v.check) << ',' << to_string(v.status) << ','
           << number(v.value) << ',' << (v.tolerance ? number(*v.tolerance) : "") << ',' << csv_field(v.note) << '\n';
}

}  // namespace parex
