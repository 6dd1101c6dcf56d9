#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "parex/cli.hpp"

using namespace parex;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("parex_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(cli::Request req, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(req, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

}  // namespace

TEST_CASE("every subcommand has a schema") {
    CHECK(cli::subcommands().size() == 11);
    for (const auto& s : cli::subcommands()) {
        const json c = cli::default_config(s);
        CHECK(c.is_object());
        CHECK(cli::resolve_config(s, std::nullopt, {}) == c);
    }
}

TEST_CASE("config resolution") {
    const fs::path dir = scratch("resolve");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "c.json") << R"({"subcommand": "alpert-check", "kappa": 3, "eta": 0.08})";
    }
    const json c = cli::resolve_config("alpert-check", dir / "c.json", {"kappa=4"});
    CHECK(c["kappa"] == 4);
    CHECK(c["eta"].get<double>() == 0.08);

    CHECK_THROWS_AS(cli::resolve_config("alpert-check", std::nullopt, {"no_such_key=1"}), SchemaError);
    CHECK_THROWS_AS(cli::resolve_config("alpert-check", std::nullopt, {"kappa=\"two\""}), SchemaError);
    CHECK_THROWS_AS(cli::resolve_config("grid", dir / "c.json", {}), SchemaError);
    CHECK_THROWS_AS(cli::resolve_config("alpert-check", dir / "missing.json", {}), SchemaError);
    fs::remove_all(dir);
}

TEST_CASE("alpert-check passes at kappa 2") {
    const fs::path dir = scratch("alpert");
    std::string text;
    const int code = run_cli({"alpert-check", std::nullopt, {"kappa=2"}, dir, "2000-01-01T00:00:00Z"}, &text);
    CHECK(code == cli::kExitOk);
    CHECK(text.find("FAIL") == std::string::npos);
    CHECK(fs::exists(dir / "report.json"));
    const json rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep["schema"] == 1);
    CHECK(rep["subcommand"] == "alpert-check");
    CHECK(rep["config"]["kappa"] == 2);
    CHECK(rep["config_hash"].get<std::string>().size() == 16);
    const std::string ledger = slurp(dir / "ledger.csv");
    CHECK(ledger.rfind("# schema=1\nconfig_hash,subcommand,check,status,value,tolerance,note\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("rescale-check passes") {
    const fs::path dir = scratch("rescale");
    std::string text;
    CHECK(run_cli({"rescale-check", std::nullopt, {"points=256"}, dir, std::nullopt}, &text) == cli::kExitOk);
    CHECK(text.find("PASS") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("rejected configs write nothing") {
    const fs::path dir = scratch("bad");
    fs::create_directories(dir);
    const fs::path cfg = dir / "bad.json";
    {
        std::ofstream(cfg) << "{\"kappa\": 2,";
    }
    const fs::path out = dir / "out";
    CHECK(run_cli({"alpert-check", cfg, {}, out, std::nullopt}) == cli::kExitSchema);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli({"alpert-check", std::nullopt, {"kappa=2.5"}, out, std::nullopt}) == cli::kExitSchema);
    CHECK(run_cli({"rescale-check", std::nullopt, {"rho=1.5"}, out, std::nullopt}) == cli::kExitInvalidInput);
    CHECK(run_cli({"extend", std::nullopt, {"budget=10"}, out, std::nullopt}) == cli::kExitCapacity);
    CHECK_FALSE(fs::exists(out));
    fs::remove_all(dir);
}

TEST_CASE("runs are reproducible") {
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    const std::vector<std::string> set{"points=128"};
    REQUIRE(run_cli({"rescale-check", std::nullopt, set, a, "2000-01-01T00:00:00Z"}) == cli::kExitOk);
    REQUIRE(run_cli({"rescale-check", std::nullopt, set, b, "2024-06-30T12:00:00Z"}) == cli::kExitOk);
    CHECK(slurp(a / "ledger.csv") == slurp(b / "ledger.csv"));
    json ja = json::parse(slurp(a / "report.json")), jb = json::parse(slurp(b / "report.json"));
    CHECK(ja["timestamp"] != jb["timestamp"]);
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja.dump() == jb.dump());

    // a second run into the same directory appends rows without a second header
    REQUIRE(run_cli({"rescale-check", std::nullopt, set, a, std::nullopt}) == cli::kExitOk);
    const std::string ledger = slurp(a / "ledger.csv");
    CHECK(ledger.find("# schema=1", 1) == std::string::npos);
    CHECK(ledger.size() > slurp(b / "ledger.csv").size());
    fs::remove_all(a);
    fs::remove_all(b);
}
