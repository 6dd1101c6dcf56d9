#include <iostream>

#include "CLI11.hpp"
#include "parex/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"parex: numerical experiments for the Fourier extension operator on the paraboloid"};
    app.require_subcommand(1);
    parex::cli::Request req;
    std::string config;
    for (const auto& name : parex::cli::subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config, "JSON config file");
        sub->add_option("--set", req.overrides, "override one config key (key=value)")->take_all();
        sub->add_option("--out", req.out_dir, "output directory")->required();
        sub->callback([&req, name] { req.subcommand = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : parex::cli::kExitSchema;
    }
    if (!config.empty()) req.config_path = config;
    return parex::cli::run(req, std::cout, std::cerr);
}
