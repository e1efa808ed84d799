#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mfglab/cli.hpp"

using mfglab::cli::error_json;

int main(int argc, char** argv) {
    CLI::App app{"Two-state mean field game laboratory"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_steps;

    for (const std::string& name : mfglab::cli::subcommands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "Monte Carlo base seed");
        sub->add_option("--n-steps", n_steps, "time steps on [0, T]");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << error_json("usage", e.what(), 2).dump() << '\n';
        return 2;
    }

    mfglab::cli::RunConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) throw mfglab::cli::ConfigError("cannot read config file " + config_path);
        std::stringstream text;
        text << in.rdbuf();
        config = mfglab::cli::parse_config(nlohmann::json::parse(text.str()));
        const std::string chosen = app.get_subcommands().front()->get_name();
        if (!config.subcommand.empty() && config.subcommand != chosen) {
            throw mfglab::cli::ConfigError("config names subcommand '" + config.subcommand + "' but '" + chosen +
                                           "' was invoked");
        }
        config.subcommand = chosen;
        if (out_dir) config.out_dir = *out_dir;
        if (format) config.format = *format == "csv" ? mfglab::cli::Format::csv : mfglab::cli::Format::json;
        if (seed) config.parameters.seed = *seed;
        if (n_steps) config.parameters.n_steps = *n_steps;
        mfglab::cli::validate(config);
    } catch (const std::exception& e) {
        std::cerr << error_json("config", e.what(), 2).dump() << '\n';
        return 2;
    }
    return mfglab::cli::run(config, std::cerr);
}
