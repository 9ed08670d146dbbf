// Command-line front end: run market simulations from a config file or a
// built-in preset and write the trace/summary files.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskmarket/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multi-period prediction markets driven by risk-measure agents"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a market and write trace/summary files");
    std::string config_path;
    std::string preset_name;
    std::string out_prefix = "market";
    std::optional<std::uint64_t> seed;
    std::optional<int> max_rounds;
    std::optional<double> eps;
    auto* config_opt = run->add_option("--config", config_path, "Market config JSON file");
    auto* preset_opt = run->add_option("--preset", preset_name, "Built-in preset name");
    config_opt->excludes(preset_opt);
    run->add_option("--out", out_prefix, "Output prefix for .trace.csv/.summary.json");
    run->add_option("--seed", seed, "Root seed override");
    run->add_option("--max-rounds", max_rounds, "Stop-rule round cap override");
    run->add_option("--eps", eps, "Stop-rule convergence threshold override");

    auto* presets = app.add_subcommand("presets", "List the built-in presets");
    std::string show_name;
    presets->add_option("--show", show_name, "Print one preset's config as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            if (!show_name.empty()) {
                std::cout << riskmarket::config_to_json(riskmarket::make_preset(show_name))
                                 .dump(2)
                          << "\n";
            } else {
                for (const auto& name : riskmarket::preset_names())
                    std::cout << name << "\n";
            }
            return 0;
        }

        riskmarket::MarketConfig config;
        if (!preset_name.empty()) {
            config = riskmarket::make_preset(preset_name, seed);
        } else if (!config_path.empty()) {
            config = riskmarket::load_config_file(config_path);
            if (seed) config.seed = *seed;
        } else {
            std::cerr << "error: run needs --config or --preset\n";
            return 1;
        }
        if (max_rounds) config.stop.max_rounds = *max_rounds;
        if (eps) config.stop.eps = *eps;
        riskmarket::validate_config(config);

        const int code = riskmarket::run_and_write(config, out_prefix);
        if (code == 2)
            std::cerr << "market did not converge (trace written to " << out_prefix
                      << ".trace.csv)\n";
        return code;
    } catch (const riskmarket::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
