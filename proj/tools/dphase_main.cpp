// Command-line front end: picks a mode, loads the config file, applies the
// flag overrides and hands the result to the library runner.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dphase/config.hpp"
#include "dphase/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"double-phase continuation laboratory"};
    app.require_subcommand(1);

    std::string configPath;
    std::string outDir;
    std::uint64_t seed = 0;
    bool strict = false;
    bool seedGiven = false;

    const std::pair<const char*, dphase::RunMode> modes[] = {
        {"solve-one-p", dphase::RunMode::SolveOneP},
        {"continue", dphase::RunMode::Continue},
        {"verify", dphase::RunMode::Verify},
        {"oracle-check", dphase::RunMode::OracleCheck},
    };
    for (const auto& [name, mode] : modes) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", configPath, "run description file")->required();
        sub->add_option("--out", outDir, "output directory (overrides run.output)");
        sub->add_option("--seed", seed, "random seed (overrides run.seed)")
            ->capture_default_str();
        sub->add_flag("--strict", strict, "treat hypothesis violations as errors");
        (void)mode;
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* chosen = app.get_subcommands().front();
    seedGiven = chosen->count("--seed") > 0;

    dphase::RunMode cliMode = dphase::RunMode::Continue;
    for (const auto& [name, mode] : modes)
        if (chosen->get_name() == name) cliMode = mode;

    try {
        dphase::RunConfig config = dphase::parse_config(configPath);
        if (config.modeExplicit && config.mode != cliMode) {
            std::cerr << "error (config): config file selects mode '"
                      << dphase::to_string(config.mode) << "' but the command line says '"
                      << dphase::to_string(cliMode) << "'\n";
            return 2;
        }
        config.mode = cliMode;
        if (!outDir.empty()) config.outputDir = outDir;
        if (seedGiven) config.seed = seed;
        if (strict) config.strict = true;
        dphase::validate_mode_requirements(config, configPath);
        return dphase::run_command(config);
    } catch (const dphase::Error& err) {
        std::cerr << "error (" << err.kind() << "): " << err.what() << "\n";
        return err.kind() == "config" || err.kind() == "parse" ? 2 : 1;
    }
}
