#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "alioth/types.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Tiltable underwater quadrotor: dynamics, tilt singularities, "
                 "leveling control"};
    app.require_subcommand(1);

    alioth::cli::CommonOptions opt;

    CLI::App* stta = app.add_subcommand(
        "stta", "Print the four singular tilt angles and leveling constraints");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run one scenario; write trajectory CSV, metrics, and plots");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run the scenario once per swept parameter value");
    CLI::App* ablation = app.add_subcommand(
        "ablation", "Paired runs with the adaptive auxiliary gain on and off");
    CLI::App* validate =
        app.add_subcommand("validate", "Run the model invariant suite");

    for (CLI::App* sub : {stta, simulate, sweep, ablation, validate}) {
        sub->add_option("--config", opt.config_path,
                        "JSON config; built-in defaults when omitted")
            ->check(CLI::ExistingFile);
        sub->add_option("--set", opt.overrides,
                        "Override one config field: a.b.c=value (repeatable)");
    }
    for (CLI::App* sub : {stta, simulate, sweep, ablation})
        sub->add_option("--out", opt.out_dir, "Output directory")
            ->capture_default_str();
    for (CLI::App* sub : {simulate, sweep, ablation})
        sub->add_option("--seed", opt.seed,
                        "Replace the config seed (ablation: the seed list)");
    simulate->add_flag("--allow-divergence", opt.allow_divergence,
                       "Exit 0 even when the run diverges");
    sweep->add_option("--jobs", opt.jobs,
                      "Worker pool size; logical CPUs when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    opt.seed_set = simulate->count("--seed") || sweep->count("--seed") ||
                   ablation->count("--seed");

    try {
        if (stta->parsed()) return alioth::cli::cmd_stta(opt);
        if (simulate->parsed()) return alioth::cli::cmd_simulate(opt);
        if (sweep->parsed()) return alioth::cli::cmd_sweep(opt);
        if (ablation->parsed()) return alioth::cli::cmd_ablation(opt);
        if (validate->parsed()) return alioth::cli::cmd_validate(opt);
    } catch (const alioth::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const alioth::DegenerateParameterError& e) {
        std::cerr << "degenerate parameters: " << e.what() << '\n';
        return 2;
    } catch (const alioth::ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
