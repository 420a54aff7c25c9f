#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "revsim/cli.hpp"

using namespace revsim;

int main(int argc, char** argv) {
    CLI::App app{"revsim: commitment-equilibrium solver and review-game simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // allow the global flags after the subcommand name

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    std::int64_t episodes = 0;
    int grid_n = 0;
    bool have_seed = false, have_episodes = false, have_grid = false;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--set", overrides, "override config field, e.g. --set model.H=3.5")
        ->take_all();
    app.add_option("--seed", seed, "master seed")->each([&](const std::string&) {
        have_seed = true;
    });
    app.add_option("--episodes", episodes, "episode count")
        ->each([&](const std::string&) { have_episodes = true; });
    app.add_option("--grid", grid_n, "belief grid size")->each([&](const std::string&) {
        have_grid = true;
    });

    auto* solve = app.add_subcommand("solve", "solve the commitment equilibrium");

    std::string which;
    auto* figure = app.add_subcommand("figure", "emit figure data CSV");
    figure->add_option("which", which, "fig1 | fig2 | fig3")->required();

    std::string policy;
    bool dump_traces = false, no_auto_solve = false;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo welfare batch");
    simulate->add_option("policy", policy, "commitment | truthful | babbling | cheaptalk3p")
        ->required();
    simulate->add_flag("--dump-traces", dump_traces, "write per-episode trace CSV");
    simulate->add_flag("--no-auto-solve", no_auto_solve,
                       "fail instead of solving when solution.json is missing");

    std::string sweep_param;
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_steps = 10;
    auto* sweep = app.add_subcommand("sweep", "comparative statics over one parameter");
    sweep->add_option("parameter", sweep_param, "beta | sigma | c | p1")->required();
    sweep->add_option("--from", sweep_from)->required();
    sweep->add_option("--to", sweep_to)->required();
    sweep->add_option("--steps", sweep_steps, "number of swept values (default 10)");

    bool print_defaults = false;
    auto* config = app.add_subcommand("config", "print the active configuration");
    config->add_flag("--print-defaults", print_defaults);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kBadConfig;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = RunConfig::load_file(config_path);
        for (const auto& s : overrides) cfg.apply_override(s);
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (have_seed) cfg.sim.master_seed = seed;
        if (have_episodes) cfg.sim.episodes = episodes;
        if (have_grid) cfg.numerics.grid_n = grid_n;
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return cli::kBadConfig;
    }

    if (solve->parsed()) return cli::cmd_solve(cfg);
    if (figure->parsed()) return cli::cmd_figure(cfg, which);
    if (simulate->parsed()) return cli::cmd_simulate(cfg, policy, dump_traces, no_auto_solve);
    if (sweep->parsed()) {
        std::vector<double> values;
        const int n = std::max(1, sweep_steps);
        for (int i = 0; i < n; ++i)
            values.push_back(n == 1 ? sweep_from
                                    : sweep_from + (sweep_to - sweep_from) * i / (n - 1));
        return cli::cmd_sweep(cfg, sweep_param, values);
    }
    if (config->parsed()) return cli::cmd_config(cfg, print_defaults);
    return cli::kBadConfig;
}
