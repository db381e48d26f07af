#include "screenline/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using screenline::cli::CommandConfig;
    CommandConfig cfg;
    CLI::App app{"screenline: screening problems on finite grids"};
    app.require_subcommand(1);

    auto common = [&cfg](CLI::App* sub) {
        sub->add_option("--instance", cfg.instance_path, "instance JSON file");
        sub->add_option("--out", cfg.output_path, "output file (default: standard output)");
        sub->add_option("--tol", cfg.tol, "override the instance comparison tolerance");
        sub->add_option("--threads", cfg.threads, "worker cap (fallback: SCREENLINE_THREADS)");
    };

    auto* gen = app.add_subcommand("gen", "emit an instance file");
    common(gen);
    gen->add_option("--fixture", cfg.fixture, "toy-a | toy-b | toy-c");
    gen->add_option("--family", cfg.family, "quasilinear | nonlinear | timepath");
    gen->add_option("--types", cfg.types, "types (budget: points)");
    gen->add_option("--allocs", cfg.allocs, "allocations");
    gen->add_option("--variant", cfg.variant, "full | partial | budget");
    gen->add_option("--steps", cfg.steps, "time steps for the timepath family");
    gen->add_option("--seed", cfg.seed, "generator seed");

    auto* check = app.add_subcommand("check", "feasibility report for a contract");
    common(check);
    check->add_option("--contract", cfg.contract_path, "contract JSON (point -> index)")->required();

    auto* solve = app.add_subcommand("solve", "minimize the principal's cost");
    common(solve);
    solve->add_option("--solver", cfg.solver, "brute | menu | local");
    solve->add_option("--max-menu", cfg.max_menu, "menu items besides a forced outside option (0: number of points)");
    solve->add_option("--restarts", cfg.restarts, "local search restarts");
    solve->add_option("--seed", cfg.seed, "local search seed");
    solve->add_option("--node-cap", cfg.node_cap, "enumeration cap");
    solve->add_flag("--emit-plot", cfg.emit_plot, "write a CSV of offered items and uptake");
    solve->add_option("--csv", cfg.csv_path, "CSV path (default: <out>.plot.csv)");

    auto* improve = app.add_subcommand("improve", "map a feasible contract into the admissible set");
    common(improve);
    improve->add_option("--contract", cfg.contract_path, "contract JSON (point -> index)")->required();

    auto* coercivity = app.add_subcommand("coercivity", "admissible set, witness and bound certificate");
    common(coercivity);

    auto* diag = app.add_subcommand("diag", "diagnostics");
    common(diag);
    diag->add_option("analysis", cfg.subcommand, "hausdorff | limit | singular | penalized")->required();
    diag->add_option("--menu", cfg.menu, "comma-separated grid indices");
    diag->add_option("--menu-b", cfg.menu_b, "second menu (hausdorff)");
    diag->add_option("--sequence", cfg.sequence_path, "menu/contract sequence JSON (limit)");
    diag->add_option("--tail", cfg.tail, "tail fraction in (0, 1] (limit)");
    diag->add_option("--type", cfg.type_id, "type id (penalized)");
    diag->add_option("--budget", cfg.budget, "budget (penalized)");
    diag->add_option("--lambda", cfg.lambda, "penalty weight (penalized)");
    diag->add_option("--csv", cfg.csv_path, "CSV path (default: <out>.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return screenline::cli::run(cfg);
}
