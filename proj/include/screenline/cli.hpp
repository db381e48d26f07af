#pragma once

// Batch command surface. `run` is the whole program minus argument parsing,
// so it can be driven in-process by tests.
//
// Exit codes: 0 success, 1 validation/shape/feasibility failure,
// 2 violated model assumption, 3 size cap exceeded.

#include "screenline/screenline.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace screenline::cli {

struct CommandConfig {
    std::string command;    // gen | check | solve | improve | coercivity | diag
    std::string subcommand; // diag: hausdorff | limit | singular | penalized
    std::string instance_path;
    std::string output_path;
    std::string contract_path;
    std::string sequence_path;
    std::string csv_path;

    // solve
    std::string solver = "brute";
    std::size_t max_menu = 0;
    std::size_t restarts = 5;
    std::uint64_t seed = 1;
    bool emit_plot = false;
    std::uint64_t node_cap = 10'000'000;

    std::optional<double> tol;
    unsigned threads = 0;

    // gen
    std::string fixture;
    std::string family;
    std::size_t types = 2;
    std::size_t allocs = 5;
    std::size_t steps = 4;
    std::string variant = "full";

    // diag
    std::string menu;
    std::string menu_b;
    std::string type_id;
    double budget = 0.0;
    double lambda = 0.0;
    double tail = 1.0;
};

inline int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::assumption_violated: return 2;
    case ErrorCode::too_large: return 3;
    default: return 1;
    }
}

namespace detail {

inline std::vector<AllocId> parse_items(const std::string& text, const char* flag) {
    std::vector<AllocId> items;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(tok, &used);
            if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
            items.push_back(static_cast<AllocId>(v));
        } catch (const std::exception&) {
            fail(ErrorCode::validation, std::string(flag) + ": '" + tok + "' is not a grid index");
        }
    }
    return items;
}

inline VariantKind parse_variant(const std::string& v) {
    if (v == "full") return VariantKind::full;
    if (v == "partial") return VariantKind::partial;
    if (v == "budget") return VariantKind::budget;
    fail(ErrorCode::validation, "--variant: unknown variant '" + v + "'");
}

class Session {
public:
    Session(const CommandConfig& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

    int run() {
        if (cfg_.command == "gen") return gen();
        if (cfg_.command == "check") return check();
        if (cfg_.command == "solve") return solve();
        if (cfg_.command == "improve") return improve_cmd();
        if (cfg_.command == "coercivity") return coercivity();
        if (cfg_.command == "diag") return diag();
        fail(ErrorCode::validation, "unknown command '" + cfg_.command + "'");
    }

private:
    Instance instance() const {
        if (cfg_.instance_path.empty()) fail(ErrorCode::validation, "--instance is required");
        Instance inst = load_instance_file(cfg_.instance_path);
        if (cfg_.tol) inst = inst.with_tol(*cfg_.tol);
        return inst;
    }

    Contract contract(const Instance& inst) const {
        if (cfg_.contract_path.empty()) fail(ErrorCode::validation, "--contract is required");
        return contract_from_json(inst, parse_document(read_file(cfg_.contract_path), "contract"));
    }

    Menu menu(const Instance& inst, const std::string& text, const char* flag) const {
        if (text.empty()) fail(ErrorCode::validation, std::string(flag) + " is required");
        return Menu::of(inst, parse_items(text, flag));
    }

    void emit(const json& doc) const {
        const std::string text = dump_canonical(doc);
        if (cfg_.output_path.empty()) out_ << text;
        else write_file(cfg_.output_path, text);
    }

    void emit_csv(const std::string& csv, const std::string& suffix) const {
        std::string path = cfg_.csv_path;
        if (path.empty() && !cfg_.output_path.empty()) path = cfg_.output_path + suffix;
        if (path.empty()) {
            err_ << "note: no --out or --csv given, CSV not written\n";
            return;
        }
        write_file(path, csv);
    }

    int gen() {
        if (!cfg_.fixture.empty()) {
            if (cfg_.fixture == "toy-a") emit(instance_to_json(toy_a()));
            else if (cfg_.fixture == "toy-b") emit(instance_to_json(toy_b()));
            else if (cfg_.fixture == "toy-c") emit(instance_to_json(toy_c()));
            else fail(ErrorCode::validation, "--fixture: unknown fixture '" + cfg_.fixture + "'");
            return 0;
        }
        if (!cfg_.family.empty()) {
            FamilyKind kind;
            if (cfg_.family == "quasilinear") kind = FamilyKind::quasilinear;
            else if (cfg_.family == "nonlinear") kind = FamilyKind::nonlinear;
            else if (cfg_.family == "timepath") kind = FamilyKind::timepath;
            else fail(ErrorCode::validation, "--family: unknown family '" + cfg_.family + "'");
            emit(instance_to_json(random_family_instance(cfg_.seed, kind, cfg_.steps).second));
            return 0;
        }
        emit(instance_to_json(random_instance(cfg_.seed, {cfg_.types, cfg_.allocs, parse_variant(cfg_.variant)})));
        return 0;
    }

    int check() {
        const Instance inst = instance();
        const auto report = check_feasible(inst, contract(inst));
        emit(report_to_json(inst, report));
        if (!report.feasible) err_ << "contract is infeasible\n";
        return report.feasible ? 0 : 1;
    }

    int solve() {
        const Instance inst = instance();
        SearchParams p;
        p.max_menu_size = cfg_.max_menu;
        p.restarts = cfg_.restarts;
        p.seed = cfg_.seed;
        p.node_cap = cfg_.node_cap;
        p.threads = cfg_.threads;
        SolveReport r;
        if (cfg_.solver == "brute") r = solve_bruteforce(inst, p);
        else if (cfg_.solver == "menu") r = solve_menu_enum(inst, p);
        else if (cfg_.solver == "local") r = solve_local_search(inst, p);
        else fail(ErrorCode::validation, "--solver: unknown solver '" + cfg_.solver + "'");
        err_ << "solve: " << cfg_.solver << " finished in " << r.stats.wall_ms << " ms\n";
        emit(solve_report_to_json(inst, r, cfg_.solver));
        if (cfg_.emit_plot) emit_csv(plot_csv(inst, r), ".plot.csv");
        return 0;
    }

    int improve_cmd() {
        const Instance inst = instance();
        emit(improvement_to_json(inst, improve(inst, contract(inst))));
        return 0;
    }

    int coercivity() {
        const Instance inst = instance();
        json doc = {{"mask", mask_to_json(admissible_set(inst))}};
        doc["certificate"] = json(nullptr);
        if (!inst.family().is_null()) doc["certificate"] = certificate_to_json(bound_certificate(inst));
        emit(doc);
        return 0;
    }

    std::size_t type_index(const Instance& inst) const {
        auto t = inst.find_type(cfg_.type_id);
        if (!t) fail(ErrorCode::validation, "--type: unknown type '" + cfg_.type_id + "'");
        return *t;
    }

    int diag() {
        const Instance inst = instance();
        const std::string& sub = cfg_.subcommand;
        if (sub == "hausdorff") {
            const Menu a = menu(inst, cfg_.menu, "--menu"), b = menu(inst, cfg_.menu_b, "--menu-b");
            emit({{"a", menu_to_json(a)}, {"b", menu_to_json(b)}, {"distance", hausdorff(inst, a, b)}});
        } else if (sub == "limit") {
            if (cfg_.sequence_path.empty()) fail(ErrorCode::validation, "--sequence is required");
            const json doc = parse_document(read_file(cfg_.sequence_path), "sequence");
            MenuSequence seq;
            for (const auto& m : ::screenline::detail::field(doc, "menus", "sequence"))
                seq.menus.push_back(Menu::of(inst, m.get<std::vector<AllocId>>()));
            for (const auto& c : ::screenline::detail::field(doc, "contracts", "sequence"))
                seq.contracts.push_back(contract_from_json(inst, c));
            const auto lim = extract_limit(inst, seq, cfg_.tail);
            emit({{"menu", menu_to_json(lim.menu)},
                  {"contract", contract_to_json(inst, lim.contract)},
                  {"cost", ext_to_json(contract_cost(inst, lim.contract))}});
        } else if (sub == "singular") {
            const auto rep = singular_set(inst, menu(inst, cfg_.menu, "--menu"));
            emit(singular_to_json(inst, rep));
            emit_csv(singular_csv(inst, rep), ".csv");
        } else if (sub == "penalized") {
            const Menu m = menu(inst, cfg_.menu, "--menu");
            const std::size_t x = type_index(inst);
            emit({{"value", penalized_indirect_utility(inst, m, x, cfg_.budget, cfg_.lambda)},
                  {"budget_indirect_utility", ext_to_json(budget_indirect_utility(inst, m, x, cfg_.budget))},
                  {"threshold", ext_to_json(penalty_threshold(inst, m, x, cfg_.budget))}});
        } else {
            fail(ErrorCode::validation, "diag: unknown analysis '" + sub + "'");
        }
        return 0;
    }

    const CommandConfig& cfg_;
    std::ostream& out_;
    std::ostream& err_;
};

} // namespace detail

inline int run(const CommandConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        return detail::Session(cfg, out, err).run();
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code(e.code());
    } catch (const nlohmann::json::exception& e) {
        err << "SchemaError: " << e.what() << '\n';
        return 1;
    }
}

} // namespace screenline::cli
