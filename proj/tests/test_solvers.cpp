#include "support.hpp"

#include <gtest/gtest.h>

using namespace screenline;

namespace {

Contract contract(std::vector<AllocId> a) { return Contract{std::move(a)}; }

void expect_consistent_report(const Instance& inst, const SolveReport& r) {
    EXPECT_TRUE(check_feasible(inst, r.contract).feasible);
    EXPECT_EQ(r.value, contract_cost(inst, r.contract));
    if (inst.kind() == VariantKind::partial) {
        EXPECT_EQ(r.participation, participation_set(inst, r.contract));
    }
}

} // namespace

TEST(Bruteforce, ToyA) {
    const SolveReport r = solve_bruteforce(toy_a());
    EXPECT_EQ(r.value, ExtReal(-0.5));
    EXPECT_EQ(r.contract, contract({0, 3}));
    EXPECT_EQ(r.status, SolveStatus::exact);
    EXPECT_LE(r.value, toy_a().cost(0));
    expect_consistent_report(toy_a(), r);
}

TEST(Bruteforce, ToyC) {
    const SolveReport r = solve_bruteforce(toy_c());
    EXPECT_EQ(r.value, ExtReal(-0.5));
    EXPECT_EQ(r.value, solve_bruteforce(toy_a()).value);
    expect_consistent_report(toy_c(), r);
}

TEST(Bruteforce, SingleTypeSingleAllocation) {
    json doc = {
        {"types", {{"ids", {"only"}}, {"weights", {1.0}}}},
        {"grid", {{"allocations", {{{"label", "z0"}}}}, {"outside_index", 0}}},
        {"utility", {{"table", {{0.5}}}}},
        {"cost", {{"table", {0.75}}}},
        {"variant", {{"kind", "full"}}},
    };
    const Instance inst = instance_from_json(doc);
    const SolveReport r = solve_bruteforce(inst);
    EXPECT_EQ(r.contract, contract({0}));
    EXPECT_EQ(r.value, ExtReal(0.75));
}

TEST(Bruteforce, MatchesReferenceScan) {
    for (auto kind : {VariantKind::full, VariantKind::partial, VariantKind::budget})
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            const Instance inst = random_instance(seed, {1 + seed % 4, 2 + seed % 6, kind});
            const SolveReport r = solve_bruteforce(inst);
            EXPECT_EQ(r.value.as_double(), oracle::brute_min(inst)) << variant_name(kind) << " " << seed;
            expect_consistent_report(inst, r);
        }
}

TEST(Bruteforce, LexicographicallyFirstOptimum) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const Instance inst = random_instance(seed, {3, 4, VariantKind::full});
        const SolveReport r = solve_bruteforce(inst);
        // Scan in lexicographic order (first point most significant).
        const std::size_t P = inst.num_points(), m = inst.num_allocs();
        std::vector<AllocId> a(P, 0);
        std::optional<Contract> first;
        while (true) {
            const Contract c{a};
            if (oracle::feasible(inst, c) && oracle::cost(inst, c) == r.value.as_double()) {
                first = c;
                break;
            }
            std::size_t k = P;
            while (k > 0 && ++a[k - 1] == m) a[--k] = 0;
            if (k == 0) break;
        }
        ASSERT_TRUE(first.has_value());
        EXPECT_EQ(r.contract, *first) << seed;
    }
}

TEST(Bruteforce, TooLarge) {
    const Instance inst = random_instance(1, {5, 12, VariantKind::full});
    SearchParams p;
    p.node_cap = 1000;
    EXPECT_ERROR_CODE(solve_bruteforce(inst, p), ErrorCode::too_large);
}

TEST(MenuEnum, ToyA) {
    SearchParams p;
    p.max_menu_size = 2;
    const SolveReport r = solve_menu_enum(toy_a(), p);
    EXPECT_EQ(r.value, ExtReal(-0.5));
    EXPECT_EQ(r.menu.items(), (std::vector<AllocId>{0, 3}));
    EXPECT_EQ(r.stats.nodes, 4u); // {0}, {0,2}, {0,3}, {0,2,3}
}

TEST(MenuEnum, ToyBMatchesBruteforce) {
    SearchParams p;
    p.max_menu_size = 4;
    EXPECT_EQ(solve_menu_enum(toy_b(), p).value, solve_bruteforce(toy_b()).value);
}

TEST(MenuEnum, ToyCMenu) {
    const SolveReport r = solve_menu_enum(toy_c());
    EXPECT_EQ(r.value, ExtReal(-0.5));
    EXPECT_EQ(r.menu.items(), std::vector<AllocId>{3});
    EXPECT_EQ(r.participation, std::vector<std::size_t>{1});
}

TEST(MenuEnum, OnlyOutsideAdmissible) {
    json doc = instance_to_json(toy_a());
    doc.erase("family");
    doc["cost"] = {{"table", {0, 1, 1, 1, 1}}};
    const Instance inst = instance_from_json(doc);
    SearchParams p;
    p.max_menu_size = 1;
    EXPECT_EQ(solve_menu_enum(inst, p).contract, constant_contract(inst, 0));
}

TEST(MenuEnum, AgreesWithBruteforce) {
    for (auto kind : {VariantKind::full, VariantKind::partial, VariantKind::budget})
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const Instance inst = random_instance(seed, {1 + seed % 5, 2 + seed % 7, kind});
            const SolveReport e = solve_menu_enum(inst);
            EXPECT_EQ(e.status, SolveStatus::exact);
            EXPECT_EQ(e.value, solve_bruteforce(inst).value) << variant_name(kind) << " " << seed;
            expect_consistent_report(inst, e);
        }
}

TEST(MenuEnum, TooLarge) {
    SearchParams p;
    p.node_cap = 3;
    EXPECT_ERROR_CODE(solve_menu_enum(random_instance(2, {5, 12, VariantKind::full}), p), ErrorCode::too_large);
}

TEST(LocalSearch, ToyA) {
    SearchParams p;
    p.seed = 1;
    p.restarts = 5;
    const SolveReport r = solve_local_search(toy_a(), p);
    EXPECT_EQ(r.value, ExtReal(-0.5));
    EXPECT_EQ(r.status, SolveStatus::heuristic_best);
}

TEST(LocalSearch, NoMoveFixedPoint) {
    // Every other item is dearer than z0, so {z0} admits no improving move.
    json doc = instance_to_json(toy_a());
    doc.erase("family");
    doc["cost"] = {{"table", {0.25, 1, 1, 1, 1}}};
    const Instance inst = instance_from_json(doc);
    SearchParams p;
    p.restarts = 0;
    const SolveReport r = solve_local_search(inst, p);
    EXPECT_EQ(r.contract, constant_contract(inst, 0));
    EXPECT_EQ(r.value, ExtReal(0.25));
    EXPECT_EQ(r.history.size(), 1u);
}

TEST(LocalSearch, NeverBelowExactAndDeterministic) {
    for (auto kind : {VariantKind::full, VariantKind::partial, VariantKind::budget})
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            const Instance inst = random_instance(seed, {4, 9, kind});
            const ExtReal exact = solve_menu_enum(inst).value;
            SearchParams p;
            p.seed = seed;
            const SolveReport a = solve_local_search(inst, p);
            EXPECT_GE(a.value, exact);
            expect_consistent_report(inst, a);
            const SolveReport b = solve_local_search(inst, p);
            EXPECT_EQ(a.contract, b.contract);
            EXPECT_EQ(dump_canonical(solve_report_to_json(inst, a, "local")),
                      dump_canonical(solve_report_to_json(inst, b, "local")));
            for (std::size_t i = 1; i < a.history.size(); ++i)
                EXPECT_LT(contract_cost(inst, a.history[i].second), contract_cost(inst, a.history[i - 1].second));
        }
}

TEST(Solvers, ThreadCountDoesNotChangeReports) {
    for (auto kind : {VariantKind::full, VariantKind::partial, VariantKind::budget})
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Instance inst = random_instance(seed, {4, 8, kind});
            SearchParams one, eight;
            one.threads = 1;
            eight.threads = 8;
            EXPECT_EQ(solve_report_to_json(inst, solve_bruteforce(inst, one), "brute"),
                      solve_report_to_json(inst, solve_bruteforce(inst, eight), "brute"));
            EXPECT_EQ(solve_report_to_json(inst, solve_menu_enum(inst, one), "menu"),
                      solve_report_to_json(inst, solve_menu_enum(inst, eight), "menu"));
            EXPECT_EQ(solve_report_to_json(inst, solve_local_search(inst, one), "local"),
                      solve_report_to_json(inst, solve_local_search(inst, eight), "local"));
        }
}

TEST(Solvers, KRestrictionInvariance) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Instance inst = random_instance(seed, {1 + seed % 3, 2 + seed % 7, VariantKind::full});
        std::vector<AllocId> keep = oracle::k_set(inst);
        if (std::find(keep.begin(), keep.end(), inst.outside()) == keep.end()) keep.push_back(inst.outside());
        std::sort(keep.begin(), keep.end());
        EXPECT_EQ(solve_bruteforce(inst).value, solve_bruteforce(inst.subgrid(keep)).value) << seed;
    }
}

TEST(Solvers, GridMonotonicity) {
    std::mt19937_64 rng(53);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Instance inst = random_instance(seed, {3, 8, VariantKind::full});
        std::vector<AllocId> keep{inst.outside()};
        for (AllocId z = 1; z < inst.num_allocs(); ++z)
            if (rng() % 2) keep.push_back(z);
        EXPECT_LE(solve_bruteforce(inst).value, solve_bruteforce(inst.subgrid(keep)).value);
    }
}

TEST(Solvers, PartialFullConsistency) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const Instance full = oracle::with_zero_outside_cost(random_instance(seed, {1 + seed % 4, 3 + seed % 6, VariantKind::full}));
        const Instance partial = oracle::partial_twin(full);
        EXPECT_EQ(solve_bruteforce(full).value, solve_bruteforce(partial).value) << seed;
    }
}

TEST(Solvers, BudgetSlackReduction) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const Instance budget = oracle::slack_budgets(random_instance(seed, {1 + seed % 5, 3 + seed % 6, VariantKind::budget}));
        const Instance full = oracle::collapse_budgets(budget);
        EXPECT_EQ(solve_bruteforce(budget).value, solve_bruteforce(full).value) << seed;
    }
}

TEST(Solvers, ReportJsonAndPlot) {
    const Instance a = toy_a();
    const SolveReport r = solve_bruteforce(a);
    const json j = solve_report_to_json(a, r, "brute");
    EXPECT_EQ(j["value"], -0.5);
    EXPECT_EQ(j["status"], "Exact");
    EXPECT_FALSE(j["stats"].contains("wall_ms"));
    const std::string csv = plot_csv(a, r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "item,price,q0,uptake");
    EXPECT_NE(csv.find("\n3,2,1,0.5\n"), std::string::npos) << csv;
}
