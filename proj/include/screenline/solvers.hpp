#pragma once

// Exact and heuristic minimization of the principal's expected cost.
//
// solve_bruteforce enumerates assignments directly. The menu solvers use
// the taxation-principle reduction instead: a menu induces a contract via
// best responses, and menus are drawn from the admissible mask plus z0,
// which the improvement operators show loses nothing.

#include "screenline/coercivity.hpp"
#include "screenline/errors.hpp"
#include "screenline/feasibility.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"
#include "screenline/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace screenline {

enum class SolveStatus { exact, heuristic_best };

struct SearchParams {
    /// Items besides a forced outside option. 0 means "number of points",
    /// which makes menu enumeration exact.
    std::size_t max_menu_size = 0;
    std::size_t restarts = 5;
    std::uint64_t seed = 1;
    bool allow_add = true;
    bool allow_remove = true;
    bool allow_swap = true;
    std::uint64_t node_cap = 10'000'000;
    unsigned threads = 0;
};

struct SolveStats {
    std::uint64_t nodes = 0;
    std::size_t restarts = 0;
    double wall_ms = 0.0;
};

struct SolveReport {
    Contract contract;
    ExtReal value;
    Menu menu;
    std::vector<std::size_t> participation;
    SolveStatus status = SolveStatus::exact;
    SolveStats stats;
    /// Local search only: best-so-far (menu, contract) pairs in order found.
    std::vector<std::pair<Menu, Contract>> history;
};

namespace detail {

/// Menu actually offered by a contract: its range, plus z0 outside the
/// Partial model.
inline Menu offered_menu(const Instance& inst, const Contract& c) {
    return inst.kind() == VariantKind::partial ? Menu::range_of(inst, c) : Menu::with_outside(inst, c);
}

inline SolveReport make_report(const Instance& inst, Contract c, SolveStatus status) {
    SolveReport r;
    r.value = contract_cost(inst, c);
    r.menu = offered_menu(inst, c);
    if (inst.kind() == VariantKind::partial) r.participation = participation_set(inst, c);
    r.contract = std::move(c);
    r.status = status;
    return r;
}

/// Total order used to pick among candidate contracts: value, then size of
/// the offered menu, then the menu lexicographically.
inline bool ranks_before(const Instance& inst, ExtReal va, const Contract& a, ExtReal vb, const Contract& b) {
    if (va != vb) return va < vb;
    const Menu ma = offered_menu(inst, a), mb = offered_menu(inst, b);
    if (ma.size() != mb.size()) return ma.size() < mb.size();
    return ma < mb;
}

class Stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct BruteState {
    const Instance& inst;
    Contract current;
    std::optional<Contract> best;
    ExtReal best_value = ExtReal::pos_inf();
    std::uint64_t nodes = 0;

    void descend(std::size_t k) {
        ++nodes;
        if (k == current.size()) {
            const ExtReal v = contract_cost(inst, current);
            if (!best || v < best_value) {
                best = current;
                best_value = v;
            }
            return;
        }
        for (AllocId z = 0; z < inst.num_allocs(); ++z) {
            current.assignment[k] = z;
            if (consistent(k)) descend(k + 1);
        }
    }

    /// Constraints between point k and the already-assigned points.
    bool consistent(std::size_t k) const {
        if (!own_holds(inst, current[k], k)) return false;
        for (std::size_t j = 0; j < k; ++j)
            if (!ic_holds(inst, current[k], current[j], k) || !ic_holds(inst, current[j], current[k], j)) return false;
        return true;
    }
};

inline std::vector<AllocId> menu_candidates(const Instance& inst, const AdmissibleMask& mask) {
    std::vector<AllocId> c;
    for (AllocId z : mask.members)
        if (inst.cost(z).is_finite()) c.push_back(z);
    if (inst.kind() != VariantKind::partial && !mask.contains(inst.outside())) c.push_back(inst.outside());
    std::sort(c.begin(), c.end());
    return c;
}

inline std::uint64_t binomial_sum(std::size_t n, std::size_t k, std::uint64_t cap) {
    // Number of subsets of an n-set with size 0..k, saturating above cap.
    std::uint64_t total = 0, term = 1;
    for (std::size_t j = 0; j <= k && j <= n; ++j) {
        total += term;
        if (total > cap) return cap + 1;
        term = term * (n - j) / (j + 1);
    }
    return total;
}

} // namespace detail

inline SolveReport solve_bruteforce(const Instance& inst, const SearchParams& params = {}) {
    detail::Stopwatch clock;
    const std::size_t P = inst.num_points(), m = inst.num_allocs();
    double space = 1.0;
    for (std::size_t k = 0; k < P; ++k) space *= static_cast<double>(m);
    if (space > static_cast<double>(params.node_cap))
        fail(ErrorCode::too_large, std::to_string(m) + "^" + std::to_string(P) + " assignments exceed the node cap " +
                                       std::to_string(params.node_cap));

    // Split on the first point's allocation; merging the subtrees in index
    // order with strict improvement keeps the lexicographically first optimum.
    std::vector<detail::BruteState> parts;
    parts.reserve(m);
    for (AllocId z = 0; z < m; ++z) parts.push_back({inst, Contract{std::vector<AllocId>(P, 0)}, {}, ExtReal::pos_inf(), 0});
    parallel_for(m, resolve_threads(params.threads), [&](std::size_t z) {
        auto& s = parts[z];
        s.current.assignment[0] = z;
        if (s.consistent(0)) s.descend(1);
        ++s.nodes;
    });
    std::optional<Contract> best;
    ExtReal best_value = ExtReal::pos_inf();
    std::uint64_t nodes = 1;
    for (auto& s : parts) {
        nodes += s.nodes;
        if (s.best && (!best || s.best_value < best_value)) {
            best = s.best;
            best_value = s.best_value;
        }
    }
    if (!best) fail(ErrorCode::infeasible, "no feasible contract exists on this grid");
    SolveReport r = detail::make_report(inst, std::move(*best), SolveStatus::exact);
    r.stats.nodes = nodes;
    r.stats.wall_ms = clock.elapsed_ms();
    return r;
}

inline SolveReport solve_menu_enum(const Instance& inst, const SearchParams& params = {}) {
    detail::Stopwatch clock;
    const std::size_t k = params.max_menu_size == 0 ? inst.num_points() : params.max_menu_size;
    const AdmissibleMask mask = admissible_set(inst);
    const auto cand = detail::menu_candidates(inst, mask);
    const bool force_outside = inst.kind() != VariantKind::partial;

    std::vector<AllocId> pool;
    for (AllocId z : cand)
        if (!(force_outside && z == inst.outside())) pool.push_back(z);
    // The forced outside option does not use up a slot, so k = n covers the
    // range of every contract.
    const std::size_t free_slots = k;
    if (detail::binomial_sum(pool.size(), free_slots, params.node_cap) > params.node_cap)
        fail(ErrorCode::too_large, "menu enumeration exceeds the node cap " + std::to_string(params.node_cap));

    std::vector<std::vector<AllocId>> menus;
    std::vector<AllocId> chosen;
    auto gen = [&](auto&& self, std::size_t start) -> void {
        if (!chosen.empty() || force_outside) {
            std::vector<AllocId> items = chosen;
            if (force_outside) items.push_back(inst.outside());
            menus.push_back(std::move(items));
        }
        if (chosen.size() == free_slots) return;
        for (std::size_t i = start; i < pool.size(); ++i) {
            chosen.push_back(pool[i]);
            self(self, i + 1);
            chosen.pop_back();
        }
    };
    gen(gen, 0);

    std::vector<Contract> contracts(menus.size());
    std::vector<ExtReal> values(menus.size());
    parallel_for(menus.size(), resolve_threads(params.threads), [&](std::size_t i) {
        contracts[i] = menu_to_contract(inst, Menu::of(inst, menus[i]));
        values[i] = contract_cost(inst, contracts[i]);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < menus.size(); ++i)
        if (detail::ranks_before(inst, values[i], contracts[i], values[best], contracts[best])) best = i;

    const auto status = k >= inst.num_points() ? SolveStatus::exact : SolveStatus::heuristic_best;
    SolveReport r = detail::make_report(inst, contracts[best], status);
    r.stats.nodes = menus.size();
    r.stats.wall_ms = clock.elapsed_ms();
    return r;
}

namespace detail {

struct LocalRun {
    std::vector<std::pair<Menu, Contract>> path;
    ExtReal value = ExtReal::pos_inf();
    std::uint64_t evaluations = 0;
};

inline LocalRun local_descent(const Instance& inst, const SearchParams& params, const std::vector<AllocId>& cand,
                              std::size_t k, std::vector<AllocId> start) {
    const bool force_outside = inst.kind() != VariantKind::partial;
    LocalRun run;
    Menu menu = Menu::of(inst, std::move(start));
    Contract contract = menu_to_contract(inst, menu);
    ExtReal value = contract_cost(inst, contract);
    run.evaluations = 1;
    run.path.emplace_back(menu, contract);

    while (true) {
        std::optional<Menu> best_menu;
        Contract best_contract;
        ExtReal best_value = value;
        auto consider = [&](std::vector<AllocId> items) {
            Menu m = Menu::of(inst, std::move(items));
            Contract c = menu_to_contract(inst, m);
            ExtReal v = contract_cost(inst, c);
            ++run.evaluations;
            if (!best_menu ? v < best_value : ranks_before(inst, v, c, best_value, best_contract)) {
                best_menu = std::move(m);
                best_contract = std::move(c);
                best_value = v;
            }
        };
        const auto& items = menu.items();
        auto removable = [&](AllocId z) { return !(force_outside && z == inst.outside()); };
        if (params.allow_add && items.size() - (force_outside ? 1 : 0) < k)
            for (AllocId z : cand)
                if (!menu.contains(z)) {
                    auto next = items;
                    next.push_back(z);
                    consider(std::move(next));
                }
        if (params.allow_remove && items.size() > 1)
            for (AllocId z : items)
                if (removable(z)) {
                    std::vector<AllocId> next;
                    for (AllocId w : items)
                        if (w != z) next.push_back(w);
                    consider(std::move(next));
                }
        if (params.allow_swap)
            for (AllocId z : items) {
                if (!removable(z)) continue;
                for (AllocId w : cand) {
                    if (menu.contains(w)) continue;
                    auto next = items;
                    std::replace(next.begin(), next.end(), z, w);
                    consider(std::move(next));
                }
            }
        const bool improves = best_menu && best_value.is_finite() &&
                              (!value.is_finite() || best_value.value() < value.value() - inst.tol());
        if (!improves) break;
        menu = std::move(*best_menu);
        contract = std::move(best_contract);
        value = best_value;
        run.path.emplace_back(menu, contract);
    }
    run.value = value;
    return run;
}

} // namespace detail

/// Seeded multi-restart local search over menus (add / remove / swap one
/// item, strict improvement beyond tol). Run 0 starts from {z0}; each
/// restart starts from a random admissible menu of size <= max_menu_size.
inline SolveReport solve_local_search(const Instance& inst, const SearchParams& params = {}) {
    detail::Stopwatch clock;
    const std::size_t k = std::max<std::size_t>(1, params.max_menu_size == 0 ? inst.num_points() : params.max_menu_size);
    std::vector<AllocId> cand;
    try {
        cand = detail::menu_candidates(inst, admissible_set(inst));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::assumption_violated) throw;
    }
    if (std::find(cand.begin(), cand.end(), inst.outside()) == cand.end()) {
        cand.push_back(inst.outside());
        std::sort(cand.begin(), cand.end());
    }
    const bool force_outside = inst.kind() != VariantKind::partial;

    std::vector<std::vector<AllocId>> starts{{inst.outside()}};
    for (std::size_t r = 1; r <= params.restarts; ++r) {
        std::mt19937_64 rng(params.seed * 0x9E3779B97F4A7C15ULL + r);
        std::vector<AllocId> pool;
        for (AllocId z : cand)
            if (!(force_outside && z == inst.outside())) pool.push_back(z);
        std::vector<AllocId> start;
        if (force_outside) start.push_back(inst.outside());
        const std::size_t room = std::min(pool.size(), k);
        const std::size_t lo = force_outside ? 0 : 1;
        const std::size_t take = room < lo ? room : lo + rng() % (room - lo + 1);
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + rng() % (pool.size() - i);
            std::swap(pool[i], pool[j]);
            start.push_back(pool[i]);
        }
        if (start.empty()) start.push_back(inst.outside());
        starts.push_back(std::move(start));
    }

    std::vector<detail::LocalRun> runs(starts.size());
    parallel_for(starts.size(), resolve_threads(params.threads),
                 [&](std::size_t i) { runs[i] = detail::local_descent(inst, params, cand, k, starts[i]); });

    SolveReport r;
    std::optional<std::size_t> best;
    std::uint64_t evals = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        evals += runs[i].evaluations;
        for (const auto& step : runs[i].path) {
            const ExtReal v = contract_cost(inst, step.second);
            if (r.history.empty() || v < contract_cost(inst, r.history.back().second)) r.history.push_back(step);
        }
        const auto& c = runs[i].path.back().second;
        if (!best || detail::ranks_before(inst, runs[i].value, c, runs[*best].value, runs[*best].path.back().second))
            best = i;
    }
    auto history = std::move(r.history);
    r = detail::make_report(inst, runs[*best].path.back().second, SolveStatus::heuristic_best);
    r.history = std::move(history);
    r.stats.nodes = evals;
    r.stats.restarts = params.restarts;
    r.stats.wall_ms = clock.elapsed_ms();
    return r;
}

inline const char* status_name(SolveStatus s) { return s == SolveStatus::exact ? "Exact" : "HeuristicBest"; }

/// Deterministic report document; wall time is deliberately left out.
inline json solve_report_to_json(const Instance& inst, const SolveReport& r, const std::string& solver) {
    json j = {{"solver", solver},
              {"status", status_name(r.status)},
              {"value", ext_to_json(r.value)},
              {"contract", contract_to_json(inst, r.contract)},
              {"menu", menu_to_json(r.menu)},
              {"stats", {{"nodes", r.stats.nodes}, {"restarts", r.stats.restarts}}}};
    if (inst.kind() == VariantKind::partial) {
        json part = json::array();
        for (auto x : r.participation) part.push_back(inst.types().ids[x]);
        j["participation"] = part;
    }
    return j;
}

/// Plot rows: menu item, price, attributes, uptake weight.
inline std::string plot_csv(const Instance& inst, const SolveReport& r) {
    std::ostringstream out;
    const bool priced = inst.grid().priced();
    const std::size_t d = priced ? inst.attrs(0).size() : 0;
    out << "item,price";
    for (std::size_t k = 0; k < d; ++k) out << ",q" << k;
    out << ",uptake\n";
    for (AllocId z : r.menu) {
        std::vector<ExtReal> mass;
        for (std::size_t k = 0; k < r.contract.size(); ++k)
            if (r.contract[k] == z) mass.push_back(inst.point_weight(k));
        out << z << ',' << (priced ? fixed17(inst.price(z)) : std::string());
        for (std::size_t k = 0; k < d; ++k) out << ',' << fixed17(inst.attrs(z)[k]);
        out << ',' << fixed17(order_free_sum(mass).value()) << '\n';
    }
    return out.str();
}

} // namespace screenline
