#pragma once

// Individual rationality, (budget-constrained) incentive compatibility,
// indirect utilities and the deterministic best-response selection.
//
// Selection rule used everywhere a maximizer is picked: highest utility,
// then lower principal cost, then lower grid index. Affordability p <= y is
// an exact comparison; IR/IC comparisons allow `tol` on the non-strict side.

#include "screenline/errors.hpp"
#include "screenline/ext_real.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace screenline {

/// Nonempty sorted set of grid indices offered by the principal.
class Menu {
public:
    Menu() = default;

    static Menu of(const Instance& inst, std::vector<AllocId> items) {
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        if (items.empty()) fail(ErrorCode::empty_menu, "menu has no items");
        for (AllocId z : items)
            if (z >= inst.num_allocs())
                fail(ErrorCode::validation, "menu item " + std::to_string(z) + " is not a grid index");
        Menu m;
        m.items_ = std::move(items);
        return m;
    }

    /// {z0} together with the range of the contract.
    static Menu with_outside(const Instance& inst, const Contract& c) {
        std::vector<AllocId> items(c.assignment);
        items.push_back(inst.outside());
        return of(inst, std::move(items));
    }

    static Menu range_of(const Instance& inst, const Contract& c) { return of(inst, c.assignment); }

    const std::vector<AllocId>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool contains(AllocId z) const { return std::binary_search(items_.begin(), items_.end(), z); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    friend bool operator==(const Menu&, const Menu&) = default;
    friend auto operator<=>(const Menu& a, const Menu& b) { return a.items_ <=> b.items_; }

private:
    std::vector<AllocId> items_;
};

inline json menu_to_json(const Menu& m) { return json(m.items()); }

namespace detail {

inline void require_items(const std::vector<AllocId>& items) {
    if (items.empty()) fail(ErrorCode::empty_menu, "menu has no items");
}

/// True when `a` is preferred to the incumbent `b` by `type` under the
/// selection rule (utility, then cost, then index).
inline bool better_choice(const Instance& inst, std::size_t type, AllocId a, AllocId b) {
    const double ua = inst.utility(type, a), ub = inst.utility(type, b);
    if (ua != ub) return ua > ub;
    const ExtReal ca = inst.cost(a), cb = inst.cost(b);
    if (ca != cb) return ca < cb;
    return a < b;
}

} // namespace detail

/// Selection over an arbitrary candidate list, restricted to items priced at
/// most `budget` (pass +inf for no restriction).
template <typename Range>
std::optional<AllocId> select_best(const Instance& inst, std::size_t type, const Range& candidates,
                                   double budget = HUGE_VAL) {
    std::optional<AllocId> best;
    for (AllocId z : candidates) {
        if (budget != HUGE_VAL && inst.price(z) > budget) continue;
        if (!best || detail::better_choice(inst, type, z, *best)) best = z;
    }
    return best;
}

inline double indirect_utility(const Instance& inst, const Menu& menu, std::size_t type) {
    detail::require_items(menu.items());
    double best = -HUGE_VAL;
    for (AllocId z : menu) best = std::max(best, inst.utility(type, z));
    return best;
}

inline AllocId best_response(const Instance& inst, const Menu& menu, std::size_t type) {
    detail::require_items(menu.items());
    return *select_best(inst, type, menu.items());
}

/// Max utility over affordable items (price <= budget, exact), or -inf.
inline ExtReal budget_indirect_utility(const Instance& inst, const Menu& menu, std::size_t type, double budget) {
    inst.budget();
    detail::require_items(menu.items());
    ExtReal best = ExtReal::neg_inf();
    for (AllocId z : menu)
        if (inst.price(z) <= budget) best = std::max(best, ExtReal(inst.utility(type, z)));
    return best;
}

/// Taxation-principle reduction: every point takes its best response to the
/// menu (among affordable items in the Budget model).
inline Contract menu_to_contract(const Instance& inst, const Menu& menu) {
    detail::require_items(menu.items());
    Contract c{std::vector<AllocId>(inst.num_points(), 0)};
    const bool budgeted = inst.kind() == VariantKind::budget;
    for (std::size_t k = 0; k < inst.num_points(); ++k) {
        auto z = select_best(inst, inst.point_type(k), menu.items(), budgeted ? inst.point_budget(k) : HUGE_VAL);
        if (!z) fail(ErrorCode::no_affordable_item, "no menu item is affordable at " + inst.point_label(k));
        c.assignment[k] = *z;
    }
    return c;
}

struct IrViolation {
    std::size_t point;
    double deficit;
};

struct IcViolation {
    std::size_t point;
    std::size_t other;
    double deficit;
};

struct BudgetViolation {
    std::size_t point;
    double price;
    double budget;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<IrViolation> ir_violations;
    std::vector<IcViolation> ic_violations;
    std::vector<BudgetViolation> budget_violations;
};

namespace detail {

/// IC of point k against the allocation of point j (variant-aware).
inline bool ic_holds(const Instance& inst, AllocId own, AllocId other, std::size_t k) {
    const std::size_t x = inst.point_type(k);
    if (inst.kind() == VariantKind::budget && !(inst.price(other) <= inst.point_budget(k))) return true;
    return inst.utility(x, own) >= inst.utility(x, other) - inst.tol();
}

/// IR and budget constraint of point k on its own allocation.
inline bool own_holds(const Instance& inst, AllocId own, std::size_t k) {
    switch (inst.kind()) {
    case VariantKind::partial: return true;
    case VariantKind::budget:
        if (!(inst.price(own) <= inst.point_budget(k))) return false;
        [[fallthrough]];
    case VariantKind::full: {
        const std::size_t x = inst.point_type(k);
        return inst.utility(x, own) >= inst.utility(x, inst.outside()) - inst.tol();
    }
    }
    return true;
}

} // namespace detail

inline FeasibilityReport check_feasible(const Instance& inst, const Contract& c) {
    check_shape(inst, c);
    FeasibilityReport r;
    const std::size_t n = inst.num_points();
    const double tol = inst.tol();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t x = inst.point_type(k);
        if (inst.kind() == VariantKind::budget && !(inst.price(c[k]) <= inst.point_budget(k)))
            r.budget_violations.push_back({k, inst.price(c[k]), inst.point_budget(k)});
        if (inst.kind() != VariantKind::partial) {
            const double own = inst.utility(x, c[k]), out = inst.utility(x, inst.outside());
            if (own < out - tol) r.ir_violations.push_back({k, out - own});
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k || detail::ic_holds(inst, c[k], c[j], k)) continue;
            const std::size_t x = inst.point_type(k);
            r.ic_violations.push_back({k, j, inst.utility(x, c[j]) - inst.utility(x, c[k])});
        }
    r.feasible = r.ir_violations.empty() && r.ic_violations.empty() && r.budget_violations.empty();
    return r;
}

inline bool is_feasible(const Instance& inst, const Contract& c) { return check_feasible(inst, c).feasible; }

inline json report_to_json(const Instance& inst, const FeasibilityReport& r) {
    json ir = json::array(), ic = json::array(), bud = json::array();
    for (const auto& v : r.ir_violations) ir.push_back({{"point", inst.point_label(v.point)}, {"deficit", v.deficit}});
    for (const auto& v : r.ic_violations)
        ic.push_back({{"point", inst.point_label(v.point)}, {"other", inst.point_label(v.other)}, {"deficit", v.deficit}});
    for (const auto& v : r.budget_violations)
        bud.push_back({{"point", inst.point_label(v.point)}, {"price", v.price}, {"budget", v.budget}});
    return {{"feasible", r.feasible}, {"ir_violations", ir}, {"ic_violations", ic}, {"budget_violations", bud}};
}

/// Types whose assigned utility meets their reservation utility (Partial).
inline std::vector<std::size_t> participation_set(const Instance& inst, const Contract& c) {
    if (inst.kind() != VariantKind::partial)
        fail(ErrorCode::variant, std::string("participation needs a partial instance, got ") + variant_name(inst.kind()));
    check_shape(inst, c);
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < inst.num_types(); ++x)
        if (inst.participates(x, c[x])) out.push_back(x);
    return out;
}

} // namespace screenline
