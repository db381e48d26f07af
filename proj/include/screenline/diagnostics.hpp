#pragma once

// Finite-grid versions of the devices used in the existence arguments:
// Hausdorff distance between menus, limits of menu/contract sequences, the
// budget singular set, and the penalized indirect utility.

#include "screenline/errors.hpp"
#include "screenline/feasibility.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace screenline {

/// Euclidean distance on (p, q) for priced grids, else the grid's table.
inline double allocation_distance(const Instance& inst, AllocId a, AllocId b) {
    if (inst.grid().priced()) {
        const double dp = inst.price(a) - inst.price(b);
        double s = dp * dp;
        const auto& qa = inst.attrs(a);
        const auto& qb = inst.attrs(b);
        for (std::size_t k = 0; k < qa.size(); ++k) s += (qa[k] - qb[k]) * (qa[k] - qb[k]);
        return std::sqrt(s);
    }
    if (!inst.grid().distances) fail(ErrorCode::no_metric, "abstract allocations carry no distance table");
    return (*inst.grid().distances)[a][b];
}

inline double hausdorff(const Instance& inst, const Menu& a, const Menu& b) {
    if (a.size() == 0 || b.size() == 0) fail(ErrorCode::empty_menu, "hausdorff needs nonempty menus");
    auto one_sided = [&](const Menu& from, const Menu& to) {
        double worst = 0.0;
        for (AllocId t : to) {
            double nearest = HUGE_VAL;
            for (AllocId f : from) nearest = std::min(nearest, allocation_distance(inst, f, t));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

struct MenuSequence {
    std::vector<Menu> menus;
    std::vector<Contract> contracts;
};

struct LimitResult {
    Menu menu;
    Contract contract;
};

/// Limit menu: items present in every menu of the tail (the last
/// ceil(tail_fraction * len) entries). Limit contract: per point, among the
/// items that recur in the tail (assigned at least twice) together with the
/// final assignment, the one of least cost (participation-weighted in the
/// Partial model), ties to the lower index.
inline LimitResult extract_limit(const Instance& inst, const MenuSequence& seq, double tail_fraction) {
    const std::size_t len = seq.menus.size();
    if (len < 2) fail(ErrorCode::validation, "sequence must have at least two menus");
    if (seq.contracts.size() != len) fail(ErrorCode::validation, "sequence needs one contract per menu");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) fail(ErrorCode::validation, "tail_fraction must lie in (0, 1]");
    for (const auto& c : seq.contracts) check_shape(inst, c);
    const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(len))));
    const std::size_t first = len - std::min(tail, len);

    std::vector<AllocId> common = seq.menus[first].items();
    for (std::size_t i = first + 1; i < len; ++i) {
        std::vector<AllocId> next;
        for (AllocId z : common)
            if (seq.menus[i].contains(z)) next.push_back(z);
        common = std::move(next);
    }
    if (common.empty()) fail(ErrorCode::empty_tail, "no item is common to every menu in the tail");

    Contract limit{std::vector<AllocId>(inst.num_points(), 0)};
    for (std::size_t k = 0; k < inst.num_points(); ++k) {
        std::map<AllocId, std::size_t> count;
        for (std::size_t i = first; i < len; ++i) ++count[seq.contracts[i][k]];
        const std::size_t x = inst.point_type(k);
        auto cost_at = [&](AllocId z) {
            return inst.kind() == VariantKind::partial && !inst.participates(x, z) ? ExtReal(0.0) : inst.cost(z);
        };
        AllocId pick = seq.contracts[len - 1][k];
        for (const auto& [z, n] : count) {
            if (n < 2) continue;
            if (cost_at(z) < cost_at(pick) || (cost_at(z) == cost_at(pick) && z < pick)) pick = z;
        }
        limit.assignment[k] = pick;
    }
    return {Menu::of(inst, common), std::move(limit)};
}

struct Jump {
    std::size_t point;
    ExtReal v_star;
    ExtReal v_minus;
    bool singular;
};

struct SingularReport {
    std::vector<std::size_t> singular_points;
    double theta_mass = 0.0;
    /// Part of theta_mass sitting on the lowest budget, where the left
    /// limit would otherwise be defined as v* itself.
    double floor_mass = 0.0;
    std::vector<Jump> jumps;
};

/// v* at each budget point against the strict left limit v*_- (items priced
/// strictly below the budget); a point is singular when v* > v*_- + tol.
inline SingularReport singular_set(const Instance& inst, const Menu& menu) {
    const auto& bv = inst.budget();
    if (!menu.contains(inst.outside())) fail(ErrorCode::validation, "singular set needs the outside option in the menu");
    const double floor = inst.min_budget();
    SingularReport r;
    for (std::size_t k = 0; k < bv.points.size(); ++k) {
        const auto& pt = bv.points[k];
        const ExtReal v_star = budget_indirect_utility(inst, menu, pt.type, pt.budget);
        ExtReal v_minus = ExtReal::neg_inf();
        for (AllocId z : menu)
            if (inst.price(z) < pt.budget) v_minus = std::max(v_minus, ExtReal(inst.utility(pt.type, z)));
        const bool singular = v_minus.is_neg_inf() ? v_star.is_finite() : v_star.value() > v_minus.value() + inst.tol();
        r.jumps.push_back({k, v_star, v_minus, singular});
        if (!singular) continue;
        r.singular_points.push_back(k);
        r.theta_mass += pt.weight;
        if (pt.budget == floor) r.floor_mass += pt.weight;
    }
    return r;
}

inline json singular_to_json(const Instance& inst, const SingularReport& r) {
    json pts = json::array(), jumps = json::array();
    for (auto k : r.singular_points) pts.push_back(inst.point_label(k));
    for (const auto& j : r.jumps)
        jumps.push_back({{"point", inst.point_label(j.point)},
                         {"v_star", ext_to_json(j.v_star)},
                         {"v_minus", ext_to_json(j.v_minus)},
                         {"singular", j.singular}});
    return {{"singular_points", pts}, {"theta_mass", r.theta_mass}, {"floor_mass", r.floor_mass}, {"jumps", jumps}};
}

inline std::string singular_csv(const Instance& inst, const SingularReport& r) {
    std::ostringstream out;
    out << "type,budget,v_star,v_minus,singular\n";
    for (const auto& j : r.jumps) {
        const auto& pt = inst.budget().points[j.point];
        out << inst.types().ids[pt.type] << ',' << fixed17(pt.budget) << ',' << to_string(j.v_star) << ','
            << to_string(j.v_minus) << ',' << (j.singular ? 1 : 0) << '\n';
    }
    return out.str();
}

/// max over the menu of U(x, z) - lambda (p_z - y)_+.
inline double penalized_indirect_utility(const Instance& inst, const Menu& menu, std::size_t type, double budget,
                                         double lambda) {
    inst.budget();
    if (menu.size() == 0) fail(ErrorCode::empty_menu, "menu has no items");
    if (!(lambda >= 0.0)) fail(ErrorCode::validation, "lambda must be nonnegative");
    double best = -HUGE_VAL;
    for (AllocId z : menu) {
        const double over = std::max(inst.price(z) - budget, 0.0);
        best = std::max(best, inst.utility(type, z) - lambda * over);
    }
    return best;
}

/// Smallest lambda from which the penalized utility equals the budget
/// indirect utility: max over unaffordable items of (U - v)/(p - y), or 0,
/// raised by a few ulps where the division rounds down. +inf when nothing
/// is affordable.
inline ExtReal penalty_threshold(const Instance& inst, const Menu& menu, std::size_t type, double budget) {
    const ExtReal v = budget_indirect_utility(inst, menu, type, budget);
    if (!v.is_finite()) return ExtReal::pos_inf();
    double t = 0.0;
    for (AllocId z : menu) {
        const double over = inst.price(z) - budget;
        if (over > 0.0) t = std::max(t, (inst.utility(type, z) - v.value()) / over);
    }
    while (penalized_indirect_utility(inst, menu, type, budget, t) > v.value()) t = std::nextafter(t, HUGE_VAL);
    return t;
}

} // namespace screenline
