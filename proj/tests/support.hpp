#pragma once

// Reference computations for the tests. Everything here is written from the
// model definitions directly and does not call the library's feasibility,
// cost or solver code.

#include "screenline/screenline.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using namespace screenline;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double cost_of(const Instance& inst, AllocId z) { return inst.cost(z).as_double(); }

/// Weighted cost summed in point order. Only used on instances whose
/// weights and costs are dyadic, where any summation order is exact.
inline double cost(const Instance& inst, const Contract& c) {
    double total = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const std::size_t x = inst.point_type(k);
        if (inst.kind() == VariantKind::partial && inst.utility(x, c[k]) < inst.reservation(x) - inst.tol()) continue;
        const double ck = cost_of(inst, c[k]);
        if (std::isinf(ck)) return kInf;
        total += inst.point_weight(k) * ck;
    }
    return total;
}

inline bool feasible(const Instance& inst, const Contract& c) {
    const double tol = inst.tol();
    const std::size_t P = c.size();
    for (std::size_t k = 0; k < P; ++k) {
        const std::size_t x = inst.point_type(k);
        const double own = inst.utility(x, c[k]);
        if (inst.kind() == VariantKind::budget) {
            const double y = inst.point_budget(k);
            if (inst.price(c[k]) > y) return false;
            if (own < inst.utility(x, inst.outside()) - tol) return false;
            for (std::size_t j = 0; j < P; ++j)
                if (inst.price(c[j]) <= y && own < inst.utility(x, c[j]) - tol) return false;
        } else {
            if (inst.kind() == VariantKind::full && own < inst.utility(x, inst.outside()) - tol) return false;
            for (std::size_t j = 0; j < P; ++j)
                if (own < inst.utility(x, c[j]) - tol) return false;
        }
    }
    return true;
}

/// Minimum over every assignment of the feasible contracts' costs.
inline double brute_min(const Instance& inst) {
    const std::size_t P = inst.num_points(), m = inst.num_allocs();
    Contract c{std::vector<AllocId>(P, 0)};
    double best = kInf;
    while (true) {
        if (feasible(inst, c)) best = std::min(best, cost(inst, c));
        std::size_t k = 0;
        while (k < P && ++c.assignment[k] == m) c.assignment[k++] = 0;
        if (k == P) break;
    }
    return best;
}

inline std::vector<AllocId> k_set(const Instance& inst) {
    std::vector<AllocId> out;
    const double c0 = cost_of(inst, inst.outside());
    for (AllocId z = 0; z < inst.num_allocs(); ++z) {
        if (!(cost_of(inst, z) <= c0 + inst.tol())) continue;
        for (std::size_t x = 0; x < inst.num_types(); ++x)
            if (inst.utility(x, z) >= inst.utility(x, inst.outside()) - inst.tol()) {
                out.push_back(z);
                break;
            }
    }
    return out;
}

/// Euclidean distance on (p, q).
inline double dist(const Instance& inst, AllocId a, AllocId b) {
    double s = (inst.price(a) - inst.price(b)) * (inst.price(a) - inst.price(b));
    for (std::size_t i = 0; i < inst.attrs(a).size(); ++i) {
        const double d = inst.attrs(a)[i] - inst.attrs(b)[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Random menu over [0, m) of size 1..max_size, optionally forced to hold z0.
inline std::vector<AllocId> random_items(std::mt19937_64& rng, const Instance& inst, std::size_t max_size,
                                         bool with_outside) {
    std::vector<AllocId> items;
    const std::size_t size = 1 + rng() % max_size;
    for (std::size_t i = 0; i < size; ++i) items.push_back(rng() % inst.num_allocs());
    if (with_outside) items.push_back(inst.outside());
    return items;
}

/// Feasible contract drawn from a random menu (finite-cost items only).
inline Contract random_feasible(std::mt19937_64& rng, const Instance& inst) {
    std::vector<AllocId> finite;
    for (AllocId z = 0; z < inst.num_allocs(); ++z)
        if (inst.cost(z).is_finite()) finite.push_back(z);
    std::vector<AllocId> items;
    const std::size_t size = 1 + rng() % std::min<std::size_t>(4, finite.size());
    for (std::size_t i = 0; i < size; ++i) items.push_back(finite[rng() % finite.size()]);
    if (inst.kind() != VariantKind::partial) items.push_back(inst.outside());
    return menu_to_contract(inst, Menu::of(inst, items));
}


/// Partial copy of a Full instance with C(z0) = 0 and u0 = U(., z0).
inline Instance partial_twin(const Instance& full) {
    json doc = instance_to_json(full);
    if (doc["cost"].contains("table")) doc["cost"]["table"][full.outside()] = 0.0;
    std::vector<double> u0;
    for (std::size_t x = 0; x < full.num_types(); ++x) u0.push_back(full.utility(x, full.outside()));
    doc["variant"] = {{"kind", "partial"}, {"reservation", u0}};
    return instance_from_json(doc);
}

inline Instance with_zero_outside_cost(const Instance& full) {
    json doc = instance_to_json(full);
    doc["cost"]["table"][full.outside()] = 0.0;
    return instance_from_json(doc);
}

/// Budget instance with every budget raised to at least the largest price.
inline Instance slack_budgets(const Instance& inst) {
    json doc = instance_to_json(inst);
    double top = 0.0;
    for (AllocId z = 0; z < inst.num_allocs(); ++z) top = std::max(top, inst.price(z));
    // Distinct points must stay distinct.
    double bump = 0.0;
    for (auto& p : doc["variant"]["points"]) p["budget"] = top + (bump += 0.125);
    return instance_from_json(doc);
}

/// Full instance whose types carry the summed budget-point weights.
inline Instance collapse_budgets(const Instance& inst) {
    json doc = instance_to_json(inst);
    std::vector<double> w(inst.num_types(), 0.0);
    for (std::size_t k = 0; k < inst.num_points(); ++k) w[inst.point_type(k)] += inst.point_weight(k);
    json ids = json::array(), weights = json::array(), table = json::array();
    for (std::size_t x = 0; x < inst.num_types(); ++x) {
        if (w[x] == 0.0) continue;
        ids.push_back(inst.types().ids[x]);
        weights.push_back(w[x]);
        table.push_back(doc["utility"]["table"][x]);
    }
    doc["types"] = {{"ids", ids}, {"weights", weights}};
    doc["utility"]["table"] = table;
    doc["variant"] = {{"kind", "full"}};
    return instance_from_json(doc);
}

} // namespace oracle

#define EXPECT_ERROR_CODE(stmt, ecode)                                                                     \
    do {                                                                                                   \
        try {                                                                                              \
            stmt;                                                                                          \
            ADD_FAILURE() << "expected " << ::screenline::error_name(ecode);                               \
        } catch (const ::screenline::Error& e_) {                                                         \
            EXPECT_EQ(e_.code(), ecode) << e_.what();                                                      \
        }                                                                                                  \
    } while (0)
