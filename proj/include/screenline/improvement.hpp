#pragma once

// Contract-improvement operators: map a feasible (Partial: incentive
// compatible) contract to one valued in the admissible mask whose cost is no
// worse at every point.
//
// Common scheme: offer A = {z0} u range(z) restricted to the mask and let
// each point take its best response, except that a point keeps z(x) when
// that allocation is already cheap (cost <= C(z0), or <= 0 with
// participation in the Partial model). The override runs before the
// selection rule, which makes the pointwise dominance exact and the
// operator idempotent.

#include "screenline/coercivity.hpp"
#include "screenline/errors.hpp"
#include "screenline/feasibility.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace screenline {

struct ImprovementTrace {
    std::vector<ExtReal> input_cost;
    std::vector<ExtReal> output_cost;
    std::vector<std::size_t> kept;
    /// A intersected with the mask; {z0} or {witness} on the constant branch.
    std::vector<AllocId> menu_used;
};

struct Improvement {
    Contract contract;
    ImprovementTrace trace;
};

namespace detail {

inline void require_kind(const Instance& inst, VariantKind k) {
    if (inst.kind() != k)
        fail(ErrorCode::variant, std::string("expected a ") + variant_name(k) + " instance, got " + variant_name(inst.kind()));
}

inline void require_feasible(const Instance& inst, const Contract& c) {
    const auto r = check_feasible(inst, c);
    if (r.feasible) return;
    std::string where;
    if (!r.budget_violations.empty()) where = "budget constraint at " + inst.point_label(r.budget_violations.front().point);
    else if (!r.ir_violations.empty()) where = "participation at " + inst.point_label(r.ir_violations.front().point);
    else where = "incentive compatibility of " + inst.point_label(r.ic_violations.front().point) + " against " +
                 inst.point_label(r.ic_violations.front().other);
    fail(ErrorCode::infeasible_input, "input contract violates " + where);
}

inline std::vector<AllocId> offered(const Instance& inst, const Contract& c, const AdmissibleMask& mask, bool add_outside) {
    std::vector<AllocId> a(c.assignment);
    if (add_outside) a.push_back(inst.outside());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::vector<AllocId> out;
    for (AllocId z : a)
        if (mask.contains(z)) out.push_back(z);
    return out;
}

inline Improvement finish(const Instance& inst, const Contract& in, Contract out, std::vector<std::size_t> kept,
                          std::vector<AllocId> menu_used) {
    Improvement r{std::move(out), {}};
    for (std::size_t k = 0; k < in.size(); ++k) {
        r.trace.input_cost.push_back(point_cost(inst, in, k));
        r.trace.output_cost.push_back(point_cost(inst, r.contract, k));
    }
    r.trace.kept = std::move(kept);
    r.trace.menu_used = std::move(menu_used);
    return r;
}

/// Shared body of the Full and Budget operators.
inline Improvement improve_with_outside(const Instance& inst, const Contract& z) {
    const double c0 = inst.cost(inst.outside()).value();
    const double tol = inst.tol();
    bool any_cheap = false;
    for (std::size_t k = 0; k < z.size(); ++k) any_cheap = any_cheap || cost_at_most(inst.cost(z[k]), c0, tol);
    if (!any_cheap) return finish(inst, z, constant_contract(inst, inst.outside()), {}, {inst.outside()});

    const AdmissibleMask mask = admissible_set(inst);
    const auto menu = offered(inst, z, mask, true);
    Contract out = z;
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (cost_at_most(inst.cost(z[k]), c0, tol)) {
            kept.push_back(k);
            continue;
        }
        auto best = select_best(inst, inst.point_type(k), menu, inst.point_budget(k));
        // z0 is in the mask and affordable everywhere, so a choice exists.
        out.assignment[k] = *best;
    }
    return finish(inst, z, std::move(out), std::move(kept), menu);
}

} // namespace detail

inline Improvement improve_full(const Instance& inst, const Contract& z) {
    detail::require_kind(inst, VariantKind::full);
    check_shape(inst, z);
    detail::require_feasible(inst, z);
    return detail::improve_with_outside(inst, z);
}

inline Improvement improve_budget(const Instance& inst, const Contract& z) {
    detail::require_kind(inst, VariantKind::budget);
    check_shape(inst, z);
    detail::require_feasible(inst, z);
    return detail::improve_with_outside(inst, z);
}

inline Improvement improve_partial(const Instance& inst, const Contract& z) {
    detail::require_kind(inst, VariantKind::partial);
    check_shape(inst, z);
    detail::require_feasible(inst, z);
    const AdmissibleMask mask = admissible_set(inst);
    const auto menu = detail::offered(inst, z, mask, false);
    if (menu.empty()) return detail::finish(inst, z, constant_contract(inst, *mask.witness), {}, {*mask.witness});

    Contract out = z;
    std::vector<std::size_t> kept;
    for (std::size_t x = 0; x < z.size(); ++x) {
        if (inst.participates(x, z[x]) && detail::cost_at_most(inst.cost(z[x]), 0.0, inst.tol())) {
            kept.push_back(x);
            continue;
        }
        out.assignment[x] = *select_best(inst, x, menu);
    }
    return detail::finish(inst, z, std::move(out), std::move(kept), menu);
}

/// Dispatch on the instance's variant.
inline Improvement improve(const Instance& inst, const Contract& z) {
    switch (inst.kind()) {
    case VariantKind::full: return improve_full(inst, z);
    case VariantKind::partial: return improve_partial(inst, z);
    case VariantKind::budget: return improve_budget(inst, z);
    }
    return improve_full(inst, z);
}

inline json improvement_to_json(const Instance& inst, const Improvement& r) {
    json in = json::object(), out = json::object();
    for (std::size_t k = 0; k < r.trace.input_cost.size(); ++k) {
        in[inst.point_label(k)] = ext_to_json(r.trace.input_cost[k]);
        out[inst.point_label(k)] = ext_to_json(r.trace.output_cost[k]);
    }
    json kept = json::array();
    for (auto k : r.trace.kept) kept.push_back(inst.point_label(k));
    return {{"contract", contract_to_json(inst, r.contract)},
            {"trace", {{"input_cost", in}, {"output_cost", out}, {"kept", kept}, {"menu_used", r.trace.menu_used}}}};
}

} // namespace screenline
