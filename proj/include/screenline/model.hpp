#pragma once

#include "screenline/errors.hpp"
#include "screenline/expression.hpp"
#include "screenline/ext_real.hpp"
#include "screenline/format.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace screenline {

using AllocId = std::size_t;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kWeightSumTol = 1e-12;

struct TypeSpace {
    std::vector<std::string> ids;
    std::vector<double> weights;
    /// Per-type named parameter vectors read by utility expressions.
    std::vector<TypeParams> params;
};

struct PricedBundle {
    double price = 0.0;
    std::vector<double> attrs;
};

struct AbstractLabel {
    std::string label;
};

using Allocation = std::variant<AbstractLabel, PricedBundle>;

struct AllocationGrid {
    std::vector<Allocation> allocations;
    AllocId outside_index = 0;
    /// Optional metric for abstract payloads (row-major, m x m).
    std::optional<std::vector<std::vector<double>>> distances;

    std::size_t size() const { return allocations.size(); }
    bool priced() const {
        return !allocations.empty() && std::holds_alternative<PricedBundle>(allocations.front());
    }
};

using UtilityTable = std::vector<std::vector<double>>;
using CostTable = std::vector<ExtReal>;

struct UtilityOracle {
    std::variant<Expr, UtilityTable> source;
};

struct CostOracle {
    std::variant<Expr, CostTable> source;
};

struct FullVariant {};

struct PartialVariant {
    std::vector<double> reservation;
};

struct BudgetPoint {
    std::size_t type = 0;
    double budget = 0.0;
    double weight = 0.0;
};

struct BudgetVariant {
    std::vector<BudgetPoint> points;
};

using ModelVariant = std::variant<FullVariant, PartialVariant, BudgetVariant>;

enum class VariantKind { full, partial, budget };

inline const char* variant_name(VariantKind k) {
    switch (k) {
    case VariantKind::full: return "full";
    case VariantKind::partial: return "partial";
    case VariantKind::budget: return "budget";
    }
    return "?";
}

/// Assignment of one grid index to every point of the instance. Points are
/// types for Full/Partial and budget points for Budget, in instance order.
struct Contract {
    std::vector<AllocId> assignment;

    std::size_t size() const { return assignment.size(); }
    AllocId operator[](std::size_t k) const { return assignment[k]; }
    friend bool operator==(const Contract&, const Contract&) = default;
};

/// Validated, immutable problem data. Oracle values are evaluated once at
/// construction; every accessor afterwards is a table lookup.
class Instance {
public:
    static Instance create(TypeSpace types, AllocationGrid grid, UtilityOracle utility, CostOracle cost,
                           ModelVariant variant, double tol = kDefaultTol,
                           nlohmann::json family = nullptr) {
        Instance inst;
        inst.types_ = std::move(types);
        inst.grid_ = std::move(grid);
        inst.utility_oracle_ = std::move(utility);
        inst.cost_oracle_ = std::move(cost);
        inst.variant_ = std::move(variant);
        inst.tol_ = tol;
        inst.family_ = std::move(family);
        inst.validate_shape();
        inst.evaluate_oracles();
        inst.validate_variant();
        return inst;
    }

    const TypeSpace& types() const { return types_; }
    const AllocationGrid& grid() const { return grid_; }
    const UtilityOracle& utility_oracle() const { return utility_oracle_; }
    const CostOracle& cost_oracle() const { return cost_oracle_; }
    const ModelVariant& variant() const { return variant_; }
    const nlohmann::json& family() const { return family_; }
    double tol() const { return tol_; }

    VariantKind kind() const { return static_cast<VariantKind>(variant_.index()); }
    std::size_t num_types() const { return types_.ids.size(); }
    std::size_t num_allocs() const { return grid_.size(); }
    AllocId outside() const { return grid_.outside_index; }

    double utility(std::size_t type, AllocId z) const { return utility_[type * num_allocs() + z]; }
    ExtReal cost(AllocId z) const { return cost_[z]; }

    double price(AllocId z) const { return priced(z).price; }
    const std::vector<double>& attrs(AllocId z) const { return priced(z).attrs; }

    const PricedBundle& priced(AllocId z) const {
        const auto* b = std::get_if<PricedBundle>(&grid_.allocations.at(z));
        if (b == nullptr) fail(ErrorCode::variant, "allocation " + std::to_string(z) + " has no price");
        return *b;
    }

    // Points: types (Full/Partial) or budget points (Budget).
    std::size_t num_points() const {
        if (const auto* b = std::get_if<BudgetVariant>(&variant_)) return b->points.size();
        return num_types();
    }
    std::size_t point_type(std::size_t k) const {
        if (const auto* b = std::get_if<BudgetVariant>(&variant_)) return b->points[k].type;
        return k;
    }
    double point_weight(std::size_t k) const {
        if (const auto* b = std::get_if<BudgetVariant>(&variant_)) return b->points[k].weight;
        return types_.weights[k];
    }
    /// Budget of point k; +inf outside the Budget variant.
    double point_budget(std::size_t k) const {
        if (const auto* b = std::get_if<BudgetVariant>(&variant_)) return b->points[k].budget;
        return std::numeric_limits<double>::infinity();
    }
    std::string point_label(std::size_t k) const {
        if (const auto* b = std::get_if<BudgetVariant>(&variant_))
            return types_.ids[b->points[k].type] + "@" + shortest(b->points[k].budget);
        return types_.ids[k];
    }
    std::optional<std::size_t> find_point(const std::string& label) const {
        for (std::size_t k = 0; k < num_points(); ++k)
            if (point_label(k) == label) return k;
        return std::nullopt;
    }
    std::optional<std::size_t> find_type(const std::string& id) const {
        auto it = std::find(types_.ids.begin(), types_.ids.end(), id);
        if (it == types_.ids.end()) return std::nullopt;
        return static_cast<std::size_t>(it - types_.ids.begin());
    }

    double reservation(std::size_t type) const {
        return std::get<PartialVariant>(variant_).reservation.at(type);
    }
    const BudgetVariant& budget() const {
        const auto* b = std::get_if<BudgetVariant>(&variant_);
        if (b == nullptr) fail(ErrorCode::variant, std::string("expected a budget instance, got ") + variant_name(kind()));
        return *b;
    }
    double min_budget() const {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& p : budget().points) lo = std::min(lo, p.budget);
        return lo;
    }

    /// Weak-inequality participation with the tolerance on the agent side.
    bool participates(std::size_t type, AllocId z) const {
        return utility(type, z) >= reservation(type) - tol_;
    }

    /// Same problem on the sub-grid `keep` (sorted, must contain the outside
    /// option). Oracles are sliced, so every retained value is bit-identical.
    Instance subgrid(std::span<const AllocId> keep) const {
        std::vector<AllocId> idx(keep.begin(), keep.end());
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        auto pos = std::find(idx.begin(), idx.end(), outside());
        if (pos == idx.end()) fail(ErrorCode::validation, "subgrid must retain the outside option");
        AllocationGrid g;
        g.outside_index = static_cast<AllocId>(pos - idx.begin());
        for (AllocId z : idx) g.allocations.push_back(grid_.allocations.at(z));
        if (grid_.distances) {
            std::vector<std::vector<double>> d;
            for (AllocId a : idx) {
                std::vector<double> row;
                for (AllocId b : idx) row.push_back((*grid_.distances)[a][b]);
                d.push_back(std::move(row));
            }
            g.distances = std::move(d);
        }
        UtilityOracle u = utility_oracle_;
        if (auto* t = std::get_if<UtilityTable>(&u.source)) {
            UtilityTable sliced;
            for (const auto& row : *t) {
                std::vector<double> r;
                for (AllocId z : idx) r.push_back(row[z]);
                sliced.push_back(std::move(r));
            }
            *t = std::move(sliced);
        }
        CostOracle c = cost_oracle_;
        if (auto* t = std::get_if<CostTable>(&c.source)) {
            CostTable sliced;
            for (AllocId z : idx) sliced.push_back((*t)[z]);
            *t = std::move(sliced);
        }
        return create(types_, std::move(g), std::move(u), std::move(c), variant_, tol_, family_);
    }

    /// Same data under another model variant (re-validated).
    Instance with_variant(ModelVariant v) const {
        return create(types_, grid_, utility_oracle_, cost_oracle_, std::move(v), tol_, family_);
    }

    Instance with_tol(double tol) const {
        return create(types_, grid_, utility_oracle_, cost_oracle_, variant_, tol, family_);
    }

    /// Copy with every price moved by `delta`; expression oracles are
    /// re-evaluated at the new prices, tables are kept.
    Instance with_prices_shifted(double delta) const {
        AllocationGrid g = grid_;
        for (auto& a : g.allocations) {
            auto* b = std::get_if<PricedBundle>(&a);
            if (b == nullptr) fail(ErrorCode::variant, "price shift needs priced allocations");
            b->price += delta;
        }
        return create(types_, std::move(g), utility_oracle_, cost_oracle_, variant_, tol_, family_);
    }

private:
    Instance() = default;

    void validate_shape() {
        const std::size_t n = types_.ids.size();
        if (n == 0) fail(ErrorCode::validation, "types.ids: at least one type is required");
        if (types_.weights.size() != n)
            fail(ErrorCode::validation, "types.weights: expected " + std::to_string(n) + " entries");
        if (types_.params.empty()) types_.params.resize(n);
        if (types_.params.size() != n) fail(ErrorCode::validation, "types.params: expected one row per type");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (types_.ids[i] == types_.ids[j]) fail(ErrorCode::validation, "types.ids: duplicate id " + types_.ids[i]);
        check_weights(types_.weights, "types.weights");

        const std::size_t m = grid_.size();
        if (m == 0) fail(ErrorCode::validation, "grid.allocations: grid is empty");
        if (grid_.outside_index >= m)
            fail(ErrorCode::validation, "grid.outside_index: " + std::to_string(grid_.outside_index) +
                                            " is not a valid index (grid has " + std::to_string(m) + ")");
        const bool is_priced = grid_.priced();
        std::size_t dim = 0;
        for (std::size_t z = 0; z < m; ++z) {
            const auto* b = std::get_if<PricedBundle>(&grid_.allocations[z]);
            if ((b != nullptr) != is_priced)
                fail(ErrorCode::validation, "grid.allocations[" + std::to_string(z) + "]: mixed payload kinds");
            if (b == nullptr) continue;
            if (z == 0) dim = b->attrs.size();
            if (b->attrs.size() != dim)
                fail(ErrorCode::validation, "grid.allocations[" + std::to_string(z) + "].q: attribute dimension " +
                                                std::to_string(b->attrs.size()) + " differs from " + std::to_string(dim));
            if (!std::isfinite(b->price))
                fail(ErrorCode::validation, "grid.allocations[" + std::to_string(z) + "].p: price must be finite");
        }
        if (grid_.distances) {
            const auto& d = *grid_.distances;
            bool ok = d.size() == m;
            for (const auto& row : d) ok = ok && row.size() == m;
            if (!ok) fail(ErrorCode::validation, "grid.distance: expected an " + std::to_string(m) + "x" + std::to_string(m) + " table");
        }
    }

    void evaluate_oracles() {
        const std::size_t n = num_types(), m = num_allocs();
        utility_.assign(n * m, 0.0);
        cost_.assign(m, ExtReal(0.0));

        if (const auto* e = std::get_if<Expr>(&utility_oracle_.source)) {
            if (!grid_.priced()) fail(ErrorCode::validation, "utility: expressions need priced allocations");
            for (std::size_t x = 0; x < n; ++x)
                for (AllocId z = 0; z < m; ++z) {
                    const auto& b = priced(z);
                    utility_[x * m + z] = e->eval({b.price, b.attrs, &types_.params[x]});
                }
        } else {
            const auto& t = std::get<UtilityTable>(utility_oracle_.source);
            if (t.size() != n) fail(ErrorCode::validation, "utility.table: expected " + std::to_string(n) + " rows");
            for (std::size_t x = 0; x < n; ++x) {
                if (t[x].size() != m)
                    fail(ErrorCode::validation, "utility.table[" + std::to_string(x) + "]: expected " + std::to_string(m) + " entries");
                for (AllocId z = 0; z < m; ++z) utility_[x * m + z] = t[x][z];
            }
        }
        for (std::size_t i = 0; i < utility_.size(); ++i)
            if (!std::isfinite(utility_[i]))
                fail(ErrorCode::validation, "utility: non-finite value for type " + types_.ids[i / m] +
                                                " at allocation " + std::to_string(i % m));

        if (const auto* e = std::get_if<Expr>(&cost_oracle_.source)) {
            if (!grid_.priced()) fail(ErrorCode::validation, "cost: expressions need priced allocations");
            for (AllocId z = 0; z < m; ++z) {
                const auto& b = priced(z);
                double v = e->eval({b.price, b.attrs, nullptr});
                if (std::isnan(v) || v == -HUGE_VAL)
                    fail(ErrorCode::validation, "cost: invalid value at allocation " + std::to_string(z));
                cost_[z] = v == HUGE_VAL ? ExtReal::pos_inf() : ExtReal(v);
            }
        } else {
            const auto& t = std::get<CostTable>(cost_oracle_.source);
            if (t.size() != m) fail(ErrorCode::validation, "cost.table: expected " + std::to_string(m) + " entries");
            for (AllocId z = 0; z < m; ++z) {
                if (t[z].is_neg_inf()) fail(ErrorCode::validation, "cost.table[" + std::to_string(z) + "]: -inf cost");
                cost_[z] = t[z];
            }
        }
        if (!cost_[outside()].is_finite()) fail(ErrorCode::validation, "cost: the outside option must have finite cost");
    }

    void validate_variant() {
        if (const auto* p = std::get_if<PartialVariant>(&variant_)) {
            if (p->reservation.size() != num_types())
                fail(ErrorCode::validation, "variant.reservation: expected " + std::to_string(num_types()) +
                                                " entries, got " + std::to_string(p->reservation.size()));
            for (double r : p->reservation)
                if (!std::isfinite(r)) fail(ErrorCode::validation, "variant.reservation: values must be finite");
        }
        if (const auto* b = std::get_if<BudgetVariant>(&variant_)) {
            if (!grid_.priced()) fail(ErrorCode::validation, "variant: the budget model needs priced allocations");
            if (b->points.empty()) fail(ErrorCode::validation, "variant.points: at least one budget point is required");
            std::vector<double> w;
            for (std::size_t k = 0; k < b->points.size(); ++k) {
                const auto& pt = b->points[k];
                if (pt.type >= num_types())
                    fail(ErrorCode::validation, "variant.points[" + std::to_string(k) + "].type: dangling type");
                if (!std::isfinite(pt.budget))
                    fail(ErrorCode::validation, "variant.points[" + std::to_string(k) + "].budget: must be finite");
                for (std::size_t j = 0; j < k; ++j)
                    if (b->points[j].type == pt.type && b->points[j].budget == pt.budget)
                        fail(ErrorCode::validation, "variant.points[" + std::to_string(k) + "]: duplicate point " + point_label(k));
                w.push_back(pt.weight);
            }
            check_weights(w, "variant.points.weight");
            const double p0 = price(outside());
            if (p0 > min_budget())
                fail(ErrorCode::validation, "variant.points: outside option price " + shortest(p0) +
                                                " exceeds the minimum budget " + shortest(min_budget()));
        }
        if (!(tol_ >= 0.0) || !std::isfinite(tol_)) fail(ErrorCode::validation, "tol: must be a nonnegative real");
    }

    static void check_weights(const std::vector<double>& w, const std::string& field) {
        double sum = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!(w[i] > 0.0) || !std::isfinite(w[i]))
                fail(ErrorCode::validation, field + "[" + std::to_string(i) + "]: weight " + shortest(w[i]) + " is not positive");
            sum += w[i];
        }
        if (std::fabs(sum - 1.0) > kWeightSumTol) fail(ErrorCode::validation, field + ": weights sum to " + shortest(sum));
    }

    TypeSpace types_;
    AllocationGrid grid_;
    UtilityOracle utility_oracle_;
    CostOracle cost_oracle_;
    ModelVariant variant_;
    double tol_ = kDefaultTol;
    nlohmann::json family_;

    std::vector<double> utility_;
    std::vector<ExtReal> cost_;
};

inline void check_shape(const Instance& inst, const Contract& c) {
    if (c.size() != inst.num_points())
        fail(ErrorCode::shape, "contract has " + std::to_string(c.size()) + " entries, instance has " +
                                   std::to_string(inst.num_points()) + " points");
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] >= inst.num_allocs())
            fail(ErrorCode::shape, "contract entry for " + inst.point_label(k) + " is not a grid index");
}

/// Sum that does not depend on term order: finite terms are added in
/// ascending order, any +inf absorbs.
inline ExtReal order_free_sum(std::vector<ExtReal> terms) {
    std::vector<double> finite;
    finite.reserve(terms.size());
    for (const auto& t : terms) {
        if (t.is_pos_inf()) return ExtReal::pos_inf();
        if (t.is_neg_inf()) return ExtReal::neg_inf();
        finite.push_back(t.value());
    }
    std::sort(finite.begin(), finite.end());
    double s = 0.0;
    for (double v : finite) s += v;
    return s;
}

/// Per-point cost contribution before weighting: C(z(x)), or the
/// participation-indicator cost in the Partial model (0 for non-participants).
inline ExtReal point_cost(const Instance& inst, const Contract& c, std::size_t k) {
    if (inst.kind() == VariantKind::partial && !inst.participates(inst.point_type(k), c[k])) return 0.0;
    return inst.cost(c[k]);
}

inline ExtReal contract_cost(const Instance& inst, const Contract& c) {
    check_shape(inst, c);
    std::vector<ExtReal> terms;
    terms.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (inst.kind() == VariantKind::partial && !inst.participates(inst.point_type(k), c[k])) continue;
        terms.push_back(inst.point_weight(k) * inst.cost(c[k]));
    }
    return order_free_sum(std::move(terms));
}

inline Contract constant_contract(const Instance& inst, AllocId z) {
    return Contract{std::vector<AllocId>(inst.num_points(), z)};
}

} // namespace screenline
