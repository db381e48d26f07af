#pragma once

// Closed-form model families (quasilinear, nonlinear price response,
// time-path allocations), the TOY fixtures, and seeded random instances.

#include "screenline/errors.hpp"
#include "screenline/expression.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace screenline {

/// U(x,(p,q)) = b_x . q - p,  C(p,q) = a ||q||^e - p.
struct QuasilinearParams {
    std::vector<std::vector<double>> b;
    std::vector<double> weights; // empty: uniform
    double lip_b = 0.0;
    double cost_coefficient = 1.0;
    double cost_exponent = 2.0;
    double p0 = 0.0;
    std::vector<double> q0;

    std::size_t dim() const { return q0.size(); }
};

/// U(x,(p,q)) = b_x . q - p - gamma * max(p - p0, 0)^2, so dU/dp <= -1.
struct NonlinearGParams {
    std::vector<std::vector<double>> b;
    std::vector<double> weights;
    double lip_g = 0.0;
    double gamma = 1.0;
    double cost_coefficient = 1.0;
    double cost_exponent = 2.0;
    double p0 = 0.0;
    std::vector<double> q0;

    static constexpr double lambda = 1.0;
    std::size_t dim() const { return q0.size(); }
};

/// Time-discretized path allocations q = (q_0, ..., q_{steps-1}), q_k in R^d,
/// on t_k = k T/steps, flattened to dimension steps*d. The outside option is
/// (p0, 0).
///   U = sum_k dt (1 + rho sin(2 pi t_k/T)) b_x . q_k - p
///   C = sum_k dt a(t_k)|q_k|^2 + kappa sum_{k<steps-1} dt |(q_{k+1}-q_k)/dt|^2 - p
/// with a(t) = a0 (1 + sigma cos(2 pi t/T)).
struct TimePathParams {
    double horizon = 1.0;
    std::size_t steps = 4;
    std::size_t d = 1;
    std::vector<std::vector<double>> b;
    std::vector<double> weights;
    double rho = 0.0;
    double lip_v = 0.0;
    double a0 = 1.0;
    double sigma = 0.0;
    double kappa = 1.0;
    double p0 = 0.0;

    double dt() const { return horizon / static_cast<double>(steps); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt(); }
    double v_weight(std::size_t k) const { return 1.0 + rho * std::sin(2.0 * std::numbers::pi * time(k) / horizon); }
    double a_at(std::size_t k) const { return a0 * (1.0 + sigma * std::cos(2.0 * std::numbers::pi * time(k) / horizon)); }
    double a_min() const { return a0 * (1.0 - sigma); }
};

using FamilyParams = std::variant<QuasilinearParams, NonlinearGParams, TimePathParams>;

enum class FamilyKind { quasilinear, nonlinear, timepath };

struct Axis {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 1;

    double node(std::size_t i) const {
        if (count <= 1) return lo;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

/// Cartesian product of a price axis and one axis per attribute.
struct ProductGrid {
    Axis price;
    std::vector<Axis> attrs;
};

/// Explicit list of (p, q) points, kept in the given order.
struct PointList {
    std::vector<PricedBundle> points;
};

using GridSpec = std::variant<ProductGrid, PointList>;

/// Random smooth paths for the time-path family: a nonnegative level plus
/// three damped sine modes. Prices are drawn around the band between the
/// path's energy and its best gain, so a fair share lands in the mask.
struct PathSampling {
    std::size_t paths = 50;
    std::uint64_t seed = 0;
    double amplitude = 1.0;
    double price_slack = 0.25;
};

namespace detail {

inline std::vector<PricedBundle> expand(const GridSpec& spec) {
    if (const auto* list = std::get_if<PointList>(&spec)) return list->points;
    const auto& g = std::get<ProductGrid>(spec);
    std::vector<PricedBundle> out;
    std::vector<std::size_t> idx(g.attrs.size(), 0);
    for (std::size_t ip = 0; ip < std::max<std::size_t>(g.price.count, 1); ++ip) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            PricedBundle b;
            b.price = g.price.node(ip);
            for (std::size_t k = 0; k < g.attrs.size(); ++k) b.attrs.push_back(g.attrs[k].node(idx[k]));
            out.push_back(std::move(b));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == std::max<std::size_t>(g.attrs[k].count, 1)) idx[k++] = 0;
            if (k == idx.size()) break;
        }
    }
    return out;
}

inline AllocId locate_outside(const std::vector<PricedBundle>& pts, double p0, const std::vector<double>& q0) {
    constexpr double eps = 1e-12;
    for (AllocId z = 0; z < pts.size(); ++z) {
        if (pts[z].attrs.size() != q0.size() || std::fabs(pts[z].price - p0) > eps) continue;
        bool same = true;
        for (std::size_t k = 0; k < q0.size(); ++k) same = same && std::fabs(pts[z].attrs[k] - q0[k]) <= eps;
        if (same) return z;
    }
    fail(ErrorCode::grid, "outside option (" + shortest(p0) + ", q0) is not a grid point");
}

inline std::vector<double> weights_or_uniform(const std::vector<double>& w, std::size_t n) {
    if (!w.empty()) return w;
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

inline TypeSpace family_types(const std::vector<std::vector<double>>& b, const std::vector<double>& weights) {
    if (b.empty()) fail(ErrorCode::validation, "family: at least one type is required");
    TypeSpace t;
    t.weights = weights_or_uniform(weights, b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        t.ids.push_back("x" + std::to_string(i + 1));
        t.params.push_back({{"b", b[i]}});
    }
    return t;
}

inline double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double max_norm(const std::vector<std::vector<double>>& b) {
    double m = 0.0;
    for (const auto& v : b) m = std::max(m, norm(v));
    return m;
}

inline Expr linear_benefit(std::size_t d) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < d; ++k) terms.push_back(Expr::param("b", k) * Expr::attr(k));
    return sum_of(std::move(terms));
}

/// a * (sum q_k^2)^(e/2)
inline Expr power_cost(std::size_t d, double a, double e) {
    std::vector<Expr> sq;
    for (std::size_t k = 0; k < d; ++k) sq.push_back(Expr::attr(k) * Expr::attr(k));
    return Expr::number(a) * Expr::node(Expr::Op::pow, {sum_of(std::move(sq)), Expr::number(e / 2.0)});
}

inline void check_common(const std::vector<std::vector<double>>& b, std::size_t d, double coef, double expo) {
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i].size() != d)
            fail(ErrorCode::validation, "family.b[" + std::to_string(i) + "]: expected dimension " + std::to_string(d));
    if (!(expo > 1.0)) fail(ErrorCode::validation, "family.cost_exponent: must exceed 1 (superlinear cost)");
    if (!(coef > 0.0)) fail(ErrorCode::validation, "family.cost_coefficient: must be positive");
}

} // namespace detail

// ---------------------------------------------------------------------------
// JSON blocks (`family` field of the instance file)

inline json family_to_json(const FamilyParams& f) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, QuasilinearParams>) {
                return {{"kind", "quasilinear"}, {"b", p.b}, {"weights", p.weights}, {"lip_b", p.lip_b},
                        {"cost_coefficient", p.cost_coefficient}, {"cost_exponent", p.cost_exponent},
                        {"p0", p.p0}, {"q0", p.q0}};
            } else if constexpr (std::is_same_v<P, NonlinearGParams>) {
                return {{"kind", "nonlinear"}, {"b", p.b}, {"weights", p.weights}, {"lip_g", p.lip_g},
                        {"gamma", p.gamma}, {"lambda", P::lambda}, {"cost_coefficient", p.cost_coefficient},
                        {"cost_exponent", p.cost_exponent}, {"p0", p.p0}, {"q0", p.q0}};
            } else {
                return {{"kind", "timepath"}, {"horizon", p.horizon}, {"steps", p.steps}, {"d", p.d},
                        {"b", p.b}, {"weights", p.weights}, {"rho", p.rho}, {"lip_v", p.lip_v},
                        {"a0", p.a0}, {"sigma", p.sigma}, {"kappa", p.kappa}, {"p0", p.p0}};
            }
        },
        f);
}

inline FamilyParams family_from_json(const json& j) {
    using detail::field;
    using detail::real;
    using detail::reals;
    if (j.is_null()) fail(ErrorCode::family_mismatch, "instance carries no family block");
    const auto kind = field(j, "kind", "family").get<std::string>();
    auto rows = [&](const char* key) {
        std::vector<std::vector<double>> out;
        const json& a = field(j, key, "family");
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(reals(a[i], std::string("family.") + key));
        return out;
    };
    auto num = [&](const char* key) { return real(field(j, key, "family"), std::string("family.") + key); };
    auto vec = [&](const char* key) { return reals(field(j, key, "family"), std::string("family.") + key); };
    if (kind == "quasilinear") {
        return QuasilinearParams{rows("b"), vec("weights"), num("lip_b"), num("cost_coefficient"),
                                 num("cost_exponent"), num("p0"), vec("q0")};
    }
    if (kind == "nonlinear") {
        return NonlinearGParams{rows("b"), vec("weights"), num("lip_g"), num("gamma"), num("cost_coefficient"),
                                num("cost_exponent"), num("p0"), vec("q0")};
    }
    if (kind == "timepath") {
        TimePathParams p;
        p.horizon = num("horizon");
        p.steps = detail::index(field(j, "steps", "family"), "family.steps");
        p.d = detail::index(field(j, "d", "family"), "family.d");
        p.b = rows("b");
        p.weights = vec("weights");
        p.rho = num("rho");
        p.lip_v = num("lip_v");
        p.a0 = num("a0");
        p.sigma = num("sigma");
        p.kappa = num("kappa");
        p.p0 = num("p0");
        return p;
    }
    fail(ErrorCode::schema, "family.kind: unknown family '" + kind + "'");
}

// ---------------------------------------------------------------------------
// build_family

inline Instance build_family(const QuasilinearParams& p, const GridSpec& spec) {
    detail::check_common(p.b, p.dim(), p.cost_coefficient, p.cost_exponent);
    if (p.lip_b < detail::max_norm(p.b))
        fail(ErrorCode::validation, "family.lip_b: " + shortest(p.lip_b) + " is below max ||b_x|| = " +
                                        shortest(detail::max_norm(p.b)));
    auto pts = detail::expand(spec);
    for (const auto& b : pts)
        if (b.attrs.size() != p.dim()) fail(ErrorCode::grid, "grid attribute dimension differs from the family's");
    AllocationGrid grid;
    grid.outside_index = detail::locate_outside(pts, p.p0, p.q0);
    for (auto& b : pts) grid.allocations.emplace_back(std::move(b));
    UtilityOracle u{detail::linear_benefit(p.dim()) - Expr::price()};
    CostOracle c{detail::power_cost(p.dim(), p.cost_coefficient, p.cost_exponent) - Expr::price()};
    return Instance::create(detail::family_types(p.b, p.weights), std::move(grid), std::move(u), std::move(c),
                            FullVariant{}, kDefaultTol, family_to_json(p));
}

inline Instance build_family(const NonlinearGParams& p, const GridSpec& spec) {
    detail::check_common(p.b, p.dim(), p.cost_coefficient, p.cost_exponent);
    if (p.lip_g < detail::max_norm(p.b))
        fail(ErrorCode::validation, "family.lip_g: below max ||b_x||");
    if (!(p.gamma >= 0.0)) fail(ErrorCode::validation, "family.gamma: must be nonnegative");
    auto pts = detail::expand(spec);
    for (const auto& b : pts)
        if (b.attrs.size() != p.dim()) fail(ErrorCode::grid, "grid attribute dimension differs from the family's");
    AllocationGrid grid;
    grid.outside_index = detail::locate_outside(pts, p.p0, p.q0);
    for (auto& b : pts) grid.allocations.emplace_back(std::move(b));
    Expr excess = Expr::node(Expr::Op::max, {Expr::price() - Expr::number(p.p0), Expr::number(0.0)});
    Expr penalty = Expr::number(p.gamma) * (excess * excess);
    UtilityOracle u{(detail::linear_benefit(p.dim()) - Expr::price()) - penalty};
    CostOracle c{detail::power_cost(p.dim(), p.cost_coefficient, p.cost_exponent) - Expr::price()};
    return Instance::create(detail::family_types(p.b, p.weights), std::move(grid), std::move(u), std::move(c),
                            FullVariant{}, kDefaultTol, family_to_json(p));
}

namespace detail {

inline void check_timepath(const TimePathParams& p) {
    if (p.steps < 2) fail(ErrorCode::validation, "family.steps: at least 2 time points are required");
    if (p.d == 0) fail(ErrorCode::validation, "family.d: must be positive");
    if (!(p.horizon > 0.0)) fail(ErrorCode::validation, "family.horizon: must be positive");
    for (const auto& v : p.b)
        if (v.size() != p.d) fail(ErrorCode::validation, "family.b: expected dimension " + std::to_string(p.d));
    if (!(p.rho >= 0.0 && p.rho < 1.0)) fail(ErrorCode::validation, "family.rho: must lie in [0, 1)");
    if (!(p.sigma >= 0.0 && p.sigma < 1.0)) fail(ErrorCode::validation, "family.sigma: must lie in [0, 1)");
    if (!(p.a0 > 0.0) || !(p.kappa > 0.0)) fail(ErrorCode::validation, "family.a0/kappa: must be positive");
    if (p.lip_v < (1.0 + p.rho) * max_norm(p.b))
        fail(ErrorCode::validation, "family.lip_v: below (1 + rho) max ||b_x||");
}

inline Expr timepath_utility(const TimePathParams& p) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < p.steps; ++k)
        for (std::size_t j = 0; j < p.d; ++j)
            terms.push_back(Expr::number(p.dt() * p.v_weight(k)) * Expr::param("b", j) * Expr::attr(k * p.d + j));
    return sum_of(std::move(terms)) - Expr::price();
}

/// Cost without the -p term: sum dt a(t_k)|q_k|^2 + kappa sum dt |dq/dt|^2.
inline Expr timepath_energy(const TimePathParams& p) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < p.steps; ++k)
        for (std::size_t j = 0; j < p.d; ++j)
            terms.push_back(Expr::number(p.dt() * p.a_at(k)) * (Expr::attr(k * p.d + j) * Expr::attr(k * p.d + j)));
    for (std::size_t k = 0; k + 1 < p.steps; ++k)
        for (std::size_t j = 0; j < p.d; ++j) {
            Expr diff = Expr::attr((k + 1) * p.d + j) - Expr::attr(k * p.d + j);
            terms.push_back(Expr::number(p.kappa / p.dt()) * (diff * diff));
        }
    return sum_of(std::move(terms));
}

} // namespace detail

inline Instance build_family(const TimePathParams& p, const PathSampling& sampling) {
    detail::check_timepath(p);
    const std::size_t dim = p.steps * p.d;
    TypeSpace types = detail::family_types(p.b, p.weights);
    Expr utility = detail::timepath_utility(p);
    Expr energy = detail::timepath_energy(p);

    std::mt19937_64 rng(sampling.seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    AllocationGrid grid;
    grid.outside_index = 0;
    grid.allocations.emplace_back(PricedBundle{p.p0, std::vector<double>(dim, 0.0)});
    for (std::size_t s = 0; s < sampling.paths; ++s) {
        std::vector<double> level(p.d), coef(3 * p.d), phase(3 * p.d);
        for (auto& l : level) l = sampling.amplitude * unit();
        for (std::size_t i = 0; i < coef.size(); ++i)
            coef[i] = sampling.amplitude * (2.0 * unit() - 1.0) / static_cast<double>(2 * (i / p.d + 1));
        for (auto& f : phase) f = 2.0 * std::numbers::pi * unit();
        PricedBundle b;
        b.attrs.assign(dim, 0.0);
        for (std::size_t k = 0; k < p.steps; ++k)
            for (std::size_t j = 0; j < p.d; ++j) {
                b.attrs[k * p.d + j] = level[j];
                for (std::size_t mode = 0; mode < 3; ++mode)
                    b.attrs[k * p.d + j] += coef[mode * p.d + j] *
                                            std::sin(static_cast<double>(mode + 1) * std::numbers::pi * p.time(k) / p.horizon +
                                                     phase[mode * p.d + j]);
            }
        const double phi = energy.eval({0.0, b.attrs, nullptr});
        double gain = -HUGE_VAL;
        for (const auto& tp : types.params) gain = std::max(gain, utility.eval({0.0, b.attrs, &tp}));
        const double lo = p.p0 + phi - sampling.price_slack;
        const double hi = p.p0 + std::max(gain, phi) + sampling.price_slack;
        b.price = lo + (hi - lo) * unit();
        grid.allocations.emplace_back(std::move(b));
    }
    return Instance::create(std::move(types), std::move(grid), UtilityOracle{std::move(utility)},
                            CostOracle{std::move(energy) - Expr::price()}, FullVariant{}, kDefaultTol,
                            family_to_json(p));
}

inline Instance build_family(const FamilyParams& f, const GridSpec& spec, const PathSampling& sampling = {}) {
    if (const auto* q = std::get_if<QuasilinearParams>(&f)) return build_family(*q, spec);
    if (const auto* g = std::get_if<NonlinearGParams>(&f)) return build_family(*g, spec);
    return build_family(std::get<TimePathParams>(f), sampling);
}

// ---------------------------------------------------------------------------
// Fixtures

inline PointList toy_points() {
    return PointList{{{0.0, {0.0}}, {0.1, {0.5}}, {1.0, {0.5}}, {2.0, {1.0}}, {9.0, {2.0}}}};
}

inline QuasilinearParams toy_params() {
    QuasilinearParams p;
    p.b = {{1.0}, {3.0}};
    p.weights = {0.5, 0.5};
    p.lip_b = 3.0;
    p.q0 = {0.0};
    return p;
}

/// Two types (b = 1, 3), five priced allocations, full participation.
inline Instance toy_a() { return build_family(toy_params(), toy_points()); }

/// TOY-A grid plus (0.5, 0.5); budget points {x1, x2} x {0.5, 2}.
inline Instance toy_b() {
    auto pts = toy_points();
    pts.points.push_back({0.5, {0.5}});
    Instance base = build_family(toy_params(), pts);
    BudgetVariant v;
    for (std::size_t x = 0; x < 2; ++x)
        for (double y : {0.5, 2.0}) v.points.push_back({x, y, 0.25});
    return base.with_variant(std::move(v));
}

/// TOY-A under partial participation with zero reservation utility.
inline Instance toy_c() { return toy_a().with_variant(PartialVariant{{0.0, 0.0}}); }

// ---------------------------------------------------------------------------
// Seeded random instances

struct RandomShape {
    std::size_t n = 2; // types (Full/Partial) or budget points (Budget)
    std::size_t m = 5; // allocations
    VariantKind kind = VariantKind::full;
};

namespace detail {

/// Portable draws from mt19937_64 (no implementation-defined distributions).
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t k) { return rng_() % k; }
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    /// Uniform on the dyadic lattice lo + i/2^bits inside [lo, hi].
    double dyadic(double lo, double hi, int bits) {
        const double step = std::ldexp(1.0, -bits);
        const auto count = static_cast<std::uint64_t>((hi - lo) / step);
        return lo + static_cast<double>(below(count + 1)) * step;
    }
    /// n positive weights, multiples of 2^-10, summing to exactly 1.
    std::vector<double> partition(std::size_t n) {
        std::set<std::uint64_t> cuts;
        while (cuts.size() + 1 < n) cuts.insert(1 + below(1023));
        std::vector<double> w;
        std::uint64_t prev = 0;
        for (auto c : cuts) {
            w.push_back(static_cast<double>(c - prev) / 1024.0);
            prev = c;
        }
        w.push_back(static_cast<double>(1024 - prev) / 1024.0);
        return w;
    }

private:
    std::mt19937_64 rng_;
};

} // namespace detail

/// Deterministic in `seed`. Utilities and costs are dyadic rationals and
/// weights are multiples of 2^-10, so aggregate costs are exact sums.
inline Instance random_instance(std::uint64_t seed, RandomShape shape) {
    if (shape.n < 1 || shape.m < 2) fail(ErrorCode::validation, "random_instance: need n >= 1 and m >= 2");
    detail::Draw draw(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(shape.kind) + 1);
    const std::size_t n_types = shape.kind == VariantKind::budget ? std::max<std::size_t>(1, (shape.n + 1) / 2) : shape.n;
    const std::size_t m = shape.m;

    while (true) {
        TypeSpace types;
        types.weights = draw.partition(n_types);
        for (std::size_t i = 0; i < n_types; ++i) types.ids.push_back("x" + std::to_string(i + 1));

        AllocationGrid grid;
        grid.outside_index = 0;
        grid.allocations.emplace_back(PricedBundle{0.0, {0.0}});
        for (std::size_t z = 1; z < m; ++z)
            grid.allocations.emplace_back(PricedBundle{draw.dyadic(0.0, 2.0, 3), {draw.dyadic(0.0, 2.0, 4)}});

        UtilityTable ut(n_types, std::vector<double>(m, 0.0));
        for (auto& row : ut)
            for (std::size_t z = 1; z < m; ++z) row[z] = draw.dyadic(-1.0, 2.0, 16);
        CostTable ct(m, ExtReal(0.0));
        ct[0] = draw.dyadic(-0.25, 0.25, 16);
        for (std::size_t z = 1; z < m; ++z)
            ct[z] = draw.below(16) == 0 ? ExtReal::pos_inf() : ExtReal(draw.dyadic(-1.5, 1.0, 16));

        ModelVariant variant = FullVariant{};
        if (shape.kind == VariantKind::partial) {
            std::vector<double> r(n_types);
            for (auto& v : r) v = draw.dyadic(-0.5, 0.5, 16);
            bool witness = false;
            for (std::size_t z = 0; z < m && !witness; ++z)
                for (std::size_t x = 0; x < n_types && !witness; ++x)
                    witness = ct[z].is_finite() && ct[z].value() <= 0.0 && ut[x][z] >= r[x];
            if (!witness) continue;
            variant = PartialVariant{std::move(r)};
        } else if (shape.kind == VariantKind::budget) {
            BudgetVariant bv;
            auto w = draw.partition(shape.n);
            std::set<std::pair<std::size_t, double>> used;
            for (std::size_t k = 0; k < shape.n; ++k) {
                const std::size_t x = k % n_types;
                double y = draw.dyadic(0.25, 2.0, 3);
                while (used.count({x, y}) != 0) y = draw.dyadic(0.25, 2.0, 3);
                used.insert({x, y});
                bv.points.push_back({x, y, w[k]});
            }
            variant = std::move(bv);
        }
        return Instance::create(std::move(types), std::move(grid), UtilityOracle{std::move(ut)},
                                CostOracle{std::move(ct)}, std::move(variant));
    }
}

/// Random family parameters with a product grid that contains (p0, q0).
/// The time-path family uses fixed structural parameters and random paths.
inline std::pair<FamilyParams, Instance> random_family_instance(std::uint64_t seed, FamilyKind kind,
                                                                std::size_t steps = 4) {
    detail::Draw draw(seed * 0xD1B54A32D192ED03ULL + static_cast<std::uint64_t>(kind) + 17);
    if (kind == FamilyKind::timepath) {
        TimePathParams p;
        p.steps = steps;
        p.b = {{1.0}, {2.0}, {3.0}};
        p.rho = 0.25;
        p.lip_v = 1.25 * 3.0;
        p.a0 = 1.0;
        p.sigma = 0.5;
        p.kappa = 1.0;
        PathSampling s{50, seed, 1.0, 0.25};
        Instance inst = build_family(p, s);
        return {p, std::move(inst)};
    }
    const std::size_t d = 1 + draw.below(2);
    const std::size_t n = 1 + draw.below(4);
    std::vector<std::vector<double>> b(n, std::vector<double>(d));
    for (auto& v : b)
        for (auto& x : v) x = draw.uniform(-3.0, 3.0);
    const double coef = draw.uniform(0.5, 2.0);
    const double expo = draw.uniform(1.5, 3.0);

    ProductGrid g;
    g.price = {draw.uniform(-6.0, -1.0), draw.uniform(4.0, 12.0), 6 + draw.below(4)};
    for (std::size_t k = 0; k < d; ++k) g.attrs.push_back({-4.0, 4.0, 5 + draw.below(3)});
    const double p0 = g.price.node(draw.below(g.price.count));
    std::vector<double> q0;
    for (const auto& ax : g.attrs) q0.push_back(ax.node(draw.below(ax.count)));

    const double lip = detail::max_norm(b) * (1.0 + 0.5 * draw.unit());
    if (kind == FamilyKind::quasilinear) {
        QuasilinearParams p{b, {}, lip, coef, expo, p0, q0};
        Instance inst = build_family(p, g);
        return {p, std::move(inst)};
    }
    NonlinearGParams p{b, {}, lip, draw.uniform(0.0, 2.0), coef, expo, p0, q0};
    Instance inst = build_family(p, g);
    return {p, std::move(inst)};
}

} // namespace screenline
