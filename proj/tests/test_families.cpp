#include "support.hpp"

#include <gtest/gtest.h>

using namespace screenline;

TEST(Fixtures, ToyBAndToyC) {
    const Instance b = toy_b();
    ASSERT_EQ(b.kind(), VariantKind::budget);
    ASSERT_EQ(b.num_allocs(), 6u);
    EXPECT_EQ(b.price(5), 0.5);
    EXPECT_EQ(b.attrs(5), std::vector<double>{0.5});
    ASSERT_EQ(b.num_points(), 4u);
    const char* labels[] = {"x1@0.5", "x1@2", "x2@0.5", "x2@2"};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(b.point_label(k), labels[k]);
        EXPECT_EQ(b.point_weight(k), 0.25);
    }
    EXPECT_EQ(b.min_budget(), 0.5);

    const Instance c = toy_c();
    ASSERT_EQ(c.kind(), VariantKind::partial);
    EXPECT_EQ(c.reservation(0), 0.0);
    EXPECT_EQ(c.reservation(1), 0.0);
}

TEST(Fixtures, ToyAFromQuasilinearFamily) {
    const Instance a = toy_a();
    EXPECT_EQ(a.outside(), 0u);
    EXPECT_EQ(a.family().at("kind"), "quasilinear");
    const auto f = family_from_json(a.family());
    ASSERT_TRUE(std::holds_alternative<QuasilinearParams>(f));
    EXPECT_EQ(std::get<QuasilinearParams>(f).lip_b, 3.0);
}

TEST(BuildFamily, NonlinearBelowQuasilinear) {
    NonlinearGParams p;
    p.b = {{1.0}, {3.0}};
    p.weights = {0.5, 0.5};
    p.lip_g = 3.0;
    p.gamma = 1.0;
    p.q0 = {0.0};
    const Instance g = build_family(p, toy_points());
    const Instance a = toy_a();
    for (AllocId z = 0; z < a.num_allocs(); ++z) {
        const double price = a.price(z), q = a.attrs(z)[0];
        for (std::size_t x = 0; x < 2; ++x) {
            const double bx = x == 0 ? 1.0 : 3.0;
            EXPECT_DOUBLE_EQ(g.utility(x, z), bx * q - price - std::max(price, 0.0) * std::max(price, 0.0));
            EXPECT_LE(g.utility(x, z), a.utility(x, z));
        }
        EXPECT_EQ(g.cost(z), a.cost(z));
    }
}

TEST(BuildFamily, NonlinearPriceSlope) {
    // dU/dp <= -1: a unit price increase lowers utility by at least one.
    const auto [params, inst] = random_family_instance(4, FamilyKind::nonlinear);
    for (AllocId z = 0; z < inst.num_allocs(); ++z)
        for (AllocId w = 0; w < inst.num_allocs(); ++w)
            if (inst.attrs(z) == inst.attrs(w) && inst.price(w) > inst.price(z)) {
                for (std::size_t x = 0; x < inst.num_types(); ++x) {
                    EXPECT_LE(inst.utility(x, w) - inst.utility(x, z), -(inst.price(w) - inst.price(z)) + 1e-9);
                }
            }
}

TEST(BuildFamily, TimePathFiftyPaths) {
    TimePathParams p;
    p.horizon = 1.0;
    p.steps = 4;
    p.d = 1;
    p.b = {{1.0}, {2.0}};
    p.lip_v = 2.0;
    const Instance inst = build_family(p, PathSampling{50, 3, 1.0, 0.25});
    EXPECT_EQ(inst.num_allocs(), 51u);
    for (AllocId z = 0; z < inst.num_allocs(); ++z) EXPECT_TRUE(inst.cost(z).is_finite());
    EXPECT_EQ(inst.attrs(0), std::vector<double>(4, 0.0));
}

TEST(BuildFamily, TimePathDiscreteCost) {
    for (std::size_t steps : {4u, 8u}) {
        const auto [f, inst] = random_family_instance(9, FamilyKind::timepath, steps);
        const auto& p = std::get<TimePathParams>(f);
        const double dt = p.horizon / static_cast<double>(steps);
        for (AllocId z = 0; z < inst.num_allocs(); ++z) {
            const auto& q = inst.attrs(z);
            double phi = 0.0;
            for (std::size_t k = 0; k < steps; ++k) {
                const double t = static_cast<double>(k) * dt;
                phi += dt * p.a0 * (1.0 + p.sigma * std::cos(2.0 * std::numbers::pi * t / p.horizon)) * q[k] * q[k];
                if (k + 1 < steps) phi += p.kappa * dt * std::pow((q[k + 1] - q[k]) / dt, 2);
            }
            EXPECT_NEAR(inst.cost(z).value(), phi - inst.price(z), 1e-9 * (1.0 + std::abs(phi)));
        }
    }
}

TEST(BuildFamily, GridErrors) {
    auto p = toy_params();
    p.q0 = {0.25};
    EXPECT_ERROR_CODE(build_family(p, toy_points()), ErrorCode::grid);
    p = toy_params();
    EXPECT_ERROR_CODE(build_family(p, PointList{{{0.0, {0.0, 1.0}}}}), ErrorCode::grid);
}

TEST(BuildFamily, InvalidParameters) {
    auto p = toy_params();
    p.lip_b = 2.0;
    EXPECT_ERROR_CODE(build_family(p, toy_points()), ErrorCode::validation);
    p = toy_params();
    p.cost_exponent = 1.0;
    EXPECT_ERROR_CODE(build_family(p, toy_points()), ErrorCode::validation);
    TimePathParams t;
    t.steps = 1;
    t.b = {{1.0}};
    t.lip_v = 1.0;
    EXPECT_ERROR_CODE(build_family(t, PathSampling{}), ErrorCode::validation);
}

TEST(BuildFamily, ProductGridContainsOutside) {
    QuasilinearParams p;
    p.b = {{1.0, -1.0}};
    p.lip_b = 2.0;
    p.p0 = 1.0;
    p.q0 = {0.0, 0.5};
    const Instance inst = build_family(p, ProductGrid{{-1.0, 1.0, 3}, {{-1.0, 1.0, 5}, {-0.5, 0.5, 3}}});
    EXPECT_EQ(inst.num_allocs(), 45u);
    EXPECT_EQ(inst.price(inst.outside()), 1.0);
    EXPECT_EQ(inst.attrs(inst.outside()), (std::vector<double>{0.0, 0.5}));
}

TEST(FamilyJson, RoundTrip) {
    for (auto kind : {FamilyKind::quasilinear, FamilyKind::nonlinear, FamilyKind::timepath}) {
        const auto [f, inst] = random_family_instance(12, kind);
        EXPECT_EQ(family_to_json(family_from_json(family_to_json(f))), family_to_json(f));
        EXPECT_EQ(inst.family(), family_to_json(f));
    }
}

TEST(RandomInstance, Deterministic) {
    EXPECT_EQ(save_instance(random_instance(7, {2, 5, VariantKind::full})),
              save_instance(random_instance(7, {2, 5, VariantKind::full})));
    for (auto kind : {FamilyKind::quasilinear, FamilyKind::nonlinear, FamilyKind::timepath})
        EXPECT_EQ(save_instance(random_family_instance(7, kind).second),
                  save_instance(random_family_instance(7, kind).second));
}

TEST(RandomInstance, SeedsDiffer) {
    const Instance a = random_instance(7, {2, 5, VariantKind::full});
    const Instance b = random_instance(8, {2, 5, VariantKind::full});
    bool differ = false;
    for (std::size_t x = 0; x < 2; ++x)
        for (AllocId z = 0; z < 5; ++z) differ |= a.utility(x, z) != b.utility(x, z);
    EXPECT_TRUE(differ);
}

TEST(RandomInstance, BudgetOutsideAffordable) {
    const Instance inst = random_instance(1, {3, 6, VariantKind::budget});
    EXPECT_LE(inst.price(inst.outside()), inst.min_budget());
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const Instance b = random_instance(seed, {1 + seed % 6, 2 + seed % 11, VariantKind::budget});
        EXPECT_LE(b.price(b.outside()), b.min_budget());
    }
}

TEST(RandomInstance, PassesValidationAndHasWitness) {
    for (auto kind : {VariantKind::full, VariantKind::partial, VariantKind::budget})
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const Instance inst = random_instance(seed, {1 + seed % 5, 2 + seed % 11, kind});
            EXPECT_NO_THROW(load_instance(save_instance(inst)));
            EXPECT_TRUE(inst.cost(inst.outside()).is_finite());
            if (kind == VariantKind::partial) {
                EXPECT_TRUE(admissible_set(inst).witness.has_value());
            }
        }
}

TEST(RandomInstance, PreconditionViolation) {
    EXPECT_ERROR_CODE(random_instance(1, {0, 5, VariantKind::full}), ErrorCode::validation);
    EXPECT_ERROR_CODE(random_instance(1, {2, 1, VariantKind::full}), ErrorCode::validation);
}

TEST(RandomFamily, QuasilinearLipschitz) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto [f, inst] = random_family_instance(seed, FamilyKind::quasilinear);
        const auto& p = std::get<QuasilinearParams>(f);
        for (std::size_t x = 0; x < inst.num_types(); ++x)
            for (AllocId z = 0; z < inst.num_allocs(); ++z)
                for (AllocId w = z + 1; w < inst.num_allocs(); ++w) {
                    double nq = 0.0, db = 0.0;
                    for (std::size_t i = 0; i < p.dim(); ++i) {
                        const double d = inst.attrs(z)[i] - inst.attrs(w)[i];
                        nq += d * d;
                        db += p.b[x][i] * d;
                    }
                    if (nq > 0) {
                        EXPECT_LE(std::abs(db) / std::sqrt(nq), p.lip_b * (1 + 1e-12));
                    }
                }
    }
}
