#include "support.hpp"

#include <gtest/gtest.h>

using namespace screenline;

TEST(AdmissibleSet, ToyExamples) {
    const auto k = admissible_set(toy_a());
    EXPECT_EQ(k.kind, MaskKind::K);
    EXPECT_EQ(k.members, (std::vector<AllocId>{0, 2, 3}));
    EXPECT_FALSE(k.witness.has_value());

    const auto f0 = admissible_set(toy_c());
    EXPECT_EQ(f0.kind, MaskKind::F0);
    EXPECT_EQ(f0.members, (std::vector<AllocId>{0, 2, 3}));
    ASSERT_TRUE(f0.witness.has_value());
    EXPECT_EQ(*f0.witness, 3u);

    const auto gamma = admissible_set(toy_b());
    EXPECT_EQ(gamma.kind, MaskKind::Gamma);
    EXPECT_EQ(gamma.members, (std::vector<AllocId>{0, 2, 3, 5}));
}

TEST(AdmissibleSet, MatchesReferenceK) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Instance inst = random_instance(seed, {1 + seed % 5, 2 + seed % 11, VariantKind::full});
        std::vector<AllocId> expected;
        for (AllocId z : oracle::k_set(inst))
            if (inst.cost(z).is_finite()) expected.push_back(z);
        EXPECT_EQ(admissible_set(inst).members, expected);
    }
}

TEST(AdmissibleSet, OutsideAlwaysInKAndGamma) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        for (auto kind : {VariantKind::full, VariantKind::budget}) {
            const Instance inst = random_instance(seed, {1 + seed % 5, 2 + seed % 11, kind});
            EXPECT_TRUE(admissible_set(inst).contains(inst.outside()));
        }
        for (auto kind : {FamilyKind::quasilinear, FamilyKind::nonlinear, FamilyKind::timepath}) {
            const Instance inst = random_family_instance(seed % 10 + 1, kind).second;
            EXPECT_TRUE(admissible_set(inst).contains(inst.outside()));
        }
    }
}

TEST(AdmissibleSet, OutsideInF0Iff) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Instance inst = random_instance(seed, {1 + seed % 5, 2 + seed % 11, VariantKind::partial});
        const AllocId z0 = inst.outside();
        bool someone = false;
        for (std::size_t x = 0; x < inst.num_types(); ++x) someone |= inst.utility(x, z0) >= inst.reservation(x) - inst.tol();
        const bool expected = inst.cost(z0).value() <= inst.tol() && someone;
        EXPECT_EQ(admissible_set(inst).contains(z0), expected) << seed;
    }
}

TEST(AdmissibleSet, GridMonotone) {
    std::mt19937_64 rng(41);
    for (auto kind : {VariantKind::full, VariantKind::partial, VariantKind::budget})
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const Instance inst = random_instance(seed, {3, 10, kind});
            std::vector<AllocId> keep{inst.outside()};
            for (AllocId z = 0; z < inst.num_allocs(); ++z)
                if (z != inst.outside() && rng() % 2) keep.push_back(z);
            std::sort(keep.begin(), keep.end());
            Instance sub = inst.subgrid(keep);
            std::optional<AdmissibleMask> small;
            try {
                small = admissible_set(sub);
            } catch (const Error& e) {
                ASSERT_EQ(e.code(), ErrorCode::assumption_violated);
                continue;
            }
            const auto big = admissible_set(inst);
            for (AllocId i : small->members) EXPECT_TRUE(big.contains(keep[i]));
        }
}

TEST(AdmissibleSet, NoWitness) {
    json doc = instance_to_json(toy_c());
    doc["variant"]["reservation"] = {10.0, 10.0};
    const Instance inst = instance_from_json(doc);
    EXPECT_ERROR_CODE(admissible_set(inst), ErrorCode::assumption_violated);
}

TEST(AdmissibleSet, InfiniteCostExcluded) {
    json doc = instance_to_json(toy_a());
    doc["cost"] = {{"table", {0, "inf", -1, -1, -1}}};
    doc.erase("family");
    EXPECT_FALSE(admissible_set(instance_from_json(doc)).contains(1));
}

TEST(Certificate, ToyARadius) {
    const auto cert = bound_certificate(toy_a(), toy_params());
    EXPECT_NEAR(cert.q_radius, 3.0, 1e-9);
    EXPECT_GE(cert.q_radius, 3.0);
    EXPECT_NEAR(cert.p_hi, 9.0, 1e-8);
    EXPECT_EQ(cert.p_lo, 0.0);
    EXPECT_FALSE(cert.trace.empty());
    for (AllocId z : admissible_set(toy_a()).members) EXPECT_TRUE(certificate_contains(cert, toy_a(), z));
    EXPECT_EQ(bound_certificate(toy_a()).q_radius, cert.q_radius);
}

TEST(Certificate, DegenerateZeroSlope) {
    QuasilinearParams p;
    p.b = {{0.0}};
    p.lip_b = 0.0;
    p.q0 = {0.0};
    const Instance inst = build_family(p, PointList{{{0.0, {0.0}}, {1.0, {0.5}}}});
    EXPECT_NEAR(bound_certificate(inst, p).q_radius, 0.0, 1e-9);
}

TEST(Certificate, RadiusClosedForm) {
    // a (r - n0)^e <= a n0^e + L r has no closed form in general; for q0 = 0
    // the largest root is r = (L / a)^(1 / (e - 1)).
    for (double a : {0.5, 1.0, 2.0})
        for (double e : {1.5, 2.0, 3.0})
            for (double L : {0.5, 3.0, 7.0}) {
                QuasilinearParams p;
                p.b = {{L}};
                p.lip_b = L;
                p.cost_coefficient = a;
                p.cost_exponent = e;
                p.q0 = {0.0};
                const Instance inst = build_family(p, PointList{{{0.0, {0.0}}}});
                const double r = bound_certificate(inst, p).q_radius;
                const double expected = std::pow(L / a, 1.0 / (e - 1.0));
                EXPECT_NEAR(r, expected, 1e-9 * (1.0 + expected));
                EXPECT_GE(r, expected * (1 - 1e-15));
            }
}

TEST(Certificate, NonlinearExample) {
    NonlinearGParams p;
    p.b = {{3.0}};
    p.lip_g = 3.0;
    p.q0 = {0.0};
    const Instance inst = build_family(p, toy_points());
    const auto cert = bound_certificate(inst, p);
    EXPECT_NEAR(cert.q_radius, 3.0, 1e-9);
    EXPECT_NEAR(cert.p_hi, 9.0, 1e-8);
    EXPECT_LE(cert.p_lo, 0.0);
    EXPECT_EQ(cert.trace.size(), 3u);
}

TEST(Certificate, ContainsMembersOfRandomFamilies) {
    for (auto kind : {FamilyKind::quasilinear, FamilyKind::nonlinear})
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto [f, inst] = random_family_instance(seed, kind);
            const auto cert = bound_certificate(inst, f);
            for (AllocId z : admissible_set(inst).members) EXPECT_TRUE(certificate_contains(cert, inst, z)) << seed;
        }
}

TEST(Certificate, BoxIsNotVacuous) {
    // Some grid points lie outside the certified box, so containment says something.
    std::size_t outside = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto [f, inst] = random_family_instance(seed, FamilyKind::quasilinear);
        const auto cert = bound_certificate(inst, f);
        for (AllocId z = 0; z < inst.num_allocs(); ++z) outside += !certificate_contains(cert, inst, z);
    }
    EXPECT_GT(outside, 0u);
}

TEST(Certificate, TimePathUniformInSteps) {
    std::vector<double> bounds;
    for (std::size_t steps : {4u, 8u, 16u, 32u}) {
        const auto [f, inst] = random_family_instance(5, FamilyKind::timepath, steps);
        const auto cert = bound_certificate(inst, f);
        ASSERT_TRUE(cert.energy_bound.has_value());
        bounds.push_back(*cert.energy_bound);
        const auto& p = std::get<TimePathParams>(f);
        std::size_t members = 0;
        for (AllocId z : admissible_set(inst).members) {
            ++members;
            EXPECT_TRUE(certificate_contains(cert, inst, z));
            EXPECT_LE(path_norms(p, inst.attrs(z)).energy(), *cert.energy_bound);
        }
        EXPECT_GT(members, 1u);
    }
    for (double b : bounds) EXPECT_LE(std::abs(b - bounds.front()), 1e-6 * bounds.front());
}

TEST(Certificate, FamilyMismatch) {
    NonlinearGParams p;
    p.b = {{1.0}, {3.0}};
    p.lip_g = 3.0;
    p.q0 = {0.0};
    EXPECT_ERROR_CODE(bound_certificate(toy_a(), p), ErrorCode::family_mismatch);
    EXPECT_ERROR_CODE(bound_certificate(random_instance(1, {2, 4, VariantKind::full})), ErrorCode::family_mismatch);
}

TEST(Certificate, Json) {
    const json j = certificate_to_json(bound_certificate(toy_a()));
    EXPECT_EQ(j["family"], "quasilinear");
    EXPECT_TRUE(j["energy_bound"].is_null());
    EXPECT_EQ(j["p_interval"].size(), 2u);
    const json m = mask_to_json(admissible_set(toy_c()));
    EXPECT_EQ(m["kind"], "F0");
    EXPECT_EQ(m["witness"], 3);
}
