#pragma once

// Admissible (coercivity) sets on the grid and the analytic boxes that
// certify they are bounded for the built-in families.

#include "screenline/errors.hpp"
#include "screenline/families.hpp"
#include "screenline/io.hpp"
#include "screenline/model.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace screenline {

enum class MaskKind { K, F0, Gamma };

inline const char* mask_name(MaskKind k) {
    switch (k) {
    case MaskKind::K: return "K";
    case MaskKind::F0: return "F0";
    case MaskKind::Gamma: return "Gamma";
    }
    return "?";
}

struct AdmissibleMask {
    MaskKind kind = MaskKind::K;
    std::vector<AllocId> members;
    /// F0 only: an allocation with C <= 0 that some type accepts.
    std::optional<AllocId> witness;

    bool contains(AllocId z) const { return std::binary_search(members.begin(), members.end(), z); }
};

namespace detail {

inline bool cost_at_most(ExtReal c, double bound, double tol) { return c.is_finite() && c.value() <= bound + tol; }

inline bool k_member(const Instance& inst, AllocId z) {
    const double tol = inst.tol();
    if (!cost_at_most(inst.cost(z), inst.cost(inst.outside()).value(), tol)) return false;
    for (std::size_t x = 0; x < inst.num_types(); ++x)
        if (inst.utility(x, z) >= inst.utility(x, inst.outside()) - tol) return true;
    return false;
}

inline bool f0_member(const Instance& inst, AllocId z) {
    if (!cost_at_most(inst.cost(z), 0.0, inst.tol())) return false;
    for (std::size_t x = 0; x < inst.num_types(); ++x)
        if (inst.participates(x, z)) return true;
    return false;
}

inline bool gamma_member(const Instance& inst, AllocId z) {
    const double tol = inst.tol();
    if (!cost_at_most(inst.cost(z), inst.cost(inst.outside()).value(), tol)) return false;
    for (std::size_t k = 0; k < inst.num_points(); ++k) {
        const std::size_t x = inst.point_type(k);
        if (inst.price(z) <= inst.point_budget(k) && inst.utility(x, z) >= inst.utility(x, inst.outside()) - tol)
            return true;
    }
    return false;
}

} // namespace detail

/// K (Full), F0 (Partial) or Gamma (Budget), evaluated exhaustively.
/// Partial instances without an F0 witness raise AssumptionViolated.
inline AdmissibleMask admissible_set(const Instance& inst) {
    AdmissibleMask mask;
    switch (inst.kind()) {
    case VariantKind::full: mask.kind = MaskKind::K; break;
    case VariantKind::partial: mask.kind = MaskKind::F0; break;
    case VariantKind::budget: mask.kind = MaskKind::Gamma; break;
    }
    for (AllocId z = 0; z < inst.num_allocs(); ++z) {
        bool in = false;
        switch (mask.kind) {
        case MaskKind::K: in = detail::k_member(inst, z); break;
        case MaskKind::F0: in = detail::f0_member(inst, z); break;
        case MaskKind::Gamma: in = detail::gamma_member(inst, z); break;
        }
        if (in) mask.members.push_back(z);
    }
    if (mask.kind == MaskKind::F0) {
        if (mask.members.empty())
            fail(ErrorCode::assumption_violated,
                 "no allocation has nonpositive cost and meets some type's reservation utility");
        AllocId w = mask.members.front();
        for (AllocId z : mask.members)
            if (inst.cost(z) < inst.cost(w)) w = z;
        mask.witness = w;
    }
    return mask;
}

inline json mask_to_json(const AdmissibleMask& m) {
    json j = {{"kind", mask_name(m.kind)}, {"members", m.members}};
    j["witness"] = m.witness ? json(*m.witness) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Bound certificates

struct BoundCertificate {
    FamilyParams family;
    /// Bound on ||q - q0|| (time paths: on sum_k dt |q_k|).
    double q_radius = 0.0;
    double p_lo = 0.0;
    double p_hi = 0.0;
    /// Time paths only: bound on sum_k dt (|q_k| + |dq_k/dt|^2).
    std::optional<double> energy_bound;
    std::vector<std::string> trace;
};

inline constexpr double kBisectionTol = 1e-10;
inline constexpr double kCertificateInflation = 1e-8;

namespace detail {

/// Largest r >= 0 with a (r - n0)_+^e <= c0 + slope r, returned from above
/// to within kBisectionTol. The left side is the least cost on the sphere of
/// radius r around q0 for c = a ||q||^e with ||q0|| = n0.
inline double radius_bisection(double a, double e, double n0, double slope) {
    const double c0 = a * std::pow(n0, e);
    auto excess = [&](double r) { return a * std::pow(std::max(r - n0, 0.0), e) - c0 - slope * r; };
    double lo = 0.0, hi = 1.0;
    while (excess(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) fail(ErrorCode::validation, "certificate: cost is not superlinear on the grid's scale");
    }
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) <= 0.0 ? lo : hi) = mid;
    }
    return hi;
}

inline double min_cost_in_ball(double a, double e, double n0, double r) {
    return a * std::pow(std::max(n0 - r, 0.0), e);
}

inline void require_family(const Instance& inst, const char* expected) {
    if (inst.family().is_null() || !inst.family().contains("kind") || inst.family()["kind"] != expected)
        fail(ErrorCode::family_mismatch, std::string("instance was not built from the ") + expected + " family");
}

} // namespace detail

inline BoundCertificate bound_certificate(const Instance& inst, const QuasilinearParams& p) {
    detail::require_family(inst, "quasilinear");
    const double n0 = detail::norm(p.q0);
    const double a = p.cost_coefficient, e = p.cost_exponent;
    const double c0 = a * std::pow(n0, e);
    BoundCertificate cert;
    cert.family = p;
    cert.q_radius = detail::radius_bisection(a, e, n0, p.lip_b);
    cert.p_lo = p.p0 + detail::min_cost_in_ball(a, e, n0, cert.q_radius) - c0;
    cert.p_hi = p.p0 + p.lip_b * cert.q_radius;
    cert.trace = {
        "q: c(q) - c(q0) <= p - p0 <= Lip_b ||q - q0||; largest r with min_{||q-q0||=r} c(q) <= c(q0) + Lip_b r",
        "p upper: p - p0 <= Lip_b ||q - q0|| <= Lip_b r",
        "p lower: p - p0 >= c(q) - c(q0) >= min over the q-ball of c minus c(q0)",
    };
    return cert;
}

inline BoundCertificate bound_certificate(const Instance& inst, const NonlinearGParams& p) {
    detail::require_family(inst, "nonlinear");
    const double n0 = detail::norm(p.q0);
    const double a = p.cost_coefficient, e = p.cost_exponent;
    const double c0 = a * std::pow(n0, e);
    const double slope = p.lip_g / NonlinearGParams::lambda;
    // K1 = K with p <= p0: c(q) <= c(q0) - p0 + p <= c(q0).
    const double r1 = detail::radius_bisection(a, e, n0, 0.0);
    const double p1_lo = p.p0 + detail::min_cost_in_ball(a, e, n0, r1) - c0;
    // K2 = K with p > p0: 0 <= p - p0 <= (Lip_G/lambda)||q-q0|| and the same slope bounds c(q) - c(q0).
    const double r2 = detail::radius_bisection(a, e, n0, slope);
    const double p2_hi = p.p0 + slope * r2;
    BoundCertificate cert;
    cert.family = p;
    cert.q_radius = std::max(r1, r2);
    cert.p_lo = std::min(p1_lo, p.p0);
    cert.p_hi = std::max(p.p0, p2_hi);
    cert.trace = {
        "K1 (p <= p0): c(q) <= c(q0), radius " + shortest(r1) + "; p in [" + shortest(p1_lo) + ", p0]",
        "K2 (p > p0): 0 <= p - p0 <= (Lip_G/lambda)||q - q0|| and c(q) <= c(q0) + (Lip_G/lambda)||q - q0||, radius " +
            shortest(r2) + "; p <= " + shortest(p2_hi),
        "box: union of the K1 and K2 boxes",
    };
    return cert;
}

/// Energy bound for the time-path family with outside option (p0, 0).
/// Members satisfy Phi(q) <= p - p0 <= L S1 with S1 = sum dt |q_k| and
/// Phi(q) >= a_min S1^2 / T + kappa D, D = sum dt |dq/dt|^2. None of the
/// resulting constants depends on the number of time steps.
inline BoundCertificate bound_certificate(const Instance& inst, const TimePathParams& p) {
    detail::require_family(inst, "timepath");
    const double L = p.lip_v, a = p.a_min(), T = p.horizon, kappa = p.kappa;
    const double s_star = L * T / a;
    const double s_opt = std::min(s_star, T * (kappa + L) / (2.0 * a));
    const double energy = s_opt + (L * s_opt - a * s_opt * s_opt / T) / kappa;
    BoundCertificate cert;
    cert.family = p;
    cert.q_radius = s_star;
    cert.p_lo = p.p0;
    cert.p_hi = p.p0 + L * s_star;
    cert.energy_bound = energy;
    cert.trace = {
        "S1 = sum dt|q_k| <= L T / a_min (Cauchy-Schwarz: S1^2 <= T sum dt|q_k|^2)",
        "kappa D <= L S1 - a_min S1^2 / T",
        "S1 + D <= max over s in [0, L T/a_min] of s + (L s - a_min s^2/T)/kappa",
        "p - p0 in [0, L S1]",
    };
    return cert;
}

inline BoundCertificate bound_certificate(const Instance& inst, const FamilyParams& f) {
    return std::visit([&](const auto& p) { return bound_certificate(inst, p); }, f);
}

inline BoundCertificate bound_certificate(const Instance& inst) {
    return bound_certificate(inst, family_from_json(inst.family()));
}

/// S1 and D of a flattened time path (see TimePathParams).
struct PathNorms {
    double l1 = 0.0;
    double derivative = 0.0;
    double energy() const { return l1 + derivative; }
};

inline PathNorms path_norms(const TimePathParams& p, const std::vector<double>& q) {
    PathNorms out;
    const double dt = p.dt();
    for (std::size_t k = 0; k < p.steps; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < p.d; ++j) s += q[k * p.d + j] * q[k * p.d + j];
        out.l1 += dt * std::sqrt(s);
    }
    for (std::size_t k = 0; k + 1 < p.steps; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < p.d; ++j) {
            const double r = (q[(k + 1) * p.d + j] - q[k * p.d + j]) / dt;
            s += r * r;
        }
        out.derivative += dt * s;
    }
    return out;
}

/// Whether allocation z lies in the certified box inflated by `inflate`.
inline bool certificate_contains(const BoundCertificate& cert, const Instance& inst, AllocId z,
                                 double inflate = kCertificateInflation) {
    const double p = inst.price(z);
    if (p < cert.p_lo - inflate || p > cert.p_hi + inflate) return false;
    const auto& q = inst.attrs(z);
    if (const auto* tp = std::get_if<TimePathParams>(&cert.family)) {
        const PathNorms n = path_norms(*tp, q);
        return n.l1 <= cert.q_radius + inflate && n.energy() <= *cert.energy_bound + inflate;
    }
    const auto& q0 = std::visit(
        [](const auto& f) -> const std::vector<double>& {
            if constexpr (std::is_same_v<std::decay_t<decltype(f)>, TimePathParams>) {
                static const std::vector<double> none;
                return none;
            } else {
                return f.q0;
            }
        },
        cert.family);
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s += (q[k] - q0[k]) * (q[k] - q0[k]);
    return std::sqrt(s) <= cert.q_radius + inflate;
}

inline json certificate_to_json(const BoundCertificate& c) {
    json j = {{"family", family_to_json(c.family)["kind"]},
              {"q_radius", c.q_radius},
              {"p_interval", {c.p_lo, c.p_hi}},
              {"trace", c.trace}};
    j["energy_bound"] = c.energy_bound ? json(*c.energy_bound) : json(nullptr);
    return j;
}

} // namespace screenline
