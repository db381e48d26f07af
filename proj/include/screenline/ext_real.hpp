#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>

namespace screenline {

/// Real number extended with explicit -inf / +inf markers. Costs use the
/// +inf side, indirect utilities over budget-filtered menus use -inf.
/// Arithmetic with an infinite operand absorbs.
class ExtReal {
public:
    enum class Kind { neg_inf, finite, pos_inf };

    constexpr ExtReal() = default;
    constexpr ExtReal(double v) : kind_(Kind::finite), value_(v) {} // NOLINT(implicit)

    static constexpr ExtReal pos_inf() { return ExtReal(Kind::pos_inf); }
    static constexpr ExtReal neg_inf() { return ExtReal(Kind::neg_inf); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::finite; }
    constexpr bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
    constexpr bool is_neg_inf() const { return kind_ == Kind::neg_inf; }

    double value() const {
        if (!is_finite()) throw std::logic_error("ExtReal::value on an infinite marker");
        return value_;
    }

    /// IEEE view for printing and plotting only.
    constexpr double as_double() const {
        switch (kind_) {
        case Kind::neg_inf: return -HUGE_VAL;
        case Kind::pos_inf: return HUGE_VAL;
        default: return value_;
        }
    }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (a.is_finite() && b.is_finite()) return ExtReal(a.value_ + b.value_);
        if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
            throw std::domain_error("ExtReal: +inf + -inf is undefined");
        return a.is_finite() ? b : a;
    }

    /// Scaling by a strictly positive weight keeps the marker.
    friend ExtReal operator*(double w, ExtReal a) {
        if (!a.is_finite()) return a;
        return ExtReal(w * a.value_);
    }

    friend constexpr bool operator==(ExtReal a, ExtReal b) {
        if (a.kind_ != b.kind_) return false;
        return !a.is_finite() || a.value_ == b.value_;
    }

    friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
        if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
        if (!a.is_finite()) return std::partial_ordering::equivalent;
        return a.value_ <=> b.value_;
    }

private:
    constexpr explicit ExtReal(Kind k) : kind_(k) {}

    Kind kind_ = Kind::finite;
    double value_ = 0.0;
};

} // namespace screenline
