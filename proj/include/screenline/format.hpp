#pragma once

#include "screenline/ext_real.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <string>

namespace screenline {

/// Shortest decimal form that parses back to the same double.
inline std::string shortest(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Fixed 17-significant-digit form used in every emitted artifact.
inline std::string fixed17(double v) {
    std::array<char, 64> buf{};
    int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

inline std::string to_string(ExtReal v) {
    if (v.is_pos_inf()) return "inf";
    if (v.is_neg_inf()) return "-inf";
    return shortest(v.value());
}

} // namespace screenline
