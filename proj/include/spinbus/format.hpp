#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace spinbus {

inline constexpr int kSignificantDigits = 12;

/// Fixed 12-significant-digit text; -0 prints as 0.
inline std::string format_real(double x) {
    if (x == 0.0) x = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
    return buf;
}

/// Nearest double to the 12-significant-digit decimal of x, so that JSON
/// emitters print at most 12 digits.
inline double round_significant(double x) {
    if (!std::isfinite(x)) return x;
    return std::stod(format_real(x));
}

}  // namespace spinbus
