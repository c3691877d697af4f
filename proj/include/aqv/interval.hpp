#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace aqv {

/// Closed real interval. Bounds may be infinite. Rounding is not directed;
/// callers that need a guaranteed enclosure widen the final result.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    explicit Interval(double v) : lo(v), hi(v) {}
    Interval(double l, double h) : lo(l), hi(h) {}

    static Interval entire() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool is_bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline double mul_bound(double x, double y) {
    // 0 * inf is treated as 0: a zero factor pins the product.
    if (x == 0.0 || y == 0.0) return 0.0;
    return x * y;
}

inline Interval operator*(Interval a, Interval b) {
    const double p1 = mul_bound(a.lo, b.lo);
    const double p2 = mul_bound(a.lo, b.hi);
    const double p3 = mul_bound(a.hi, b.lo);
    const double p4 = mul_bound(a.hi, b.hi);
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

/// Division; a divisor containing zero yields the entire real line.
inline Interval operator/(Interval a, Interval b) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // One-sided division when zero is only an endpoint of b.
    if (b.lo == 0.0 && b.hi > 0.0) {
        if (a.lo >= 0.0) return {a.lo / b.hi, inf};
        if (a.hi <= 0.0) return {-inf, a.hi / b.hi};
    }
    if (b.hi == 0.0 && b.lo < 0.0) {
        if (a.lo >= 0.0) return {-inf, a.lo / b.lo};
        if (a.hi <= 0.0) return {a.hi / b.lo, inf};
    }
    if (b.lo <= 0.0 && b.hi >= 0.0) return Interval::entire();
    return a * Interval(1.0 / b.hi, 1.0 / b.lo);
}

inline Interval pow_int(Interval x, std::uint32_t e) {
    if (e == 0) return Interval(1.0);
    if (e % 2 == 1) return {std::pow(x.lo, e), std::pow(x.hi, e)};
    if (x.lo >= 0.0) return {std::pow(x.lo, e), std::pow(x.hi, e)};
    if (x.hi <= 0.0) return {std::pow(x.hi, e), std::pow(x.lo, e)};
    return {0.0, std::pow(std::max(-x.lo, x.hi), e)};
}

inline Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }
inline Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }
inline bool overlaps(Interval a, Interval b) { return a.lo <= b.hi && b.lo <= a.hi; }

}  // namespace aqv
