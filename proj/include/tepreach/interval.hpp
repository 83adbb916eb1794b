#pragma once

// Intervals with rational endpoints.  These carry every adaptive-precision
// computation in the library: enclosures of square roots, of e/sin/cos values
// at rational points, and the lifted polynomial coefficients in the CAD.

#include "tepreach/rational.hpp"

#include <algorithm>
#include <ostream>

namespace tepreach {

struct RatInterval {
    Rat lo, hi;

    RatInterval() : lo(0), hi(0) {}
    RatInterval(Rat point) : lo(point), hi(point) {}
    RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw arith_error("interval with lo > hi");
    }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    bool contains(const Rat& x) const { return lo <= x && x <= hi; }
    bool contains(const RatInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool is_point() const { return lo == hi; }

    // 0 excluded from the enclosure => the sign of the enclosed value is known.
    bool sign_known() const { return lo > 0 || hi < 0; }
    int sign() const {
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        return 0;  // enclosure straddles (or touches) zero
    }
};

inline RatInterval operator+(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}
inline RatInterval operator-(const RatInterval& a) { return {-a.hi, -a.lo}; }
inline RatInterval operator-(const RatInterval& a, const RatInterval& b) { return a + (-b); }

inline RatInterval operator*(const RatInterval& a, const RatInterval& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

inline RatInterval scale(const Rat& c, const RatInterval& a) {
    if (c >= 0) return {c * a.lo, c * a.hi};
    return {c * a.hi, c * a.lo};
}

inline RatInterval int_pow(const RatInterval& a, unsigned long e) {
    if (e == 0) return RatInterval(Rat(1));
    RatInterval r = a;
    for (unsigned long i = 1; i < e; ++i) r = r * a;
    // even powers of straddling intervals clamp at zero
    if (e % 2 == 0 && a.lo < 0 && a.hi > 0 && r.lo > 0) r.lo = 0;
    return r;
}

// Outward rounding to dyadic endpoints; keeps denominators from snowballing
// through long interval computations.
inline RatInterval round_out(const RatInterval& a, unsigned bits) {
    return {dyadic_round(a.lo, bits, -1), dyadic_round(a.hi, bits, +1)};
}

inline RatInterval hull(const RatInterval& a, const RatInterval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// Enclosure of sqrt(n) for integer n >= 0, width <= 2^-bits.
inline RatInterval sqrt_enclosure(const Int& n, unsigned bits) {
    if (n < 0) throw arith_error("sqrt of negative integer");
    if (n == 0) return RatInterval(Rat(0));
    Int scaled = n << (2 * bits);
    Int root = isqrt(scaled);
    Rat lo = make_rat(root, Int(1) << bits);
    if (root * root == scaled) return RatInterval(lo);
    return {lo, make_rat(root + 1, Int(1) << bits)};
}

inline std::ostream& operator<<(std::ostream& os, const RatInterval& iv) {
    return os << "[" << iv.lo.get_str() << ", " << iv.hi.get_str() << "]";
}

}  // namespace tepreach
