#pragma once

// Certified rational enclosures of pi and of e^x, sin x, cos x at rational
// (or enclosed algebraic) arguments.  Everything is exact rational series
// arithmetic with explicit remainder bounds; floating point never enters.

#include "tepreach/interval.hpp"

#include <cstdlib>

namespace tepreach {

// pi via Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239).
// atan(1/k) has an alternating series, so partial sums bracket the value.
inline RatInterval pi_enclosure(unsigned bits) {
    auto atan_inv = [&](long k, unsigned need_bits) -> RatInterval {
        Rat term = make_rat(Int(1), Int(k));
        Rat k2 = make_rat(Int(1), Int(k) * Int(k));
        Rat sum(0);
        Rat eps = pow2_inv(need_bits);
        long n = 0;
        int s = 1;
        while (true) {
            Rat contrib = term / Rat(2 * n + 1);
            if (contrib < eps) {
                // remainder of an alternating series is below its first
                // omitted term
                if (s > 0) return {sum, sum + contrib};
                return {sum - contrib, sum};
            }
            sum += (s > 0) ? contrib : Rat(-contrib);
            term *= k2;
            ++n;
            s = -s;
        }
    };
    RatInterval a = atan_inv(5, bits + 8);
    RatInterval b = atan_inv(239, bits + 8);
    RatInterval r = scale(Rat(16), a) - scale(Rat(4), b);
    return round_out(r, bits + 2);
}

namespace detail {

// e^q for |q| <= 1/2 by direct series; remainder after N terms is bounded by
// twice the first omitted term.
inline RatInterval exp_small(const Rat& q, unsigned bits) {
    Rat term(1), sum(0);
    Rat eps = pow2_inv(bits + 4);
    unsigned long n = 0;
    while (true) {
        sum += term;
        ++n;
        term = term * q / Rat((long)n);
        Rat tb = rat_abs(term) * 2;
        if (tb < eps) return {sum - tb, sum + tb};
        if (n > 10000) throw arith_error("exp series failed to converge");
    }
}

}  // namespace detail

// Enclosure of e^q at rational q, width <= 2^-bits (for moderate |q|).
inline RatInterval exp_point(const Rat& q, unsigned bits) {
    if (q == 0) return RatInterval(Rat(1));
    // halve the argument until |q| <= 1/2, then square back up
    unsigned k = 0;
    Rat q2 = q;
    while (rat_abs(q2) > Rat(1, 2)) {
        q2 /= 2;
        ++k;
    }
    if (k > 13) throw arith_error("exp argument out of supported range");
    // k squarings amplify the width by roughly 2^k * e^|q|; |q| <= 2^(k-1)
    unsigned work = bits + 2 * k + (unsigned)((3u << k) / 4) + 16;
    RatInterval r = detail::exp_small(q2, work);
    for (unsigned i = 0; i < k; ++i) {
        r = r * r;
        r = round_out(r, work);
    }
    return round_out(r, bits + 2);
}

// e over an enclosed real exponent (monotone).
inline RatInterval exp_enclosure(const RatInterval& x, unsigned bits) {
    RatInterval lo = exp_point(x.lo, bits + 2);
    RatInterval hi = exp_point(x.hi, bits + 2);
    return {lo.lo, hi.hi};
}

namespace detail {

// sin and cos at a rational point by plain series with alternating-tail
// remainder; sound for any |q| but meant for the moderate angles that
// rational horizons times tower frequencies produce.
inline std::pair<RatInterval, RatInterval> sincos_point(const Rat& q, unsigned bits) {
    if (q == 0) return {RatInterval(Rat(0)), RatInterval(Rat(1))};
    Rat q2 = q * q;
    Rat eps = pow2_inv(bits + 4);

    // sin: q - q^3/3! + ...
    Rat term = q, sin_sum(0);
    unsigned long n = 1;  // degree of current term
    while (true) {
        sin_sum += term;
        term = -term * q2 / Rat((long)((n + 1) * (n + 2)));
        n += 2;
        Rat tb = rat_abs(term);
        // once terms decrease, the tail is below the first omitted term
        if (tb < eps && q2 < Rat((long)((n + 1) * (n + 2)))) break;
        if (n > 4000) throw arith_error("sin series failed to converge");
    }
    Rat tb = rat_abs(term);
    RatInterval sin_iv{sin_sum - tb, sin_sum + tb};

    Rat cterm(1), cos_sum(0);
    n = 0;
    while (true) {
        cos_sum += cterm;
        cterm = -cterm * q2 / Rat((long)((n + 1) * (n + 2)));
        n += 2;
        Rat ctb = rat_abs(cterm);
        if (ctb < eps && q2 < Rat((long)((n + 1) * (n + 2)))) break;
        if (n > 4000) throw arith_error("cos series failed to converge");
    }
    Rat ctb = rat_abs(cterm);
    RatInterval cos_iv{cos_sum - ctb, cos_sum + ctb};
    return {round_out(sin_iv, bits + 2), round_out(cos_iv, bits + 2)};
}

}  // namespace detail

// sin over an enclosed angle: series at the dyadic midpoint plus the
// Lipschitz-1 spread of the angle enclosure.
inline RatInterval sin_enclosure(const RatInterval& x, unsigned bits) {
    Rat m = dyadic_round(x.mid(), bits + 6, -1);
    Rat spread = std::max(x.hi - m, m - x.lo);
    RatInterval s = detail::sincos_point(m, bits + 2).first;
    return round_out(RatInterval{s.lo - spread, s.hi + spread}, bits + 1);
}

inline RatInterval cos_enclosure(const RatInterval& x, unsigned bits) {
    Rat m = dyadic_round(x.mid(), bits + 6, -1);
    Rat spread = std::max(x.hi - m, m - x.lo);
    RatInterval c = detail::sincos_point(m, bits + 2).second;
    return round_out(RatInterval{c.lo - spread, c.hi + spread}, bits + 1);
}

}  // namespace tepreach
