#pragma once

// Arbitrary-precision integers and rationals on top of GMP, plus the small
// integer utilities (isqrt, squarefree split, dyadic rounding) the rest of
// the library leans on.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tepreach {

using Int = mpz_class;
using Rat = mpq_class;

struct arith_error : std::runtime_error {
    explicit arith_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline Rat make_rat(Int num, Int den) {
    if (den == 0) throw arith_error("rational with zero denominator");
    Rat r(std::move(num), std::move(den));
    r.canonicalize();
    return r;
}

inline Rat rat_of(long num, long den = 1) { return make_rat(Int(num), Int(den)); }

inline Int num(const Rat& r) { return r.get_num(); }
inline Int den(const Rat& r) { return r.get_den(); }

inline int sign_of(const Rat& r) { return sgn(r); }
inline int sign_of(const Int& z) { return sgn(z); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Int int_pow(Int base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (e < 0) {
        if (base == 0) throw arith_error("0^negative");
        return make_rat(int_pow(den(base), (unsigned long)(-e)), int_pow(num(base), (unsigned long)(-e)));
    }
    return make_rat(int_pow(num(base), (unsigned long)e), int_pow(den(base), (unsigned long)e));
}

// floor(sqrt(n)), n >= 0
inline Int isqrt(const Int& n) {
    if (n < 0) throw arith_error("isqrt of negative");
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r = isqrt(n);
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

// n = square * squarefree; returns (sqrt(square), squarefree).  Trial division;
// intended for the small radicands that appear in multiquadratic towers.
inline std::pair<Int, Int> squarefree_split(Int n) {
    if (n <= 0) throw arith_error("squarefree_split needs positive input");
    Int outer(1), inner(1);
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        unsigned long e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (e >= 2) outer *= int_pow(p, e / 2);
        if (e % 2) inner *= p;
    }
    inner *= n;  // leftover prime (or 1)
    return {outer, inner};
}

// Prime factors of a squarefree positive integer.
inline std::vector<Int> prime_factors(Int n) {
    std::vector<Int> ps;
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ps.push_back(p);
            n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

// Outward dyadic rounding: largest k/2^bits <= r  (dir<0)  or smallest >= r (dir>0).
inline Rat dyadic_round(const Rat& r, unsigned bits, int dir) {
    Int scaled_num = num(r) << bits;
    Int q;
    if (dir < 0)
        mpz_fdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), den(r).get_mpz_t());
    else
        mpz_cdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), den(r).get_mpz_t());
    return make_rat(q, Int(1) << bits);
}

// 2^-bits as a rational.
inline Rat pow2_inv(unsigned bits) { return make_rat(Int(1), Int(1) << bits); }

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

}  // namespace tepreach
