#pragma once

// Regular Taylor expansions of e^{-ux}, sin(vx), cos(rx) and the sandwich
// polynomials built from them.  Truncations with an even number of nonzero
// terms under-approximate and odd counts over-approximate on x > 0, so
//
//   T_min(n,F) = f+(lower truncations at 2n terms) + f-(upper at 2n-1)
//   T_max(n,F) = f+(upper at 2n-1)                 + f-(lower at 2n)
//
// sandwich F between polynomials.  A lower truncation that is not provably
// nonnegative on the interval invalidates monomials in which the factor
// occurs with an even power or alongside another such factor; sandwich()
// rejects those orders and the sign-decision loop escalates past them.

#include "tepreach/laurent.hpp"
#include "tepreach/sturm.hpp"
#include "tepreach/tep.hpp"

#include <vector>

namespace tepreach {

struct not_regularly_expandable : arith_error {
    explicit not_regularly_expandable(const std::string& msg) : arith_error(msg) {}
};

struct sandwich_invalid : arith_error {
    explicit sandwich_invalid(const std::string& msg) : arith_error(msg) {}
};

enum class ExpansionKind { ExpNeg, Sin, Cos };

// First n nonzero terms of the alternating series, as a polynomial in x.
//   ExpNeg u: 1 - ux + (ux)^2/2! - ...        (u > 0, e^{-ux})
//   Sin v:    vx - (vx)^3/3! + ...
//   Cos r:    1 - (rx)^2/2! + ...
inline UniPoly taylor_truncate(ExpansionKind kind, const FieldElement& coef, int nterms) {
    if (nterms < 1) throw arith_error("taylor_truncate needs n >= 1");
    std::vector<FieldElement> c;
    switch (kind) {
        case ExpansionKind::ExpNeg: {
            c.assign((size_t)nterms, FieldElement());
            FieldElement cur(Rat(1));
            for (int j = 0; j < nterms; ++j) {
                c[(size_t)j] = cur;
                cur = cur * (-coef) * Rat(1, j + 1);
            }
            break;
        }
        case ExpansionKind::Sin: {
            c.assign((size_t)(2 * nterms - 1) + 1, FieldElement());
            FieldElement cur = coef;
            for (int k = 1; k <= nterms; ++k) {
                c[(size_t)(2 * k - 1)] = cur;
                cur = cur * coef * coef * Rat(-1, (2 * k) * (2 * k + 1));
            }
            c.resize((size_t)(2 * nterms - 1) + 1);
            break;
        }
        case ExpansionKind::Cos: {
            c.assign((size_t)(2 * nterms - 2) + 1, FieldElement());
            FieldElement cur(Rat(1));
            for (int k = 1; k <= nterms; ++k) {
                c[(size_t)(2 * k - 2)] = cur;
                cur = cur * coef * coef * Rat(-1, (2 * k - 1) * (2 * k));
            }
            break;
        }
    }
    return UniPoly(std::move(c));
}

namespace detail {

// Term dominance |t_k| > |t_{k+1}| on (0,T], exactly.
inline bool dominance_from(ExpansionKind kind, const FieldElement& coef, const Rat& T, int idx) {
    FieldElement zT = coef * T;
    switch (kind) {
        case ExpansionKind::ExpNeg:
            // ratio (ux)/(d+1) at term of degree d = idx
            return (FieldElement(Rat(idx + 1)) - zT).sign() > 0;
        case ExpansionKind::Sin:
            return (FieldElement(Rat((2 * idx) * (2 * idx + 1))) - zT * zT).sign() > 0;
        case ExpansionKind::Cos:
            return (FieldElement(Rat((2 * idx - 1) * (2 * idx))) - zT * zT).sign() > 0;
    }
    return false;
}

inline bool positive_on_0T(const UniPoly& p, const Rat& T) {
    return sign_on_interval(p, Rat(0), T, /*strict_lo=*/true, /*strict_hi=*/false) ==
           IntervalVerdict::AllPositive;
}

}  // namespace detail

// Smallest index from which the truncations stay positive on (0,T] with
// dominated tails.  The index counts polynomial degree for the exponential
// and nonzero terms for sin/cos, matching how the thresholds feed the
// half-then-increment start order downstream.
inline int expansion_threshold(ExpansionKind kind, const FieldElement& coef, const Rat& T) {
    if (T <= 0) throw arith_error("threshold needs T > 0");
    if (kind == ExpansionKind::ExpNeg && coef.sign() <= 0)
        throw not_regularly_expandable("exponential rate must be positive (e^{-ux})");
    if (kind == ExpansionKind::Sin && Tep::compare_with_pi(coef * T, 1, 1) >= 0)
        throw not_regularly_expandable("sin frequency too large for the horizon");
    if (kind == ExpansionKind::Cos && Tep::compare_with_pi(coef * T, 1, 2) >= 0)
        throw not_regularly_expandable("cos frequency too large for the horizon");

    for (int idx = 1; idx < 512; ++idx) {
        int nterms = (kind == ExpansionKind::ExpNeg) ? idx + 1 : idx;
        if (!detail::dominance_from(kind, coef, T, idx)) continue;
        if (detail::positive_on_0T(taylor_truncate(kind, coef, nterms), T)) return idx;
    }
    throw arith_error("threshold search exhausted");
}

struct RegularExpansion {
    ExpansionKind kind;
    FieldElement coef;
    Rat horizon;
    int threshold;
};

inline RegularExpansion make_expansion(ExpansionKind kind, const FieldElement& coef,
                                       const Rat& T) {
    return {kind, coef, T, expansion_threshold(kind, coef, T)};
}

// Positive / negative coefficient split: f = plus + minus.
inline std::pair<MultiPoly, MultiPoly> split_pos_neg(const MultiPoly& f) {
    MultiPoly plus(f.vars()), minus(f.vars());
    for (auto& [e, c] : f.terms()) {
        if (!c.is_real()) throw arith_error("split_pos_neg needs real coefficients");
        if (c.sign() > 0)
            plus.add_term(e, c);
        else
            minus.add_term(e, c);
    }
    return {plus, minus};
}

struct SandwichPair {
    int order = 0;
    MultiPoly lower, upper;  // polynomials in (var, params...)
};

// Build T_min / T_max at the given order for a Tep whose rates are all
// negative and whose frequencies fit the horizon (rescale first).  Throws
// sandwich_invalid when a not-provably-nonnegative lower truncation appears
// in a monomial position where the product bound would be unsound.
inline SandwichPair sandwich(const Tep& F, int order, const Rat& T) {
    if (order < 1) throw arith_error("sandwich order must be >= 1");
    if (T <= 0) throw arith_error("sandwich horizon must be positive");
    size_t nsym = F.rates.size() + F.sin_freqs.size() + F.cos_freqs.size();
    std::vector<ExpansionKind> kinds;
    std::vector<FieldElement> coefs;
    for (auto& u : F.rates) {
        if (u.sign() >= 0)
            throw not_regularly_expandable("sandwich requires negative exponential rates");
        kinds.push_back(ExpansionKind::ExpNeg);
        coefs.push_back(-u);
    }
    for (auto& v : F.sin_freqs) {
        if (Tep::compare_with_pi(v * T, 1, 1) >= 0)
            throw not_regularly_expandable("sin frequency too large; rescale first");
        kinds.push_back(ExpansionKind::Sin);
        coefs.push_back(v);
    }
    for (auto& r : F.cos_freqs) {
        if (Tep::compare_with_pi(r * T, 1, 2) >= 0)
            throw not_regularly_expandable("cos frequency too large; rescale first");
        kinds.push_back(ExpansionKind::Cos);
        coefs.push_back(r);
    }

    std::vector<std::string> out_ring{F.var};
    for (auto& p : F.params) out_ring.push_back(p);

    std::vector<MultiPoly> lower(nsym), upper(nsym);
    std::vector<bool> lower_ok(nsym);
    for (size_t i = 0; i < nsym; ++i) {
        UniPoly lo = taylor_truncate(kinds[i], coefs[i], 2 * order);
        UniPoly hi = taylor_truncate(kinds[i], coefs[i], 2 * order - 1);
        lower[i] = to_multipoly(lo, F.var).in_ring(out_ring);
        upper[i] = to_multipoly(hi, F.var).in_ring(out_ring);
        lower_ok[i] = nonneg_on(lo, Rat(0), T, /*strict_lo=*/true, /*strict_hi=*/false);
    }

    size_t head = 1 + F.params.size();
    MultiPoly tmin(out_ring), tmax(out_ring);
    for (auto& [e, c] : F.body.terms()) {
        if (!c.is_real()) throw arith_error("sandwich needs real coefficients");
        int s = c.sign();
        if (s == 0) continue;
        // soundness of the lower product for this monomial
        int bad = 0;
        bool bad_even = false, any_sym = false;
        for (size_t i = 0; i < nsym; ++i) {
            int ex = e[head + i];
            if (ex == 0) continue;
            any_sym = true;
            if (!lower_ok[i]) {
                ++bad;
                if (ex % 2 == 0) bad_even = true;
            }
        }
        if (bad > 1 || (bad == 1 && bad_even))
            throw sandwich_invalid("lower truncation not provably nonnegative at this order");
        (void)any_sym;

        ExpVec he(out_ring.size(), 0);
        for (size_t i = 0; i < head; ++i) he[i] = e[i];
        MultiPoly mono = MultiPoly::monomial(c, he, out_ring);
        MultiPoly lo_prod = mono, hi_prod = mono;
        for (size_t i = 0; i < nsym; ++i) {
            int ex = e[head + i];
            if (ex == 0) continue;
            lo_prod = lo_prod * lower[i].pow((unsigned)ex);
            hi_prod = hi_prod * upper[i].pow((unsigned)ex);
        }
        if (s > 0) {
            tmin = tmin + lo_prod;
            tmax = tmax + hi_prod;
        } else {
            tmin = tmin + hi_prod;
            tmax = tmax + lo_prod;
        }
    }
    return {order, tmin, tmax};
}

// Algorithm-3 start order: half the largest factor threshold, plus one.
inline int sandwich_start_order(const Tep& F, const Rat& T) {
    int n0 = 0;
    for (auto& u : F.rates) {
        if (u.sign() >= 0)
            throw not_regularly_expandable("start order requires negative exponential rates");
        n0 = std::max(n0, expansion_threshold(ExpansionKind::ExpNeg, -u, T));
    }
    for (auto& v : F.sin_freqs)
        n0 = std::max(n0, expansion_threshold(ExpansionKind::Sin, v, T));
    for (auto& r : F.cos_freqs)
        n0 = std::max(n0, expansion_threshold(ExpansionKind::Cos, r, T));
    return n0 / 2 + 1;
}

}  // namespace tepreach
