#pragma once

// Dense univariate polynomials over FieldElement and the Sturm-sequence
// machinery: root counting, isolation, and the exact interval verdicts that
// stand in for the paper-era inequality prover.

#include "tepreach/multipoly.hpp"

#include <optional>
#include <vector>

namespace tepreach {

struct UniPoly {
    std::vector<FieldElement> c;  // c[i] is the coefficient of x^i

    UniPoly() = default;
    explicit UniPoly(std::vector<FieldElement> coeffs) : c(std::move(coeffs)) { trim(); }

    static UniPoly constant(const FieldElement& v) { return UniPoly({v}); }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return (int)c.size() - 1; }

    FieldElement eval(const FieldElement& x) const {
        FieldElement acc;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    FieldElement eval(const Rat& x) const { return eval(FieldElement(x)); }
    int sign_at(const Rat& x) const { return eval(x).sign(); }

    UniPoly derivative() const {
        if (c.size() <= 1) return UniPoly();
        std::vector<FieldElement> d(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * Rat((long)i);
        return UniPoly(std::move(d));
    }

    UniPoly operator-() const {
        UniPoly r = *this;
        for (auto& x : r.c) x = -x;
        return r;
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<FieldElement> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) {
            if (i < a.c.size()) r[i] = r[i] + a.c[i];
            if (i < b.c.size()) r[i] = r[i] + b.c[i];
        }
        return UniPoly(std::move(r));
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }

    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return UniPoly();
        std::vector<FieldElement> r(a.c.size() + b.c.size() - 1);
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] = r[i + j] + a.c[i] * b.c[j];
        return UniPoly(std::move(r));
    }

    UniPoly operator*(const FieldElement& s) const {
        UniPoly r = *this;
        for (auto& x : r.c) x = x * s;
        r.trim();
        return r;
    }

    // Field long division; returns (quotient, remainder).
    std::pair<UniPoly, UniPoly> divmod(const UniPoly& b) const {
        if (b.is_zero()) throw arith_error("univariate division by zero");
        UniPoly rem = *this;
        UniPoly quot;
        quot.c.assign(c.size(), FieldElement());
        FieldElement inv = b.c.back().inverse();
        while (!rem.is_zero() && rem.degree() >= b.degree()) {
            int shift = rem.degree() - b.degree();
            FieldElement q = rem.c.back() * inv;
            quot.c[(size_t)shift] = q;
            for (size_t i = 0; i < b.c.size(); ++i)
                rem.c[(size_t)shift + i] = rem.c[(size_t)shift + i] - q * b.c[i];
            rem.trim();
        }
        quot.trim();
        return {quot, rem};
    }

    UniPoly monic() const {
        if (is_zero()) return *this;
        return *this * c.back().inverse();
    }

    // Divide out the positive rational content (gcd of all coordinate
    // numerators over the lcm of denominators); roots and signs are kept
    // while coefficient size stays manageable through remainder sequences.
    UniPoly content_normalized() const {
        if (is_zero()) return *this;
        Int g(0), l(1);
        for (auto& coef : c)
            for (auto part : {&coef.re_coords(), &coef.im_coords()})
                for (auto& [s, q] : *part) {
                    Int gg, ll;
                    mpz_gcd(gg.get_mpz_t(), g.get_mpz_t(), num(q).get_mpz_t());
                    g = gg;
                    mpz_lcm(ll.get_mpz_t(), l.get_mpz_t(), den(q).get_mpz_t());
                    l = ll;
                }
        if (g == 0) return *this;
        Rat scale = make_rat(l, g);  // positive
        UniPoly r = *this;
        for (auto& coef : r.c) coef = coef * scale;
        return r;
    }

    std::string to_string(const std::string& var = "x") const;
};

// Pseudo-remainder with a guaranteed-positive multiplier: returns R with
// lc(b)^e * a = q*b + R for an even exponent e.
inline UniPoly pseudo_rem_pos(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero()) throw arith_error("pseudo-division by zero");
    FieldElement lcb = b.c.back();
    UniPoly cur = a;
    int steps = 0;
    while (!cur.is_zero() && cur.degree() >= b.degree()) {
        int shift = cur.degree() - b.degree();
        FieldElement lead = cur.c.back();
        UniPoly scaled = cur * lcb;
        for (size_t i = 0; i < b.c.size(); ++i) {
            size_t at = (size_t)shift + i;
            scaled.c[at] = scaled.c[at] - lead * b.c[i];
        }
        scaled.trim();
        cur = scaled;
        ++steps;
    }
    if (steps % 2) cur = cur * lcb;  // even total multiplier, so positive
    return cur;
}

inline UniPoly uni_gcd(UniPoly a, UniPoly b) {
    a = a.content_normalized();
    b = b.content_normalized();
    while (!b.is_zero()) {
        UniPoly r = pseudo_rem_pos(a, b).content_normalized();
        a = b;
        b = r;
    }
    return a.monic();
}

inline UniPoly squarefree_part(const UniPoly& p) {
    if (p.degree() <= 1) return p.content_normalized();
    UniPoly q = p.content_normalized();
    UniPoly g = uni_gcd(q, q.derivative());
    if (g.degree() == 0) return q;
    return q.divmod(g).first.content_normalized();
}

inline UniPoly to_unipoly(const MultiPoly& p, const std::string& var) {
    auto cs = p.coeffs_in(var);
    std::vector<FieldElement> c(cs.size());
    for (size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_constant())
            throw arith_error("to_unipoly: polynomial not univariate in " + var);
        c[i] = cs[i].constant_value();
    }
    return UniPoly(std::move(c));
}

inline MultiPoly to_multipoly(const UniPoly& p, const std::string& var) {
    MultiPoly r({var});
    for (size_t i = 0; i < p.c.size(); ++i) r.add_term(ExpVec{(int)i}, p.c[i]);
    return r;
}

inline std::string UniPoly::to_string(const std::string& var) const {
    return to_multipoly(*this, var).to_string();
}

// ---------------------------------------------------------------------------
// Sturm sequences

// Positive rescaling of chain members leaves sign variations unchanged, so
// the remainders come from positive pseudo-division plus content removal.
inline std::vector<UniPoly> sturm_chain(const UniPoly& p) {
    std::vector<UniPoly> chain;
    chain.push_back(p.content_normalized());
    chain.push_back(p.derivative().content_normalized());
    while (!chain.back().is_zero() && chain.back().degree() > 0) {
        UniPoly r = pseudo_rem_pos(chain[chain.size() - 2], chain.back());
        if (r.is_zero()) break;
        chain.push_back((-r).content_normalized());
    }
    return chain;
}

inline int sign_variations(const std::vector<UniPoly>& chain, const Rat& x) {
    int var = 0, last = 0;
    for (auto& p : chain) {
        int s = p.is_zero() ? 0 : p.sign_at(x);
        if (s == 0) continue;
        if (last != 0 && s != last) ++var;
        last = s;
    }
    return var;
}

// Distinct real roots in (a, b] for a squarefree chain with p(a), p(b) != 0.
inline int sturm_count(const std::vector<UniPoly>& chain, const Rat& a, const Rat& b) {
    return sign_variations(chain, a) - sign_variations(chain, b);
}

// A real root, either pinned exactly at a rational or isolated in an open
// interval whose rational endpoints are not roots.
struct RootLoc {
    Rat lo, hi;  // lo == hi marks an exact rational root
    bool exact() const { return lo == hi; }
    Rat sample() const { return (lo + hi) / 2; }
};

namespace detail {

inline void isolate_rec(const UniPoly& sp, const std::vector<UniPoly>& chain, const Rat& a,
                        const Rat& b, std::vector<RootLoc>& out) {
    int n = sturm_count(chain, a, b);
    if (n == 0) return;
    if (n == 1) {
        out.push_back({a, b});
        return;
    }
    Rat m = (a + b) / 2;
    if (sp.sign_at(m) == 0) {
        out.push_back({m, m});
        UniPoly lin({FieldElement(Rat(-m)), FieldElement(Rat(1))});
        UniPoly rest = sp.divmod(lin).first;
        auto sub = sturm_chain(rest);
        isolate_rec(rest, sub, a, m, out);
        isolate_rec(rest, sub, m, b, out);
        return;
    }
    isolate_rec(sp, chain, a, m, out);
    isolate_rec(sp, chain, m, b, out);
}

// One bisection step toward the root, staying sound: (lo, hi) keeps the sign
// change of sp.
inline bool bisect_step(const UniPoly& sp, RootLoc& r) {
    if (r.exact()) return false;
    Rat m = (r.lo + r.hi) / 2;
    int sm = sp.sign_at(m);
    if (sm == 0) {
        r.lo = r.hi = m;
        return true;
    }
    if (sm == sp.sign_at(r.lo))
        r.lo = m;
    else
        r.hi = m;
    return true;
}

}  // namespace detail

// Distinct real roots of p in the OPEN interval (a, b): sorted, pairwise
// strictly disjoint, and strictly inside (a, b).
inline std::vector<RootLoc> isolate_roots(const UniPoly& p, const Rat& a, const Rat& b) {
    std::vector<RootLoc> out;
    if (p.is_zero()) throw arith_error("isolate_roots of zero polynomial");
    if (a >= b) return out;
    UniPoly sp = squarefree_part(p);
    if (sp.degree() < 1) return out;
    // strip roots sitting exactly on the excluded endpoints
    while (sp.sign_at(a) == 0)
        sp = sp.divmod(UniPoly({FieldElement(Rat(-a)), FieldElement(Rat(1))})).first;
    while (sp.degree() >= 1 && sp.sign_at(b) == 0)
        sp = sp.divmod(UniPoly({FieldElement(Rat(-b)), FieldElement(Rat(1))})).first;
    if (sp.degree() < 1) return out;
    auto chain = sturm_chain(sp);
    detail::isolate_rec(sp, chain, a, b, out);
    std::sort(out.begin(), out.end(),
              [](const RootLoc& x, const RootLoc& y) { return x.lo < y.lo; });
    // shrink so every interval is strictly inside (a, b) ...
    for (auto& r : out)
        while (!r.exact() && (r.lo <= a || r.hi >= b)) detail::bisect_step(sp, r);
    // ... and strictly disjoint from its neighbours
    for (size_t i = 0; i + 1 < out.size(); ++i)
        while (std::max(out[i].hi, out[i].lo) >= std::min(out[i + 1].lo, out[i + 1].hi) &&
               !(out[i].exact() && out[i + 1].exact())) {
            detail::bisect_step(sp, out[i]);
            detail::bisect_step(sp, out[i + 1]);
        }
    return out;
}

inline RootLoc refine_root(const UniPoly& p, RootLoc loc, const Rat& width) {
    UniPoly sp = squarefree_part(p);
    while (!loc.exact() && loc.hi - loc.lo > width) detail::bisect_step(sp, loc);
    return loc;
}

enum class IntervalVerdict { AllPositive, AllNegative, HasZeroOrMixed };

// Exact sign verdict of p on an interval; strict_lo / strict_hi exclude the
// corresponding endpoint (the (0,T] checks pass strict_lo = true).
inline IntervalVerdict sign_on_interval(const UniPoly& p, const Rat& a, const Rat& b,
                                        bool strict_lo = false, bool strict_hi = false) {
    if (p.is_zero()) return IntervalVerdict::HasZeroOrMixed;
    if (p.degree() == 0) {
        int s = p.c[0].sign();
        return s > 0   ? IntervalVerdict::AllPositive
               : s < 0 ? IntervalVerdict::AllNegative
                       : IntervalVerdict::HasZeroOrMixed;
    }
    if (a > b) throw arith_error("sign_on_interval: empty interval");
    UniPoly q = p.content_normalized();
    if (a == b) {
        int s = q.sign_at(a);
        return s > 0   ? IntervalVerdict::AllPositive
               : s < 0 ? IntervalVerdict::AllNegative
                       : IntervalVerdict::HasZeroOrMixed;
    }
    auto roots = isolate_roots(q, a, b);
    if (!roots.empty()) return IntervalVerdict::HasZeroOrMixed;
    int s = q.sign_at((a + b) / 2);  // constant inside, endpoints aside
    if (s == 0) return IntervalVerdict::HasZeroOrMixed;
    if (!strict_lo && q.sign_at(a) != s) return IntervalVerdict::HasZeroOrMixed;
    if (!strict_hi && q.sign_at(b) != s) return IntervalVerdict::HasZeroOrMixed;
    return s > 0 ? IntervalVerdict::AllPositive : IntervalVerdict::AllNegative;
}

// Where is p strictly negative on the interval, if anywhere?  Used both to
// decide "p >= 0 on I" and to produce refutation points for the sandwich
// escalation loop.
inline std::optional<Rat> negative_witness(const UniPoly& p0, const Rat& a, const Rat& b,
                                           bool strict_lo, bool strict_hi) {
    if (p0.is_zero()) return std::nullopt;
    UniPoly p = p0.content_normalized();
    if (p.degree() == 0) {
        if (p.c[0].sign() < 0) return (a + b) / 2;
        return std::nullopt;
    }
    if (!strict_lo && p.sign_at(a) < 0) return a;
    if (!strict_hi && p.sign_at(b) < 0) return b;
    if (a >= b) return std::nullopt;
    auto roots = isolate_roots(p, a, b);
    Rat prev = a;
    std::vector<Rat> samples;
    for (auto& r : roots) {
        samples.push_back((prev + r.lo) / 2);
        prev = r.hi;
    }
    samples.push_back((prev + b) / 2);
    for (auto& s : samples)
        if (p.sign_at(s) < 0) return s;
    return std::nullopt;
}

inline bool nonneg_on(const UniPoly& p, const Rat& a, const Rat& b, bool strict_lo,
                      bool strict_hi) {
    return !negative_witness(p, a, b, strict_lo, strict_hi).has_value();
}

// Cauchy-style bound: every real root of p lies in (-B, B).
inline Rat root_bound(const UniPoly& p) {
    if (p.degree() < 1) return Rat(1);
    unsigned bits = 16;
    while (true) {
        RatInterval lead = p.c.back().enclosure(bits);
        if (lead.sign_known()) {
            Rat lead_low = std::min(rat_abs(lead.lo), rat_abs(lead.hi));
            Rat mx(0);
            for (size_t i = 0; i + 1 < p.c.size(); ++i) {
                RatInterval ci = p.c[i].enclosure(bits);
                mx = std::max(mx, std::max(rat_abs(ci.lo), rat_abs(ci.hi)));
            }
            return Rat(1) + mx / lead_low;
        }
        bits *= 2;
    }
}

}  // namespace tepreach
