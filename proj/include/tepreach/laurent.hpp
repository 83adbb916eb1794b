#pragma once

// The Laurent-polynomial side of TEP algebra: integral bases via Hermite
// normal form, the Euler-substitution encoding  F = numer / (Y^dy Z^dz),
// formal conjugation, and the factorization of a real TEP into real-valued
// multiple-root-free factors (the paper's central preprocessing step).

#include "tepreach/polyops.hpp"
#include "tepreach/tep.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace tepreach {

// ---------------------------------------------------------------------------
// Hermite normal form of the row lattice of an integer matrix.

struct HnfResult {
    std::vector<std::vector<Int>> basis;   // echelon lattice basis, pivots positive
    std::vector<std::vector<Int>> coords;  // each input row as an integer combination
};

inline HnfResult hermite_normal_form(std::vector<std::vector<Int>> rows) {
    size_t nrows = rows.size();
    size_t ncols = nrows ? rows[0].size() : 0;
    std::vector<std::vector<Int>> m = rows;
    size_t rank = 0;
    std::vector<size_t> pivot_cols;
    for (size_t col = 0; col < ncols && rank < m.size(); ++col) {
        // gcd-eliminate below the pivot
        while (true) {
            size_t best = m.size();
            for (size_t i = rank; i < m.size(); ++i) {
                if (m[i][col] == 0) continue;
                if (best == m.size() || cmp(abs(m[i][col]), abs(m[best][col])) < 0) best = i;
            }
            if (best == m.size()) break;
            std::swap(m[rank], m[best]);
            bool reduced = true;
            for (size_t i = rank + 1; i < m.size(); ++i) {
                if (m[i][col] == 0) continue;
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), m[i][col].get_mpz_t(), m[rank][col].get_mpz_t());
                for (size_t j = 0; j < ncols; ++j) m[i][j] -= q * m[rank][j];
                if (m[i][col] != 0) reduced = false;
            }
            if (reduced) break;
        }
        if (m[rank][col] == 0) continue;
        if (m[rank][col] < 0)
            for (size_t j = 0; j < ncols; ++j) m[rank][j] = -m[rank][j];
        // reduce the rows above into the HNF range
        for (size_t i = 0; i < rank; ++i) {
            Int q;
            mpz_fdiv_q(q.get_mpz_t(), m[i][col].get_mpz_t(), m[rank][col].get_mpz_t());
            if (q != 0)
                for (size_t j = 0; j < ncols; ++j) m[i][j] -= q * m[rank][j];
        }
        pivot_cols.push_back(col);
        ++rank;
    }
    m.resize(rank);

    HnfResult out;
    out.basis = m;
    out.coords.resize(nrows);
    for (size_t i = 0; i < nrows; ++i) {
        std::vector<Int> residual = rows[i];
        std::vector<Int> ks(rank, Int(0));
        for (size_t r = 0; r < rank; ++r) {
            size_t pc = pivot_cols[r];
            Int q, rem;
            mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), residual[pc].get_mpz_t(),
                        m[r][pc].get_mpz_t());
            if (rem != 0) throw arith_error("HNF coordinate solve failed");
            ks[r] = q;
            for (size_t j = 0; j < ncols; ++j) residual[j] -= q * m[r][j];
        }
        for (auto& x : residual)
            if (x != 0) throw arith_error("input row outside HNF lattice");
        out.coords[i] = ks;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integral basis of a set of real field elements (Def-2.3 style): every input
// is an integer combination of a Q-linearly-independent basis.

struct IntegralBasis {
    std::vector<FieldElement> basis;
    std::vector<std::vector<Int>> coords;  // coords[i] expresses elems[i]
};

inline IntegralBasis integral_basis(const std::vector<FieldElement>& elems) {
    if (elems.empty()) throw arith_error("integral basis of empty set");
    // coordinate columns: radicands descending, the rational unit (1) last
    std::set<Int> rad_set{Int(1)};
    for (auto& e : elems) {
        if (!e.is_real()) throw arith_error("integral basis needs real elements");
        for (auto& r : e.radicands()) rad_set.insert(r);
    }
    std::vector<Int> cols(rad_set.rbegin(), rad_set.rend());

    Int L(1);
    for (auto& e : elems)
        for (auto& [s, q] : e.re_coords()) {
            Int l;
            mpz_lcm(l.get_mpz_t(), L.get_mpz_t(), den(q).get_mpz_t());
            L = l;
        }
    std::vector<std::vector<Int>> rows(elems.size(), std::vector<Int>(cols.size(), Int(0)));
    for (size_t i = 0; i < elems.size(); ++i)
        for (auto& [s, q] : elems[i].re_coords()) {
            size_t j = (size_t)(std::find(cols.begin(), cols.end(), s) - cols.begin());
            rows[i][j] = num(q) * (L / den(q));
        }
    HnfResult h = hermite_normal_form(rows);

    IntegralBasis out;
    out.coords = h.coords;
    for (auto& brow : h.basis) {
        FieldElement::Coords c;
        for (size_t j = 0; j < cols.size(); ++j)
            if (brow[j] != 0) c[cols[j]] = make_rat(brow[j], L);
        out.basis.push_back(FieldElement::make(std::move(c)));
    }
    // flip each basis vector so the first input using it does so positively
    for (size_t b = 0; b < out.basis.size(); ++b) {
        for (size_t i = 0; i < elems.size(); ++i) {
            if (out.coords[i][b] == 0) continue;
            if (out.coords[i][b] < 0) {
                out.basis[b] = -out.basis[b];
                for (size_t k = 0; k < elems.size(); ++k) out.coords[k][b] = -out.coords[k][b];
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Laurent encoding of a Tep.

struct LaurentForm {
    std::string var;
    std::vector<std::string> params;
    std::vector<FieldElement> exp_basis;   // rates of Y symbols
    std::vector<FieldElement> freq_basis;  // frequencies of Z symbols (e^{I b x})
    MultiPoly numer;                       // ring: var, params..., @Y<i>.., @Z<j>..
    std::vector<long> denom_y, denom_z;    // F = numer / (Y^dy * Z^dz)

    std::vector<std::string> ring() const {
        std::vector<std::string> vs{var};
        for (auto& p : params) vs.push_back(p);
        for (size_t i = 0; i < exp_basis.size(); ++i) vs.push_back("@Y" + std::to_string(i));
        for (size_t j = 0; j < freq_basis.size(); ++j) vs.push_back("@Z" + std::to_string(j));
        return vs;
    }
};

namespace detail {

// Sparse polynomial with signed exponents, used while clearing denominators.
struct SignedPoly {
    std::map<std::vector<long>, FieldElement> terms;

    void add(const std::vector<long>& e, const FieldElement& c) {
        if (c.is_zero()) return;
        auto it = terms.find(e);
        if (it == terms.end())
            terms.emplace(e, c);
        else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
};

inline SignedPoly signed_mul(const SignedPoly& a, const SignedPoly& b) {
    SignedPoly r;
    for (auto& [ea, ca] : a.terms)
        for (auto& [eb, cb] : b.terms) {
            std::vector<long> e = ea;
            for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            r.add(e, ca * cb);
        }
    return r;
}

}  // namespace detail

// Euler substitution: sin(vx) = (Z^w - Z^-w)/(2I), cos(rx) = (Z^w + Z^-w)/2,
// e^{ux} = Y^k, with w, k the integral-basis coordinates.
inline LaurentForm to_laurent(const Tep& F) {
    LaurentForm L;
    L.var = F.var;
    L.params = F.params;

    std::vector<std::vector<Int>> rate_coords, freq_coords;
    if (!F.rates.empty()) {
        IntegralBasis ib = integral_basis(F.rates);
        L.exp_basis = ib.basis;
        rate_coords = ib.coords;
    }
    std::vector<FieldElement> freqs = F.sin_freqs;
    for (auto& r : F.cos_freqs) freqs.push_back(r);
    if (!freqs.empty()) {
        IntegralBasis ib = integral_basis(freqs);
        L.freq_basis = ib.basis;
        freq_coords = ib.coords;
    }
    size_t m = L.exp_basis.size(), n = L.freq_basis.size();
    size_t head = 1 + F.params.size();  // var + params lead the exponent vector

    FieldElement I = FieldElement::imaginary();
    FieldElement half(Rat(1, 2));
    FieldElement inv2I = (FieldElement(Rat(2)) * I).inverse();

    detail::SignedPoly acc;
    for (auto& [e, c] : F.body.terms()) {
        std::vector<long> base(head + m + n, 0);
        base[0] = e[0];
        for (size_t p = 0; p < F.params.size(); ++p) base[1 + p] = e[1 + p];
        // exponential symbols: shift Y coordinates
        for (size_t i = 0; i < F.rates.size(); ++i) {
            long cnt = e[head + i];
            if (!cnt) continue;
            for (size_t b = 0; b < m; ++b)
                base[head + b] += cnt * rate_coords[i][b].get_si();
        }
        detail::SignedPoly zpart;
        zpart.add(std::vector<long>(head + m + n, 0), c);
        for (size_t j = 0; j < F.sin_freqs.size(); ++j) {
            long cnt = e[head + F.rates.size() + j];
            for (long k = 0; k < cnt; ++k) {
                detail::SignedPoly f;
                std::vector<long> up(head + m + n, 0), dn(head + m + n, 0);
                for (size_t b = 0; b < n; ++b) {
                    up[head + m + b] = freq_coords[j][b].get_si();
                    dn[head + m + b] = -freq_coords[j][b].get_si();
                }
                f.add(up, inv2I);
                f.add(dn, -inv2I);
                zpart = detail::signed_mul(zpart, f);
            }
        }
        for (size_t j2 = 0; j2 < F.cos_freqs.size(); ++j2) {
            size_t row = F.sin_freqs.size() + j2;
            long cnt = e[head + F.rates.size() + F.sin_freqs.size() + j2];
            for (long k = 0; k < cnt; ++k) {
                detail::SignedPoly f;
                std::vector<long> up(head + m + n, 0), dn(head + m + n, 0);
                for (size_t b = 0; b < n; ++b) {
                    up[head + m + b] = freq_coords[row][b].get_si();
                    dn[head + m + b] = -freq_coords[row][b].get_si();
                }
                f.add(up, half);
                f.add(dn, half);
                zpart = detail::signed_mul(zpart, f);
            }
        }
        // base carries the var/param/Y shifts, zpart only the Z shifts
        for (auto& [ez, cz] : zpart.terms) {
            std::vector<long> full = base;
            for (size_t b = 0; b < n; ++b) full[head + m + b] = ez[head + m + b];
            acc.add(full, cz);
        }
    }

    // clear to a true polynomial: record the denominator monomial
    std::vector<long> mins(head + m + n, 0);
    bool first = true;
    for (auto& [e, c] : acc.terms) {
        for (size_t i = head; i < e.size(); ++i)
            mins[i] = first ? e[i] : std::min(mins[i], e[i]);
        first = false;
    }
    L.denom_y.assign(m, 0);
    L.denom_z.assign(n, 0);
    for (size_t b = 0; b < m; ++b) L.denom_y[b] = -mins[head + b];
    for (size_t b = 0; b < n; ++b) L.denom_z[b] = -mins[head + m + b];

    L.numer = MultiPoly(L.ring());
    for (auto& [e, c] : acc.terms) {
        ExpVec exp(e.size());
        for (size_t i = 0; i < head; ++i) exp[i] = (int)e[i];
        for (size_t i = head; i < e.size(); ++i) exp[i] = (int)(e[i] - mins[i]);
        L.numer.add_term(exp, c);
    }
    return L;
}

// LRhom: map back to the (complex) TEP the Laurent form encodes; z_shift is a
// rational exponent offset subtracted from every Z exponent.
inline Tep laurent_to_tep(const MultiPoly& poly, const LaurentForm& L,
                          const std::vector<Rat>& z_shift = {}) {
    Tep acc(L.var);
    acc.params = L.params;
    size_t head = 1 + L.params.size();
    FieldElement I = FieldElement::imaginary();
    std::vector<std::string> head_ring{L.var};
    for (auto& p : L.params) head_ring.push_back(p);
    for (auto& [e, c] : poly.terms()) {
        ExpVec he(head, 0);
        for (size_t i = 0; i < head; ++i) he[i] = e[i];
        Tep term = Tep::poly(MultiPoly::monomial(c, he, head_ring), L.var, L.params);
        FieldElement rate;
        for (size_t b = 0; b < L.exp_basis.size(); ++b)
            rate = rate + L.exp_basis[b] * Rat(e[head + b]);
        if (!rate.is_zero()) term = term * Tep::exp_term(rate, L.var);
        FieldElement freq;
        for (size_t b = 0; b < L.freq_basis.size(); ++b) {
            Rat zexp(e[head + L.exp_basis.size() + b]);
            if (b < z_shift.size()) zexp -= z_shift[b];
            freq = freq + L.freq_basis[b] * zexp;
        }
        if (!freq.is_zero()) {
            // e^{I freq x} = cos(freq x) + I sin(freq x)
            Tep circ = Tep::cos_term(freq, L.var) + Tep::sin_term(freq, L.var) * I;
            term = term * circ;
        }
        acc = acc + term;
    }
    return acc;
}

inline Tep laurent_value(const LaurentForm& L) {
    std::vector<Rat> shift(L.freq_basis.size());
    for (size_t b = 0; b < shift.size(); ++b) shift[b] = Rat(L.denom_z[b]);
    Tep t = laurent_to_tep(L.numer, L, shift);
    // divide by Y^dy: multiply by e^{-(dy . A) x}
    FieldElement rate;
    for (size_t b = 0; b < L.exp_basis.size(); ++b)
        rate = rate - L.exp_basis[b] * Rat(L.denom_y[b]);
    if (!rate.is_zero()) t = t * Tep::exp_term(rate, L.var);
    return t;
}

// Formal conjugate of a Laurent numerator: conjugate coefficients, negate Z
// exponents, then clear again.  con(Q) = result.poly * Z^{-result.shift}.
struct ConImage {
    MultiPoly poly;
    std::vector<long> shift;
};

inline ConImage con_cleared(const MultiPoly& q, const LaurentForm& L) {
    size_t head = 1 + L.params.size();
    size_t m = L.exp_basis.size(), n = L.freq_basis.size();
    std::vector<long> maxz(n, 0);
    for (auto& [e, c] : q.terms())
        for (size_t b = 0; b < n; ++b) maxz[b] = std::max(maxz[b], (long)e[head + m + b]);
    MultiPoly out(q.vars());
    for (auto& [e, c] : q.terms()) {
        ExpVec ne = e;
        for (size_t b = 0; b < n; ++b) ne[head + m + b] = (int)(maxz[b] - e[head + m + b]);
        out.add_term(ne, c.conj());
    }
    return {out, maxz};
}

// ---------------------------------------------------------------------------
// Factorization of a real TEP into real multiple-root-free factors.

struct TepFactor {
    Tep factor;
    int multiplicity;
};

struct TepFactorization {
    FieldElement constant;  // real
    std::vector<TepFactor> factors;
    bool squarefree_input = false;  // single factor of multiplicity 1

    Tep recombine(const std::string& var) const {
        Tep acc = Tep::constant(constant, var);
        for (auto& [f, m] : factors) acc = acc * f.pow((unsigned)m);
        return acc;
    }
};

struct factor_error : arith_error {
    explicit factor_error(const std::string& msg) : arith_error(msg) {}
};

namespace detail {

// P == C * monomial * Q for a constant C?  Returns (C, exponent offset).
inline std::optional<std::pair<FieldElement, ExpVec>> monomial_quotient(const MultiPoly& p,
                                                                        const MultiPoly& q) {
    if (p.terms().size() != q.terms().size() || p.terms().empty()) return std::nullopt;
    auto [ep, cp] = p.leading_term();
    auto [eq, cq] = q.leading_term();
    ExpVec delta(ep.size());
    for (size_t i = 0; i < ep.size(); ++i) delta[i] = ep[i] - eq[i];
    FieldElement c = cp / cq;
    auto itp = p.terms().begin();
    auto itq = q.terms().begin();
    for (; itp != p.terms().end(); ++itp, ++itq) {
        for (size_t i = 0; i < delta.size(); ++i)
            if (itp->first[i] != itq->first[i] + delta[i]) return std::nullopt;
        if (itp->second != itq->second * c) return std::nullopt;
    }
    return std::make_pair(c, delta);
}

// Try to split a square-free factor that is a univariate quadratic with
// constant coefficients into two linear factors over the ambient field.
inline std::optional<std::vector<MultiPoly>> split_quadratic(const MultiPoly& f,
                                                             const std::set<Int>& ambient) {
    std::string var;
    for (auto& v : f.vars()) {
        if (!f.depends_on(v)) continue;
        if (!var.empty()) return std::nullopt;
        var = v;
    }
    if (var.empty() || f.degree(var) != 2) return std::nullopt;
    auto cs = f.coeffs_in(var);
    for (auto& c : cs)
        if (!c.is_constant()) return std::nullopt;
    FieldElement a = cs[2].constant_value();
    FieldElement b = cs.size() > 1 ? cs[1].constant_value() : FieldElement();
    FieldElement c0 = cs.size() > 0 ? cs[0].constant_value() : FieldElement();
    FieldElement disc = b * b - FieldElement(Rat(4)) * a * c0;
    auto w = disc.try_sqrt();
    if (!w) return std::nullopt;
    for (auto& r : w->radicands())
        if (!ambient.count(r)) return std::nullopt;  // stay inside the coefficient field
    FieldElement inv2a = (FieldElement(Rat(2)) * a).inverse();
    FieldElement r1 = (-b + *w) * inv2a, r2 = (-b - *w) * inv2a;
    if (r1 == r2) return std::nullopt;  // not square-free; leave untouched
    MultiPoly x = MultiPoly::variable(var, f.vars());
    MultiPoly f1 = x - MultiPoly::constant(r1, f.vars());
    MultiPoly f2 = (x - MultiPoly::constant(r2, f.vars())) * a;
    return std::vector<MultiPoly>{f1, f2};
}

}  // namespace detail

// Algorithm-1 style factorization: F = C0 * f1^r1 * ... * fn^rn with real
// factors, no multiple roots except possibly 0, pairwise no common roots.
inline TepFactorization factor_multiple_root_free(const Tep& F) {
    if (!F.params.empty()) throw factor_error("factorization with free parameters");
    if (!F.body.has_real_coefficients()) throw factor_error("input TEP must be real");
    if (F.body.is_zero()) throw factor_error("factorization of the zero TEP");

    LaurentForm L = to_laurent(F);
    if (L.numer.is_constant()) {
        TepFactorization out;
        out.constant = L.numer.constant_value();
        if (!out.constant.is_real()) throw factor_error("constant TEP came out non-real");
        // a pure exponential denominator still carries e^{...x}
        FieldElement rate;
        for (size_t b = 0; b < L.exp_basis.size(); ++b)
            rate = rate - L.exp_basis[b] * Rat(L.denom_y[b]);
        if (!rate.is_zero())
            out.factors.push_back({Tep::exp_term(rate, L.var), 1});
        return out;
    }

    std::set<Int> ambient;
    for (auto& [e, c] : L.numer.terms())
        for (auto& r : c.radicands()) ambient.insert(r);

    SquareFreeDecomposition sfd = squarefree_decompose(L.numer);
    // refine repeated groups: split constant-coefficient quadratics over the
    // ambient field, so e.g. ((z-1)(I-z))^2 separates like the displayed
    // irreducible factorizations do; multiplicity-1 groups are already
    // multiple-root-free and stay whole
    std::vector<std::pair<MultiPoly, int>> parts;
    for (auto& [f, mult] : sfd.factors) {
        auto split = mult > 1 ? detail::split_quadratic(f, ambient) : std::nullopt;
        if (split) {
            for (auto& g : *split) {
                FieldElement lc = g.leading_term().second;
                for (int i = 0; i < mult; ++i) sfd.constant = sfd.constant * lc;
                parts.emplace_back(g.monic_lex(), mult);
            }
        } else {
            parts.emplace_back(f, mult);
        }
    }

    TepFactorization out;
    out.squarefree_input = (parts.size() == 1 && parts[0].second == 1);
    if (out.squarefree_input) {
        // the input is its own multiple-root-free factor; only normalize sign
        Tep f = F;
        FieldElement c(Rat(1));
        auto nf = f.normal_form();
        FieldElement lead = nf.rbegin()->second.leading_term().second;
        if (lead.sign() < 0) {
            f = -f;
            c = FieldElement(Rat(-1));
        }
        out.constant = c;
        out.factors.push_back({f, 1});
        return out;
    }
    FieldElement C0 = sfd.constant;
    size_t head = 1 + L.params.size();
    size_t m = L.exp_basis.size(), n = L.freq_basis.size();

    // each factor must be conjugation-stable; merge conjugate pairs if not
    std::vector<std::pair<MultiPoly, int>> stable;
    std::vector<bool> used(parts.size(), false);
    for (size_t i = 0; i < parts.size(); ++i) {
        if (used[i]) continue;
        ConImage ci = con_cleared(parts[i].first, L);
        if (detail::monomial_quotient(parts[i].first, ci.poly)) {
            stable.push_back(parts[i]);
            used[i] = true;
            continue;
        }
        bool paired = false;
        for (size_t j = i + 1; j < parts.size() && !paired; ++j) {
            if (used[j] || parts[j].second != parts[i].second) continue;
            if (detail::monomial_quotient(parts[j].first, ci.poly)) {
                stable.emplace_back(parts[i].first * parts[j].first, parts[i].second);
                used[i] = used[j] = true;
                paired = true;
            }
        }
        if (!paired)
            throw factor_error("factor is neither conjugation-stable nor pairable: " +
                               parts[i].first.to_string());
    }

    std::vector<Rat> shift_total(n, Rat(0));  // sum of r_i * q_i / 2

    for (auto& [P, mult] : stable) {
        ConImage ci = con_cleared(P, L);
        auto mq = detail::monomial_quotient(P, ci.poly);
        if (!mq) throw factor_error("conjugation-stability lost after merge");
        auto [Ci_raw, delta] = *mq;
        // P = Ci * Z^q * con(P), with q = delta + clearing shift
        std::vector<long> q(n, 0);
        for (size_t b = 0; b < n; ++b) q[b] = delta[head + m + b] + ci.shift[b];
        for (size_t i = 0; i < head + m; ++i)
            if (delta[i] != 0) throw factor_error("conjugate quotient not a Z monomial");
        FieldElement Ci = Ci_raw;
        if (!(Ci * Ci.conj() == FieldElement(Rat(1))))
            throw factor_error("factor unit is not unimodular: " + P.to_string());
        auto Wi = Ci.try_sqrt();
        if (!Wi)
            throw factor_error("unit square root leaves the multiquadratic class for factor " +
                               P.to_string());
        FieldElement Winv = Wi->inverse();

        // group terms by (Y exponents, doubled shifted Z exponents)
        std::map<std::pair<ExpVec, std::vector<long>>, MultiPoly> groups;
        std::vector<std::string> coef_ring{L.var};
        for (auto& [e, c] : P.terms()) {
            ExpVec yexp(m, 0);
            for (size_t b = 0; b < m; ++b) yexp[b] = e[head + b];
            std::vector<long> d(n, 0);
            for (size_t b = 0; b < n; ++b) d[b] = 2 * (long)e[head + m + b] - q[b];
            MultiPoly add = MultiPoly::monomial(c * Winv, ExpVec{e[0]}, coef_ring);
            auto key = std::make_pair(yexp, d);
            auto it = groups.find(key);
            if (it == groups.end())
                groups.emplace(key, add);
            else
                it->second = it->second + add;
        }

        // real or pure-imaginary classification, done symbolically
        auto negated = [&](const std::vector<long>& d) {
            std::vector<long> nd(d.size());
            for (size_t b = 0; b < d.size(); ++b) nd[b] = -d[b];
            return nd;
        };
        bool real_ok = true, imag_ok = true;
        for (auto& [key, A] : groups) {
            auto it = groups.find({key.first, negated(key.second)});
            if (it == groups.end()) {
                real_ok = imag_ok = false;
                break;
            }
            MultiPoly cj = it->second.conj_coefficients();
            if (!(cj == A)) real_ok = false;
            if (!(cj == -A)) imag_ok = false;
        }
        if (!real_ok && !imag_ok)
            throw factor_error("factor fails real/imaginary classification: " + P.to_string());
        if (!real_ok) {
            // rotate f/I and push the unit into the constant
            FieldElement negI = -FieldElement::imaginary();
            for (auto& [key, A] : groups) A = A * negI;
            FieldElement Ir(Rat(1));
            for (int k = 0; k < mult; ++k) Ir = Ir * FieldElement::imaginary();
            C0 = C0 * Ir;
        }

        // assemble the real TEP factor
        FieldElement two(Rat(2)), inv2I = (FieldElement(Rat(2)) * FieldElement::imaginary()).inverse();
        Tep fi(L.var);
        for (auto& [key, A] : groups) {
            auto& [yexp, d] = key;
            FieldElement rate;
            for (size_t b = 0; b < m; ++b) rate = rate + L.exp_basis[b] * Rat(yexp[b]);
            FieldElement freq;
            for (size_t b = 0; b < n; ++b) freq = freq + L.freq_basis[b] * make_rat(Int(d[b]), Int(2));
            int fs = freq.sign();
            if (fs < 0) continue;  // handled by the mirrored representative
            Tep term(L.var);
            if (fs == 0) {
                if (!A.has_real_coefficients())
                    throw factor_error("self-conjugate group with non-real coefficients");
                term = Tep::poly(A.in_ring({L.var}), L.var);
            } else {
                MultiPoly re = (A + A.conj_coefficients()) * FieldElement(Rat(1, 2));
                MultiPoly im = (A - A.conj_coefficients()) * inv2I;
                term = Tep::poly((re * two).in_ring({L.var}), L.var) * Tep::cos_term(freq, L.var) -
                       Tep::poly((im * two).in_ring({L.var}), L.var) * Tep::sin_term(freq, L.var);
            }
            if (!rate.is_zero()) term = term * Tep::exp_term(rate, L.var);
            fi = fi + term;
        }

        // normalize the factor sign deterministically: leading normal-form
        // coefficient positive
        auto nf = fi.normal_form();
        if (nf.empty()) throw factor_error("factor reconstructed as zero");
        FieldElement lead = nf.rbegin()->second.leading_term().second;
        if (lead.sign() < 0) {
            fi = -fi;
            if (mult % 2) C0 = -C0;
        }

        for (int k = 0; k < mult; ++k) C0 = C0 * *Wi;
        for (size_t b = 0; b < n; ++b) shift_total[b] += Rat(mult) * make_rat(Int(q[b]), Int(2));
        out.factors.push_back({fi, mult});
    }

    // the factor half-shifts must absorb the Z denominator exactly
    for (size_t b = 0; b < n; ++b)
        if (shift_total[b] != Rat(L.denom_z[b]))
            throw factor_error("internal: Z denominator not absorbed by factor shifts");

    // a leftover pure-exponential unit from the Y denominator
    FieldElement unit_rate;
    for (size_t b = 0; b < m; ++b) unit_rate = unit_rate - L.exp_basis[b] * Rat(L.denom_y[b]);
    if (!unit_rate.is_zero()) out.factors.push_back({Tep::exp_term(unit_rate, L.var), 1});

    if (!C0.is_real())
        throw factor_error("accumulated constant is not real: " + C0.to_string());
    out.constant = C0;

    std::sort(out.factors.begin(), out.factors.end(), [](const TepFactor& a, const TepFactor& b) {
        if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
        return a.factor.to_string() < b.factor.to_string();
    });

    // exact product identity via the additive normal form
    if (!out.recombine(F.var).same_value(F))
        throw factor_error("internal: factorization product identity failed");
    return out;
}

}  // namespace tepreach
