#pragma once

// GCD, square-free decomposition, and resultants for MultiPoly.
//
// GCD runs a primitive PRS, recursing on the variable order for contents.
// Square-free decomposition is Yun's algorithm along a main variable followed
// by content recursion and a pairwise-coprimality refinement.  The resultant
// is the Sylvester determinant, computed fraction-free (Bareiss) so every
// intermediate division is exact.

#include "tepreach/multipoly.hpp"

#include <optional>
#include <vector>

namespace tepreach {

MultiPoly multi_gcd(const MultiPoly& p, const MultiPoly& q);

namespace detail {

// Variables occurring in p, in ring order.
inline std::vector<std::string> occurring_vars(const MultiPoly& p) {
    std::vector<std::string> out;
    for (auto& v : p.vars())
        if (p.depends_on(v)) out.push_back(v);
    return out;
}

// Pseudo-remainder of a by b w.r.t. var: lc(b)^(da-db+1) * a = q*b + r.
inline MultiPoly pseudo_rem(const MultiPoly& a, const MultiPoly& b, const std::string& var) {
    int db = b.degree(var);
    MultiPoly lcb = b.leading_coeff_in(var);
    MultiPoly cur = a;
    while (!cur.is_zero() && cur.degree(var) >= db) {
        int da = cur.degree(var);
        MultiPoly lca = cur.leading_coeff_in(var);
        MultiPoly shift = MultiPoly::variable(var, cur.vars()).pow((unsigned)(da - db));
        cur = cur * lcb - (lca * shift) * b;
    }
    return cur;
}

inline MultiPoly content_in(const MultiPoly& p, const std::string& var) {
    auto cs = p.coeffs_in(var);
    MultiPoly g;
    for (auto& c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c : multi_gcd(g, c);
        if (g.is_constant()) break;
    }
    if (g.is_zero()) return MultiPoly::constant(FieldElement(Rat(0)), p.vars());
    return g;
}

// Univariate gcd over the coefficient field: plain Euclid, monic result.
inline MultiPoly euclid_gcd_1var(MultiPoly a, MultiPoly b, const std::string& var) {
    while (!b.is_zero()) {
        // a mod b by field long division
        int db = b.degree(var);
        FieldElement lcb = b.leading_coeff_in(var).constant_value();
        FieldElement inv = lcb.inverse();
        MultiPoly cur = a;
        while (!cur.is_zero() && cur.degree(var) >= db) {
            int da = cur.degree(var);
            FieldElement lca = cur.leading_coeff_in(var).constant_value();
            MultiPoly t = MultiPoly::variable(var, cur.vars()).pow((unsigned)(da - db));
            cur = cur - (t * (lca * inv)) * b;
        }
        a = b;
        b = cur;
    }
    return a.is_zero() ? a : a.monic_lex();
}

}  // namespace detail

// A gcd, primitive in its main variable and with lex-leading coefficient 1;
// gcd(0,0) = 0.
inline MultiPoly multi_gcd(const MultiPoly& p, const MultiPoly& q) {
    if (p.is_zero()) return q.is_zero() ? q : q.monic_lex();
    if (q.is_zero()) return p.monic_lex();
    auto vp = detail::occurring_vars(p);
    auto vq = detail::occurring_vars(q);
    if (vp.empty() || vq.empty())
        return MultiPoly::constant(FieldElement(Rat(1)), p.vars());

    // main variable: last occurring variable of either, so recursion descends
    std::string var = !vp.empty() && (vq.empty() || vp.back() >= vq.back()) ? vp.back() : vq.back();
    {
        // prefer a variable occurring in both, else contents split it off
        std::vector<std::string> common;
        for (auto& v : vp)
            if (std::find(vq.begin(), vq.end(), v) != vq.end()) common.push_back(v);
        if (common.empty()) {
            // gcd divides both contents w.r.t. disjoint variables -> constant
            return MultiPoly::constant(FieldElement(Rat(1)), p.vars());
        }
        var = common.back();
    }

    bool multivar = vp.size() > 1 || vq.size() > 1;
    if (!multivar && vp == vq && vp.size() == 1)
        return detail::euclid_gcd_1var(p, q, var);

    MultiPoly cp = detail::content_in(p, var);
    MultiPoly cq = detail::content_in(q, var);
    MultiPoly pp = divide_exact(p, cp);
    MultiPoly qq = divide_exact(q, cq);
    MultiPoly cont_gcd = multi_gcd(cp, cq);

    // primitive PRS on pp, qq
    MultiPoly a = pp, b = qq;
    if (a.degree(var) < b.degree(var)) std::swap(a, b);
    while (true) {
        MultiPoly r = detail::pseudo_rem(a, b, var);
        if (r.is_zero()) break;
        if (r.degree(var) == 0) {
            b = MultiPoly::constant(FieldElement(Rat(1)), p.vars());
            break;
        }
        a = b;
        b = divide_exact(r, detail::content_in(r, var));
    }
    MultiPoly g = b;
    if (!g.is_constant()) g = divide_exact(g, detail::content_in(g, var));
    MultiPoly out = cont_gcd * g;
    return out.is_zero() ? out : out.monic_lex();
}

struct SquareFreeDecomposition {
    FieldElement constant;
    std::vector<std::pair<MultiPoly, int>> factors;  // (square-free factor, multiplicity)

    MultiPoly recombine(const std::vector<std::string>& vars) const {
        MultiPoly acc = MultiPoly::constant(constant, vars);
        for (auto& [f, m] : factors) acc = acc * f.pow((unsigned)m);
        return acc;
    }
};

namespace detail {

inline void push_factor(std::vector<std::pair<MultiPoly, int>>& out, FieldElement& constant,
                        MultiPoly f, int mult) {
    if (f.is_constant()) {
        FieldElement c = f.constant_value();
        for (int i = 0; i < mult; ++i) constant = constant * c;
        return;
    }
    FieldElement lc = f.leading_term().second;
    f = f.monic_lex();
    for (int i = 0; i < mult; ++i) constant = constant * lc;
    out.emplace_back(std::move(f), mult);
}

// Yun's algorithm w.r.t. var; input must be primitive in var.
inline void yun(const MultiPoly& p, const std::string& var,
                std::vector<std::pair<MultiPoly, int>>& out, FieldElement& constant) {
    MultiPoly dp = p.derivative(var);
    MultiPoly g = multi_gcd(p, dp);
    MultiPoly c = divide_exact(p, g);
    MultiPoly d = divide_exact(dp, g) - c.derivative(var);
    int i = 1;
    while (!c.is_constant()) {
        MultiPoly a = multi_gcd(c, d);
        if (!a.is_constant()) push_factor(out, constant, a, i);
        c = divide_exact(c, a);
        d = divide_exact(d, a) - c.derivative(var);
        ++i;
    }
    MultiPoly lead = c;  // residual constant
    constant = constant * lead.constant_value();
}

}  // namespace detail

// Square-free, pairwise-coprime decomposition with exact recombination.
inline SquareFreeDecomposition squarefree_decompose(const MultiPoly& p) {
    if (p.is_zero()) throw arith_error("square-free decomposition of zero polynomial");
    SquareFreeDecomposition out;
    out.constant = FieldElement(Rat(1));

    std::function<void(const MultiPoly&)> go = [&](const MultiPoly& q) {
        auto vs = detail::occurring_vars(q);
        if (vs.empty()) {
            out.constant = out.constant * q.constant_value();
            return;
        }
        std::string var = vs.back();
        MultiPoly cont = detail::content_in(q, var);
        MultiPoly prim = divide_exact(q, cont);
        detail::yun(prim, var, out.factors, out.constant);
        go(cont);
    };
    go(p);

    // refine until factors are pairwise coprime (content recursion already
    // separates variable groups, so this seldom fires)
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < out.factors.size() && !changed; ++i)
            for (size_t j = i + 1; j < out.factors.size() && !changed; ++j) {
                MultiPoly g = multi_gcd(out.factors[i].first, out.factors[j].first);
                if (g.is_constant()) continue;
                int mi = out.factors[i].second, mj = out.factors[j].second;
                MultiPoly fi = divide_exact(out.factors[i].first, g);
                MultiPoly fj = divide_exact(out.factors[j].first, g);
                std::vector<std::pair<MultiPoly, int>> next;
                for (size_t k = 0; k < out.factors.size(); ++k)
                    if (k != i && k != j) next.push_back(out.factors[k]);
                FieldElement dummy(Rat(1));
                detail::push_factor(next, out.constant, fi, mi);
                detail::push_factor(next, out.constant, fj, mj);
                detail::push_factor(next, out.constant, g, mi + mj);
                (void)dummy;
                out.factors = std::move(next);
                changed = true;
            }
    }
    std::sort(out.factors.begin(), out.factors.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second < b.second;
                  return a.first.to_string() < b.first.to_string();
              });
    return out;
}

// Fraction-free (Bareiss) determinant over the polynomial ring; every
// division along the way is exact.
inline MultiPoly bareiss_determinant(std::vector<std::vector<MultiPoly>> M,
                                     const std::vector<std::string>& vars) {
    size_t dim = M.size();
    if (dim == 0) return MultiPoly::constant(FieldElement(Rat(1)), vars);
    MultiPoly prev = MultiPoly::constant(FieldElement(Rat(1)), vars);
    int sign = 1;
    for (size_t k = 0; k + 1 < dim; ++k) {
        if (M[k][k].is_zero()) {
            size_t swap_row = k + 1;
            while (swap_row < dim && M[swap_row][k].is_zero()) ++swap_row;
            if (swap_row == dim) return MultiPoly::constant(FieldElement(Rat(0)), vars);
            std::swap(M[k], M[swap_row]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < dim; ++i) {
            for (size_t j = k + 1; j < dim; ++j)
                M[i][j] = divide_exact(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev);
            M[i][k] = MultiPoly(vars);
        }
        prev = M[k][k];
    }
    MultiPoly det = M[dim - 1][dim - 1];
    return sign < 0 ? -det : det;
}

// Sylvester-matrix resultant eliminating var; sign convention is the
// determinant of the standard Sylvester matrix.
inline MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, const std::string& var) {
    if (!p.depends_on(var) && !q.depends_on(var))
        throw arith_error("resultant: variable absent from both polynomials");
    if (p.is_zero() || q.is_zero()) return MultiPoly::constant(FieldElement(Rat(0)), p.vars());
    int m = p.degree(var), n = q.degree(var);
    if (m == 0) return p.pow((unsigned)n);
    if (n == 0) return q.pow((unsigned)m);

    auto pc = p.coeffs_in(var);
    auto qc = q.coeffs_in(var);
    size_t dim = (size_t)(m + n);
    std::vector<std::vector<MultiPoly>> M(dim, std::vector<MultiPoly>(dim, MultiPoly(p.vars())));
    for (int row = 0; row < n; ++row)
        for (int k = 0; k <= m; ++k) M[(size_t)row][(size_t)(row + k)] = pc[(size_t)(m - k)];
    for (int row = 0; row < m; ++row)
        for (int k = 0; k <= n; ++k) M[(size_t)(n + row)][(size_t)(row + k)] = qc[(size_t)(n - k)];
    return bareiss_determinant(std::move(M), p.vars());
}

// disc(p) = (-1)^(m(m-1)/2) res(p, p') / lc(p)
inline MultiPoly discriminant(const MultiPoly& p, const std::string& var) {
    int m = p.degree(var);
    if (m < 1) throw arith_error("discriminant of constant");
    MultiPoly r = resultant(p, p.derivative(var), var);
    MultiPoly d = divide_exact(r, p.leading_coeff_in(var));
    return ((m * (m - 1) / 2) % 2) ? -d : d;
}

}  // namespace tepreach
