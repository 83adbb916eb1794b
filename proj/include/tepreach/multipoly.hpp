#pragma once

// Exact multivariate polynomials over FieldElement coefficients.  Terms are a
// sparse map from exponent vectors to nonzero coefficients; the variable list
// fixes the term order (lex over the listed order).  Polynomials over
// different variable lists are aligned on demand by merging the lists.

#include "tepreach/field.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace tepreach {

using ExpVec = std::vector<int>;

class MultiPoly {
  public:
    using Terms = std::map<ExpVec, FieldElement>;

    MultiPoly() = default;
    explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static MultiPoly constant(const FieldElement& c, std::vector<std::string> vars = {}) {
        MultiPoly p(std::move(vars));
        if (!c.is_zero()) p.terms_[ExpVec(p.vars_.size(), 0)] = c;
        return p;
    }

    static MultiPoly variable(const std::string& name, std::vector<std::string> vars) {
        MultiPoly p(std::move(vars));
        ExpVec e(p.vars_.size(), 0);
        auto it = std::find(p.vars_.begin(), p.vars_.end(), name);
        if (it == p.vars_.end()) throw arith_error("variable not in ring: " + name);
        e[(size_t)(it - p.vars_.begin())] = 1;
        p.terms_[e] = FieldElement(Rat(1));
        return p;
    }

    static MultiPoly monomial(const FieldElement& c, ExpVec e, std::vector<std::string> vars) {
        MultiPoly p(std::move(vars));
        if (!c.is_zero()) p.terms_[std::move(e)] = c;
        return p;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && is_zero_exp(terms_.begin()->first);
    }
    FieldElement constant_value() const {
        if (terms_.empty()) return FieldElement();
        if (!is_constant()) throw arith_error("not a constant polynomial");
        return terms_.begin()->second;
    }

    int var_index(const std::string& name) const {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        return it == vars_.end() ? -1 : (int)(it - vars_.begin());
    }

    int degree(const std::string& var) const {
        int idx = var_index(var);
        if (idx < 0) return 0;
        int d = 0;
        for (auto& [e, c] : terms_) d = std::max(d, e[(size_t)idx]);
        return d;
    }

    int total_degree() const {
        int d = 0;
        for (auto& [e, c] : terms_) {
            int s = 0;
            for (int x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    bool depends_on(const std::string& var) const { return degree(var) > 0; }

    MultiPoly operator-() const {
        MultiPoly r(vars_);
        for (auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        auto [x, y] = aligned(a, b);
        for (auto& [e, c] : y.terms_) x.add_term(e, c);
        return x;
    }
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        auto [x, y] = aligned(a, b);
        MultiPoly r(x.vars_);
        for (auto& [ea, ca] : x.terms_)
            for (auto& [eb, cb] : y.terms_) {
                ExpVec e = ea;
                for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }

    MultiPoly operator*(const FieldElement& c) const {
        MultiPoly r(vars_);
        if (c.is_zero()) return r;
        for (auto& [e, t] : terms_) r.terms_[e] = t * c;
        return r;
    }

    MultiPoly pow(unsigned n) const {
        MultiPoly r = constant(FieldElement(Rat(1)), vars_);
        MultiPoly base = *this;
        while (n) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }

    bool operator==(const MultiPoly& b) const {
        auto [x, y] = aligned(*this, b);
        return x.terms_ == y.terms_;
    }

    // Lex-leading term (w.r.t. the ring's variable order).
    std::pair<ExpVec, FieldElement> leading_term() const {
        if (terms_.empty()) throw arith_error("leading term of zero polynomial");
        auto it = std::prev(terms_.end());
        return {it->first, it->second};
    }

    // Exact division; throws if the division leaves a remainder.
    friend MultiPoly divide_exact(const MultiPoly& a, const MultiPoly& b) {
        if (b.is_zero()) throw arith_error("polynomial division by zero");
        auto [rem, quot] = divmod_lex(a, b);
        if (!rem.is_zero()) throw arith_error("polynomial division not exact");
        return quot;
    }

    friend bool divides(const MultiPoly& b, const MultiPoly& a) {
        if (b.is_zero()) return a.is_zero();
        auto [rem, quot] = divmod_lex(a, b);
        return rem.is_zero();
    }

    MultiPoly derivative(const std::string& var) const {
        int idx = var_index(var);
        MultiPoly r(vars_);
        if (idx < 0) return r;
        for (auto& [e, c] : terms_) {
            if (e[(size_t)idx] == 0) continue;
            ExpVec d = e;
            int k = d[(size_t)idx]--;
            r.add_term(d, c * Rat(k));
        }
        return r;
    }

    // Substitute some variables by field constants; the result lives in the
    // same ring (substituted variables just no longer occur).
    MultiPoly substitute(const std::map<std::string, FieldElement>& vals) const {
        MultiPoly r(vars_);
        for (auto& [e, c] : terms_) {
            FieldElement coef = c;
            ExpVec rest = e;
            for (size_t i = 0; i < vars_.size(); ++i) {
                auto it = vals.find(vars_[i]);
                if (it == vals.end() || e[i] == 0) continue;
                FieldElement p(Rat(1));
                for (int k = 0; k < e[i]; ++k) p = p * it->second;
                coef = coef * p;
                rest[i] = 0;
            }
            r.add_term(rest, coef);
        }
        return r;
    }

    // Substitute variables by polynomials (used for Euler substitution and
    // for composing unsafe-set polynomials with the symbolic solution).
    MultiPoly substitute_polys(const std::map<std::string, MultiPoly>& vals) const {
        MultiPoly acc;
        for (auto& [e, c] : terms_) {
            MultiPoly term = MultiPoly::constant(c, vars_);
            for (size_t i = 0; i < vars_.size(); ++i) {
                if (e[i] == 0) continue;
                auto it = vals.find(vars_[i]);
                MultiPoly base = (it != vals.end())
                                     ? it->second
                                     : MultiPoly::variable(vars_[i], vars_);
                term = term * base.pow((unsigned)e[i]);
            }
            acc = acc + term;
        }
        return acc;
    }

    FieldElement eval(const std::map<std::string, FieldElement>& vals) const {
        MultiPoly r = substitute(vals);
        if (!r.is_constant()) throw arith_error("eval left free variables");
        return r.constant_value();
    }

    // Dense coefficient list w.r.t. one variable; entry d is the coefficient
    // polynomial of var^d (in the same ring, without var).
    std::vector<MultiPoly> coeffs_in(const std::string& var) const {
        int idx = var_index(var);
        if (idx < 0) return {*this};
        int d = degree(var);
        std::vector<MultiPoly> out((size_t)d + 1, MultiPoly(vars_));
        for (auto& [e, c] : terms_) {
            ExpVec rest = e;
            int k = rest[(size_t)idx];
            rest[(size_t)idx] = 0;
            out[(size_t)k].add_term(rest, c);
        }
        return out;
    }

    static MultiPoly from_coeffs(const std::vector<MultiPoly>& coeffs, const std::string& var) {
        MultiPoly acc;
        for (size_t d = 0; d < coeffs.size(); ++d) {
            if (coeffs[d].is_zero()) continue;
            MultiPoly vp = MultiPoly::variable(var, coeffs[d].vars().empty()
                                                        ? std::vector<std::string>{var}
                                                        : with_var(coeffs[d].vars(), var));
            MultiPoly t = coeffs[d];
            acc = acc + t * vp.pow((unsigned)d);
        }
        return acc;
    }

    MultiPoly leading_coeff_in(const std::string& var) const {
        auto cs = coeffs_in(var);
        return cs.back();
    }

    // Divide the whole polynomial by its lex-leading coefficient.
    MultiPoly monic_lex() const {
        if (is_zero()) return *this;
        FieldElement lc = leading_term().second;
        return *this * lc.inverse();
    }

    // Restrict the ring to the variables that actually occur (plus `keep`).
    MultiPoly compress(const std::vector<std::string>& keep = {}) const {
        std::vector<std::string> used;
        for (size_t i = 0; i < vars_.size(); ++i) {
            bool occurs = std::find(keep.begin(), keep.end(), vars_[i]) != keep.end();
            if (!occurs)
                for (auto& [e, c] : terms_)
                    if (e[i] > 0) {
                        occurs = true;
                        break;
                    }
            if (occurs) used.push_back(vars_[i]);
        }
        return in_ring(used);
    }

    // Re-express in another ring (must contain all occurring variables).
    MultiPoly in_ring(const std::vector<std::string>& new_vars) const {
        MultiPoly r(new_vars);
        std::vector<int> pos(vars_.size(), -1);
        for (size_t i = 0; i < vars_.size(); ++i) {
            auto it = std::find(new_vars.begin(), new_vars.end(), vars_[i]);
            pos[i] = it == new_vars.end() ? -1 : (int)(it - new_vars.begin());
        }
        for (auto& [e, c] : terms_) {
            ExpVec ne(new_vars.size(), 0);
            for (size_t i = 0; i < vars_.size(); ++i) {
                if (e[i] == 0) continue;
                if (pos[i] < 0) throw arith_error("in_ring drops occurring variable " + vars_[i]);
                ne[(size_t)pos[i]] = e[i];
            }
            r.add_term(ne, c);
        }
        return r;
    }

    bool has_real_coefficients() const {
        for (auto& [e, c] : terms_)
            if (!c.is_real()) return false;
        return true;
    }

    MultiPoly conj_coefficients() const {
        MultiPoly r(vars_);
        for (auto& [e, c] : terms_) r.terms_[e] = c.conj();
        return r;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            std::string cs = it->second.to_string();
            bool neg = !cs.empty() && cs[0] == '-';
            if (first)
                os << (neg ? "-" : "");
            else
                os << (neg ? " - " : " + ");
            first = false;
            if (neg) cs = cs.substr(1);
            bool compound = cs.find(' ') != std::string::npos;
            std::string mono = monomial_string(it->first);
            if (mono.empty())
                os << (compound ? "(" + cs + ")" : cs);
            else if (cs == "1")
                os << mono;
            else
                os << (compound ? "(" + cs + ")" : cs) << "*" << mono;
        }
        return os.str();
    }

    void add_term(const ExpVec& e, const FieldElement& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
            return;
        }
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }

  private:
    std::vector<std::string> vars_;
    Terms terms_;

    static bool is_zero_exp(const ExpVec& e) {
        return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
    }

    static std::vector<std::string> with_var(std::vector<std::string> vars,
                                             const std::string& v) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
        return vars;
    }

    std::string monomial_string(const ExpVec& e) const {
        std::ostringstream os;
        bool first = true;
        for (size_t i = 0; i < vars_.size(); ++i) {
            if (e[i] == 0) continue;
            if (!first) os << "*";
            first = false;
            os << vars_[i];
            if (e[i] > 1) os << "^" << e[i];
        }
        return os.str();
    }

    static std::pair<MultiPoly, MultiPoly> aligned(const MultiPoly& a, const MultiPoly& b) {
        if (a.vars_ == b.vars_) return {a, b};
        std::vector<std::string> merged = a.vars_;
        for (auto& v : b.vars_)
            if (std::find(merged.begin(), merged.end(), v) == merged.end()) merged.push_back(v);
        return {a.in_ring(merged), b.in_ring(merged)};
    }

    // Lex multivariate division: returns (remainder, quotient).
    static std::pair<MultiPoly, MultiPoly> divmod_lex(const MultiPoly& a0, const MultiPoly& b0) {
        auto [a, b] = aligned(a0, b0);
        MultiPoly quot(a.vars_), rem(a.vars_);
        MultiPoly cur = a;
        auto [eb, cb] = b.leading_term();
        FieldElement cb_inv = cb.inverse();
        while (!cur.is_zero()) {
            auto [ea, ca] = cur.leading_term();
            ExpVec q(ea.size());
            bool div_ok = true;
            for (size_t i = 0; i < ea.size(); ++i) {
                q[i] = ea[i] - eb[i];
                if (q[i] < 0) div_ok = false;
            }
            if (!div_ok) {
                // whole polynomial becomes remainder from here: move leading
                // term out and continue (lex order guarantees progress)
                rem.add_term(ea, ca);
                cur.terms_.erase(std::prev(cur.terms_.end()));
                continue;
            }
            FieldElement qc = ca * cb_inv;
            quot.add_term(q, qc);
            MultiPoly t = MultiPoly::monomial(qc, q, a.vars_);
            cur = cur - t * b;
        }
        return {rem, quot};
    }
};

inline MultiPoly operator*(const FieldElement& c, const MultiPoly& p) { return p * c; }

}  // namespace tepreach
