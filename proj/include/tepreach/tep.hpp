#pragma once

// Trigonometric-exponential polynomials in one real variable, optionally with
// polynomial parameters.  A Tep is a polynomial body over the variable, the
// parameters, and one symbol per transcendental component:
//
//     body(x, p1.., E1.., S1.., C1..)  with  Ei = e^{ui x},
//     Sj = sin(vj x),  Ck = cos(rk x)
//
// plus the additive normal form  sum  e^{u x} q(x,p) {1|sin(v x)|cos(v x)}
// obtained by product-to-sum expansion.  The normal form is canonical, so
// equality and the zero test are exact.

#include "tepreach/multipoly.hpp"
#include "tepreach/sturm.hpp"
#include "tepreach/transcendental.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <tuple>
#include <vector>

namespace tepreach {

struct undecided_sign : arith_error {
    RatInterval enclosure;
    undecided_sign(const std::string& msg, RatInterval iv)
        : arith_error(msg), enclosure(std::move(iv)) {}
};

class Tep {
  public:
    std::string var = "x";
    std::vector<std::string> params;
    std::vector<FieldElement> rates;      // symbols @e<i>, rates nonzero & distinct
    std::vector<FieldElement> sin_freqs;  // symbols @s<j>, positive & distinct
    std::vector<FieldElement> cos_freqs;  // symbols @c<k>, positive & distinct
    MultiPoly body;

    Tep() : body(ring()) {}
    explicit Tep(std::string v) : var(std::move(v)), body(ring()) {}

    static Tep constant(const FieldElement& c, const std::string& var = "x") {
        Tep t(var);
        t.body = MultiPoly::constant(c, t.ring());
        return t;
    }

    static Tep poly(const MultiPoly& p, const std::string& var,
                    std::vector<std::string> params = {}) {
        Tep t(var);
        t.params = std::move(params);
        t.body = p.in_ring(t.ring());
        return t;
    }

    static Tep variable(const std::string& var) {
        Tep t(var);
        t.body = MultiPoly::variable(var, t.ring());
        return t;
    }

    static Tep exp_term(const FieldElement& rate, const std::string& var = "x") {
        Tep t(var);
        if (rate.is_zero()) {
            t.body = MultiPoly::constant(FieldElement(Rat(1)), t.ring());
            return t;
        }
        if (!rate.is_real()) throw arith_error("exp rate must be real");
        t.rates.push_back(rate);
        t.body = MultiPoly::variable("@e0", t.ring());
        return t;
    }

    static Tep sin_term(const FieldElement& freq, const std::string& var = "x") {
        Tep t(var);
        if (!freq.is_real()) throw arith_error("sin frequency must be real");
        int s = freq.sign();
        if (s == 0) return t;  // sin(0) = 0
        t.sin_freqs.push_back(s > 0 ? freq : -freq);
        t.body = MultiPoly::variable("@s0", t.ring());
        if (s < 0) t.body = -t.body;
        return t;
    }

    static Tep cos_term(const FieldElement& freq, const std::string& var = "x") {
        Tep t(var);
        if (!freq.is_real()) throw arith_error("cos frequency must be real");
        int s = freq.sign();
        if (s == 0) return constant(FieldElement(Rat(1)), var);
        t.cos_freqs.push_back(s > 0 ? freq : -freq);
        t.body = MultiPoly::variable("@c0", t.ring());
        return t;
    }

    std::vector<std::string> ring() const {
        std::vector<std::string> vs{var};
        for (auto& p : params) vs.push_back(p);
        for (size_t i = 0; i < rates.size(); ++i) vs.push_back("@e" + std::to_string(i));
        for (size_t i = 0; i < sin_freqs.size(); ++i) vs.push_back("@s" + std::to_string(i));
        for (size_t i = 0; i < cos_freqs.size(); ++i) vs.push_back("@c" + std::to_string(i));
        return vs;
    }

    bool is_poly() const { return rates.empty() && sin_freqs.empty() && cos_freqs.empty(); }

    Tep operator-() const {
        Tep r = *this;
        r.body = -r.body;
        return r;
    }

    friend Tep operator+(const Tep& a, const Tep& b) {
        auto [x, y] = aligned(a, b);
        x.body = x.body + y.body;
        x.canonicalize();
        return x;
    }
    friend Tep operator-(const Tep& a, const Tep& b) { return a + (-b); }
    friend Tep operator*(const Tep& a, const Tep& b) {
        auto [x, y] = aligned(a, b);
        x.body = x.body * y.body;
        x.canonicalize();
        return x;
    }
    Tep operator*(const FieldElement& c) const {
        Tep r = *this;
        r.body = r.body * c;
        return r;
    }
    Tep pow(unsigned n) const {
        Tep r = Tep::constant(FieldElement(Rat(1)), var);
        r.params = params;
        Tep base = *this;
        while (n) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }

    // d/dx, using sin' = v cos and cos' = -r sin; the symbol lists grow by
    // the mirrored frequencies when they are missing.
    Tep derivative() const {
        Tep ext = *this;
        for (auto& v : sin_freqs) ext.ensure_cos(v);
        for (auto& r : cos_freqs) ext.ensure_sin(r);
        MultiPoly d = ext.body.derivative(ext.var);
        for (size_t i = 0; i < ext.rates.size(); ++i) {
            MultiPoly e = MultiPoly::variable("@e" + std::to_string(i), ext.ring());
            d = d + (ext.body.derivative("@e" + std::to_string(i)) * e) * ext.rates[i];
        }
        for (size_t j = 0; j < ext.sin_freqs.size(); ++j) {
            size_t ci = ext.cos_index(ext.sin_freqs[j]);
            MultiPoly c = MultiPoly::variable("@c" + std::to_string(ci), ext.ring());
            d = d + (ext.body.derivative("@s" + std::to_string(j)) * c) * ext.sin_freqs[j];
        }
        for (size_t k = 0; k < ext.cos_freqs.size(); ++k) {
            size_t si = ext.sin_index(ext.cos_freqs[k]);
            MultiPoly s = MultiPoly::variable("@s" + std::to_string(si), ext.ring());
            d = d - (ext.body.derivative("@c" + std::to_string(k)) * s) * ext.cos_freqs[k];
        }
        Tep r = ext;
        r.body = d;
        r.canonicalize();
        return r;
    }

    Tep substitute_params(const std::map<std::string, FieldElement>& vals) const {
        Tep r = *this;
        r.body = r.body.substitute(vals);
        std::vector<std::string> keep;
        for (auto& p : params)
            if (!vals.count(p)) keep.push_back(p);
        r.params = keep;
        r.body = r.body.in_ring(r.ring());
        r.canonicalize();
        return r;
    }

    // ---- additive normal form -------------------------------------------

    // (rate, kind, freq) -> coefficient polynomial in (var, params);
    // kind: 0 constant, 1 sin, 2 cos (freq is 0 for kind 0).
    using NormalKey = std::tuple<FieldElement, int, FieldElement>;
    using NormalForm = std::map<NormalKey, MultiPoly>;

    NormalForm normal_form() const {
        NormalForm nf;
        std::vector<std::string> coef_ring{var};
        for (auto& p : params) coef_ring.push_back(p);
        size_t nsym_base = 1 + params.size();
        for (auto& [e, c] : body.terms()) {
            FieldElement rate;
            for (size_t i = 0; i < rates.size(); ++i)
                rate = rate + rates[i] * Rat(e[nsym_base + i]);
            // expand the trig monomial into a sum of single sin/cos terms
            std::map<std::pair<int, FieldElement>, FieldElement> trig{
                {{0, FieldElement()}, FieldElement(Rat(1))}};
            for (size_t j = 0; j < sin_freqs.size(); ++j)
                for (int k = 0; k < e[nsym_base + rates.size() + j]; ++k)
                    trig = trig_mul_unit(trig, 1, sin_freqs[j]);
            for (size_t k2 = 0; k2 < cos_freqs.size(); ++k2)
                for (int k = 0; k < e[nsym_base + rates.size() + sin_freqs.size() + k2]; ++k)
                    trig = trig_mul_unit(trig, 2, cos_freqs[k2]);
            ExpVec coef_exp(coef_ring.size(), 0);
            coef_exp[0] = e[0];
            for (size_t i = 0; i < params.size(); ++i) coef_exp[1 + i] = e[1 + i];
            for (auto& [tk, tc] : trig) {
                MultiPoly add = MultiPoly::monomial(c * tc, coef_exp, coef_ring);
                NormalKey key{rate, tk.first, tk.second};
                auto it = nf.find(key);
                if (it == nf.end())
                    nf.emplace(key, add);
                else {
                    it->second = it->second + add;
                    if (it->second.is_zero()) nf.erase(it);
                }
            }
        }
        for (auto it = nf.begin(); it != nf.end();)
            it = it->second.is_zero() ? nf.erase(it) : std::next(it);
        return nf;
    }

    static Tep from_normal_form(const std::string& var, const std::vector<std::string>& params,
                                const NormalForm& nf) {
        Tep acc(var);
        acc.params = params;
        acc.body = MultiPoly(acc.ring());
        for (auto& [key, coef] : nf) {
            auto& [rate, kind, freq] = key;
            Tep term = Tep::poly(coef, var, params);
            if (!rate.is_zero()) term = term * Tep::exp_term(rate, var);
            if (kind == 1) term = term * Tep::sin_term(freq, var);
            if (kind == 2) term = term * Tep::cos_term(freq, var);
            acc = acc + term;
        }
        return acc;
    }

    bool is_zero_tep() const { return normal_form().empty(); }
    bool same_value(const Tep& o) const { return (*this - o).is_zero_tep(); }

    // ---- evaluation -------------------------------------------------------

    // Exact value at x = 0 (no parameters).
    FieldElement value_at_zero() const {
        if (!params.empty()) throw arith_error("value_at_zero with free parameters");
        std::map<std::string, FieldElement> env;
        env[var] = FieldElement();
        for (size_t i = 0; i < rates.size(); ++i)
            env["@e" + std::to_string(i)] = FieldElement(Rat(1));
        for (size_t j = 0; j < sin_freqs.size(); ++j)
            env["@s" + std::to_string(j)] = FieldElement();
        for (size_t k = 0; k < cos_freqs.size(); ++k)
            env["@c" + std::to_string(k)] = FieldElement(Rat(1));
        return body.eval(env);
    }

    // Certified enclosure of F(x0), parameters must be bound already.
    RatInterval enclosure_at(const Rat& x0, unsigned bits) const {
        if (!params.empty()) throw arith_error("enclosure_at with free parameters");
        std::map<std::string, RatInterval> env;
        env[var] = RatInterval(x0);
        for (size_t i = 0; i < rates.size(); ++i) {
            RatInterval arg = scale(x0, rates[i].enclosure(bits + 8));
            env["@e" + std::to_string(i)] = exp_enclosure(arg, bits);
        }
        for (size_t j = 0; j < sin_freqs.size(); ++j) {
            RatInterval arg = scale(x0, sin_freqs[j].enclosure(bits + 8));
            env["@s" + std::to_string(j)] = sin_enclosure(arg, bits);
        }
        for (size_t k = 0; k < cos_freqs.size(); ++k) {
            RatInterval arg = scale(x0, cos_freqs[k].enclosure(bits + 8));
            env["@c" + std::to_string(k)] = cos_enclosure(arg, bits);
        }
        return poly_enclosure(body, env, bits);
    }

    // Exact sign at rational x0 >= 0 by adaptive refinement; exact at x0 = 0.
    int sign_at_rational(const Rat& x0, unsigned max_bits = 4096) const {
        if (x0 < 0) throw arith_error("sign_at_rational needs x0 >= 0");
        if (x0 == 0) return value_at_zero().sign();
        if (is_zero_tep()) return 0;
        RatInterval last;
        for (unsigned bits = 64; bits <= max_bits; bits *= 2) {
            last = enclosure_at(x0, bits);
            if (last.sign_known()) return last.sign();
        }
        throw undecided_sign("sign undecided at precision budget", last);
    }

    // gcd of all coefficient polynomials in x: the polynomial content.
    UniPoly content_in_var() const {
        if (!params.empty()) throw arith_error("content with free parameters");
        NormalForm nf = normal_form();
        UniPoly g;
        for (auto& [k, coef] : nf) {
            UniPoly u = to_unipoly(coef.in_ring({var}), var);
            g = g.is_zero() ? u : uni_gcd(g, u);
            if (g.degree() == 0) break;
        }
        return g.is_zero() ? UniPoly::constant(FieldElement(Rat(1))) : g;
    }

    Tep divide_content(const UniPoly& content) const {
        if (content.degree() == 0) return *this;
        NormalForm nf = normal_form();
        NormalForm out;
        for (auto& [k, coef] : nf) {
            UniPoly u = to_unipoly(coef.in_ring({var}), var);
            auto [q, r] = u.divmod(content);
            if (!r.is_zero()) throw arith_error("content does not divide coefficient");
            out[k] = to_multipoly(q, var);
        }
        return from_normal_form(var, params, out);
    }

    // ---- duplication-formula rescaling ------------------------------------

    // Compare w against pi*num/den; terminates because w is algebraic.
    static int compare_with_pi(const FieldElement& w, long pnum, long pden) {
        for (unsigned bits = 32;; bits *= 2) {
            RatInterval wi = w.enclosure(bits);
            RatInterval pi = pi_enclosure(bits);
            RatInterval target = scale(make_rat(Int(pnum), Int(pden)), pi);
            if (wi.hi < target.lo) return -1;
            if (wi.lo > target.hi) return 1;
            if (bits > (1u << 20)) throw arith_error("pi comparison failed to converge");
        }
    }

    // Halve frequencies with sin(vx) = 2 sin(vx/2)cos(vx/2) and
    // cos(rx) = 1 - 2 sin(rx/2)^2 until T*max(v) < pi and T*max(r) < pi/2.
    Tep rescaled_for_horizon(const Rat& T) const {
        if (T <= 0) throw arith_error("horizon must be positive");
        Tep cur = *this;
        while (true) {
            int halve_sin = -1, halve_cos = -1;
            for (size_t j = 0; j < cur.sin_freqs.size() && halve_sin < 0; ++j)
                if (compare_with_pi(cur.sin_freqs[j] * Rat(T), 1, 1) >= 0) halve_sin = (int)j;
            for (size_t k = 0; k < cur.cos_freqs.size() && halve_cos < 0; ++k)
                if (compare_with_pi(cur.cos_freqs[k] * Rat(T), 1, 2) >= 0) halve_cos = (int)k;
            if (halve_sin < 0 && halve_cos < 0) return cur;
            if (halve_sin >= 0) {
                FieldElement v = cur.sin_freqs[(size_t)halve_sin];
                FieldElement h = v * Rat(1, 2);
                Tep repl = (Tep::sin_term(h, cur.var) * Tep::cos_term(h, cur.var)) * FieldElement(Rat(2));
                cur = cur.substitute_symbol(1, (size_t)halve_sin, repl);
            } else {
                FieldElement r = cur.cos_freqs[(size_t)halve_cos];
                FieldElement h = r * Rat(1, 2);
                Tep s = Tep::sin_term(h, cur.var);
                Tep repl = Tep::constant(FieldElement(Rat(1)), cur.var) -
                           (s * s) * FieldElement(Rat(2));
                cur = cur.substitute_symbol(2, (size_t)halve_cos, repl);
            }
        }
    }

    // Rewrite so every monomial carries at most one exponential symbol with
    // exponent 1: e^{u1 x}^a e^{u2 x}^b collapses to the symbol of rate
    // a*u1 + b*u2.  Trig structure is left untouched.
    Tep combine_exponentials() const {
        bool trivial = true;
        size_t head = 1 + params.size();
        for (auto& [e, c] : body.terms()) {
            int total = 0;
            for (size_t i = 0; i < rates.size(); ++i) total += e[head + i];
            if (total > 1) trivial = false;
        }
        if (rates.size() <= 1 && trivial) return *this;

        std::vector<FieldElement> new_rates;
        for (auto& [e, c] : body.terms()) {
            FieldElement total;
            for (size_t i = 0; i < rates.size(); ++i) total = total + rates[i] * Rat(e[head + i]);
            if (!total.is_zero()) push_unique(new_rates, total);
        }
        std::sort(new_rates.begin(), new_rates.end());

        Tep out(var);
        out.params = params;
        out.rates = new_rates;
        out.sin_freqs = sin_freqs;
        out.cos_freqs = cos_freqs;
        auto oring = out.ring();
        MultiPoly nb(oring);
        size_t ohead = 1 + params.size();
        for (auto& [e, c] : body.terms()) {
            FieldElement total;
            for (size_t i = 0; i < rates.size(); ++i) total = total + rates[i] * Rat(e[head + i]);
            ExpVec ne(oring.size(), 0);
            for (size_t i = 0; i < head; ++i) ne[i] = e[i];
            if (!total.is_zero()) {
                size_t idx = 0;
                while (!(new_rates[idx] == total)) ++idx;
                ne[ohead + idx] = 1;
            }
            for (size_t j = 0; j < sin_freqs.size(); ++j)
                ne[ohead + new_rates.size() + j] = e[head + rates.size() + j];
            for (size_t k = 0; k < cos_freqs.size(); ++k)
                ne[ohead + new_rates.size() + sin_freqs.size() + k] =
                    e[head + rates.size() + sin_freqs.size() + k];
            nb.add_term(ne, c);
        }
        out.body = nb;
        out.canonicalize();
        return out;
    }

    std::string to_string() const;

    void canonicalize() { *this = canonical(*this); }

  private:
    size_t cos_index(const FieldElement& f) const {
        for (size_t i = 0; i < cos_freqs.size(); ++i)
            if (cos_freqs[i] == f) return i;
        throw arith_error("cos frequency missing");
    }
    size_t sin_index(const FieldElement& f) const {
        for (size_t i = 0; i < sin_freqs.size(); ++i)
            if (sin_freqs[i] == f) return i;
        throw arith_error("sin frequency missing");
    }
    void ensure_cos(const FieldElement& f) {
        for (auto& g : cos_freqs)
            if (g == f) return;
        MultiPoly old = body;
        cos_freqs.push_back(f);
        body = old.in_ring(ring());
    }
    void ensure_sin(const FieldElement& f) {
        for (auto& g : sin_freqs)
            if (g == f) return;
        MultiPoly old = body;
        sin_freqs.push_back(f);
        body = old.in_ring(ring());
    }

    // Substitute one sin/cos symbol (kind 1/2, index idx) by a replacement Tep.
    Tep substitute_symbol(int kind, size_t idx, const Tep& repl) const {
        Tep rest = *this;
        std::string sym = (kind == 1 ? "@s" : "@c") + std::to_string(idx);
        auto coeffs = rest.body.coeffs_in(sym);
        Tep acc(var);
        acc.params = params;
        for (size_t d = 0; d < coeffs.size(); ++d) {
            if (coeffs[d].is_zero()) continue;
            Tep piece = *this;
            piece.body = coeffs[d];
            piece.canonicalize();
            acc = acc + piece * repl.pow((unsigned)d);
        }
        return acc;
    }

    static std::map<std::pair<int, FieldElement>, FieldElement> trig_mul_unit(
        const std::map<std::pair<int, FieldElement>, FieldElement>& t, int kind,
        const FieldElement& freq) {
        std::map<std::pair<int, FieldElement>, FieldElement> out;
        auto add = [&](int k, FieldElement f, FieldElement c) {
            if (c.is_zero()) return;
            if (k != 0) {
                int s = f.sign();
                if (s == 0) {
                    if (k == 1) return;  // sin 0 = 0
                    k = 0;
                    f = FieldElement();
                } else if (s < 0) {
                    f = -f;
                    if (k == 1) c = -c;
                }
            }
            auto key = std::make_pair(k, f);
            auto it = out.find(key);
            if (it == out.end())
                out.emplace(key, c);
            else {
                it->second = it->second + c;
                if (it->second.is_zero()) out.erase(it);
            }
        };
        Rat half(1, 2);
        for (auto& [key, c] : t) {
            auto [k0, f0] = key;
            if (k0 == 0) {
                add(kind, freq, c);
            } else if (k0 == 1 && kind == 1) {  // sin a sin b
                add(2, f0 - freq, c * half);
                add(2, f0 + freq, -(c * half));
            } else if (k0 == 2 && kind == 2) {  // cos a cos b
                add(2, f0 + freq, c * half);
                add(2, f0 - freq, c * half);
            } else {  // sin a cos b (either order)
                FieldElement a = (k0 == 1) ? f0 : freq;
                FieldElement b = (k0 == 1) ? freq : f0;
                add(1, a + b, c * half);
                add(1, a - b, c * half);
            }
        }
        return out;
    }

    static std::pair<Tep, Tep> aligned(const Tep& a, const Tep& b) {
        if (a.var != b.var) throw arith_error("TEP variable mismatch");
        Tep x(a.var);
        x.params = a.params;
        for (auto& p : b.params)
            if (std::find(x.params.begin(), x.params.end(), p) == x.params.end())
                x.params.push_back(p);
        auto merge = [](std::vector<FieldElement> u, const std::vector<FieldElement>& v) {
            for (auto& f : v) {
                bool found = false;
                for (auto& g : u)
                    if (g == f) found = true;
                if (!found) u.push_back(f);
            }
            return u;
        };
        x.rates = merge(a.rates, b.rates);
        x.sin_freqs = merge(a.sin_freqs, b.sin_freqs);
        x.cos_freqs = merge(a.cos_freqs, b.cos_freqs);
        Tep y = x;
        x.body = remap_body(a, x);
        y.body = remap_body(b, y);
        return {x, y};
    }

    static MultiPoly remap_body(const Tep& src, const Tep& dst) {
        std::map<std::string, MultiPoly> ren;
        auto dring = dst.ring();
        auto find_in = [&](const std::vector<FieldElement>& list, const FieldElement& f) {
            for (size_t i = 0; i < list.size(); ++i)
                if (list[i] == f) return i;
            throw arith_error("symbol remap failure");
        };
        for (size_t i = 0; i < src.rates.size(); ++i)
            ren["@e" + std::to_string(i)] = MultiPoly::variable(
                "@e" + std::to_string(find_in(dst.rates, src.rates[i])), dring);
        for (size_t i = 0; i < src.sin_freqs.size(); ++i)
            ren["@s" + std::to_string(i)] = MultiPoly::variable(
                "@s" + std::to_string(find_in(dst.sin_freqs, src.sin_freqs[i])), dring);
        for (size_t i = 0; i < src.cos_freqs.size(); ++i)
            ren["@c" + std::to_string(i)] = MultiPoly::variable(
                "@c" + std::to_string(find_in(dst.cos_freqs, src.cos_freqs[i])), dring);
        return src.body.substitute_polys(ren).in_ring(dring);
    }

    // Fold degenerate symbols, drop unused ones, deduplicate, sort.
    static Tep canonical(const Tep& t) {
        Tep cur = t;
        // fold zero rates / zero freqs (constructors avoid them, but symbol
        // arithmetic can surface them via merges)
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < cur.rates.size() && !changed; ++i)
                if (cur.rates[i].is_zero()) {
                    cur = cur.fold_symbol("@e" + std::to_string(i), FieldElement(Rat(1)));
                    changed = true;
                }
            for (size_t j = 0; j < cur.sin_freqs.size() && !changed; ++j)
                if (cur.sin_freqs[j].is_zero()) {
                    cur = cur.fold_symbol("@s" + std::to_string(j), FieldElement());
                    changed = true;
                }
            for (size_t k = 0; k < cur.cos_freqs.size() && !changed; ++k)
                if (cur.cos_freqs[k].is_zero()) {
                    cur = cur.fold_symbol("@c" + std::to_string(k), FieldElement(Rat(1)));
                    changed = true;
                }
        }
        // drop unused symbols and impose a deterministic order
        Tep out(cur.var);
        out.params = cur.params;
        for (size_t i = 0; i < cur.rates.size(); ++i)
            if (cur.body.depends_on("@e" + std::to_string(i))) push_unique(out.rates, cur.rates[i]);
        for (size_t j = 0; j < cur.sin_freqs.size(); ++j)
            if (cur.body.depends_on("@s" + std::to_string(j)))
                push_unique(out.sin_freqs, cur.sin_freqs[j]);
        for (size_t k = 0; k < cur.cos_freqs.size(); ++k)
            if (cur.body.depends_on("@c" + std::to_string(k)))
                push_unique(out.cos_freqs, cur.cos_freqs[k]);
        std::sort(out.rates.begin(), out.rates.end());
        std::sort(out.sin_freqs.begin(), out.sin_freqs.end());
        std::sort(out.cos_freqs.begin(), out.cos_freqs.end());
        out.body = remap_body_by_value(cur, out);
        return out;
    }

    Tep fold_symbol(const std::string& sym, const FieldElement& value) const {
        Tep r = *this;
        r.body = r.body.substitute({{sym, value}});
        return r;
    }

    static void push_unique(std::vector<FieldElement>& v, const FieldElement& f) {
        for (auto& g : v)
            if (g == f) return;
        v.push_back(f);
    }

    static MultiPoly remap_body_by_value(const Tep& src, const Tep& dst) {
        std::map<std::string, MultiPoly> ren;
        auto dring = dst.ring();
        auto locate = [&](const std::vector<FieldElement>& list, const FieldElement& f,
                          const char* prefix) -> std::optional<MultiPoly> {
            for (size_t i = 0; i < list.size(); ++i)
                if (list[i] == f)
                    return MultiPoly::variable(prefix + std::to_string(i), dring);
            return std::nullopt;
        };
        for (size_t i = 0; i < src.rates.size(); ++i) {
            std::string s = "@e" + std::to_string(i);
            if (!src.body.depends_on(s)) continue;
            ren[s] = *locate(dst.rates, src.rates[i], "@e");
        }
        for (size_t j = 0; j < src.sin_freqs.size(); ++j) {
            std::string s = "@s" + std::to_string(j);
            if (!src.body.depends_on(s)) continue;
            ren[s] = *locate(dst.sin_freqs, src.sin_freqs[j], "@s");
        }
        for (size_t k = 0; k < src.cos_freqs.size(); ++k) {
            std::string s = "@c" + std::to_string(k);
            if (!src.body.depends_on(s)) continue;
            ren[s] = *locate(dst.cos_freqs, src.cos_freqs[k], "@c");
        }
        return src.body.substitute_polys(ren).in_ring(dring);
    }

  public:
    // Interval evaluation of a polynomial under an interval environment.
    static RatInterval poly_enclosure(const MultiPoly& p,
                                      const std::map<std::string, RatInterval>& env,
                                      unsigned bits) {
        RatInterval acc{Rat(0)};
        for (auto& [e, c] : p.terms()) {
            if (!c.is_real()) throw arith_error("interval evaluation of complex coefficient");
            RatInterval term = c.enclosure(bits + 8);
            for (size_t i = 0; i < p.vars().size(); ++i) {
                if (e[i] == 0) continue;
                auto it = env.find(p.vars()[i]);
                if (it == env.end()) throw arith_error("unbound variable " + p.vars()[i]);
                term = term * int_pow(it->second, (unsigned long)e[i]);
            }
            acc = acc + term;
            acc = round_out(acc, bits + 8);
        }
        return acc;
    }
};

inline Tep operator*(const FieldElement& c, const Tep& t) { return t * c; }

inline std::string Tep::to_string() const {
    NormalForm nf = normal_form();
    if (nf.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [key, coef] : nf) {
        auto& [rate, kind, freq] = key;
        std::string cs = coef.to_string();
        bool neg = false;
        if (cs.size() && cs[0] == '-' && cs.find(" + ") == std::string::npos &&
            cs.find(" - ") == std::string::npos) {
            neg = true;
            cs = cs.substr(1);
        }
        os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
        first = false;
        std::vector<std::string> parts;
        if (cs != "1" || (rate.is_zero() && kind == 0))
            parts.push_back(cs.find(' ') != std::string::npos ? "(" + cs + ")" : cs);
        auto wrap = [](const std::string& s) {
            return s.find(' ') != std::string::npos ? "(" + s + ")" : s;
        };
        if (!rate.is_zero())
            parts.push_back("exp(" + wrap(rate.to_string()) + "*" + var + ")");
        if (kind == 1) parts.push_back("sin(" + wrap(freq.to_string()) + "*" + var + ")");
        if (kind == 2) parts.push_back("cos(" + wrap(freq.to_string()) + "*" + var + ")");
        for (size_t i = 0; i < parts.size(); ++i) os << (i ? "*" : "") << parts[i];
    }
    return os.str();
}

}  // namespace tepreach
