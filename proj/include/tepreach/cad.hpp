#pragma once

// Open-cell cylindrical algebraic decomposition, specialized two ways:
//
//  * a fully exact prover for polynomial positivity over open semi-algebraic
//    constraints (drives the parametric sandwich heuristic), and
//  * the reachability search: Brown projection of the combined constraint
//    polynomial down to a TEP in t, base-phase isolation, then lifting whose
//    fiber coefficients are TEP values at the rational t-sample, handled as
//    adaptive certified enclosures.
//
// Every witness that comes out is re-verified independently of the search.

#include "tepreach/isolate.hpp"
#include "tepreach/linsys.hpp"

#include <deque>
#include <functional>
#include <optional>

namespace tepreach {

struct cad_degenerate : arith_error {
    int level;
    cad_degenerate(const std::string& msg, int lvl) : arith_error(msg), level(lvl) {}
};

// ---------------------------------------------------------------------------
// Brown projection.

namespace detail {

// Square-free refinement is worthwhile only while it is cheap; CAD stays
// sound with repeated factors, so oversized polynomials are kept whole.
inline void prune_into(const MultiPoly& q, std::vector<MultiPoly>& out) {
    if (q.is_zero() || q.is_constant()) return;
    std::vector<MultiPoly> parts;
    if (q.terms().size() <= 120 && q.total_degree() <= 24) {
        for (auto& [f, m] : squarefree_decompose(q).factors) parts.push_back(f);
    } else {
        parts.push_back(q.monic_lex());
    }
    for (auto& f : parts) {
        bool seen = false;
        for (auto& g : out)
            if (g == f) seen = true;
        if (!seen) out.push_back(f);
    }
}

}  // namespace detail

// Leading coefficients, discriminants, pairwise resultants; output reduced to
// distinct monic factors (square-free refined while that stays cheap).
inline std::vector<MultiPoly> brown_project(const std::vector<MultiPoly>& polys,
                                            const std::string& var) {
    std::vector<MultiPoly> raw;
    std::vector<const MultiPoly*> active;
    for (auto& p : polys)
        if (p.depends_on(var)) {
            active.push_back(&p);
            raw.push_back(p.leading_coeff_in(var));
            if (p.degree(var) >= 2) raw.push_back(discriminant(p, var));
        } else if (!p.is_zero()) {
            raw.push_back(p);  // carried down unchanged
        }
    for (size_t i = 0; i < active.size(); ++i)
        for (size_t j = i + 1; j < active.size(); ++j)
            raw.push_back(resultant(*active[i], *active[j], var));

    std::vector<MultiPoly> out;
    for (auto& q : raw) detail::prune_into(q, out);
    return out;
}

struct ProjectionTower {
    // levels[k] lives in the first (base_arity + k) variables of `vars`;
    // levels[0] is the base (no lifted variables yet).
    std::vector<std::vector<MultiPoly>> levels;
    std::vector<std::string> lift_vars;  // the variables eliminated, in lift order
};

inline ProjectionTower project_tower(std::vector<MultiPoly> top,
                                     const std::vector<std::string>& lift_vars) {
    ProjectionTower tw;
    tw.lift_vars = lift_vars;
    std::vector<std::vector<MultiPoly>> rev;
    std::vector<MultiPoly> cur;
    for (auto& p : top) detail::prune_into(p, cur);
    rev.push_back(cur);
    for (auto it = lift_vars.rbegin(); it != lift_vars.rend(); ++it) {
        cur = brown_project(cur, *it);
        rev.push_back(cur);
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) tw.levels.push_back(*it);
    return tw;
}

// ---------------------------------------------------------------------------
// Exact open-CAD over rational sample points (polynomial inputs only).

struct SamplePoint {
    std::vector<Rat> coords;
    std::vector<int> cell_signs;  // signs of the queried polynomials, all nonzero
};

namespace detail {

// Sample points around the roots of a set of univariate restrictions.
inline std::vector<Rat> point_samples(std::vector<RootLoc> roots,
                                      const std::optional<std::pair<Rat, Rat>>& box) {
    std::sort(roots.begin(), roots.end(),
              [](const RootLoc& a, const RootLoc& b) { return a.lo < b.lo; });
    std::vector<Rat> out;
    if (box) {
        auto [lo, hi] = *box;
        if (roots.empty()) {
            out.push_back((lo + hi) / 2);
            return out;
        }
        out.push_back((lo + roots.front().lo) / 2);
        for (size_t i = 0; i + 1 < roots.size(); ++i)
            out.push_back((roots[i].hi + roots[i + 1].lo) / 2);
        out.push_back((roots.back().hi + hi) / 2);
        return out;
    }
    if (roots.empty()) {
        out.push_back(Rat(0));
        return out;
    }
    out.push_back(roots.front().lo - 1);
    for (size_t i = 0; i + 1 < roots.size(); ++i)
        out.push_back((roots[i].hi + roots[i + 1].lo) / 2);
    out.push_back(roots.back().hi + 1);
    return out;
}

// Distinct roots of a set of exact univariate polynomials, sorted; roots of
// different polynomials are separated by refinement when possible, and merged
// into one cluster interval when they genuinely coincide (which only widens
// the cell walls, never loses a sample region).
inline std::vector<RootLoc> exact_level_roots(const std::vector<UniPoly>& ps, const Rat& lo,
                                              const Rat& hi) {
    struct Owned {
        RootLoc loc;
        UniPoly sp;
    };
    std::vector<Owned> all;
    for (auto& p : ps) {
        if (p.is_zero() || p.degree() == 0) continue;
        UniPoly sp = squarefree_part(p);
        for (auto& r : isolate_roots(p, lo, hi)) all.push_back({r, sp});
    }
    std::sort(all.begin(), all.end(),
              [](const Owned& a, const Owned& b) { return a.loc.lo < b.loc.lo; });
    // try to separate neighbours from different polynomials
    for (size_t i = 0; i + 1 < all.size(); ++i) {
        for (int attempt = 0; attempt < 48; ++attempt) {
            if (std::max(all[i].loc.hi, all[i].loc.lo) <
                std::min(all[i + 1].loc.lo, all[i + 1].loc.hi))
                break;
            bool moved = false;
            if (!all[i].loc.exact()) moved |= detail::bisect_step(all[i].sp, all[i].loc);
            if (!all[i + 1].loc.exact())
                moved |= detail::bisect_step(all[i + 1].sp, all[i + 1].loc);
            if (!moved) break;
        }
    }
    std::vector<RootLoc> out;
    for (auto& o : all) {
        if (!out.empty() && !(out.back().hi < o.loc.lo)) {
            out.back().lo = std::min(out.back().lo, o.loc.lo);
            out.back().hi = std::max(out.back().hi, o.loc.hi);
        } else {
            out.push_back(o.loc);
        }
    }
    return out;
}

}  // namespace detail

struct CadOptions {
    int max_order = 40;
    int max_depth = 64;
    unsigned precision_bits = 4096;
    size_t cell_budget = 200000;
    long base_refine_den = 4096;  // base roots refined to width horizon/this
};

// Open-CAD positivity prover: is p > 0 on every open cell where all
// constraints hold?  Constraints are strict:  (poly, true) means poly > 0,
// (poly, false) means poly < 0.  `box` optionally bounds the first variable.
enum class ProveVerdict { Proved, CounterSample, Unknown };

struct ProveResult {
    ProveVerdict verdict = ProveVerdict::Unknown;
    std::optional<std::vector<Rat>> counter_sample;  // in `vars` order
    size_t cells_visited = 0;
};

inline ProveResult prove_polynomial_positive(
    const MultiPoly& p, const std::vector<std::pair<MultiPoly, bool>>& constraints,
    const std::vector<std::string>& vars, std::optional<std::pair<Rat, Rat>> first_var_box,
    const CadOptions& opt = {}) {
    ProveResult res;
    if (vars.size() > 6) return res;  // documented scalability bound

    std::vector<MultiPoly> top{p.in_ring(vars)};
    for (auto& [c, pos] : constraints) top.push_back(c.in_ring(vars));
    if (first_var_box) {
        MultiPoly x = MultiPoly::variable(vars[0], vars);
        top.push_back(x - MultiPoly::constant(FieldElement(first_var_box->first), vars));
        top.push_back(MultiPoly::constant(FieldElement(first_var_box->second), vars) - x);
    }
    std::vector<std::string> lift_vars(vars.begin() + 1, vars.end());
    ProjectionTower tw = project_tower(top, lift_vars);

    bool exhausted = false;
    std::function<bool(size_t, std::vector<Rat>&)> visit = [&](size_t level,
                                                               std::vector<Rat>& coords) {
        if (res.cells_visited > opt.cell_budget) {
            exhausted = true;
            return false;
        }
        if (level == tw.levels.size()) {
            ++res.cells_visited;
            std::map<std::string, FieldElement> env;
            for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = FieldElement(coords[i]);
            if (first_var_box &&
                !(first_var_box->first < coords[0] && coords[0] < first_var_box->second))
                return false;
            for (auto& [c, pos] : constraints) {
                int s = c.in_ring(vars).eval(env).sign();
                if ((pos && s <= 0) || (!pos && s >= 0)) return false;
            }
            int sp = p.in_ring(vars).eval(env).sign();
            if (sp <= 0) {
                res.verdict = ProveVerdict::CounterSample;
                res.counter_sample = coords;
                return true;
            }
            return false;
        }
        // restrict this level's polynomials by the sample prefix
        std::map<std::string, FieldElement> env;
        for (size_t i = 0; i < level; ++i) env[vars[i]] = FieldElement(coords[i]);
        std::vector<UniPoly> restricted;
        for (auto& q : tw.levels[level]) {
            MultiPoly r = q.in_ring(vars).substitute(env);
            if (r.is_zero()) continue;  // degenerate fiber: no constraint here
            auto cs = r.coeffs_in(vars[level]);
            std::vector<FieldElement> c(cs.size());
            bool ok = true;
            for (size_t i = 0; i < cs.size(); ++i) {
                if (!cs[i].is_constant()) ok = false;
                else c[i] = cs[i].constant_value();
            }
            if (!ok) throw arith_error("level restriction is not univariate");
            UniPoly u(std::move(c));
            if (u.degree() >= 1) restricted.push_back(u);
        }
        std::optional<std::pair<Rat, Rat>> box;
        if (level == 0 && first_var_box) box = first_var_box;
        Rat lo, hi;
        if (box) {
            lo = box->first;
            hi = box->second;
        } else {
            Rat bound(1);
            for (auto& u : restricted) bound = std::max(bound, root_bound(u));
            lo = -bound;
            hi = bound;
        }
        auto roots = detail::exact_level_roots(restricted, lo, hi);
        for (auto& s : detail::point_samples(roots, box)) {
            coords.push_back(s);
            bool stop = visit(level + 1, coords);
            coords.pop_back();
            if (stop) return true;
        }
        return false;
    };
    std::vector<Rat> coords;
    bool found = visit(0, coords);
    if (exhausted && !found) return res;  // Unknown
    if (!found) res.verdict = ProveVerdict::Proved;
    return res;
}

// ---------------------------------------------------------------------------
// Parametric sandwich positivity (the fast reachability path).

enum class ParametricVerdict { ProvedPositive, Unknown };

namespace detail {

// A region of the form  sum w_i (x_i - m_i)^2 < alpha  with w_i > 0.
struct Ellipsoid {
    std::vector<Rat> w, m;
    Rat alpha;
};

inline std::optional<Ellipsoid> match_ellipsoid(const MultiPoly& p,
                                                const std::vector<std::string>& vars) {
    Ellipsoid e;
    e.w.assign(vars.size(), Rat(0));
    e.m.assign(vars.size(), Rat(0));
    std::vector<Rat> lin(vars.size(), Rat(0));
    Rat constant(0);
    for (auto& [exp, c] : p.terms()) {
        if (!c.is_rational()) return std::nullopt;
        int total = 0, which = -1, deg = 0;
        for (size_t i = 0; i < vars.size(); ++i) {
            int d = exp[(size_t)p.var_index(vars[i])];
            total += d;
            if (d > 0) {
                which = (int)i;
                deg = d;
            }
        }
        // reject cross terms and degrees above 2
        int nonzero_vars = 0;
        for (size_t i = 0; i < vars.size(); ++i)
            if (exp[(size_t)p.var_index(vars[i])] > 0) ++nonzero_vars;
        if (nonzero_vars > 1 || total > 2) return std::nullopt;
        if (total == 0)
            constant = c.rat_value();
        else if (deg == 1)
            lin[(size_t)which] = c.rat_value();
        else
            e.w[(size_t)which] = -c.rat_value();
    }
    for (size_t i = 0; i < vars.size(); ++i) {
        if (e.w[i] <= 0) return std::nullopt;
        e.m[i] = lin[i] / (2 * e.w[i]);
    }
    // p = constant + sum(2 w m x) - sum(w x^2) = alpha - sum w (x-m)^2
    e.alpha = constant;
    for (size_t i = 0; i < vars.size(); ++i) e.alpha += e.w[i] * e.m[i] * e.m[i];
    if (e.alpha <= 0) return std::nullopt;  // empty region
    return e;
}

// Is the polynomial affine in the given variables (no products, powers <= 1)?
inline bool affine_in(const MultiPoly& p, const std::vector<std::string>& vars) {
    for (auto& [exp, c] : p.terms()) {
        int total = 0;
        for (auto& v : vars) {
            int idx = p.var_index(v);
            if (idx >= 0) total += exp[(size_t)idx];
        }
        if (total > 1) return false;
    }
    return true;
}

// T_min affine in the parameters over an ellipsoid: the infimum over the
// region is  A(t) - sqrt(alpha * S(t))  with A the value at the center and
// S = sum c_i^2 / w_i, so nonnegativity on (0,T] reduces to two univariate
// Sturm checks:  A >= 0  and  A^2 - alpha S >= 0.
inline std::optional<bool> affine_over_ellipsoid_nonneg(const MultiPoly& tmin,
                                                        const std::string& tvar,
                                                        const std::vector<std::string>& pvars,
                                                        const Ellipsoid& e, const Rat& T) {
    if (!affine_in(tmin, pvars)) return std::nullopt;
    // decompose tmin = c0(t) + sum c_i(t) x_i
    MultiPoly c0 = tmin;
    std::vector<MultiPoly> ci;
    for (auto& v : pvars) {
        auto cs = c0.coeffs_in(v);
        ci.push_back(cs.size() > 1 ? cs[1] : MultiPoly(tmin.vars()));
        c0 = cs[0];
    }
    UniPoly A = to_unipoly(c0.in_ring({tvar}), tvar);
    for (size_t i = 0; i < pvars.size(); ++i) {
        UniPoly c = to_unipoly(ci[i].compress({tvar}).in_ring({tvar}), tvar);
        A = A + c * FieldElement(e.m[i]);
    }
    UniPoly S;
    for (size_t i = 0; i < pvars.size(); ++i) {
        UniPoly c = to_unipoly(ci[i].compress({tvar}).in_ring({tvar}), tvar);
        S = S + (c * c) * FieldElement(Rat(1) / e.w[i]);
    }
    UniPoly crit = A * A - S * FieldElement(e.alpha);
    bool ok = nonneg_on(A, Rat(0), T, true, false) && nonneg_on(crit, Rat(0), T, true, false);
    return ok;
}

}  // namespace detail

// Prove F(t, params) > 0 for t in (0, T] under strict polynomial constraints
// on the parameters.  Sound but incomplete: the positive/negative coefficient
// split is only valid where the parameters are provably positive, which is
// checked first through the same prover.
inline ParametricVerdict decide_sign_parametric(
    const Tep& F, const std::vector<std::pair<MultiPoly, bool>>& constraints, const Rat& T,
    int order, const CadOptions& opt = {}) {
    try {
        std::vector<std::string> pvars = F.params;

        // single positively-oriented ellipsoidal constraint: closed-form route
        std::optional<detail::Ellipsoid> ell;
        if (constraints.size() == 1 && constraints[0].second)
            ell = detail::match_ellipsoid(constraints[0].first.in_ring(pvars), pvars);

        // the monomial sign split needs nonnegative parameters on the region
        if (ell) {
            for (size_t i = 0; i < pvars.size(); ++i) {
                // min x_i over the ellipsoid is m_i - sqrt(alpha / w_i)
                if (ell->m[i] < 0) return ParametricVerdict::Unknown;
                if (ell->w[i] * ell->m[i] * ell->m[i] < ell->alpha)
                    return ParametricVerdict::Unknown;
            }
        } else {
            for (auto& pv : pvars) {
                MultiPoly pp = MultiPoly::variable(pv, pvars);
                ProveResult pr =
                    prove_polynomial_positive(pp, constraints, pvars, std::nullopt, opt);
                if (pr.verdict != ProveVerdict::Proved) return ParametricVerdict::Unknown;
            }
        }

        Tep G = detail::normalize_rates(F).rescaled_for_horizon(T);
        SandwichPair sw = sandwich(G, order, T);
        std::vector<std::string> vars{G.var};
        for (auto& pv : G.params) vars.push_back(pv);

        if (ell) {
            auto ok = detail::affine_over_ellipsoid_nonneg(sw.lower.in_ring(vars), G.var,
                                                           pvars, *ell, T);
            if (ok) return *ok ? ParametricVerdict::ProvedPositive : ParametricVerdict::Unknown;
            // affine pattern missed: fall through to the generic prover
        }

        ProveResult open_part = prove_polynomial_positive(
            sw.lower.in_ring(vars), constraints, vars, std::make_pair(Rat(0), T), opt);
        if (open_part.verdict != ProveVerdict::Proved) return ParametricVerdict::Unknown;
        // the t = T boundary slice
        MultiPoly at_T = sw.lower.in_ring(vars).substitute({{G.var, FieldElement(T)}});
        if (at_T.is_zero()) return ParametricVerdict::Unknown;  // boundary touches zero
        if (pvars.empty()) {
            if (at_T.constant_value().sign() <= 0) return ParametricVerdict::Unknown;
        } else {
            ProveResult slice = prove_polynomial_positive(at_T.compress(pvars).in_ring(pvars),
                                                          constraints, pvars, std::nullopt, opt);
            if (slice.verdict != ProveVerdict::Proved) return ParametricVerdict::Unknown;
        }
        return ParametricVerdict::ProvedPositive;
    } catch (const arith_error&) {
        return ParametricVerdict::Unknown;
    }
}

// ---------------------------------------------------------------------------
// Lifting with transcendental fiber coefficients.

namespace detail {

// The symbol environment of a Tep-derived polynomial ring.
struct SymbolTable {
    std::string var;
    std::vector<FieldElement> rates, sin_freqs, cos_freqs;

    std::vector<std::string> sym_names() const {
        std::vector<std::string> out;
        for (size_t i = 0; i < rates.size(); ++i) out.push_back("@e" + std::to_string(i));
        for (size_t j = 0; j < sin_freqs.size(); ++j) out.push_back("@s" + std::to_string(j));
        for (size_t k = 0; k < cos_freqs.size(); ++k) out.push_back("@c" + std::to_string(k));
        return out;
    }

    // Wrap a polynomial in (var, syms) back into a Tep.
    Tep to_tep(const MultiPoly& body) const {
        Tep t(var);
        t.rates = rates;
        t.sin_freqs = sin_freqs;
        t.cos_freqs = cos_freqs;
        t.body = body.in_ring(t.ring());
        t.canonicalize();
        return t;
    }
};

// Certified root intervals of a univariate polynomial whose coefficients are
// TEP values at a fixed rational time; adaptive precision with midpoint-Sturm
// isolation plus interval endpoint certification.
inline std::vector<RootLoc> interval_roots(const std::vector<Tep>& coef_teps, const Rat& t0,
                                           unsigned budget_bits, int level_for_error) {
    // exact zero coefficients drop out up front
    std::vector<Tep> cs;
    std::vector<size_t> keep;
    for (size_t i = 0; i < coef_teps.size(); ++i)
        if (!coef_teps[i].is_zero_tep()) keep.push_back(i);
    if (keep.empty()) return {};
    size_t deg = keep.back();
    if (deg == 0) return {};

    auto enclose = [&](size_t k, unsigned bits) -> RatInterval {
        if (coef_teps[k].is_zero_tep()) return RatInterval(Rat(0));
        return coef_teps[k].enclosure_at(t0, bits);
    };

    for (unsigned bits = 128; bits <= budget_bits; bits *= 2) {
        RatInterval lead = enclose(deg, bits);
        if (!lead.sign_known()) continue;
        // bound and midpoint polynomial
        std::vector<RatInterval> enc(deg + 1);
        for (size_t k = 0; k <= deg; ++k) enc[k] = enclose(k, bits);
        Rat lead_low = std::min(rat_abs(lead.lo), rat_abs(lead.hi));
        Rat mx(0);
        for (size_t k = 0; k < deg; ++k)
            mx = std::max(mx, std::max(rat_abs(enc[k].lo), rat_abs(enc[k].hi)));
        Rat bound = Rat(1) + mx / lead_low;
        std::vector<FieldElement> mid(deg + 1);
        for (size_t k = 0; k <= deg; ++k) mid[k] = FieldElement(enc[k].mid());
        UniPoly mid_poly{std::move(mid)};
        if (mid_poly.degree() != (int)deg) continue;
        auto cand = isolate_roots(mid_poly, -bound, bound);
        // evaluate the true polynomial's enclosure at a rational point
        auto true_eval = [&](const Rat& x, unsigned b) {
            RatInterval acc{Rat(0)};
            RatInterval xi{x};
            for (size_t k = 0; k <= deg; ++k) {
                RatInterval ck = enclose(k, b);
                acc = acc + ck * int_pow(xi, (unsigned long)k);
                acc = round_out(acc, b + 16);
            }
            return acc;
        };
        auto certified_sign_at = [&](const Rat& x) -> int {
            for (unsigned b = bits; b <= budget_bits; b *= 2) {
                RatInterval v = true_eval(x, b);
                if (v.sign_known()) return v.sign();
            }
            return 0;
        };
        bool all_ok = true;
        std::vector<RootLoc> out;
        for (auto& r : cand) {
            RootLoc fine = refine_root(mid_poly, r, bound / (Int(1) << 24));
            if (fine.exact()) {
                // widen to a two-sided interval around the midpoint root
                Rat w = bound / (Int(1) << 26);
                fine = {fine.lo - w, fine.lo + w};
            }
            int slo = certified_sign_at(fine.lo);
            int shi = certified_sign_at(fine.hi);
            if (slo == 0 || shi == 0 || slo == shi) {
                all_ok = false;
                break;
            }
            out.push_back(fine);
        }
        if (!all_ok) continue;
        // gap samples must be certifiably nonzero
        if (all_ok && !out.empty()) {
            for (size_t i = 0; i + 1 < out.size() && all_ok; ++i)
                if (certified_sign_at((out[i].hi + out[i + 1].lo) / 2) == 0) all_ok = false;
        }
        if (all_ok) return out;
    }
    throw cad_degenerate("cannot separate fiber roots within the precision budget (level " +
                             std::to_string(level_for_error) + ")",
                         level_for_error);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Reachability with an open semi-algebraic initial set.

struct SemiReachTrace {
    std::vector<RatInterval> base_roots;  // refined roots of the base TEPs on (0,T)
    size_t sample_count = 0;
};

inline bool verify_witness(const std::vector<Tep>& solution_components,
                           const std::vector<MultiPoly>& init_region,
                           const std::vector<UnsafeConstraint>& unsafe, const Rat& t,
                           const std::vector<Rat>& x) {
    std::map<std::string, FieldElement> env;
    std::map<std::string, FieldElement> params;
    for (size_t i = 0; i < x.size(); ++i) {
        env["x" + std::to_string(i + 1)] = FieldElement(x[i]);
        params["@x" + std::to_string(i + 1)] = FieldElement(x[i]);
    }
    for (auto& q : init_region) {
        MultiPoly r = q;
        std::map<std::string, FieldElement> sub;
        for (auto& v : q.vars()) {
            auto it = env.find(v);
            if (it != env.end()) sub[v] = it->second;
        }
        if (q.eval(sub).sign() <= 0) return false;
    }
    std::vector<Tep> xi;
    for (auto& c : solution_components) {
        std::map<std::string, FieldElement> sub;
        for (auto& pv : c.params) {
            auto it = params.find(pv);
            if (it == params.end()) {
                auto it2 = env.find(pv);
                if (it2 == env.end()) return false;
                sub[pv] = it2->second;
            } else {
                sub[pv] = it->second;
            }
        }
        xi.push_back(c.substitute_params(sub));
    }
    for (auto& uc : unsafe) {
        Tep g = compose_poly(uc.poly, xi, xi[0].var);
        int s;
        try {
            s = g.sign_at_rational(t);
        } catch (const undecided_sign&) {
            return false;
        }
        if ((uc.less_than && s >= 0) || (!uc.less_than && s <= 0)) return false;
    }
    return true;
}

// The projection input for the reachability search: the initial-set
// polynomials and the unsafe margins over a shared transcendental symbol
// table, in the ring (t, symbols, x1..xn).
struct ReachTower {
    detail::SymbolTable table;
    std::vector<std::string> proj_ring;
    std::vector<std::string> params;
    ProjectionTower tower;
};

inline ReachTower build_reach_tower(const std::vector<MultiPoly>& init_region,
                                    const std::vector<Tep>& margins,
                                    const std::vector<std::string>& params) {
    ReachTower rt;
    rt.params = params;
    rt.table.var = margins.empty() ? "t" : margins[0].var;
    auto push_u = [](std::vector<FieldElement>& v, const FieldElement& f) {
        for (auto& g : v)
            if (g == f) return;
        v.push_back(f);
    };
    for (auto& m : margins) {
        for (auto& r : m.rates) push_u(rt.table.rates, r);
        for (auto& v : m.sin_freqs) push_u(rt.table.sin_freqs, v);
        for (auto& r : m.cos_freqs) push_u(rt.table.cos_freqs, r);
    }
    std::sort(rt.table.rates.begin(), rt.table.rates.end());
    std::sort(rt.table.sin_freqs.begin(), rt.table.sin_freqs.end());
    std::sort(rt.table.cos_freqs.begin(), rt.table.cos_freqs.end());

    rt.proj_ring = {rt.table.var};
    for (auto& s : rt.table.sym_names()) rt.proj_ring.push_back(s);
    for (auto& pv : params) rt.proj_ring.push_back(pv);

    auto locate = [](const std::vector<FieldElement>& list, const FieldElement& f) {
        for (size_t i = 0; i < list.size(); ++i)
            if (list[i] == f) return i;
        throw arith_error("symbol lookup failed while aligning margins");
    };
    std::vector<MultiPoly> top;
    for (auto& q : init_region) top.push_back(q.in_ring(rt.proj_ring));
    for (auto& m : margins) {
        std::map<std::string, MultiPoly> ren;
        for (size_t i = 0; i < m.rates.size(); ++i)
            ren["@e" + std::to_string(i)] = MultiPoly::variable(
                "@e" + std::to_string(locate(rt.table.rates, m.rates[i])), rt.proj_ring);
        for (size_t j = 0; j < m.sin_freqs.size(); ++j)
            ren["@s" + std::to_string(j)] = MultiPoly::variable(
                "@s" + std::to_string(locate(rt.table.sin_freqs, m.sin_freqs[j])), rt.proj_ring);
        for (size_t k = 0; k < m.cos_freqs.size(); ++k)
            ren["@c" + std::to_string(k)] = MultiPoly::variable(
                "@c" + std::to_string(locate(rt.table.cos_freqs, m.cos_freqs[k])), rt.proj_ring);
        top.push_back(m.body.substitute_polys(ren).in_ring(rt.proj_ring));
    }
    rt.tower = project_tower(top, params);
    return rt;
}

inline ReachResult reach_semialgebraic(const std::vector<std::vector<Rat>>& A,
                                       const std::vector<Tep>& u,
                                       const std::vector<MultiPoly>& init_region,
                                       const std::vector<UnsafeConstraint>& unsafe, const Rat& T,
                                       const CadOptions& opt = {},
                                       SemiReachTrace* trace = nullptr) {
    size_t n = A.size();
    ReachResult res;
    if (unsafe.empty()) {
        res.verdict = ReachVerdict::Safe;
        res.note = "empty unsafe set";
        return res;
    }
    std::vector<std::string> params;
    for (size_t i = 0; i < n; ++i) params.push_back("x" + std::to_string(i + 1));
    SymbolicSolution sol = solve_symbolic(A, u, params, u.empty() ? "t" : u[0].var);

    // margins: unsafe holds exactly where every margin is negative
    std::vector<Tep> margins;
    for (auto& uc : unsafe) {
        Tep g = compose_poly(uc.poly, sol.components, sol.components[0].var);
        margins.push_back(uc.less_than ? g : -g);
    }
    std::vector<std::pair<MultiPoly, bool>> constraints;
    for (auto& q : init_region) constraints.emplace_back(q.in_ring(params), true);

    // fast path: one margin provably positive over region x (0,T] keeps the
    // system safe
    for (auto& m : margins) {
        int order = 1;
        try {
            order = sandwich_start_order(detail::normalize_rates(m).rescaled_for_horizon(T), T);
        } catch (const arith_error&) {
            order = 2;
        }
        if (decide_sign_parametric(m, constraints, T, order, opt) ==
            ParametricVerdict::ProvedPositive) {
            res.verdict = ReachVerdict::Safe;
            res.order_used = order;
            res.note = "parametric sandwich";
            return res;
        }
    }

    // open-CAD path over the constraint set
    ReachTower rt = build_reach_tower(init_region, margins, params);
    detail::SymbolTable& table = rt.table;
    std::vector<std::string>& proj_ring = rt.proj_ring;
    ProjectionTower& tw = rt.tower;

    try {
        // base phase: roots of every level-0 polynomial as TEPs on (0, T)
        std::vector<RatInterval> base_roots;
        for (auto& q : tw.levels[0]) {
            Tep tq = table.to_tep(q.in_ring(proj_ring));
            if (tq.is_poly() && tq.body.is_constant()) continue;
            if (tq.sin_freqs.empty() && tq.cos_freqs.empty() && tq.body.terms().size() == 1)
                continue;  // pure exponential monomial: no roots
            IsolationReport rep = isolate(tq, RatInterval(Rat(0), T), opt.max_depth,
                                          opt.max_order);
            for (auto& iv : rep.intervals) {
                RatInterval fine =
                    iv.is_point() ? iv : refine(tq, iv, T / Rat(opt.base_refine_den));
                base_roots.push_back(fine);
            }
        }
        std::sort(base_roots.begin(), base_roots.end(),
                  [](const RatInterval& a, const RatInterval& b) { return a.lo < b.lo; });
        // merge clusters that refinement could not separate (distinct base
        // polynomials can share roots)
        std::vector<RatInterval> merged;
        for (auto& r : base_roots) {
            if (!merged.empty() && !(merged.back().hi < r.lo))
                merged.back() = hull(merged.back(), r);
            else
                merged.push_back(r);
        }
        if (trace) trace->base_roots = merged;

        std::vector<Rat> t_samples;
        if (merged.empty()) {
            t_samples.push_back(T / 2);
        } else {
            t_samples.push_back(merged.front().lo / 2);
            for (size_t i = 0; i + 1 < merged.size(); ++i)
                t_samples.push_back((merged[i].hi + merged[i + 1].lo) / 2);
            t_samples.push_back((merged.back().hi + T) / 2);
        }

        // lift each t-sample through x1..xn
        for (auto& t0 : t_samples) {
            if (!(Rat(0) < t0 && t0 < T)) continue;
            std::function<bool(size_t, std::vector<Rat>&)> lift =
                [&](size_t level, std::vector<Rat>& xs) -> bool {
                if (trace) ++trace->sample_count;
                if (level == params.size()) {
                    // full sample: check the actual predicate with certified signs
                    std::map<std::string, FieldElement> env;
                    for (size_t i = 0; i < params.size(); ++i)
                        env[params[i]] = FieldElement(xs[i]);
                    for (auto& q : init_region) {
                        std::map<std::string, FieldElement> sub;
                        for (auto& v : q.vars())
                            if (env.count(v)) sub[v] = env[v];
                        if (q.eval(sub).sign() <= 0) return false;
                    }
                    for (auto& m : margins) {
                        Tep at = m.substitute_params(env);
                        int s;
                        try {
                            s = at.sign_at_rational(t0, opt.precision_bits);
                        } catch (const undecided_sign&) {
                            return false;
                        }
                        if (s >= 0) return false;
                    }
                    if (!verify_witness(sol.components, init_region, unsafe, t0, xs))
                        return false;  // independent re-verification
                    res.verdict = ReachVerdict::Unsafe;
                    res.witness_time = RatInterval(t0, t0);
                    res.witness_state = xs;
                    return true;
                }
                // fiber polynomials of this level, coefficients as TEPs
                std::vector<Tep> coef_teps;
                std::vector<size_t> degs;
                std::vector<UniPoly> dummy;
                std::map<std::string, FieldElement> env;
                for (size_t i = 0; i < level; ++i) env[params[i]] = FieldElement(xs[i]);
                std::vector<RootLoc> roots;
                for (auto& q : tw.levels[level]) {
                    MultiPoly r = q.in_ring(proj_ring).substitute(env);
                    if (r.is_zero()) continue;
                    auto cs = r.coeffs_in(params[level]);
                    std::vector<Tep> coefs;
                    for (auto& cpoly : cs) coefs.push_back(table.to_tep(cpoly));
                    if (coefs.size() <= 1) continue;  // constant in this variable
                    auto rl = detail::interval_roots(coefs, t0, opt.precision_bits,
                                                     (int)level + 1);
                    for (auto& r2 : rl) roots.push_back(r2);
                }
                std::sort(roots.begin(), roots.end(),
                          [](const RootLoc& a, const RootLoc& b) { return a.lo < b.lo; });
                std::vector<RootLoc> merged2;
                for (auto& r2 : roots) {
                    if (!merged2.empty() && !(merged2.back().hi < r2.lo)) {
                        merged2.back().lo = std::min(merged2.back().lo, r2.lo);
                        merged2.back().hi = std::max(merged2.back().hi, r2.hi);
                    } else {
                        merged2.push_back(r2);
                    }
                }
                for (auto& s : detail::point_samples(merged2, std::nullopt)) {
                    xs.push_back(s);
                    bool stop = lift(level + 1, xs);
                    xs.pop_back();
                    if (stop) return true;
                }
                return false;
            };
            std::vector<Rat> xs;
            if (lift(0, xs)) return res;
        }
        res.verdict = ReachVerdict::Safe;
        res.note = "open-cell search exhausted without a counterexample";
        return res;
    } catch (const cad_degenerate& e) {
        res.verdict = ReachVerdict::Inconclusive;
        res.note = e.what();
        return res;
    } catch (const inconclusive_sign& e) {
        res.verdict = ReachVerdict::Inconclusive;
        res.note = e.what();
        return res;
    } catch (const isolation_error& e) {
        res.verdict = ReachVerdict::Inconclusive;
        res.note = e.what();
        return res;
    }
}

}  // namespace tepreach
