#pragma once

// Real-root isolation for TEPs on a rational interval: decide the sign; if
// mixed, try the derivative for monotonicity (one root), otherwise bisect.
// Inputs are factored multiple-root-free first and the polynomial content is
// peeled off, so the recursion meets only simple roots.

#include "tepreach/sign_decision.hpp"

#include <deque>
#include <vector>

namespace tepreach {

struct isolation_error : arith_error {
    std::vector<RatInterval> unresolved;
    isolation_error(const std::string& msg, std::vector<RatInterval> bad)
        : arith_error(msg), unresolved(std::move(bad)) {}
};

struct IsolationReport {
    std::vector<RatInterval> intervals;  // pairwise disjoint, sorted
    std::vector<std::pair<int, int>> endpoint_signs;  // (sign at lo, sign at hi)
    int depth_reached = 0;
};

namespace detail {

struct ItepContext {
    const Tep* f;
    const Tep* df;
    int max_depth;
    int max_order;
    int depth_seen = 0;
    std::vector<RatInterval> found;
    std::vector<RatInterval> unresolved;
};

inline void itep_rec(ItepContext& ctx, const Rat& a, const Rat& b, int depth) {
    ctx.depth_seen = std::max(ctx.depth_seen, depth);
    SignVerdict sv = decide_sign(*ctx.f, a, b, ctx.max_order);
    if (sv.value != SignValue::Mixed) return;
    SignVerdict dv = decide_sign(*ctx.df, a, b, ctx.max_order);
    if (dv.value != SignValue::Mixed) {
        ctx.found.push_back({a, b});  // strictly monotone with a sign change
        return;
    }
    if (depth >= ctx.max_depth) {
        ctx.unresolved.push_back({a, b});
        return;
    }
    Rat m = (a + b) / 2;
    itep_rec(ctx, a, m, depth + 1);
    itep_rec(ctx, m, b, depth + 1);
}

inline int endpoint_sign(const Tep& f, const Rat& x) {
    try {
        return f.sign_at_rational(x);
    } catch (const undecided_sign&) {
        return 0;
    }
}

// One bisection step of a root interval of f, preserving the sign change.
inline bool shrink_once(const Tep& f, RatInterval& iv) {
    Rat m = (iv.lo + iv.hi) / 2;
    int sm = endpoint_sign(f, m);
    int shi = endpoint_sign(f, iv.hi);
    if (sm == 0 || shi == 0) return false;
    if (sm == shi)
        iv.hi = m;
    else
        iv.lo = m;
    return true;
}

}  // namespace detail

// Bisect a certified one-root interval until its width drops below `width`.
inline RatInterval refine(const Tep& F, RatInterval iv, const Rat& width) {
    while (iv.width() > width)
        if (!detail::shrink_once(F, iv))
            throw undecided_sign("endpoint sign undecided during refinement",
                                 RatInterval(iv.lo, iv.hi));
    return iv;
}

// Algorithm-6 isolation of all roots of F in (lo, hi).
inline IsolationReport isolate(const Tep& F, const RatInterval& iv, int max_depth = 64,
                               int max_order = 40) {
    if (!(0 <= iv.lo && iv.lo < iv.hi)) throw arith_error("isolate needs 0 <= lo < hi");
    if (!F.params.empty()) throw arith_error("isolate with free parameters");

    TepFactorization fac = factor_multiple_root_free(F);
    IsolationReport report;
    std::vector<RatInterval> all;

    struct Tracked {
        RatInterval iv;
        Tep const* owner;  // TEP whose sign change certifies the interval
    };
    std::deque<Tep> owners;  // stable addresses for factor copies
    std::vector<Tracked> tracked;

    for (auto& [factor, mult] : fac.factors) {
        // polynomial content: exact Sturm roots
        UniPoly content = factor.content_in_var();
        Tep reduced = factor.divide_content(content);
        if (content.degree() > 0) {
            owners.push_back(Tep::poly(to_multipoly(content, F.var), F.var));
            for (auto& r : isolate_roots(content, iv.lo, iv.hi)) {
                if (r.exact())
                    tracked.push_back({RatInterval(r.lo, r.lo), &owners.back()});
                else
                    tracked.push_back({RatInterval(r.lo, r.hi), &owners.back()});
            }
        }
        if (reduced.is_poly() && reduced.body.is_constant()) continue;
        if (reduced.sin_freqs.empty() && reduced.cos_freqs.empty() &&
            reduced.body.terms().size() == 1)
            continue;  // c * x^k * e^{ux}: only the root x=0, outside (lo, hi)
        owners.push_back(reduced);
        Tep const* owner = &owners.back();
        Tep df = reduced.derivative();
        detail::ItepContext ctx{owner, &df, max_depth, max_order};
        detail::itep_rec(ctx, iv.lo, iv.hi, 0);
        if (!ctx.unresolved.empty())
            throw isolation_error("isolation depth exhausted; unresolved sub-intervals remain",
                                  ctx.unresolved);
        report.depth_reached = std::max(report.depth_reached, ctx.depth_seen);
        for (auto& r : ctx.found) tracked.push_back({r, owner});
    }

    std::sort(tracked.begin(), tracked.end(),
              [](const Tracked& x, const Tracked& y) { return x.iv.lo < y.iv.lo; });
    // factors share no roots: shrink overlapping intervals until disjoint
    bool changed = true;
    while (changed) {
        changed = false;
        std::sort(tracked.begin(), tracked.end(),
                  [](const Tracked& x, const Tracked& y) { return x.iv.lo < y.iv.lo; });
        for (size_t i = 0; i + 1 < tracked.size(); ++i) {
            if (tracked[i].iv.hi < tracked[i + 1].iv.lo) continue;
            if (tracked[i].iv.is_point() && tracked[i + 1].iv.is_point())
                throw arith_error("coincident roots from distinct factors");
            auto& wider = (tracked[i].iv.width() >= tracked[i + 1].iv.width()) ? tracked[i]
                                                                               : tracked[i + 1];
            if (!detail::shrink_once(*wider.owner, wider.iv))
                throw isolation_error("cannot separate root intervals",
                                      {tracked[i].iv, tracked[i + 1].iv});
            changed = true;
        }
    }

    for (auto& t : tracked) {
        report.intervals.push_back(t.iv);
        report.endpoint_signs.emplace_back(detail::endpoint_sign(*t.owner, t.iv.lo),
                                           detail::endpoint_sign(*t.owner, t.iv.hi));
    }
    return report;
}

}  // namespace tepreach
