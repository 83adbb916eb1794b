#pragma once

// Sign decision for TEPs on (a,b] by sandwich escalation: build T_min/T_max
// at increasing order, settle Positive/Negative through exact Sturm checks,
// and certify a sign change through two rational points whose F-signs are
// established independently (polynomial bound first, adaptive interval
// evaluation as the recorded certificate).

#include "tepreach/laurent.hpp"
#include "tepreach/taylor.hpp"

#include <optional>

namespace tepreach {

enum class SignValue { Positive, Negative, Mixed };

struct SignVerdict {
    SignValue value;
    int order_used = 0;
    std::optional<SandwichPair> certificate;
    // for Mixed: certified points with F < 0 and F > 0
    std::optional<std::pair<Rat, Rat>> witnesses;
};

struct inconclusive_sign : arith_error {
    int last_order;
    explicit inconclusive_sign(int order)
        : arith_error("sign undecided at maximum sandwich order " + std::to_string(order)),
          last_order(order) {}
};

namespace detail {

// Multiply by e^{-Mx} so every rate is negative and collapse products of
// exponentials to one symbol per term; the sign on (0,b] is unchanged.
inline Tep normalize_rates(const Tep& F) {
    Tep G = F.combine_exponentials();
    if (G.rates.empty()) return G;
    FieldElement mx = G.rates.front();
    for (auto& u : G.rates)
        if ((u - mx).sign() > 0) mx = u;
    if (mx.sign() <= 0) return G;
    return (G * Tep::exp_term(-mx, G.var)).combine_exponentials();
}

inline int certified_sign(const Tep& F, const Rat& x, unsigned bits) {
    try {
        return F.sign_at_rational(x, bits);
    } catch (const undecided_sign&) {
        return 0;  // caller treats 0 as “unknown here”
    }
}

}  // namespace detail

// Algorithm-5 style sign decision of F on (a, b].
inline SignVerdict decide_sign(const Tep& F, const Rat& a, const Rat& b, int max_order = 40) {
    if (!(0 <= a && a < b)) throw arith_error("decide_sign needs 0 <= a < b");
    if (!F.params.empty()) throw arith_error("decide_sign with free parameters");
    if (F.is_zero_tep()) throw arith_error("decide_sign of the zero TEP");

    Tep G = detail::normalize_rates(F).rescaled_for_horizon(b);
    int n = std::max(1, sandwich_start_order(G, b));
    for (; n <= max_order; ++n) {
        SandwichPair sw;
        try {
            sw = sandwich(G, n, b);
        } catch (const sandwich_invalid&) {
            continue;
        }
        UniPoly tmin = to_unipoly(sw.lower.in_ring({G.var}), G.var);
        UniPoly tmax = to_unipoly(sw.upper.in_ring({G.var}), G.var);

        auto min_neg = negative_witness(tmin, a, b, /*strict_lo=*/true, /*strict_hi=*/false);
        if (!min_neg) return {SignValue::Positive, n, sw, std::nullopt};
        auto max_pos = negative_witness(-tmax, a, b, true, false);
        if (!max_pos) return {SignValue::Negative, n, sw, std::nullopt};

        // both bounds refuted somewhere: look for a certified sign change.
        // T_max < 0 at x forces F(x) < 0; T_min > 0 at x forces F(x) > 0.
        auto neg_at = negative_witness(tmax, a, b, true, false);
        auto pos_at = negative_witness(-tmin, a, b, true, false);
        if (neg_at && pos_at) {
            int s_neg = detail::certified_sign(F, *neg_at, 4096);
            int s_pos = detail::certified_sign(F, *pos_at, 4096);
            if (s_neg < 0 && s_pos > 0)
                return {SignValue::Mixed, n, sw, std::make_pair(*neg_at, *pos_at)};
        }
    }
    throw inconclusive_sign(max_order);
}

inline SignVerdict decide_sign(const Tep& F, const RatInterval& iv, int max_order = 40) {
    return decide_sign(F, iv.lo, iv.hi, max_order);
}

// Algorithm 4: factor first, decide per factor on (0, T], combine.
// Positive here means "nonnegative with at most isolated zeros" when an
// even-multiplicity factor crosses inside the interval.
inline SignVerdict decide_sign_factored(const Tep& F, const Rat& T, int max_order = 40) {
    if (T <= 0) throw arith_error("decide_sign_factored needs T > 0");
    TepFactorization fac = factor_multiple_root_free(F);
    int sign_acc = fac.constant.sign();
    if (sign_acc == 0) throw arith_error("zero constant in factorization");
    int order_used = 0;
    std::vector<std::pair<const TepFactor*, SignVerdict>> mixed;
    for (auto& tf : fac.factors) {
        SignVerdict v = decide_sign(tf.factor, Rat(0), T, max_order);
        order_used = std::max(order_used, v.order_used);
        if (v.value == SignValue::Mixed) {
            mixed.emplace_back(&tf, v);
            continue;
        }
        if (v.value == SignValue::Negative && tf.multiplicity % 2) sign_acc = -sign_acc;
    }
    bool mixed_odd = false;
    std::optional<std::pair<Rat, Rat>> flip_points;
    for (auto& [tf, v] : mixed)
        if (tf->multiplicity % 2) {
            mixed_odd = true;
            flip_points = v.witnesses;
        }
    if (!mixed_odd)
        return {sign_acc > 0 ? SignValue::Positive : SignValue::Negative, order_used,
                std::nullopt, std::nullopt};

    // an odd-multiplicity sign change: certify two F-signs directly
    std::vector<Rat> candidates;
    if (flip_points) {
        candidates.push_back(flip_points->first);
        candidates.push_back(flip_points->second);
    }
    Rat step = T / 64;
    for (int k = 1; k < 64; ++k) candidates.push_back(step * k);
    std::optional<Rat> at_neg, at_pos;
    for (auto& x : candidates) {
        if (x <= 0 || x > T) continue;
        int s = detail::certified_sign(F, x, 4096);
        if (s < 0 && !at_neg) at_neg = x;
        if (s > 0 && !at_pos) at_pos = x;
        if (at_neg && at_pos) break;
    }
    if (at_neg && at_pos)
        return {SignValue::Mixed, order_used, std::nullopt, std::make_pair(*at_neg, *at_pos)};
    throw inconclusive_sign(order_used);
}

}  // namespace tepreach
