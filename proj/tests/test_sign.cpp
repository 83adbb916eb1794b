#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tepreach/parser.hpp"
#include "tepreach/sign_decision.hpp"

#include "oracle.hpp"

using namespace tepreach;

static Tep T(const std::string& s, const std::string& var = "x") {
    return ExprParser::parse_tep(s, var);
}

// Example 3's unsafe-margin TEP (horizon variable t).
static const char* kExample3F =
    "-10*sqrt(3)/3*exp(-3/2000*t)*sin(sqrt(3)/2000*t)"
    " - 10/3*exp(-3/2000*t)*cos(sqrt(3)/2000*t) + 28/3";

TEST_CASE("example 3 margin is positive on (0,1000] at order 2") {
    Tep F = T(kExample3F, "t");
    SignVerdict v = decide_sign(F, Rat(0), Rat(1000));
    CHECK(v.value == SignValue::Positive);
    CHECK(v.order_used == 2);
}

TEST_CASE("example 3 margin at horizon 2000 needs rescaling, settles by order 4") {
    Tep F = T(kExample3F, "t");
    SignVerdict v = decide_sign(F, Rat(0), Rat(2000));
    CHECK(v.value == SignValue::Positive);
    CHECK(v.order_used <= 4);
    // order 4 itself proves positivity of the rescaled T_min
    Tep G = F.rescaled_for_horizon(Rat(2000));
    SandwichPair sw = sandwich(G, 4, Rat(2000));
    UniPoly tmin = to_unipoly(sw.lower.in_ring({"t"}), "t");
    CHECK(nonneg_on(tmin, Rat(0), Rat(2000), true, false));
}

TEST_CASE("sin x - x is negative on (0,1]") {
    SignVerdict v = decide_sign(T("sin(x) - x"), Rat(0), Rat(1));
    CHECK(v.value == SignValue::Negative);
}

TEST_CASE("mixed verdict carries certified witnesses") {
    // sin(x) - 1/2 changes sign on (0, 3] (after rescaling)
    Tep F = T("sin(x) - 1/2");
    SignVerdict v = decide_sign(F, Rat(0), Rat(3));
    REQUIRE(v.value == SignValue::Mixed);
    REQUIRE(v.witnesses.has_value());
    CHECK(F.sign_at_rational(v.witnesses->first) == -1);
    CHECK(F.sign_at_rational(v.witnesses->second) == 1);
}

TEST_CASE("soundness: positive verdicts agree with dense sampling") {
    Tep F = T(kExample3F, "t");
    for (int i = 1; i <= 100; ++i) {
        Rat x(i * 10);
        CHECK(oracle::eval(F, x).sign() > 0);
    }
}

TEST_CASE("monotone escalation: higher orders stay positive") {
    Tep F = T(kExample3F, "t");
    Tep G = F;  // already within frequency bounds at T=1000
    for (int n = 2; n <= 4; ++n) {
        SandwichPair sw = sandwich(G, n, Rat(1000));
        UniPoly tmin = to_unipoly(sw.lower.in_ring({"t"}), "t");
        CHECK(nonneg_on(tmin, Rat(0), Rat(1000), true, false));
    }
}

TEST_CASE("decide_sign_factored") {
    // sin on (0,3]: positive after rescaling (3 < pi)
    SignVerdict v = decide_sign_factored(T("sin(x)"), Rat(3));
    CHECK(v.value == SignValue::Positive);

    // 1 - cos^3 - sin^3 on (0, 157/100]: nonnegative via even powers
    SignVerdict w = decide_sign_factored(T("1 - cos(x)^3 - sin(x)^3"), Rat(157, 100));
    CHECK(w.value == SignValue::Positive);
    // numeric cross-check: strictly positive away from isolated zeros
    for (int i = 1; i <= 60; ++i) {
        Rat x(157 * i, 100 * 60);
        CHECK(oracle::eval(T("1 - cos(x)^3 - sin(x)^3"), x).sign() >= 0);
    }

    // example 2's TEP flips sign on (0,3]
    Tep f2 = T(
        "-sqrt(3) - 24*sqrt(3)*exp(-x) - 4*sin(sqrt(3)/2*x)*exp(-3/2*x) - 12*sqrt(3)*exp(-5/2*x)"
        " + 108*sqrt(3)*exp(-2*x) - 8*exp(-3*x)*sin(sqrt(3)/2*x)*cos(sqrt(3)/2*x)"
        " + 36*exp(-5/2*x)*sin(sqrt(3)/2*x)");
    SignVerdict m = decide_sign_factored(f2, Rat(3));
    CHECK(m.value == SignValue::Mixed);
    REQUIRE(m.witnesses.has_value());
    CHECK(f2.sign_at_rational(m.witnesses->first) == -1);
    CHECK(f2.sign_at_rational(m.witnesses->second) == 1);
}

TEST_CASE("factored and direct decisions agree where both conclude") {
    for (auto expr : {"sin(x) - x", "2 - exp(-x)"}) {
        SignVerdict a = decide_sign(T(expr), Rat(0), Rat(1));
        SignVerdict b = decide_sign_factored(T(expr), Rat(1));
        CHECK(a.value == b.value);
    }
}

TEST_CASE("positive rates are handled by rate normalization") {
    // e^x - 1 > 0 on (0, 2]
    SignVerdict v = decide_sign(T("exp(x) - 1"), Rat(0), Rat(2));
    CHECK(v.value == SignValue::Positive);
    // e^x + sin x changes nothing: still positive
    SignVerdict w = decide_sign(T("exp(x) + sin(x)"), Rat(0), Rat(2));
    CHECK(w.value == SignValue::Positive);
}

TEST_CASE("example 5 interval verdicts") {
    Tep f = T(
        "-sqrt(3) - 24*sqrt(3)*exp(-x) - 4*sin(sqrt(3)/2*x)*exp(-3/2*x) - 12*sqrt(3)*exp(-5/2*x)"
        " + 108*sqrt(3)*exp(-2*x) - 8*exp(-3*x)*sin(sqrt(3)/2*x)*cos(sqrt(3)/2*x)"
        " + 36*exp(-5/2*x)*sin(sqrt(3)/2*x)");
    SignVerdict right = decide_sign(f, Rat(3, 2), Rat(3));
    CHECK(right.value == SignValue::Negative);
    SignVerdict left = decide_sign(f, Rat(0), Rat(3, 2));
    CHECK(left.value == SignValue::Mixed);
}
