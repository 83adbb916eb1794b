#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tepreach/parser.hpp"
#include "tepreach/taylor.hpp"

#include "oracle.hpp"

#include <random>

using namespace tepreach;

static Tep T(const std::string& s, const std::string& var = "x") {
    return ExprParser::parse_tep(s, var);
}
static UniPoly up(const std::string& s) {
    return to_unipoly(ExprParser::parse_poly(s, {"x"}), "x");
}

TEST_CASE("taylor truncations") {
    CHECK((taylor_truncate(ExpansionKind::ExpNeg, FieldElement(Rat(1)), 3) -
           up("1 - x + x^2/2"))
              .is_zero());
    CHECK((taylor_truncate(ExpansionKind::Sin, FieldElement(Rat(1)), 2) - up("x - x^3/6"))
              .is_zero());
    // cos(sqrt3 t / 2000) at two terms: 1 - 3 t^2 / 8000000
    FieldElement r = FieldElement::sqrt_int(Int(3)) * Rat(1, 2000);
    CHECK((taylor_truncate(ExpansionKind::Cos, r, 2) - up("1 - 3*x^2/8000000")).is_zero());
}

TEST_CASE("thresholds match the reference values") {
    CHECK(expansion_threshold(ExpansionKind::Sin, FieldElement(Rat(1)), Rat(3)) == 3);
    CHECK(expansion_threshold(ExpansionKind::Sin, FieldElement(Rat(1)), Rat(157, 100)) == 1);
    CHECK(expansion_threshold(ExpansionKind::ExpNeg, FieldElement(Rat(3, 2000)), Rat(1000)) == 2);
    CHECK(expansion_threshold(ExpansionKind::ExpNeg, FieldElement(Rat(3, 2000)), Rat(2000)) == 4);
    CHECK(expansion_threshold(ExpansionKind::Cos, FieldElement(Rat(1)), Rat(1)) == 1);
    // cos cannot be regularly expanded at or beyond pi/2
    CHECK_THROWS_AS(expansion_threshold(ExpansionKind::Cos, FieldElement(Rat(1)), Rat(2)),
                    not_regularly_expandable);
    CHECK_THROWS_AS(expansion_threshold(ExpansionKind::Sin, FieldElement(Rat(1)), Rat(4)),
                    not_regularly_expandable);
}

TEST_CASE("alternating tail bounds hold at samples") {
    // taylor(f, 2n) < f < taylor(f, 2n-1) on (0, T]
    FieldElement u(Rat(1));
    for (int n : {1, 2, 3}) {
        UniPoly lo = taylor_truncate(ExpansionKind::ExpNeg, u, 2 * n);
        UniPoly hi = taylor_truncate(ExpansionKind::ExpNeg, u, 2 * n - 1);
        for (int i = 1; i <= 20; ++i) {
            Rat x(i, 10);
            oracle::Real fx = oracle::Real::exp(-oracle::Real(x));
            oracle::Real lov = oracle::eval(Tep::poly(to_multipoly(lo, "x"), "x"), x);
            oracle::Real hiv = oracle::eval(Tep::poly(to_multipoly(hi, "x"), "x"), x);
            CHECK(!(fx < lov));
            CHECK(!(hiv < fx));
        }
    }
}

TEST_CASE("split_pos_neg") {
    auto p = ExprParser::parse_poly("x^2 - y", {"x", "y"});
    auto [plus, minus] = split_pos_neg(p);
    CHECK(plus == ExprParser::parse_poly("x^2", {"x", "y"}));
    CHECK(minus == ExprParser::parse_poly("-y", {"x", "y"}));
    auto [p2, m2] = split_pos_neg(ExprParser::parse_poly("-3", {"x"}));
    CHECK(p2.is_zero());
    CHECK(m2 == ExprParser::parse_poly("-3", {"x"}));
    CHECK((plus + minus) == p);
}

TEST_CASE("sandwich for sin at order 1 on (0, 1.57]") {
    Tep f = T("sin(x)");
    SandwichPair sw = sandwich(f, 1, Rat(157, 100));
    CHECK(to_unipoly(sw.lower, "x").degree() == 3);   // x - x^3/6
    CHECK(to_unipoly(sw.upper, "x").degree() == 1);   // x
    CHECK((to_unipoly(sw.lower, "x") - up("x - x^3/6")).is_zero());
    CHECK((to_unipoly(sw.upper, "x") - up("x")).is_zero());
}

TEST_CASE("sandwich bounds and nesting at samples") {
    std::mt19937 rng(11);
    std::vector<Tep> cases;
    cases.push_back(T("exp(-x)*sin(x)"));
    cases.push_back(T("exp(-x) - sin(x)*cos(x)"));
    cases.push_back(T("2 - exp(-2*x)*cos(x)^2"));
    // randomized small TEPs from supported factors
    for (int i = 0; i < 20; ++i) {
        long a = 1 + (long)(rng() % 3), b = 1 + (long)(rng() % 2);
        long c1 = (long)(rng() % 7) - 3, c2 = (long)(rng() % 7) - 3;
        Tep t = T("exp(-" + std::to_string(a) + "*x)") * FieldElement(Rat(c1)) +
                T("sin(" + std::to_string(b) + "/2*x)") * FieldElement(Rat(c2)) +
                T("cos(1/2*x)") * FieldElement(Rat((long)(rng() % 5) - 2));
        cases.push_back(t);
    }
    Rat horizon(1);
    for (auto& f : cases) {
        if (f.is_zero_tep()) continue;
        int n0 = sandwich_start_order(f, horizon);
        SandwichPair s1, s2;
        int order = n0;
        while (true) {
            try {
                s1 = sandwich(f, order, horizon);
                s2 = sandwich(f, order + 1, horizon);
                break;
            } catch (const sandwich_invalid&) {
                ++order;
            }
        }
        UniPoly lo1 = to_unipoly(s1.lower, "x"), hi1 = to_unipoly(s1.upper, "x");
        UniPoly lo2 = to_unipoly(s2.lower, "x"), hi2 = to_unipoly(s2.upper, "x");
        for (int i = 1; i <= 50; ++i) {
            Rat x = horizon * Rat(i, 50);
            oracle::Real fx = oracle::eval(f, x);
            auto ev = [&](const UniPoly& p) {
                return oracle::eval(Tep::poly(to_multipoly(p, "x"), "x"), x);
            };
            CHECK(!(fx < ev(lo1)));
            CHECK(!(ev(hi1) < fx));
            // nesting: lower grows, upper shrinks
            CHECK(!(ev(lo2) < ev(lo1)));
            CHECK(!(ev(hi1) < ev(hi2)));
        }
    }
}

TEST_CASE("sandwich demands rescaling for out-of-range frequencies") {
    CHECK_THROWS_AS(sandwich(T("sin(2*x)"), 2, Rat(2)), not_regularly_expandable);
    CHECK_THROWS_AS(sandwich(T("exp(x)"), 2, Rat(1)), not_regularly_expandable);
}

TEST_CASE("parametric sandwich keeps parameters in the bound") {
    Tep f = ExprParser::parse_tep("p*exp(-x) + 1", "x", {"p"});
    SandwichPair sw = sandwich(f, 2, Rat(1));
    CHECK(sw.lower.depends_on("p"));
    CHECK(sw.upper.depends_on("p"));
}
