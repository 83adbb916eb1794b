#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tepreach/parser.hpp"
#include "tepreach/polyops.hpp"
#include "tepreach/sturm.hpp"

#include <random>

using namespace tepreach;

static MultiPoly P(const std::string& s, std::vector<std::string> vars) {
    return ExprParser::parse_poly(s, std::move(vars));
}

TEST_CASE("multipoly basics") {
    auto p = P("x^2 - 1", {"x"});
    auto q = P("(x-1)*(x+1)", {"x"});
    CHECK(p == q);
    CHECK(P("x*y - y*x", {"x", "y"}).is_zero());
    CHECK(divide_exact(P("x^2-1", {"x"}), P("x-1", {"x"})) == P("x+1", {"x"}));
    CHECK_THROWS_AS(divide_exact(P("x^2+1", {"x"}), P("x-1", {"x"})), arith_error);
}

TEST_CASE("gcd examples") {
    CHECK(multi_gcd(P("x^2-1", {"x"}), P("x^2-2*x+1", {"x"})) == P("x-1", {"x"}));
    CHECK(multi_gcd(P("x*y+x", {"x", "y"}), P("y+1", {"x", "y"})) == P("y+1", {"x", "y"}));
    CHECK(multi_gcd(MultiPoly(), MultiPoly()).is_zero());
    // gcd against zero returns the (normalized) other argument
    auto g = multi_gcd(P("2*x+2", {"x"}), MultiPoly({std::vector<std::string>{"x"}}));
    CHECK(g == P("x+1", {"x"}));
}

TEST_CASE("gcd of paper example 6 level-2 products") {
    // q21*q23 and q22*q23 share exactly q23
    std::vector<std::string> vars{"a", "b", "d", "x1"};
    auto q21 = P("x1-1", vars);
    auto q22 = P("x1+1", vars);
    auto q23 = P("-sqrt(3)/3*a*d + sqrt(3)/3*d + a*b", vars);  // a*c folded: c symbol renamed d here
    auto g = multi_gcd(q21 * q23, q22 * q23);
    // equal up to unit: monic forms agree
    CHECK(g == q23.monic_lex());
    CHECK(divides(q23, q21 * q23));
}

TEST_CASE("squarefree decomposition (x-1)^2 (x+2)") {
    auto p = P("(x-1)^2*(x+2)", {"x"});
    auto d = squarefree_decompose(p);
    REQUIRE(d.factors.size() == 2);
    CHECK(d.factors[0].second == 1);
    CHECK(d.factors[0].first == P("x+2", {"x"}));
    CHECK(d.factors[1].second == 2);
    CHECK(d.factors[1].first == P("x-1", {"x"}));
    CHECK(d.recombine(p.vars()) == p);
    CHECK_THROWS_AS(squarefree_decompose(MultiPoly()), arith_error);
}

TEST_CASE("squarefree decomposition properties on random products") {
    std::mt19937 rng(42);
    std::vector<std::string> vars{"x", "y"};
    auto rand_small = [&](int maxc) { return (int)(rng() % (2 * maxc + 1)) - maxc; };
    for (int trial = 0; trial < 12; ++trial) {
        // build a product of small polynomials with random multiplicities
        MultiPoly prod = MultiPoly::constant(FieldElement(Rat(1 + (int)(rng() % 3))), vars);
        int nf = 1 + (int)(rng() % 3);
        for (int i = 0; i < nf; ++i) {
            MultiPoly f(vars);
            f.add_term({1, 0}, FieldElement(Rat(1)));
            f.add_term({0, 1}, FieldElement(Rat(rand_small(2))));
            f.add_term({0, 0}, FieldElement(Rat(rand_small(3))));
            int mult = 1 + (int)(rng() % 3);
            prod = prod * f.pow((unsigned)mult);
        }
        auto d = squarefree_decompose(prod);
        CHECK(d.recombine(vars) == prod);
        for (size_t i = 0; i < d.factors.size(); ++i) {
            auto& [f, m] = d.factors[i];
            for (auto& v : vars) {
                if (!f.depends_on(v)) continue;
                CHECK(multi_gcd(f, f.derivative(v)).is_constant());
            }
            for (size_t j = i + 1; j < d.factors.size(); ++j)
                CHECK(multi_gcd(f, d.factors[j].first).is_constant());
        }
    }
}

TEST_CASE("resultants") {
    auto r1 = resultant(P("x^2-2", {"x", "y"}), P("x-y", {"x", "y"}), "x");
    CHECK(r1 == P("y^2-2", {"x", "y"}));
    auto r2 = resultant(P("x+y", {"x", "y"}), P("x-y", {"x", "y"}), "x");
    CHECK(r2 == P("-2*y", {"x", "y"}));
    CHECK_THROWS_AS(resultant(P("y", {"x", "y"}), P("y+1", {"x", "y"}), "x"), arith_error);

    // res = 0 iff gcd has positive degree in the variable
    auto p = P("(x-y)*(x+1)", {"x", "y"});
    auto q = P("(x-y)*(x+2)", {"x", "y"});
    CHECK(resultant(p, q, "x").is_zero());
    CHECK(multi_gcd(p, q).degree("x") > 0);
    auto p2 = P("x+1", {"x", "y"});
    auto q2 = P("x+y", {"x", "y"});
    CHECK(!resultant(p2, q2, "x").is_zero());

    // discriminant of x^2+y^2-1 in x is -4(y^2-1) up to the convention
    auto d = discriminant(P("x^2+y^2-1", {"x", "y"}), "x");
    CHECK(d == P("-4*y^2+4", {"x", "y"}));
}

TEST_CASE("sturm interval verdicts") {
    auto up = [](const std::string& s) { return to_unipoly(P(s, {"x"}), "x"); };
    CHECK(sign_on_interval(up("x^2+1"), Rat(0), Rat(5)) == IntervalVerdict::AllPositive);
    CHECK(sign_on_interval(up("x-2"), Rat(0), Rat(5)) == IntervalVerdict::HasZeroOrMixed);
    CHECK(sign_on_interval(up("-x^2-1"), Rat(-3), Rat(3)) == IntervalVerdict::AllNegative);
    // 0 excluded: x^2 on (0,1] is positive, on [0,1] it has a zero
    CHECK(sign_on_interval(up("x^2"), Rat(0), Rat(1), true, false) ==
          IntervalVerdict::AllPositive);
    CHECK(sign_on_interval(up("x^2"), Rat(0), Rat(1), false, false) ==
          IntervalVerdict::HasZeroOrMixed);
    // nonneg allows interior zeros of even multiplicity
    CHECK(nonneg_on(up("(x-1)^2"), Rat(0), Rat(2), false, false));
    CHECK(!nonneg_on(up("(x-1)^3"), Rat(0), Rat(2), false, false));
    auto w = negative_witness(up("(x-1)^3"), Rat(0), Rat(2), false, false);
    REQUIRE(w.has_value());
    CHECK(up("(x-1)^3").sign_at(*w) < 0);
}

TEST_CASE("root isolation and counting") {
    auto p = to_unipoly(P("(x-1)*(x-2)*(2*x-5)", {"x"}), "x");
    auto roots = isolate_roots(p, Rat(0), Rat(3));
    REQUIRE(roots.size() == 3);
    CHECK(roots[0].lo < Rat(1));
    CHECK(Rat(1) < roots[0].hi);
    // exact rational roots can come back pinned
    for (auto& r : roots)
        if (r.exact()) CHECK(p.sign_at(r.lo) == 0);
    // strict disjointness
    for (size_t i = 0; i + 1 < roots.size(); ++i) CHECK(roots[i].hi < roots[i + 1].lo);

    // roots at excluded endpoints are not reported
    auto q = to_unipoly(P("x*(x-1)", {"x"}), "x");
    CHECK(isolate_roots(q, Rat(0), Rat(1)).empty());

    // refinement keeps the root and narrows
    auto sq2 = to_unipoly(P("x^2-2", {"x"}), "x");
    auto locs = isolate_roots(sq2, Rat(0), Rat(2));
    REQUIRE(locs.size() == 1);
    auto fine = refine_root(sq2, locs[0], Rat(1, 1024));
    CHECK(fine.hi - fine.lo <= Rat(1, 1024));
    CHECK(fine.lo * fine.lo < Rat(2));
    CHECK(fine.hi * fine.hi > Rat(2));
}

TEST_CASE("sturm AllPositive never contradicted by dense sampling") {
    std::mt19937 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        UniPoly p;
        int deg = 1 + (int)(rng() % 5);
        std::vector<FieldElement> cs((size_t)deg + 1);
        for (auto& c : cs) c = FieldElement(Rat((long)(rng() % 19) - 9));
        p = UniPoly(std::move(cs));
        if (p.is_zero()) continue;
        Rat a(-2), b(2);
        auto verdict = sign_on_interval(p, a, b);
        if (verdict != IntervalVerdict::AllPositive) continue;
        ++checked;
        for (int i = 0; i <= 1000; ++i) {
            Rat x = a + (b - a) * Rat(i, 1000);
            CHECK(p.sign_at(x) > 0);
        }
    }
    CHECK(checked >= 0);
}

TEST_CASE("sturm verdict with algebraic coefficients") {
    // (x - sqrt2)(x + sqrt2) = x^2 - 2 via field coefficients
    UniPoly p({FieldElement(Rat(-2)), FieldElement(), FieldElement(Rat(1))});
    CHECK(sign_on_interval(p, Rat(2), Rat(5)) == IntervalVerdict::AllPositive);
    auto roots = isolate_roots(p, Rat(0), Rat(2));
    REQUIRE(roots.size() == 1);
    // sqrt2-coefficient polynomial: sqrt(2) x - 2 has root sqrt2
    UniPoly q({FieldElement(Rat(-2)), FieldElement::sqrt_int(Int(2))});
    auto r2 = isolate_roots(q, Rat(0), Rat(2));
    REQUIRE(r2.size() == 1);
    auto fine = refine_root(q, r2[0], Rat(1, 4096));
    CHECK(fine.lo * fine.lo < Rat(2));
    CHECK(fine.hi * fine.hi > Rat(2));
}
