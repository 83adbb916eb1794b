#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tepreach/cad.hpp"
#include "tepreach/parser.hpp"

#include "oracle.hpp"

using namespace tepreach;

static Tep T(const std::string& s, const std::string& var = "t") {
    return ExprParser::parse_tep(s, var);
}

TEST_CASE("brown projection of the unit circle") {
    std::vector<std::string> vars{"y", "x"};  // eliminate x, keep y
    MultiPoly circle = ExprParser::parse_poly("x^2 + y^2 - 1", vars);
    auto proj = brown_project({circle}, "x");
    bool found = false;
    MultiPoly expect = ExprParser::parse_poly("y^2 - 1", vars);
    for (auto& f : proj)
        if (f == expect) found = true;
    CHECK(found);
}

TEST_CASE("prove_polynomial_positive basics") {
    std::vector<std::string> vars{"x"};
    MultiPoly p = ExprParser::parse_poly("x^2 + 1", vars);
    auto r = prove_polynomial_positive(p, {}, vars, std::nullopt);
    CHECK(r.verdict == ProveVerdict::Proved);

    // p = x - 1 under x < 0: countersample with p <= 0 and constraint holding
    MultiPoly q = ExprParser::parse_poly("x - 1", vars);
    MultiPoly c = ExprParser::parse_poly("x", vars);
    auto r2 = prove_polynomial_positive(q, {{c, false}}, vars, std::nullopt);
    REQUIRE(r2.verdict == ProveVerdict::CounterSample);
    REQUIRE(r2.counter_sample.has_value());
    Rat x0 = (*r2.counter_sample)[0];
    CHECK(x0 < 0);
    std::map<std::string, FieldElement> env{{"x", FieldElement(x0)}};
    CHECK(q.eval(env).sign() <= 0);

    // strictly positive quadratic over a disc in two variables
    std::vector<std::string> v2{"x", "y"};
    MultiPoly pos = ExprParser::parse_poly("x^2 + y^2 + 1", v2);
    MultiPoly ball = ExprParser::parse_poly("1 - x^2 - y^2", v2);
    auto r3 = prove_polynomial_positive(pos, {{ball, true}}, v2, std::nullopt);
    CHECK(r3.verdict == ProveVerdict::Proved);

    // x > 0 fails over the whole plane
    MultiPoly just_x = ExprParser::parse_poly("x", vars);
    auto r4 = prove_polynomial_positive(just_x, {}, vars, std::nullopt);
    CHECK(r4.verdict == ProveVerdict::CounterSample);
}

TEST_CASE("parametric positivity: trivial cases") {
    // F = t + p with p > 0: provable at order 1
    Tep F = ExprParser::parse_tep("t + p", "t", {"p"});
    std::vector<std::string> pv{"p"};
    MultiPoly c = ExprParser::parse_poly("p", pv);
    auto v = decide_sign_parametric(F, {{c, true}}, Rat(1), 1);
    CHECK(v == ParametricVerdict::ProvedPositive);

    // F = t - p over p in (0,1): false, must come back Unknown
    Tep G = ExprParser::parse_tep("t - p", "t", {"p"});
    MultiPoly upper = ExprParser::parse_poly("1 - p", pv);
    auto w = decide_sign_parametric(G, {{c, true}, {upper, true}}, Rat(1), 2);
    CHECK(w == ParametricVerdict::Unknown);
}

static std::vector<std::vector<Rat>> example3_matrix() {
    auto q = [](long n, long d) { return make_rat(Int(n), Int(d)); };
    return {{q(-1, 1000), q(0, 1), q(1, 1000)},
            {q(1, 1000), q(-1, 1000), q(0, 1)},
            {q(0, 1), q(1, 1000), q(-1, 1000)}};
}

TEST_CASE("example 4: parametric safety of the pollution system") {
    auto A = example3_matrix();
    std::vector<Tep> u{T("1/100"), T("0"), T("0")};
    std::vector<std::string> params{"x1", "x2", "x3"};
    auto sol = solve_symbolic(A, u, params);
    // margin for unsafe y2 - y3 + 6 < 0
    MultiPoly q = ExprParser::parse_poly("y2 - y3 + 6", {"y1", "y2", "y3"});
    Tep margin = compose_poly(q, sol.components, "t");
    // ball constraint (x1-1)^2 + (x2-1)^2 + (x3-1)^2 < 1
    MultiPoly ball = ExprParser::parse_poly("1 - (x1-1)^2 - (x2-1)^2 - (x3-1)^2", params);
    auto verdict = decide_sign_parametric(margin, {{ball, true}}, Rat(1000), 2);
    CHECK(verdict == ParametricVerdict::ProvedPositive);
}

TEST_CASE("reach_semialgebraic: example 4 goes safe on the fast path") {
    auto A = example3_matrix();
    std::vector<Tep> u{T("1/100"), T("0"), T("0")};
    MultiPoly q = ExprParser::parse_poly("y2 - y3 + 6", {"y1", "y2", "y3"});
    MultiPoly ball =
        ExprParser::parse_poly("1 - (x1-1)^2 - (x2-1)^2 - (x3-1)^2", {"x1", "x2", "x3"});
    ReachResult r = reach_semialgebraic(A, u, {ball}, {{q, true}}, Rat(1000));
    CHECK(r.verdict == ReachVerdict::Safe);
}

TEST_CASE("empty unsafe set is trivially safe") {
    std::vector<std::vector<Rat>> A{{Rat(0)}};
    std::vector<Tep> u{T("0")};
    MultiPoly ball = ExprParser::parse_poly("1 - x1^2", {"x1"});
    ReachResult r = reach_semialgebraic(A, u, {ball}, {}, Rat(1));
    CHECK(r.verdict == ReachVerdict::Safe);
}

static std::vector<std::vector<Rat>> example6_matrix() {
    return {{Rat(1), Rat(-1), Rat(1)}, {Rat(1), Rat(-1), Rat(0)}, {Rat(0), Rat(1), Rat(0)}};
}

TEST_CASE("example 6: paper witness passes the verification routine") {
    auto A = example6_matrix();
    std::vector<Tep> u{T("1"), T("1"), T("1")};
    std::vector<std::string> params{"x1", "x2", "x3"};
    auto sol = solve_symbolic(A, u, params);
    MultiPoly init = ExprParser::parse_poly("1 - x1^2 - x2^2 - 2*x3^2", params);
    MultiPoly q = ExprParser::parse_poly("y2 - y1 + 5", {"y1", "y2", "y3"});
    std::vector<UnsafeConstraint> unsafe{{q, true}};
    std::vector<Rat> witness_x{Rat(3, 4), Rat(1, 512), Rat(55, 128)};
    CHECK(verify_witness(sol.components, {init}, unsafe, Rat(29, 16), witness_x));
    // a point outside the initial set must fail
    std::vector<Rat> outside{Rat(2), Rat(0), Rat(0)};
    CHECK(!verify_witness(sol.components, {init}, unsafe, Rat(29, 16), outside));
    // a safe time for the same start must fail
    CHECK(!verify_witness(sol.components, {init}, unsafe, Rat(1, 16), witness_x));
}

TEST_CASE("example 6: base projection has six roots matching the paper") {
    auto A = example6_matrix();
    std::vector<Tep> u{T("1"), T("1"), T("1")};
    std::vector<std::string> params{"x1", "x2", "x3"};
    auto sol = solve_symbolic(A, u, params);
    MultiPoly init = ExprParser::parse_poly("1 - x1^2 - x2^2 - 2*x3^2", params);
    MultiPoly q = ExprParser::parse_poly("y2 - y1 + 5", {"y1", "y2", "y3"});
    Tep margin = compose_poly(q, sol.components, "t");

    ReachTower rt = build_reach_tower({init}, {margin}, params);

    // collect roots of all base TEPs on (0, 3)
    std::vector<RatInterval> roots;
    for (auto& poly : rt.tower.levels[0]) {
        Tep tq = rt.table.to_tep(poly.in_ring(rt.proj_ring));
        if (tq.is_poly() && tq.body.is_constant()) continue;
        if (tq.sin_freqs.empty() && tq.cos_freqs.empty() && tq.body.terms().size() == 1)
            continue;
        auto rep = isolate(tq, RatInterval(Rat(0), Rat(3)));
        for (auto& iv : rep.intervals) roots.push_back(refine(tq, iv, Rat(1, 65536)));
    }
    std::sort(roots.begin(), roots.end(),
              [](const RatInterval& a, const RatInterval& b) { return a.lo < b.lo; });
    REQUIRE(roots.size() == 6);
    std::vector<RatInterval> paper{
        {make_rat(Int(7113), Int(4096)), make_rat(Int(1779), Int(1024))},
        {make_rat(Int(117), Int(64)), make_rat(Int(3747), Int(2048))},
        {make_rat(Int(7497), Int(4096)), make_rat(Int(1875), Int(1024))},
        {make_rat(Int(309), Int(128)), make_rat(Int(39), Int(16))},
        {make_rat(Int(47403), Int(16384)), make_rat(Int(94809), Int(32768))},
        {make_rat(Int(23703), Int(8192)), make_rat(Int(47409), Int(16384))}};
    std::sort(paper.begin(), paper.end(),
              [](const RatInterval& a, const RatInterval& b) { return a.lo < b.lo; });
    for (size_t i = 0; i < 6; ++i) {
        CAPTURE(i);
        CHECK(paper[i].lo <= roots[i].lo);
        CHECK(roots[i].hi <= paper[i].hi);
    }
}

TEST_CASE("example 6: reachability is unsafe with a verified witness") {
    auto A = example6_matrix();
    std::vector<Tep> u{T("1"), T("1"), T("1")};
    MultiPoly init = ExprParser::parse_poly("1 - x1^2 - x2^2 - 2*x3^2", {"x1", "x2", "x3"});
    MultiPoly q = ExprParser::parse_poly("y2 - y1 + 5", {"y1", "y2", "y3"});
    SemiReachTrace trace;
    ReachResult r =
        reach_semialgebraic(A, u, {init}, {{q, true}}, Rat(3), CadOptions{}, &trace);
    REQUIRE(r.verdict == ReachVerdict::Unsafe);
    REQUIRE(r.witness_state.has_value());
    REQUIRE(r.witness_time.has_value());
    CHECK(trace.base_roots.size() == 6);
    // independent re-verification of the returned witness
    std::vector<std::string> params{"x1", "x2", "x3"};
    auto sol = solve_symbolic(A, u, params);
    CHECK(verify_witness(sol.components, {init}, {{q, true}}, r.witness_time->lo,
                         *r.witness_state));
}
