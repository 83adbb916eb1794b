#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tepreach/linsys.hpp"
#include "tepreach/parser.hpp"

#include "oracle.hpp"

#include <random>

using namespace tepreach;

static Tep T(const std::string& s, const std::string& var = "t") {
    return ExprParser::parse_tep(s, var);
}

static std::vector<std::vector<Rat>> example3_matrix() {
    auto q = [](long n, long d) { return make_rat(Int(n), Int(d)); };
    return {{q(-1, 1000), q(0, 1), q(1, 1000)},
            {q(1, 1000), q(-1, 1000), q(0, 1)},
            {q(0, 1), q(1, 1000), q(-1, 1000)}};
}

static std::vector<std::vector<Rat>> example6_matrix() {
    return {{Rat(1), Rat(-1), Rat(1)}, {Rat(1), Rat(-1), Rat(0)}, {Rat(0), Rat(1), Rat(0)}};
}

TEST_CASE("eigenvalues") {
    // example 3: 0 and -3/2000 +- sqrt(3)/2000 I
    auto ev3 = eigenvalues(example3_matrix());
    REQUIRE(ev3.size() == 3);
    int zero = 0, complex_pair = 0;
    for (auto& l : ev3) {
        if (l.is_zero()) ++zero;
        if (!l.imag_part().is_zero()) {
            ++complex_pair;
            CHECK(l.real_part() == FieldElement(Rat(-3, 2000)));
        }
    }
    CHECK(zero == 1);
    CHECK(complex_pair == 2);

    // example 6: 1 and -1/2 +- sqrt(3)/2 I
    auto ev6 = eigenvalues(example6_matrix());
    int one = 0;
    for (auto& l : ev6) {
        if (l == FieldElement(Rat(1))) ++one;
        if (!l.imag_part().is_zero()) CHECK(l.real_part() == FieldElement(Rat(-1, 2)));
    }
    CHECK(one == 1);
}

TEST_CASE("trivial system: A=0, u=0") {
    std::vector<std::vector<Rat>> A{{Rat(0), Rat(0)}, {Rat(0), Rat(0)}};
    std::vector<Tep> u{T("0"), T("0")};
    auto sol = solve_symbolic(A, u, {"x1", "x2"});
    for (size_t i = 0; i < 2; ++i) {
        CHECK(sol.components[i].is_poly());
        CHECK(sol.components[i].body ==
              MultiPoly::variable(i == 0 ? "x1" : "x2", sol.components[i].ring()));
    }
}

TEST_CASE("example 3 solution matches the derived closed form") {
    // with x(0) = 0:  x2(t) = -(20 sqrt3/9) e^{-3t/2000} sin(sqrt3 t/2000) + t/300
    auto A = example3_matrix();
    std::vector<Tep> u{T("1/100"), T("0"), T("0")};
    auto sol = solve_symbolic(A, u, {"x1", "x2", "x3"});
    std::map<std::string, FieldElement> zero{{"x1", FieldElement()},
                                             {"x2", FieldElement()},
                                             {"x3", FieldElement()}};
    Tep x2 = sol.components[1].substitute_params(zero);
    Tep expect =
        T("-20*sqrt(3)/9*exp(-3/2000*t)*sin(sqrt(3)/2000*t) + t/300");
    CHECK(x2.same_value(expect));

    // x1 and x3 carry the +-10/3 cosine terms; check the margin used by the
    // safety query:  x2 - x3 + 6
    Tep x3 = sol.components[2].substitute_params(zero);
    Tep margin = x2 - x3 + Tep::constant(FieldElement(Rat(6)), "t");
    Tep expect_margin = T(
        "-10*sqrt(3)/3*exp(-3/2000*t)*sin(sqrt(3)/2000*t)"
        " - 10/3*exp(-3/2000*t)*cos(sqrt(3)/2000*t) + 28/3");
    CHECK(margin.same_value(expect_margin));
}

TEST_CASE("example 6 solution satisfies the system symbolically") {
    auto A = example6_matrix();
    std::vector<Tep> u{T("1"), T("1"), T("1")};
    auto sol = solve_symbolic(A, u, {"x1", "x2", "x3"});  // residual checked inside
    CHECK(sol.components.size() == 3);
    // the reachability margin xi2 - xi1 + 5 matches the printed combination
    Tep phi = sol.components[1] - sol.components[0] + Tep::constant(FieldElement(Rat(5)), "t");
    // numeric spot-check at a rational point with rational initial values
    std::map<std::string, FieldElement> x0{{"x1", FieldElement(Rat(3, 4))},
                                           {"x2", FieldElement(Rat(1, 512))},
                                           {"x3", FieldElement(Rat(55, 128))}};
    Tep phi0 = phi.substitute_params(x0);
    // the paper's counterexample time: phi < 0 at t = 29/16
    CHECK(phi0.sign_at_rational(Rat(29, 16)) == -1);
}

TEST_CASE("random supported systems: residual and initial condition") {
    std::mt19937 rng(17);
    int done = 0;
    for (int trial = 0; trial < 10; ++trial) {
        size_t n = 2 + (trial % 2);
        std::vector<std::vector<Rat>> A(n, std::vector<Rat>(n));
        for (auto& row : A)
            for (auto& v : row) v = Rat((long)(rng() % 7) - 3);
        std::vector<Tep> u;
        std::vector<std::string> params;
        for (size_t i = 0; i < n; ++i) {
            params.push_back("p" + std::to_string(i + 1));
            long c = (long)(rng() % 5) - 2;
            u.push_back(T(std::to_string(c) + " + sin(2*t)"));
        }
        try {
            auto sol = solve_symbolic(A, u, params);  // throws if residual nonzero
            ++done;
        } catch (const linsys_error& e) {
            // unsupported eigenvalue fields can happen with random matrices
            std::string msg = e.what();
            CHECK(msg.find("unsupported eigenvalue field") != std::string::npos);
        }
    }
    CHECK(done >= 5);
}

TEST_CASE("resonant input bumps the ansatz degree") {
    // A = [[0]] with constant input: xi = x0 + c t
    std::vector<std::vector<Rat>> A{{Rat(0)}};
    std::vector<Tep> u{T("2")};
    auto sol = solve_symbolic(A, u, {"x1"});
    std::map<std::string, FieldElement> zero{{"x1", FieldElement()}};
    Tep xi = sol.components[0].substitute_params(zero);
    CHECK(xi.same_value(T("2*t")));

    // A = [[0,1],[0,0]] (nilpotent) with polynomial input
    std::vector<std::vector<Rat>> N{{Rat(0), Rat(1)}, {Rat(0), Rat(0)}};
    std::vector<Tep> u2{T("0"), T("t")};
    auto sol2 = solve_symbolic(N, u2, {"x1", "x2"});
    Tep x1 = sol2.components[0].substitute_params(
        {{"x1", FieldElement()}, {"x2", FieldElement()}});
    CHECK(x1.same_value(T("t^3/6")));
}

TEST_CASE("reach_point on example 3") {
    auto A = example3_matrix();
    std::vector<Tep> u{T("1/100"), T("0"), T("0")};
    std::vector<Rat> x0{Rat(0), Rat(0), Rat(0)};
    // unsafe: y2 - y3 + 6 < 0
    MultiPoly q = ExprParser::parse_poly("y2 - y3 + 6", {"y1", "y2", "y3"});
    std::vector<UnsafeConstraint> unsafe{{q, true}};
    ReachResult r = reach_point(A, u, x0, unsafe, Rat(1000));
    CHECK(r.verdict == ReachVerdict::Safe);
    CHECK(r.order_used == 2);

    ReachResult r2 = reach_point(A, u, x0, unsafe, Rat(2000));
    CHECK(r2.verdict == ReachVerdict::Safe);
    CHECK(r2.order_used <= 4);
}

TEST_CASE("reach_point finds unsafe windows") {
    // xi' = 0, xi(0) = 0, input sin(t): xi(t) = 1 - cos t;  unsafe: y1 > 3/2
    std::vector<std::vector<Rat>> A{{Rat(0)}};
    std::vector<Tep> u{T("sin(t)")};
    MultiPoly q = ExprParser::parse_poly("y1 - 3/2", {"y1"});
    std::vector<UnsafeConstraint> unsafe{{q, false}};
    ReachResult r = reach_point(A, u, {Rat(0)}, unsafe, Rat(3));
    REQUIRE(r.verdict == ReachVerdict::Unsafe);
    REQUIRE(r.witness_time.has_value());
    // 1 - cos t > 3/2 on (2pi/3, ...): witness inside (2.094, 3]
    Rat mid = r.witness_time->mid();
    oracle::Real v = oracle::eval(T("1 - cos(t) - 3/2"), mid);
    CHECK(v.sign() > 0);
}

TEST_CASE("trivial safe system") {
    std::vector<std::vector<Rat>> A{{Rat(0)}};
    std::vector<Tep> u{T("0")};
    MultiPoly q = ExprParser::parse_poly("y1 + 1", {"y1"});  // unsafe: y1 < -1
    std::vector<UnsafeConstraint> unsafe{{q, true}};
    ReachResult r = reach_point(A, u, {Rat(0)}, unsafe, Rat(10));
    CHECK(r.verdict == ReachVerdict::Safe);
}
