#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tepreach/field.hpp"
#include "tepreach/transcendental.hpp"

#include "oracle.hpp"

using namespace tepreach;

static FieldElement sq(long n) { return FieldElement::sqrt_int(Int(n)); }

TEST_CASE("conjugate product (1+sqrt2)(1-sqrt2) = -1") {
    FieldElement one(Rat(1));
    FieldElement a = one + sq(2), b = one - sq(2);
    CHECK((a * b) == FieldElement(Rat(-1)));
}

TEST_CASE("sqrt3 * sqrt3 = 3") { CHECK((sq(3) * sq(3)) == FieldElement(Rat(3))); }

TEST_CASE("(sqrt2+sqrt3)^2 = 5 + 2 sqrt6, tower extends") {
    FieldElement s = sq(2) + sq(3);
    FieldElement sqr = s * s;
    FieldElement expected = FieldElement(Rat(5)) + sq(6) * Rat(2);
    CHECK(sqr == expected);
    // cross-check against the 50+-digit numeric oracle
    oracle::Real lhs = oracle::eval(sqr);
    oracle::Real rhs = oracle::Real(5.0) + oracle::Real(2.0) * oracle::Real::sqrt(oracle::Real(6.0));
    CHECK(oracle::within(lhs, rhs, -200));
}

TEST_CASE("division and inverse") {
    FieldElement a = sq(2) + FieldElement(Rat(1));
    FieldElement inv = FieldElement(Rat(1)) / a;
    CHECK((a * inv) == FieldElement(Rat(1)));

    FieldElement b = sq(6) + sq(2) * Rat(3) - FieldElement(Rat(1, 7));
    CHECK((b / b) == FieldElement(Rat(1)));

    CHECK_THROWS_AS(a / FieldElement(), arith_error);
}

TEST_CASE("complex arithmetic and conjugation") {
    FieldElement I = FieldElement::imaginary();
    CHECK((I * I) == FieldElement(Rat(-1)));
    FieldElement z = FieldElement(Rat(2)) + I * sq(3);
    FieldElement w = z * z.conj();  // 4 + 3 = 7
    CHECK(w == FieldElement(Rat(7)));
    CHECK((z / z) == FieldElement(Rat(1)));
}

TEST_CASE("field_sign examples") {
    // sqrt2 vs 1.41421356...
    FieldElement d = sq(2) - FieldElement(make_rat(Int(141421356), Int(100000000)));
    CHECK(d.sign() == 1);
    CHECK(FieldElement().sign() == 0);
    // sqrt3 - sqrt2 - 1/4 > 0 (approx 0.3178 - 0.25)
    FieldElement e = sq(3) - sq(2) - FieldElement(Rat(1, 4));
    CHECK(e.sign() == 1);
    CHECK(oracle::eval(e).sign() == 1);
    CHECK_THROWS_AS(FieldElement::imaginary().sign(), arith_error);
}

TEST_CASE("eval_interval enclosures") {
    RatInterval iv = sq(2).enclosure(4);
    CHECK(iv.lo >= Rat(11, 8));       // 1.375
    CHECK(iv.hi <= Rat(23, 16));      // 1.4375
    CHECK(iv.width() <= pow2_inv(4));

    CHECK(FieldElement().enclosure(30).is_point());

    FieldElement x = -(sq(2) * Rat(1, 8));
    RatInterval fine = x.enclosure(20);
    CHECK(fine.width() <= pow2_inv(20));
    oracle::Real val = oracle::eval(x);
    CHECK(oracle::Real(fine.lo) < val);
    CHECK(val < oracle::Real(fine.hi));
}

TEST_CASE("interval arithmetic is inclusion monotone") {
    // spec invariant: enclosure(a op b) within enclosure(a) op enclosure(b)
    FieldElement a = sq(2) + FieldElement(Rat(1, 3));
    FieldElement b = sq(3) - FieldElement(Rat(2));
    unsigned bits = 24;
    auto ia = a.enclosure(bits + 10), ib = b.enclosure(bits + 10);
    CHECK(((ia + ib).contains((a + b).enclosure(bits + 12))));
    CHECK(((ia - ib).contains((a - b).enclosure(bits + 12))));
    CHECK(((ia * ib).contains((a * b).enclosure(bits + 12))));
}

TEST_CASE("canonical form is unique") {
    FieldElement x = sq(8);  // 2 sqrt2
    FieldElement y = sq(2) * Rat(2);
    CHECK(x == y);
    FieldElement z = sq(12) - sq(3) * Rat(2);  // 2 sqrt3 - 2 sqrt3
    CHECK(z.is_zero());
}

TEST_CASE("try_sqrt") {
    CHECK(*FieldElement(Rat(4)).try_sqrt() == FieldElement(Rat(2)));
    CHECK(*FieldElement(Rat(8)).try_sqrt() == sq(2) * Rat(2));
    CHECK(*FieldElement(Rat(-1)).try_sqrt() == FieldElement::imaginary());
    // sqrt(3 + 2 sqrt2) = 1 + sqrt2 (denesting)
    FieldElement n = FieldElement(Rat(3)) + sq(2) * Rat(2);
    CHECK(*n.try_sqrt() == FieldElement(Rat(1)) + sq(2));
    // sqrt(-2I) = 1 - I
    FieldElement m = FieldElement::imaginary() * Rat(-2);
    auto r = m.try_sqrt();
    REQUIRE(r.has_value());
    CHECK(*r == FieldElement(Rat(1)) - FieldElement::imaginary());
    // sqrt(2 + sqrt2) is not multiquadratic
    CHECK(!(FieldElement(Rat(2)) + sq(2)).try_sqrt().has_value());
    // principal branch: sqrt(-I) has positive real part
    auto w = (-FieldElement::imaginary()).try_sqrt();
    REQUIRE(w.has_value());
    CHECK(w->real_part().sign() == 1);
    CHECK((*w * *w) == -FieldElement::imaginary());
}

TEST_CASE("serialization") {
    FieldElement x = -(sq(2) * Rat(1, 8));
    CHECK(x.to_string() == "-sqrt(2)/8");
    CHECK(FieldElement(Rat(0)).to_string() == "0");
    CHECK((FieldElement(Rat(5)) + sq(6) * Rat(2)).to_string() == "5 + 2*sqrt(6)");
}

TEST_CASE("pi enclosure") {
    RatInterval pi = pi_enclosure(64);
    CHECK(pi.width() <= pow2_inv(62));
    CHECK(pi.lo > Rat(314159, 100000));
    CHECK(pi.hi < Rat(314160, 100000));
}

TEST_CASE("exp/sin/cos point enclosures against oracle") {
    for (long k : {-3, -1, 1, 2}) {
        Rat q(k, 2);
        RatInterval e = exp_point(q, 80);
        oracle::Real v = oracle::Real::exp(oracle::Real(q));
        CHECK(oracle::Real(e.lo) < v);
        CHECK(v < oracle::Real(e.hi));
        CHECK(e.width() <= pow2_inv(78));
    }
    for (long k : {1, 3, 5}) {
        RatInterval arg{Rat(k, 2), Rat(k, 2)};
        RatInterval s = sin_enclosure(arg, 80);
        RatInterval c = cos_enclosure(arg, 80);
        oracle::Real vs = oracle::Real::sin(oracle::Real(Rat(k, 2)));
        oracle::Real vc = oracle::Real::cos(oracle::Real(Rat(k, 2)));
        CHECK(oracle::Real(s.lo) < vs);
        CHECK(vs < oracle::Real(s.hi));
        CHECK(oracle::Real(c.lo) < vc);
        CHECK(vc < oracle::Real(c.hi));
    }
}
