#pragma once

// Elements of a real multiquadratic tower Q(sqrt(d1),...,sqrt(dk)), optionally
// extended by the imaginary unit I.  An element is stored in canonical
// coordinates: a sparse map  squarefree radicand -> rational coefficient  for
// the real part and another for the I part (radicand 1 is the rational unit).
// Since square roots of distinct squarefree integers are linearly independent
// over Q, the coordinate form is unique and the zero test is exact.
//
// All algebraic constants in the library (eigenvalues, frequencies, Laurent
// coefficients) live here.  Values are immutable in spirit: every operation
// returns a fresh element, so sharing across threads is safe.

#include "tepreach/interval.hpp"
#include "tepreach/rational.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace tepreach {

class FieldElement {
  public:
    using Coords = std::map<Int, Rat>;  // radicand -> coefficient, radicand squarefree > 0

    FieldElement() = default;
    FieldElement(const Rat& q) { set_coef(re_, Int(1), q); }
    FieldElement(long n) : FieldElement(Rat(n)) {}
    FieldElement(int n) : FieldElement(Rat(n)) {}

    static FieldElement sqrt_int(const Int& n) {
        // sqrt(k^2 m) = k sqrt(m)
        if (n < 0) throw arith_error("sqrt_int of negative; use imaginary()");
        if (n == 0) return FieldElement();
        auto [outer, inner] = squarefree_split(n);
        FieldElement e;
        set_coef(e.re_, inner, Rat(outer));
        return e;
    }

    static FieldElement imaginary() {
        FieldElement e;
        set_coef(e.im_, Int(1), Rat(1));
        return e;
    }

    static FieldElement make(Coords re, Coords im = {}) {
        FieldElement e;
        e.re_ = std::move(re);
        e.im_ = std::move(im);
        e.prune(e.re_);
        e.prune(e.im_);
        return e;
    }

    const Coords& re_coords() const { return re_; }
    const Coords& im_coords() const { return im_; }

    bool is_zero() const { return re_.empty() && im_.empty(); }
    bool is_real() const { return im_.empty(); }
    bool is_pure_imaginary() const { return re_.empty() && !im_.empty(); }
    bool is_rational() const {
        return im_.empty() && (re_.empty() || (re_.size() == 1 && re_.begin()->first == 1));
    }
    Rat rat_value() const {
        if (!is_rational()) throw arith_error("not a rational field element");
        return re_.empty() ? Rat(0) : re_.begin()->second;
    }

    FieldElement real_part() const { return make(re_); }
    FieldElement imag_part() const { return make(im_); }

    FieldElement operator-() const {
        FieldElement r;
        for (auto& [s, q] : re_) r.re_[s] = -q;
        for (auto& [s, q] : im_) r.im_[s] = -q;
        return r;
    }

    FieldElement operator+(const FieldElement& o) const {
        FieldElement r(*this);
        for (auto& [s, q] : o.re_) add_coef(r.re_, s, q);
        for (auto& [s, q] : o.im_) add_coef(r.im_, s, q);
        return r;
    }
    FieldElement operator-(const FieldElement& o) const { return *this + (-o); }

    FieldElement operator*(const FieldElement& o) const {
        // (a+bI)(c+dI) = (ac-bd) + (ad+bc)I
        FieldElement r;
        mul_into(r.re_, re_, o.re_, 1);
        mul_into(r.re_, im_, o.im_, -1);
        mul_into(r.im_, re_, o.im_, 1);
        mul_into(r.im_, im_, o.re_, 1);
        r.prune(r.re_);
        r.prune(r.im_);
        return r;
    }

    FieldElement operator*(const Rat& q) const {
        FieldElement r;
        if (q == 0) return r;
        for (auto& [s, c] : re_) r.re_[s] = c * q;
        for (auto& [s, c] : im_) r.im_[s] = c * q;
        return r;
    }

    // Complex conjugation over I.
    FieldElement conj() const {
        FieldElement r(*this);
        for (auto& [s, q] : r.im_) q = -q;
        return r;
    }

    FieldElement inverse() const {
        if (is_zero()) throw arith_error("division by zero field element");
        if (im_.empty()) return real_inverse(*this);
        // 1/(a+bI) = conj / (a^2+b^2)
        FieldElement n2 = (*this) * conj();  // real and positive
        return conj() * real_inverse(n2);
    }

    FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }

    bool operator==(const FieldElement& o) const { return re_ == o.re_ && im_ == o.im_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    // Structural total order (map key use), not the order of real values.
    bool operator<(const FieldElement& o) const {
        if (re_ != o.re_) return re_ < o.re_;
        return im_ < o.im_;
    }

    // Enclosure of the real value, width <= 2^-bits.  Nested for growing bits.
    RatInterval enclosure(unsigned bits) const {
        if (!is_real()) throw arith_error("enclosure of non-real element");
        return coords_enclosure(re_, bits);
    }

    // Exact sign of a real element.  Zero is decided by the canonical form;
    // nonzero values fall to interval refinement (terminating, since the
    // enclosure width halves each round and the value is nonzero), with an
    // exact squaring comparison shortcut for the common 1- and 2-term shapes.
    int sign() const {
        if (!is_real()) throw arith_error("sign of non-real element");
        if (re_.empty()) return 0;
        if (re_.size() == 1) return sign_of(re_.begin()->second);
        if (re_.size() == 2) {
            auto it = re_.begin();
            auto [s1, q1] = *it++;
            auto [s2, q2] = *it;
            int g1 = sign_of(q1), g2 = sign_of(q2);
            if (g1 == g2) return g1;
            // q1 sqrt(s1) vs -q2 sqrt(s2): compare squares
            Rat lhs = q1 * q1 * Rat(s1), rhs = q2 * q2 * Rat(s2);
            if (lhs == rhs) throw arith_error("canonical form violated");  // distinct radicands
            return (lhs > rhs) ? g1 : g2;
        }
        for (unsigned bits = 8;; bits *= 2) {
            RatInterval iv = enclosure(bits);
            if (iv.sign_known()) return iv.sign();
            if (bits > (1u << 22)) throw arith_error("sign refinement failed to converge");
        }
    }

    // Exact square root of a nonnegative real element, when one exists in the
    // multiquadratic class (the tower may grow).  Handles rational inputs and
    // quadratic-field inputs u+v*sqrt(s) via the classical denesting test.
    std::optional<FieldElement> try_sqrt_real() const {
        if (!is_real()) return std::nullopt;
        if (is_zero()) return FieldElement();
        if (sign() < 0) return std::nullopt;
        if (is_rational()) return sqrt_of_rational(rat_value());
        if (re_.size() == 2 && re_.count(1)) {
            Rat u = re_.at(1);
            auto it = re_.begin();
            if (it->first == 1) ++it;
            Int s = it->first;
            Rat v = it->second;
            Rat disc = u * u - v * v * Rat(s);
            if (disc < 0) return std::nullopt;
            Rat w;
            if (!rational_sqrt(disc, w)) return std::nullopt;
            Rat half_hi = (u + w) / 2, half_lo = (u - w) / 2;
            if (half_hi < 0 || half_lo < 0) return std::nullopt;
            FieldElement r = sqrt_of_rational(half_hi) +
                             (v > 0 ? sqrt_of_rational(half_lo) : -sqrt_of_rational(half_lo));
            if (r * r == *this) return r;
            return std::nullopt;
        }
        return std::nullopt;
    }

    // Principal square root of a complex element (argument halved into
    // (-pi/2, pi/2]); fails if the root leaves the multiquadratic class.
    std::optional<FieldElement> try_sqrt() const {
        if (is_real()) {
            if (is_zero() || sign() >= 0) return try_sqrt_real();
            auto r = (-*this).try_sqrt_real();
            if (!r) return std::nullopt;
            return FieldElement::imaginary() * *r;
        }
        FieldElement norm2 = (*this) * conj();
        auto radius = norm2.try_sqrt_real();
        if (!radius) return std::nullopt;
        FieldElement a = real_part();
        auto re = ((*radius + a) * Rat(1, 2)).try_sqrt_real();
        auto im = ((*radius - a) * Rat(1, 2)).try_sqrt_real();
        if (!re || !im) return std::nullopt;
        int bsign = imag_part().sign();
        FieldElement w = *re + FieldElement::imaginary() * (bsign >= 0 ? *im : -*im);
        if (w * w == *this) return w;
        return std::nullopt;
    }

    // Radicands appearing in this element (1 excluded).
    std::set<Int> radicands() const {
        std::set<Int> out;
        for (auto& [s, q] : re_)
            if (s != 1) out.insert(s);
        for (auto& [s, q] : im_)
            if (s != 1) out.insert(s);
        return out;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        auto emit = [&](const Int& s, const Rat& q, bool imag) {
            Rat a = rat_abs(q);
            if (first) {
                if (q < 0) os << "-";
                first = false;
            } else {
                os << (q < 0 ? " - " : " + ");
            }
            bool unit_coef = (num(a) == 1);
            bool named = (s != 1) || imag;
            if (!named || !unit_coef) os << num(a).get_str();
            if (s != 1) {
                if (!unit_coef) os << "*";
                os << "sqrt(" << s.get_str() << ")";
            }
            if (imag) {
                if (s != 1 || !unit_coef) os << "*";
                os << "I";
            }
            if (den(a) != 1) os << "/" << den(a).get_str();
        };
        for (auto& [s, q] : re_) emit(s, q, false);
        for (auto& [s, q] : im_) emit(s, q, true);
        return os.str();
    }

  private:
    Coords re_, im_;

    static void set_coef(Coords& m, const Int& s, const Rat& q) {
        if (q != 0) m[s] = q;
    }
    static void add_coef(Coords& m, const Int& s, const Rat& q) {
        auto it = m.find(s);
        if (it == m.end()) {
            if (q != 0) m.emplace(s, q);
            return;
        }
        it->second += q;
        if (it->second == 0) m.erase(it);
    }
    static void prune(Coords& m) {
        for (auto it = m.begin(); it != m.end();)
            it = (it->second == 0) ? m.erase(it) : std::next(it);
    }

    // acc += sign * a * b over the sqrt-coordinate algebra.
    static void mul_into(Coords& acc, const Coords& a, const Coords& b, int sign) {
        for (auto& [s, qa] : a)
            for (auto& [t, qb] : b) {
                Int g = gcd(s, t);
                Int m = (s / g) * (t / g);
                Rat c = qa * qb * Rat(g);
                add_coef(acc, m, sign > 0 ? c : Rat(-c));
            }
    }

    static Int gcd(const Int& a, const Int& b) {
        Int g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return g;
    }

    static FieldElement sqrt_of_rational(const Rat& q) {
        // sqrt(n/d) = sqrt(n d)/d
        if (q < 0) throw arith_error("sqrt_of_rational of negative");
        if (q == 0) return FieldElement();
        auto [outer, inner] = squarefree_split(num(q) * den(q));
        FieldElement e;
        set_coef(e.re_, inner, make_rat(outer, den(q)));
        return e;
    }

    static bool rational_sqrt(const Rat& q, Rat& out) {
        if (q < 0) return false;
        Int rn, rd;
        if (!is_perfect_square(num(q), &rn) || !is_perfect_square(den(q), &rd)) return false;
        out = make_rat(rn, rd);
        return true;
    }

    // Inverse of a real element by eliminating each prime of the radicand
    // support with its Galois conjugate: w * sigma_p(w) has no radicand
    // divisible by p, and after all primes the product is rational.
    static FieldElement real_inverse(const FieldElement& w) {
        if (w.re_.empty()) throw arith_error("division by zero field element");
        std::set<Int> primes;
        for (auto& [s, q] : w.re_)
            for (auto& p : prime_factors(s)) primes.insert(p);
        FieldElement cur = w, multiplier = FieldElement(Rat(1));
        for (auto& p : primes) {
            FieldElement conj_p;
            for (auto& [s, q] : cur.re_) set_coef(conj_p.re_, s, (s % p == 0) ? Rat(-q) : q);
            multiplier = multiplier * conj_p;
            cur = cur * conj_p;
        }
        if (!cur.is_rational()) throw arith_error("norm computation failed");
        Rat n = cur.rat_value();
        if (n == 0) throw arith_error("division by zero field element");
        return multiplier * make_rat(den(n), num(n));
    }

    static RatInterval coords_enclosure(const Coords& m, unsigned bits) {
        RatInterval acc{Rat(0)};
        if (m.empty()) return acc;
        unsigned extra = 1;
        for (size_t k = m.size(); k > 1; k /= 2) ++extra;
        for (auto& [s, q] : m) {
            if (s == 1) {
                acc = acc + RatInterval(q);
                continue;
            }
            unsigned coef_bits = (unsigned)mpz_sizeinbase(num(rat_abs(q)).get_mpz_t(), 2) + 1;
            RatInterval root = sqrt_enclosure(s, bits + extra + coef_bits);
            acc = acc + scale(q, root);
        }
        return acc;
    }
};

inline FieldElement operator*(const Rat& q, const FieldElement& e) { return e * q; }

inline std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
    return os << e.to_string();
}

}  // namespace tepreach
