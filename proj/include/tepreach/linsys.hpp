#pragma once

// Closed-form symbolic solution of xi' = A xi + u for rational matrices whose
// characteristic polynomial splits into rational and quadratic factors, and
// the reduction of point-initial-set reachability to TEP sign queries.
//
// The homogeneous part comes from Putzer's recursion (no eigenvectors
// needed); the particular part is undetermined coefficients per complex
// forcing rate, with a degree bump at resonances.  The assembled solution is
// verified symbolically: residual identically zero, xi(0) = x0.

#include "tepreach/isolate.hpp"
#include "tepreach/sign_decision.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tepreach {

struct linsys_error : arith_error {
    explicit linsys_error(const std::string& msg) : arith_error(msg) {}
};

using FieldVec = std::vector<FieldElement>;
using FieldMat = std::vector<std::vector<FieldElement>>;

namespace detail {

inline FieldMat mat_sub_scaled_identity(const FieldMat& A, const FieldElement& lambda) {
    FieldMat M = A;
    for (size_t i = 0; i < M.size(); ++i) M[i][i] = M[i][i] - lambda;
    return M;
}

inline FieldMat mat_mul(const FieldMat& A, const FieldMat& B) {
    size_t n = A.size(), m = B[0].size(), k = B.size();
    FieldMat C(n, FieldVec(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            FieldElement acc;
            for (size_t l = 0; l < k; ++l) acc = acc + A[i][l] * B[l][j];
            C[i][j] = acc;
        }
    return C;
}

inline FieldMat mat_inverse(const FieldMat& A) {
    size_t n = A.size();
    FieldMat M = A;
    FieldMat inv(n, FieldVec(n));
    for (size_t i = 0; i < n; ++i) inv[i][i] = FieldElement(Rat(1));
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && M[piv][col].is_zero()) ++piv;
        if (piv == n) throw linsys_error("singular matrix in solver");
        std::swap(M[piv], M[col]);
        std::swap(inv[piv], inv[col]);
        FieldElement d = M[col][col].inverse();
        for (size_t j = 0; j < n; ++j) {
            M[col][j] = M[col][j] * d;
            inv[col][j] = inv[col][j] * d;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == col || M[i][col].is_zero()) continue;
            FieldElement f = M[i][col];
            for (size_t j = 0; j < n; ++j) {
                M[i][j] = M[i][j] - f * M[col][j];
                inv[i][j] = inv[i][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

// Solve M x = b, free variables pinned to zero; throws if inconsistent.
inline FieldVec solve_linear(FieldMat M, FieldVec b) {
    size_t rows = M.size(), cols = rows ? M[0].size() : 0;
    std::vector<size_t> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && M[piv][c].is_zero()) ++piv;
        if (piv == rows) continue;
        std::swap(M[piv], M[r]);
        std::swap(b[piv], b[r]);
        FieldElement d = M[r][c].inverse();
        for (size_t j = c; j < cols; ++j) M[r][j] = M[r][j] * d;
        b[r] = b[r] * d;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || M[i][c].is_zero()) continue;
            FieldElement f = M[i][c];
            for (size_t j = c; j < cols; ++j) M[i][j] = M[i][j] - f * M[r][j];
            b[i] = b[i] - f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (!b[i].is_zero()) throw linsys_error("inconsistent ansatz system (resonance handling)");
    FieldVec x(cols);
    for (size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exponential polynomials: sum over complex rates of poly(t, params) e^{rate t}.

class ExpPoly {
  public:
    std::string var;
    std::vector<std::string> params;
    std::map<FieldElement, MultiPoly> terms;  // rate -> coefficient polynomial

    ExpPoly() = default;
    ExpPoly(std::string v, std::vector<std::string> ps)
        : var(std::move(v)), params(std::move(ps)) {}

    std::vector<std::string> ring() const {
        std::vector<std::string> vs{var};
        for (auto& p : params) vs.push_back(p);
        return vs;
    }

    void add(const FieldElement& rate, const MultiPoly& coef) {
        if (coef.is_zero()) return;
        auto it = terms.find(rate);
        if (it == terms.end())
            terms.emplace(rate, coef.in_ring(ring()));
        else {
            it->second = it->second + coef;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    ExpPoly operator+(const ExpPoly& o) const {
        ExpPoly r = *this;
        for (auto& [rate, coef] : o.terms) r.add(rate, coef);
        return r;
    }

    ExpPoly scale(const FieldElement& c) const {
        ExpPoly r(var, params);
        for (auto& [rate, coef] : terms) r.add(rate, coef * c);
        return r;
    }

    ExpPoly scale_poly(const MultiPoly& p) const {
        ExpPoly r(var, params);
        for (auto& [rate, coef] : terms) r.add(rate, coef * p.in_ring(ring()));
        return r;
    }

    ExpPoly derivative() const {
        ExpPoly r(var, params);
        for (auto& [rate, coef] : terms) {
            r.add(rate, coef.derivative(var));
            r.add(rate, coef * rate);
        }
        return r;
    }

    MultiPoly value_at_zero() const {
        MultiPoly acc(ring());
        for (auto& [rate, coef] : terms)
            acc = acc + coef.substitute({{var, FieldElement()}});
        return acc;
    }

    // Solve r' = lambda r + *this with r(0) = r0.
    ExpPoly solve_linear_ode(const FieldElement& lambda, const FieldElement& r0) const {
        ExpPoly particular(var, params);
        for (auto& [mu, g] : terms) {
            if (mu == lambda) {
                // antiderivative, term by term
                MultiPoly h(ring());
                for (auto& [e, c] : g.terms()) {
                    ExpVec ne = e;
                    ne[0] += 1;
                    h.add_term(ne, c * Rat(1, ne[0]));
                }
                particular.add(mu, h);
            } else {
                FieldElement inv = (mu - lambda).inverse();
                MultiPoly h(ring());
                MultiPoly cur = g.in_ring(ring()) * inv;
                while (!cur.is_zero()) {
                    h = h + cur;
                    cur = -(cur.derivative(var) * inv);
                }
                particular.add(mu, h);
            }
        }
        FieldElement adjust = r0;
        MultiPoly p0 = particular.value_at_zero();
        if (!p0.is_zero()) {
            if (!p0.is_constant()) throw linsys_error("non-constant initial defect");
            adjust = adjust - p0.constant_value();
        }
        ExpPoly out = particular;
        out.var = var;
        out.params = params;
        if (!adjust.is_zero())
            out.add(lambda, MultiPoly::constant(adjust, ring()));
        return out;
    }
};

// Convert a complex exponential polynomial to a real Tep by pairing
// conjugate rates; throws if the imaginary parts fail to cancel.
inline Tep exp_poly_to_tep(const ExpPoly& e) {
    Tep acc(e.var);
    acc.params = e.params;
    std::set<FieldElement> done;
    for (auto& [rate, coef] : e.terms) {
        if (done.count(rate)) continue;
        FieldElement alpha = rate.real_part();
        // imag_part() already reads the I coordinates back as a real element
        FieldElement beta = rate.imag_part();
        if (beta.is_zero()) {
            done.insert(rate);
            if (!coef.has_real_coefficients())
                throw linsys_error("real rate with non-real coefficient in solution");
            Tep term = Tep::poly(coef, e.var, e.params);
            if (!alpha.is_zero()) term = term * Tep::exp_term(alpha, e.var);
            acc = acc + term;
            continue;
        }
        FieldElement conj_rate = rate.conj();
        auto it = e.terms.find(conj_rate);
        if (it == e.terms.end()) throw linsys_error("unpaired complex rate in solution");
        done.insert(rate);
        done.insert(conj_rate);
        if (!(it->second == coef.conj_coefficients()))
            throw linsys_error("conjugate coefficient mismatch in solution");
        // pick the representative with positive frequency
        MultiPoly h = coef;
        FieldElement freq = beta;
        if (freq.sign() < 0) {
            freq = -freq;
            h = it->second;
        }
        MultiPoly re = (h + h.conj_coefficients()) * FieldElement(Rat(1, 2));
        MultiPoly im =
            (h - h.conj_coefficients()) *
            (FieldElement(Rat(2)) * FieldElement::imaginary()).inverse();
        Tep term = Tep::poly(re * FieldElement(Rat(2)), e.var, e.params) *
                       Tep::cos_term(freq, e.var) -
                   Tep::poly(im * FieldElement(Rat(2)), e.var, e.params) *
                       Tep::sin_term(freq, e.var);
        if (!alpha.is_zero()) term = term * Tep::exp_term(alpha, e.var);
        acc = acc + term;
    }
    return acc;
}

// Complex additive form of a Tep: rate + I freq -> coefficient polynomial.
inline ExpPoly tep_to_exp_poly(const Tep& t) {
    ExpPoly out(t.var, t.params);
    FieldElement I = FieldElement::imaginary();
    FieldElement inv2I = (FieldElement(Rat(2)) * I).inverse();
    for (auto& [key, coef] : t.normal_form()) {
        auto& [rate, kind, freq] = key;
        if (kind == 0) {
            out.add(rate, coef);
        } else if (kind == 1) {  // sin = (e^{Ivx} - e^{-Ivx}) / 2I
            out.add(rate + I * freq, coef * inv2I);
            out.add(rate - I * freq, coef * (-inv2I));
        } else {  // cos
            out.add(rate + I * freq, coef * FieldElement(Rat(1, 2)));
            out.add(rate - I * freq, coef * FieldElement(Rat(1, 2)));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eigenvalues via the characteristic polynomial.

// Rational + quadratic eigenvalue extraction; throws naming the leftover
// factor when the field is not supported.
inline std::vector<FieldElement> eigenvalues(const std::vector<std::vector<Rat>>& A) {
    size_t n = A.size();
    std::vector<std::string> lring{"@lambda"};
    std::vector<std::vector<MultiPoly>> M(n, std::vector<MultiPoly>(n, MultiPoly(lring)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            MultiPoly e = MultiPoly::constant(FieldElement(Rat(-A[i][j])), lring);
            if (i == j) e = e + MultiPoly::variable("@lambda", lring);
            M[i][j] = e;
        }
    UniPoly chi = to_unipoly(bareiss_determinant(std::move(M), lring), "@lambda");

    std::vector<FieldElement> roots;
    // strip zero roots
    size_t low = 0;
    while (low < chi.c.size() && chi.c[low].is_zero()) ++low;
    for (size_t k = 0; k < low; ++k) roots.push_back(FieldElement());
    chi.c.erase(chi.c.begin(), chi.c.begin() + (long)low);

    // rational roots by divisor trial on the integer-cleared polynomial
    auto rational_roots_pass = [&]() {
        bool found = true;
        while (found && chi.degree() >= 1) {
            found = false;
            UniPoly norm = chi.content_normalized();
            if (!norm.c.front().is_rational() || !norm.c.back().is_rational()) return;
            Rat c0 = norm.c.front().rat_value(), cn = norm.c.back().rat_value();
            std::vector<Int> ps = {Int(1)}, qs = {Int(1)};
            auto divisors = [](Int v) {
                std::vector<Int> out;
                v = abs(v);
                for (Int d(1); d * d <= v; ++d)
                    if (v % d == 0) {
                        out.push_back(d);
                        out.push_back(v / d);
                    }
                return out;
            };
            ps = divisors(num(c0));
            qs = divisors(num(cn));
            for (auto& p : ps) {
                for (auto& q : qs) {
                    for (int s : {1, -1}) {
                        Rat cand = make_rat(s * p, q);
                        if (norm.eval(cand).is_zero()) {
                            roots.push_back(FieldElement(cand));
                            UniPoly lin({FieldElement(-cand), FieldElement(Rat(1))});
                            chi = chi.divmod(lin).first;
                            found = true;
                            break;
                        }
                    }
                    if (found) break;
                }
                if (found) break;
            }
        }
    };
    rational_roots_pass();

    while (chi.degree() >= 2) {
        if (chi.degree() == 2) {
            FieldElement a = chi.c[2], b = chi.c[1], c = chi.c[0];
            FieldElement disc = b * b - FieldElement(Rat(4)) * a * c;
            auto w = disc.try_sqrt();
            if (!w)
                throw linsys_error("unsupported eigenvalue field for factor " +
                                   chi.to_string("lambda"));
            FieldElement inv2a = (FieldElement(Rat(2)) * a).inverse();
            roots.push_back((-b + *w) * inv2a);
            roots.push_back((-b - *w) * inv2a);
            chi = UniPoly::constant(a);
        } else {
            throw linsys_error("unsupported eigenvalue field: residual factor " +
                               chi.to_string("lambda"));
        }
    }
    if (roots.size() != n) throw linsys_error("eigenvalue count mismatch");
    return roots;
}

// ---------------------------------------------------------------------------
// The symbolic solution.

struct SymbolicSolution {
    std::vector<Tep> components;  // TEPs in t with parameter polynomials
    std::vector<std::string> params;
};

inline SymbolicSolution solve_symbolic(const std::vector<std::vector<Rat>>& A,
                                       const std::vector<Tep>& u,
                                       const std::vector<std::string>& params,
                                       const std::string& var = "t") {
    size_t n = A.size();
    if (u.size() != n || params.size() != n) throw linsys_error("dimension mismatch");
    for (auto& row : A)
        if (row.size() != n) throw linsys_error("matrix is not square");

    std::vector<FieldElement> lambda = eigenvalues(A);
    FieldMat Af(n, FieldVec(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) Af[i][j] = FieldElement(A[i][j]);

    std::vector<std::string> ring{var};
    for (auto& p : params) ring.push_back(p);

    // Putzer: e^{At} w = sum_j r_{j+1}(t) P_j w
    // r_1' = l1 r1, r1(0)=1;  r_j' = l_j r_j + r_{j-1}, r_j(0)=0
    std::vector<ExpPoly> r(n, ExpPoly(var, params));
    {
        ExpPoly zero(var, params);
        r[0] = zero.solve_linear_ode(lambda[0], FieldElement(Rat(1)));
        for (size_t j = 1; j < n; ++j) r[j] = r[j - 1].solve_linear_ode(lambda[j], FieldElement());
    }

    // symbolic initial vector: w = x_params - xi_p(0), filled in later
    // first the particular solution from the input
    std::vector<ExpPoly> u_c(n, ExpPoly(var, params));
    for (size_t i = 0; i < n; ++i) u_c[i] = tep_to_exp_poly(u[i]);
    std::set<FieldElement> mus;
    for (auto& comp : u_c)
        for (auto& [mu, g] : comp.terms) mus.insert(mu);

    std::vector<ExpPoly> particular(n, ExpPoly(var, params));
    for (auto& mu : mus) {
        // forcing vector g(t) e^{mu t}
        std::vector<MultiPoly> g(n, MultiPoly(ring));
        int deg = 0;
        for (size_t i = 0; i < n; ++i) {
            auto it = u_c[i].terms.find(mu);
            if (it != u_c[i].terms.end()) {
                g[i] = it->second.in_ring(ring);
                deg = std::max(deg, g[i].degree(var));
            }
        }
        int mult = 0;
        for (auto& l : lambda)
            if (l == mu) ++mult;
        FieldMat Amu = detail::mat_sub_scaled_identity(Af, mu);
        if (mult == 0) {
            // h = -sum_k N^{k+1} g^{(k)}, N = (A - mu I)^{-1}
            FieldMat N = detail::mat_inverse(Amu);
            std::vector<MultiPoly> h(n, MultiPoly(ring));
            std::vector<MultiPoly> cur = g;
            bool nonzero = true;
            while (nonzero) {
                std::vector<MultiPoly> Ncur(n, MultiPoly(ring));
                for (size_t i = 0; i < n; ++i)
                    for (size_t j = 0; j < n; ++j) Ncur[i] = Ncur[i] + cur[j] * N[i][j];
                for (size_t i = 0; i < n; ++i) h[i] = h[i] - Ncur[i];
                nonzero = false;
                for (size_t i = 0; i < n; ++i) {
                    cur[i] = Ncur[i].derivative(var);
                    if (!cur[i].is_zero()) nonzero = true;
                }
            }
            for (size_t i = 0; i < n; ++i) particular[i].add(mu, h[i]);
        } else {
            // resonance: ansatz degree deg + mult, solve the stacked system
            int D = deg + mult;
            size_t dim = n * (size_t)(D + 1);
            FieldMat M(dim, FieldVec(dim));
            FieldVec rhs(dim);
            // equations: (k+1) h_{k+1} - (A - mu I) h_k = g_k, k = 0..D
            for (int k = 0; k <= D; ++k) {
                for (size_t i = 0; i < n; ++i) {
                    size_t row = (size_t)k * n + i;
                    if (k < D) M[row][(size_t)(k + 1) * n + i] = FieldElement(Rat(k + 1));
                    for (size_t j = 0; j < n; ++j)
                        M[row][(size_t)k * n + j] = M[row][(size_t)k * n + j] - Amu[i][j];
                    // g_k coefficient of var^k in g[i]
                    auto cs = g[i].coeffs_in(var);
                    if (k < (int)cs.size() && cs[(size_t)k].is_constant())
                        rhs[row] = cs[(size_t)k].constant_value();
                }
            }
            FieldVec sol = detail::solve_linear(M, rhs);
            for (size_t i = 0; i < n; ++i) {
                MultiPoly h(ring);
                for (int k = 0; k <= D; ++k) {
                    ExpVec e(ring.size(), 0);
                    e[0] = k;
                    h.add_term(e, sol[(size_t)k * n + i]);
                }
                particular[i].add(mu, h);
            }
        }
    }

    // homogeneous part: e^{At} (x0 - xi_p(0)) via Putzer
    std::vector<MultiPoly> w(n, MultiPoly(ring));
    for (size_t i = 0; i < n; ++i) {
        w[i] = MultiPoly::variable(params[i], ring);
        MultiPoly p0 = particular[i].value_at_zero();
        w[i] = w[i] - p0;
    }
    // P_0 = I, P_j = P_{j-1} (A - lambda_j I)
    std::vector<ExpPoly> xi(n, ExpPoly(var, params));
    std::vector<MultiPoly> pw = w;  // P_j w
    for (size_t j = 0; j < n; ++j) {
        if (j > 0) {
            FieldMat Aj = detail::mat_sub_scaled_identity(Af, lambda[j - 1]);
            std::vector<MultiPoly> next(n, MultiPoly(ring));
            for (size_t i = 0; i < n; ++i)
                for (size_t k = 0; k < n; ++k) next[i] = next[i] + pw[k] * Aj[i][k];
            pw = next;
        }
        for (size_t i = 0; i < n; ++i) xi[i] = xi[i] + r[j].scale_poly(pw[i]);
    }
    for (size_t i = 0; i < n; ++i) xi[i] = xi[i] + particular[i];

    SymbolicSolution out;
    out.params = params;
    for (size_t i = 0; i < n; ++i) out.components.push_back(exp_poly_to_tep(xi[i]));

    // mandatory checks: residual identically zero, initial condition exact
    for (size_t i = 0; i < n; ++i) {
        Tep resid = out.components[i].derivative();
        for (size_t j = 0; j < n; ++j)
            resid = resid - out.components[j] * FieldElement(A[i][j]);
        resid = resid - u[i];
        if (!resid.is_zero_tep()) throw linsys_error("ODE residual is not zero");
        // value at t=0 equals the parameter
        Tep at0 = out.components[i];
        std::map<std::string, FieldElement> sub;
        MultiPoly v0(at0.ring());
        {
            std::map<std::string, FieldElement> env;
            env[at0.var] = FieldElement();
            for (size_t k = 0; k < at0.rates.size(); ++k)
                env["@e" + std::to_string(k)] = FieldElement(Rat(1));
            for (size_t k = 0; k < at0.sin_freqs.size(); ++k)
                env["@s" + std::to_string(k)] = FieldElement();
            for (size_t k = 0; k < at0.cos_freqs.size(); ++k)
                env["@c" + std::to_string(k)] = FieldElement(Rat(1));
            v0 = at0.body.substitute(env);
        }
        MultiPoly expect = MultiPoly::variable(params[i], at0.ring());
        if (!(v0 == expect)) throw linsys_error("initial condition check failed");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reachability for a point initial set.

struct UnsafeConstraint {
    MultiPoly poly;   // in state variables y1..yn (any names)
    bool less_than;   // true: unsafe where poly < 0;  false: poly > 0
};

enum class ReachVerdict { Safe, Unsafe, Inconclusive };

struct ReachResult {
    ReachVerdict verdict = ReachVerdict::Inconclusive;
    std::optional<RatInterval> witness_time;
    std::optional<std::vector<Rat>> witness_state;  // initial state for CAD path
    int order_used = 0;
    std::string note;
};

// Compose a state-space polynomial with the solution components.
inline Tep compose_poly(const MultiPoly& q, const std::vector<Tep>& xi,
                        const std::string& var) {
    Tep acc(var);
    if (!xi.empty()) acc.params = xi[0].params;
    for (auto& [e, c] : q.terms()) {
        Tep term = Tep::constant(c, var);
        term.params = acc.params;
        for (size_t i = 0; i < q.vars().size(); ++i) {
            if (e[i] == 0) continue;
            if (i >= xi.size()) throw linsys_error("unsafe polynomial variable out of range");
            term = term * xi[i].pow((unsigned)e[i]);
        }
        acc = acc + term;
    }
    return acc;
}

inline ReachResult reach_point(const std::vector<std::vector<Rat>>& A,
                               const std::vector<Tep>& u, const std::vector<Rat>& x0,
                               const std::vector<UnsafeConstraint>& unsafe, const Rat& T,
                               int max_order = 40, int max_depth = 64) {
    if (unsafe.empty()) {
        ReachResult trivial;
        trivial.verdict = ReachVerdict::Safe;
        trivial.note = "empty unsafe set";
        return trivial;
    }
    size_t n = A.size();
    std::vector<std::string> params;
    for (size_t i = 0; i < n; ++i) params.push_back("@x" + std::to_string(i + 1));
    SymbolicSolution sol = solve_symbolic(A, u, params, u.empty() ? "t" : u[0].var);

    std::map<std::string, FieldElement> binding;
    for (size_t i = 0; i < n; ++i) binding[params[i]] = FieldElement(x0[i]);
    std::vector<Tep> xi;
    for (auto& c : sol.components) xi.push_back(c.substitute_params(binding));

    std::vector<Tep> margins;  // sign>0 means constraint not satisfied, for <0 senses
    for (auto& uc : unsafe) {
        Tep g = compose_poly(uc.poly, xi, xi[0].var);
        margins.push_back(uc.less_than ? g : -g);  // unsafe where margin < 0
    }

    ReachResult res;
    try {
        // quick exit: one margin provably positive on (0,T] keeps the system out
        std::vector<SignVerdict> verdicts;
        bool safe = false;
        for (auto& m : margins) {
            SignVerdict v = decide_sign_factored(m, T, max_order);
            res.order_used = std::max(res.order_used, v.order_used);
            verdicts.push_back(v);
            if (v.value == SignValue::Positive) {
                safe = true;
                break;
            }
        }
        if (safe) {
            res.verdict = ReachVerdict::Safe;
            return res;
        }
        // partition (0,T] by all margin roots; each open cell has constant signs
        std::vector<Rat> cuts{Rat(0), T};
        for (auto& m : margins) {
            IsolationReport rep = isolate(m, RatInterval(Rat(0), T), max_depth, max_order);
            for (auto& iv : rep.intervals) {
                RatInterval fine = iv.is_point() ? iv : refine(m, iv, T / 4096);
                cuts.push_back(fine.lo);
                cuts.push_back(fine.hi);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            Rat sample = (cuts[i] + cuts[i + 1]) / 2;
            bool all_hold = true;
            for (auto& m : margins)
                if (m.sign_at_rational(sample) >= 0) {
                    all_hold = false;
                    break;
                }
            if (all_hold) {
                res.verdict = ReachVerdict::Unsafe;
                res.witness_time = RatInterval(cuts[i], cuts[i + 1]);
                return res;
            }
        }
        // t = T sits on a cell boundary: check it exactly
        {
            bool all_hold = true;
            for (auto& m : margins)
                if (m.sign_at_rational(T) >= 0) all_hold = false;
            if (all_hold) {
                res.verdict = ReachVerdict::Unsafe;
                res.witness_time = RatInterval(T, T);
                return res;
            }
        }
        res.verdict = ReachVerdict::Safe;
        return res;
    } catch (const inconclusive_sign& e) {
        res.verdict = ReachVerdict::Inconclusive;
        res.note = e.what();
        return res;
    } catch (const undecided_sign& e) {
        res.verdict = ReachVerdict::Inconclusive;
        res.note = e.what();
        return res;
    }
}

}  // namespace tepreach
