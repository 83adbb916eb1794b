#pragma once

// Reachability problem files and machine-readable reports.
//
// Format (sections in any order, '#' starts a comment):
//
//   system:
//     row -1/1000 0 1/1000
//     row 1/1000 -1/1000 0
//     row 0 1/1000 -1/1000
//   input:
//     1/100
//     0
//     0
//   initial point: 0 0 0
//   # or:
//   # initial region:
//   #   1 - x1^2 - x2^2 - 2*x3^2 > 0
//   unsafe:
//     y2 - y3 + 6 < 0
//   horizon: 1000
//   options: max_order=40 max_depth=64 precision_bits=4096
//
// State variables are x1..xn in the initial region and y1..yn in the unsafe
// constraints; the time variable is t.  All inequalities are strict.

#include "tepreach/cad.hpp"
#include "tepreach/parser.hpp"

#include <fstream>
#include <sstream>

namespace tepreach {

struct problem_error : arith_error {
    explicit problem_error(const std::string& msg) : arith_error(msg) {}
};

struct ProblemOptions {
    int max_order = 40;
    int max_depth = 64;
    unsigned precision_bits = 4096;
};

struct ReachProblem {
    std::vector<std::vector<Rat>> A;
    std::vector<Tep> input;
    std::optional<std::vector<Rat>> initial_point;
    std::vector<MultiPoly> initial_region;  // strict > 0 over x1..xn
    std::vector<UnsafeConstraint> unsafe;   // over y1..yn
    Rat horizon = Rat(1);
    ProblemOptions options;

    size_t dimension() const { return A.size(); }
};

namespace detail {

inline std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline Rat parse_rational(const std::string& tok) {
    try {
        Rat r(tok);
        r.canonicalize();
        return r;
    } catch (...) {
        throw problem_error("bad rational '" + tok + "'");
    }
}

// "expr < 0" or "expr > 0"
inline std::pair<std::string, bool> split_inequality(const std::string& line) {
    size_t lt = line.rfind("<");
    size_t gt = line.rfind(">");
    size_t pos = std::string::npos;
    bool less = false;
    if (lt != std::string::npos && (gt == std::string::npos || lt > gt)) {
        pos = lt;
        less = true;
    } else if (gt != std::string::npos) {
        pos = gt;
        less = false;
    }
    if (pos == std::string::npos) throw problem_error("expected a strict inequality: " + line);
    std::string rhs = strip(line.substr(pos + 1));
    if (rhs != "0") throw problem_error("inequalities must compare against 0: " + line);
    return {strip(line.substr(0, pos)), less};
}

}  // namespace detail

// A rational interior point of a strict polynomial region, by pattern
// (ellipsoid center) or a small grid search.
inline std::optional<std::vector<Rat>> find_interior_point(
    const std::vector<MultiPoly>& region, const std::vector<std::string>& vars) {
    auto holds = [&](const std::vector<Rat>& pt) {
        std::map<std::string, FieldElement> env;
        for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = FieldElement(pt[i]);
        for (auto& q : region)
            if (q.in_ring(vars).eval(env).sign() <= 0) return false;
        return true;
    };
    if (region.size() == 1) {
        auto e = detail::match_ellipsoid(region[0].in_ring(vars), vars);
        if (e && holds(e->m)) return e->m;
    }
    std::vector<Rat> grid{Rat(0),     Rat(1),     Rat(-1),    Rat(1, 2), Rat(-1, 2),
                          Rat(2),     Rat(-2),    Rat(3, 2),  Rat(-3, 2)};
    std::vector<Rat> pt(vars.size(), Rat(0));
    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == vars.size()) return holds(pt);
        for (auto& g : grid) {
            pt[i] = g;
            if (rec(i + 1)) return true;
        }
        return false;
    };
    if (rec(0)) return pt;
    return std::nullopt;
}

inline ReachProblem parse_problem(const std::string& text) {
    ReachProblem p;
    std::istringstream in(text);
    std::string raw;
    enum class Section { None, System, Input, Region, Unsafe };
    Section sec = Section::None;
    std::vector<std::string> input_lines, region_lines, unsafe_lines;
    bool have_horizon = false;

    while (std::getline(in, raw)) {
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::strip(line);
        if (line.empty()) continue;

        auto starts = [&](const char* kw) {
            return line.rfind(kw, 0) == 0;
        };
        if (starts("system:")) {
            sec = Section::System;
            continue;
        }
        if (starts("input:")) {
            sec = Section::Input;
            continue;
        }
        if (starts("initial point:")) {
            sec = Section::None;
            std::istringstream toks(line.substr(std::string("initial point:").size()));
            std::vector<Rat> pt;
            std::string tok;
            while (toks >> tok) pt.push_back(detail::parse_rational(tok));
            p.initial_point = pt;
            continue;
        }
        if (starts("initial region:")) {
            sec = Section::Region;
            std::string rest = detail::strip(line.substr(std::string("initial region:").size()));
            if (!rest.empty()) region_lines.push_back(rest);
            continue;
        }
        if (starts("unsafe:")) {
            sec = Section::Unsafe;
            std::string rest = detail::strip(line.substr(std::string("unsafe:").size()));
            if (!rest.empty()) unsafe_lines.push_back(rest);
            continue;
        }
        if (starts("horizon:")) {
            sec = Section::None;
            p.horizon = detail::parse_rational(detail::strip(line.substr(8)));
            have_horizon = true;
            continue;
        }
        if (starts("options:")) {
            sec = Section::None;
            std::istringstream toks(line.substr(8));
            std::string kv;
            while (toks >> kv) {
                size_t eq = kv.find('=');
                if (eq == std::string::npos) throw problem_error("bad option '" + kv + "'");
                std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                if (key == "max_order")
                    p.options.max_order = std::stoi(val);
                else if (key == "max_depth")
                    p.options.max_depth = std::stoi(val);
                else if (key == "precision_bits")
                    p.options.precision_bits = (unsigned)std::stoul(val);
                else
                    throw problem_error("unknown option '" + key + "'");
            }
            continue;
        }
        switch (sec) {
            case Section::System: {
                if (line.rfind("row", 0) != 0) throw problem_error("expected 'row ...': " + line);
                std::istringstream toks(line.substr(3));
                std::vector<Rat> row;
                std::string tok;
                while (toks >> tok) row.push_back(detail::parse_rational(tok));
                p.A.push_back(row);
                break;
            }
            case Section::Input:
                input_lines.push_back(line);
                break;
            case Section::Region:
                region_lines.push_back(line);
                break;
            case Section::Unsafe:
                unsafe_lines.push_back(line);
                break;
            default:
                throw problem_error("unexpected line outside any section: " + line);
        }
    }

    size_t n = p.A.size();
    if (n == 0) throw problem_error("missing system matrix");
    for (auto& row : p.A)
        if (row.size() != n) throw problem_error("system matrix is not square");
    if (input_lines.size() != n)
        throw problem_error("input vector size does not match the system dimension");
    if (!have_horizon || p.horizon <= 0) throw problem_error("missing or non-positive horizon");

    for (auto& s : input_lines) p.input.push_back(ExprParser::parse_tep(s, "t"));

    std::vector<std::string> xvars, yvars;
    for (size_t i = 0; i < n; ++i) {
        xvars.push_back("x" + std::to_string(i + 1));
        yvars.push_back("y" + std::to_string(i + 1));
    }
    for (auto& s : region_lines) {
        auto [expr, less] = detail::split_inequality(s);
        MultiPoly q = ExprParser::parse_poly(expr, xvars);
        p.initial_region.push_back(less ? -q : q);  // normalized to > 0
    }
    for (auto& s : unsafe_lines) {
        auto [expr, less] = detail::split_inequality(s);
        p.unsafe.push_back({ExprParser::parse_poly(expr, yvars), less});
    }

    if (p.initial_point && !p.initial_region.empty())
        throw problem_error("give either an initial point or an initial region, not both");
    if (!p.initial_point && p.initial_region.empty())
        throw problem_error("missing initial set");
    if (p.initial_point && p.initial_point->size() != n)
        throw problem_error("initial point dimension mismatch");

    if (!p.initial_region.empty()) {
        // the region must be nonempty: find one rational interior point
        if (!find_interior_point(p.initial_region, xvars))
            throw problem_error("initial region appears to be empty");
    }
    return p;
}

inline ReachResult run_reach(const ReachProblem& p) {
    CadOptions opt;
    opt.max_order = p.options.max_order;
    opt.max_depth = p.options.max_depth;
    opt.precision_bits = p.options.precision_bits;
    if (p.initial_point)
        return reach_point(p.A, p.input, *p.initial_point, p.unsafe, p.horizon,
                           p.options.max_order, p.options.max_depth);
    return reach_semialgebraic(p.A, p.input, p.initial_region, p.unsafe, p.horizon, opt);
}

}  // namespace tepreach
