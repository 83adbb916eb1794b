// tepreach: decide bounded-time reachability of linear systems with
// trigonometric-exponential inputs, and expose the underlying TEP toolbox
// (factorization, sign decision, root isolation) as subcommands.
//
// Exit codes: 0 safe/proved/decided-definite, 1 unsafe/mixed,
//             2 inconclusive, 3 input error.

#include "tepreach/isolate.hpp"
#include "tepreach/laurent.hpp"
#include "tepreach/problem.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

using namespace tepreach;
using json = nlohmann::ordered_json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    long ms() const {
        return (long)std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string interval_str(const RatInterval& iv) {
    return "(" + iv.lo.get_str() + ", " + iv.hi.get_str() + ")";
}

json interval_json(const RatInterval& iv) {
    return json{{"lo", iv.lo.get_str()}, {"hi", iv.hi.get_str()}};
}

int cmd_factor(const std::string& expr, const std::string& var, bool as_json, bool timings) {
    Timer timer;
    Tep f = ExprParser::parse_tep(expr, var);
    TepFactorization fac = factor_multiple_root_free(f);
    if (as_json) {
        json out;
        out["command"] = "factor";
        out["input"] = expr;
        out["constant"] = fac.constant.to_string();
        out["square_free"] = fac.squarefree_input;
        json fs = json::array();
        for (auto& [g, m] : fac.factors)
            fs.push_back(json{{"factor", g.to_string()}, {"multiplicity", m}});
        out["factors"] = fs;
        if (timings) out["timings"] = json{{"total_ms", timer.ms()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "constant: " << fac.constant.to_string() << "\n";
        for (auto& [g, m] : fac.factors)
            std::cout << "factor (multiplicity " << m << "): " << g.to_string() << "\n";
        std::cout << "square-free: " << (fac.squarefree_input ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_sign(const std::string& expr, const std::string& lo, const std::string& hi,
             const std::string& var, int max_order, bool as_json, bool timings) {
    Timer timer;
    Tep f = ExprParser::parse_tep(expr, var);
    Rat a = detail::parse_rational(lo), b = detail::parse_rational(hi);
    SignVerdict v = a == 0 ? decide_sign_factored(f, b, max_order)
                           : decide_sign(f, a, b, max_order);
    std::string verdict = v.value == SignValue::Positive   ? "Positive"
                          : v.value == SignValue::Negative ? "Negative"
                                                           : "Mixed";
    // the interval convention excludes 0; report the exact value there
    std::string at_zero;
    if (a == 0 && f.params.empty()) {
        int s0 = f.value_at_zero().sign();
        at_zero = s0 > 0 ? "positive" : s0 < 0 ? "negative" : "zero";
    }
    if (as_json) {
        json out;
        out["command"] = "sign";
        out["input"] = expr;
        out["interval"] = json{{"lo", a.get_str()}, {"hi", b.get_str()}};
        out["verdict"] = verdict;
        out["order_used"] = v.order_used;
        if (!at_zero.empty()) out["value_at_zero"] = at_zero;
        if (v.witnesses)
            out["witnesses"] = json{{"negative_at", v.witnesses->first.get_str()},
                                    {"positive_at", v.witnesses->second.get_str()}};
        if (timings) out["timings"] = json{{"total_ms", timer.ms()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << verdict << " on (" << a.get_str() << ", " << b.get_str() << "] (order "
                  << v.order_used << ")\n";
        if (!at_zero.empty()) std::cout << "value at 0: " << at_zero << "\n";
        if (v.witnesses)
            std::cout << "negative at " << v.witnesses->first.get_str() << ", positive at "
                      << v.witnesses->second.get_str() << "\n";
    }
    return v.value == SignValue::Mixed ? 1 : 0;
}

int cmd_isolate(const std::string& expr, const std::string& lo, const std::string& hi,
                const std::string& var, int max_depth, int max_order, bool as_json,
                bool timings) {
    Timer timer;
    Tep f = ExprParser::parse_tep(expr, var);
    Rat a = detail::parse_rational(lo), b = detail::parse_rational(hi);
    IsolationReport rep = isolate(f, RatInterval(a, b), max_depth, max_order);
    if (as_json) {
        json out;
        out["command"] = "isolate";
        out["input"] = expr;
        out["interval"] = json{{"lo", a.get_str()}, {"hi", b.get_str()}};
        json ivs = json::array();
        for (auto& iv : rep.intervals) ivs.push_back(interval_json(iv));
        out["roots"] = ivs;
        out["depth_reached"] = rep.depth_reached;
        if (timings) out["timings"] = json{{"total_ms", timer.ms()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << rep.intervals.size() << " root(s) on (" << a.get_str() << ", "
                  << b.get_str() << ")\n";
        for (auto& iv : rep.intervals) std::cout << "  " << interval_str(iv) << "\n";
    }
    return 0;
}

int cmd_reach(const std::string& path, bool as_json, bool timings) {
    Timer timer;
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open problem file: " << path << "\n";
        return 3;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    ReachProblem p = parse_problem(buf.str());
    ReachResult r = run_reach(p);

    // the verdict covers (0, T]; the state at t = 0 is reported separately
    std::string at_zero = "not-evaluated";
    if (p.initial_point) {
        bool all_hold = true;
        std::map<std::string, FieldElement> env;
        for (size_t i = 0; i < p.initial_point->size(); ++i)
            env["y" + std::to_string(i + 1)] = FieldElement((*p.initial_point)[i]);
        for (auto& uc : p.unsafe) {
            int s = uc.poly.eval(env).sign();
            if ((uc.less_than && s >= 0) || (!uc.less_than && s <= 0)) all_hold = false;
        }
        at_zero = (all_hold && !p.unsafe.empty()) ? "unsafe" : "safe";
    }

    std::string verdict = r.verdict == ReachVerdict::Safe     ? "Safe"
                          : r.verdict == ReachVerdict::Unsafe ? "Unsafe"
                                                              : "Inconclusive";
    if (as_json) {
        json out;
        out["command"] = "reach";
        out["problem"] = path;
        out["verdict"] = verdict;
        out["at_time_zero"] = at_zero;
        if (r.witness_time) out["witness_time"] = interval_json(*r.witness_time);
        if (r.witness_state) {
            json xs = json::array();
            for (auto& x : *r.witness_state) xs.push_back(x.get_str());
            out["witness_state"] = xs;
        }
        out["certificates"] = json{{"order_used", r.order_used}};
        if (!r.note.empty()) out["note"] = r.note;
        out["options"] = json{{"max_order", p.options.max_order},
                              {"max_depth", p.options.max_depth},
                              {"precision_bits", p.options.precision_bits},
                              {"horizon", p.horizon.get_str()}};
        if (timings) out["timings"] = json{{"total_ms", timer.ms()}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << verdict;
        if (r.witness_time) std::cout << " at t in " << interval_str(*r.witness_time);
        if (r.witness_state) {
            std::cout << " from x = (";
            for (size_t i = 0; i < r.witness_state->size(); ++i)
                std::cout << (i ? ", " : "") << (*r.witness_state)[i].get_str();
            std::cout << ")";
        }
        std::cout << "\n";
        if (p.initial_point) std::cout << "state at t=0: " << at_zero << "\n";
        if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
    }
    return r.verdict == ReachVerdict::Safe ? 0 : r.verdict == ReachVerdict::Unsafe ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded-time reachability for linear systems with "
                 "trigonometric-exponential inputs"};
    app.require_subcommand(1);

    std::string expr, lo, hi, var = "x", file;
    int max_order = 40, max_depth = 64;
    bool as_json = false, timings = false;

    auto add_common = [&](CLI::App* c) {
        c->add_flag("--json", as_json, "machine-readable JSON report");
        c->add_flag("--timings", timings, "include wall-clock timings in the report");
    };

    CLI::App* factor = app.add_subcommand("factor", "factor a TEP into multiple-root-free parts");
    factor->add_option("expr", expr)->required();
    factor->add_option("--var", var, "variable name (default x)");
    add_common(factor);

    CLI::App* sign = app.add_subcommand("sign", "decide the sign of a TEP on (lo, hi]");
    sign->add_option("expr", expr)->required();
    sign->add_option("lo", lo)->required();
    sign->add_option("hi", hi)->required();
    sign->add_option("--var", var, "variable name (default x)");
    sign->add_option("--max-order", max_order, "sandwich order cap (default 40)");
    add_common(sign);

    CLI::App* isolate_cmd = app.add_subcommand("isolate", "isolate all real roots on (lo, hi)");
    isolate_cmd->add_option("expr", expr)->required();
    isolate_cmd->add_option("lo", lo)->required();
    isolate_cmd->add_option("hi", hi)->required();
    isolate_cmd->add_option("--var", var, "variable name (default x)");
    isolate_cmd->add_option("--max-order", max_order, "sandwich order cap (default 40)");
    isolate_cmd->add_option("--max-depth", max_depth, "bisection depth cap (default 64)");
    add_common(isolate_cmd);

    CLI::App* reach = app.add_subcommand("reach", "decide reachability from a problem file");
    reach->add_option("file", file)->required();
    add_common(reach);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(factor)) return cmd_factor(expr, var, as_json, timings);
        if (app.got_subcommand(sign))
            return cmd_sign(expr, lo, hi, var, max_order, as_json, timings);
        if (app.got_subcommand(isolate_cmd))
            return cmd_isolate(expr, lo, hi, var, max_depth, max_order, as_json, timings);
        if (app.got_subcommand(reach)) return cmd_reach(file, as_json, timings);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const problem_error& e) {
        std::cerr << "problem error: " << e.what() << "\n";
        return 3;
    } catch (const inconclusive_sign& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 2;
    } catch (const undecided_sign& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 2;
    } catch (const isolation_error& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return 2;
    } catch (const arith_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
