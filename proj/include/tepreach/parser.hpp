#pragma once

// Recursive-descent parser for the expression grammar shared by the CLI and
// the problem files:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-'|'+')* primary ('^' uint)?
//   primary:= uint | 'I' | 'sqrt' '(' uint ')' | ('exp'|'sin'|'cos') '(' expr ')'
//           | ident | '(' expr ')'
//
// exp/sin/cos take a linear argument c*var; division is by constants only.
// Identifiers resolve against the designated time variable and the declared
// polynomial variables.  Parse errors carry the offending position.

#include "tepreach/tep.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace tepreach {

struct parse_error : arith_error {
    size_t position;
    parse_error(const std::string& msg, size_t pos)
        : arith_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

class ExprParser {
  public:
    ExprParser(std::string text, std::string time_var, std::vector<std::string> poly_vars,
               bool allow_transcendental)
        : text_(std::move(text)),
          var_(std::move(time_var)),
          poly_vars_(std::move(poly_vars)),
          allow_trans_(allow_transcendental) {}

    Tep parse() {
        Tep t = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw parse_error("trailing input", pos_);
        return t;
    }

    static Tep parse_tep(const std::string& text, const std::string& var,
                         std::vector<std::string> params = {}) {
        return ExprParser(text, var, std::move(params), true).parse();
    }

    static MultiPoly parse_poly(const std::string& text, std::vector<std::string> vars) {
        Tep t = ExprParser(text, "@time", vars, false).parse();
        return t.body.in_ring(vars);
    }

    static FieldElement parse_field(const std::string& text) {
        Tep t = ExprParser(text, "@time", {}, false).parse();
        if (!t.body.is_constant()) throw arith_error("expected a constant: " + text);
        return t.body.constant_value();
    }

  private:
    std::string text_, var_;
    std::vector<std::string> poly_vars_;
    bool allow_trans_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace((unsigned char)text_[pos_])) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Tep parse_expr() {
        Tep acc = parse_term();
        while (true) {
            if (eat('+'))
                acc = acc + parse_term();
            else if (eat('-'))
                acc = acc - parse_term();
            else
                return acc;
        }
    }

    Tep parse_term() {
        Tep acc = parse_factor();
        while (true) {
            if (eat('*')) {
                acc = acc * parse_factor();
            } else if (eat('/')) {
                Tep d = parse_factor();
                if (!d.is_poly() || !d.body.is_constant())
                    throw parse_error("division only by constants", pos_);
                FieldElement c = d.body.constant_value();
                if (c.is_zero()) throw parse_error("division by zero", pos_);
                acc = acc * c.inverse();
            } else {
                return acc;
            }
        }
    }

    Tep parse_factor() {
        if (eat('-')) return -parse_factor();
        if (eat('+')) return parse_factor();
        Tep base = parse_primary();
        skip_ws();
        if (eat('^')) {
            unsigned long e = parse_uint();
            return base.pow((unsigned)e);
        }
        return base;
    }

    unsigned long parse_uint() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) ++pos_;
        if (pos_ == start) throw parse_error("expected an integer", pos_);
        return std::stoul(text_.substr(start, pos_ - start));
    }

    std::string parse_ident() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_'))
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    Tep parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw parse_error("unexpected end of input", pos_);
        char c = text_[pos_];
        if (std::isdigit((unsigned char)c)) {
            size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) ++pos_;
            Int val(text_.substr(start, pos_ - start), 10);
            return Tep::constant(FieldElement(Rat(val)), var_);
        }
        if (c == '(') {
            ++pos_;
            Tep inner = parse_expr();
            if (!eat(')')) throw parse_error("expected ')'", pos_);
            return inner;
        }
        if (std::isalpha((unsigned char)c)) {
            size_t at = pos_;
            std::string id = parse_ident();
            if (id == "I") return Tep::constant(FieldElement::imaginary(), var_);
            if (id == "sqrt") {
                if (!eat('(')) throw parse_error("expected '(' after sqrt", pos_);
                unsigned long n = parse_uint();
                if (!eat(')')) throw parse_error("expected ')'", pos_);
                return Tep::constant(FieldElement::sqrt_int(Int((long)n)), var_);
            }
            if (id == "exp" || id == "sin" || id == "cos") {
                if (!allow_trans_)
                    throw parse_error(id + " not allowed in a polynomial context", at);
                if (!eat('(')) throw parse_error("expected '(' after " + id, pos_);
                Tep inner = parse_expr();
                if (!eat(')')) throw parse_error("expected ')'", pos_);
                FieldElement rate = linear_coefficient(inner, at);
                if (id == "exp") return Tep::exp_term(rate, var_);
                if (id == "sin") return Tep::sin_term(rate, var_);
                return Tep::cos_term(rate, var_);
            }
            if (id == var_) return Tep::variable(var_);
            for (auto& pv : poly_vars_)
                if (id == pv) {
                    Tep t(var_);
                    t.params = {pv};
                    t.body = MultiPoly::variable(pv, t.ring());
                    return t;
                }
            throw parse_error("unknown identifier '" + id + "'", at);
        }
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    // exp/sin/cos arguments must look like  c * var.
    FieldElement linear_coefficient(const Tep& arg, size_t at) {
        if (!arg.is_poly()) throw parse_error("transcendental argument must be linear", at);
        MultiPoly b = arg.body;
        if (b.is_zero()) return FieldElement();
        FieldElement coef;
        for (auto& [e, cf] : b.terms()) {
            int deg_var = 0, other = 0;
            for (size_t i = 0; i < b.vars().size(); ++i) {
                if (b.vars()[i] == var_)
                    deg_var = e[i];
                else
                    other += e[i];
            }
            if (other != 0 || deg_var != 1)
                throw parse_error("transcendental argument must be c*" + var_, at);
            coef = cf;
        }
        if (b.terms().size() != 1)
            throw parse_error("transcendental argument must be c*" + var_, at);
        return coef;
    }
};

}  // namespace tepreach
