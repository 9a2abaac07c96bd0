#pragma once

// Small expression language over the variables x and t: recursive-descent
// parser, evaluator, and symbolic time derivative.  Used for the scenario
// inputs a(x,t), u_d(x,t), r(t), u0(x), and for the exact r'(t) the
// feedforward flux needs.
//
// Grammar (left-associative binaries; '^' binds tighter than unary minus,
// so -2^2 = -(2^2) = -4; '^' exponents must fold to constants):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' sexp)*
//   sexp   := '-' sexp | atom
//   atom   := number | 'pi' | 'x' | 't' | name '(' expr ')' | '(' expr ')'
// Functions: sin, cos, exp, sqrt, abs.  d/dt abs(u) uses sign(u)*u' with
// sign(0) = 0.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace burgersim {

enum class ExprKind {
    constant,
    var_x,
    var_t,
    neg,
    add,
    sub,
    mul,
    div,
    pow,
    fn_sin,
    fn_cos,
    fn_exp,
    fn_sqrt,
    fn_abs,
    fn_sign,  // internal: appears only in derivatives of abs
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double value = 0.0;  // constant nodes only
    ExprPtr a, b;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t pos)
        : std::runtime_error(std::move(msg)), position(pos) {}
    std::size_t position;
};

class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline ExprPtr make_const(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::constant;
    e->value = v;
    return e;
}

inline bool is_const(const ExprPtr& e, double v) {
    return e->kind == ExprKind::constant && e->value == v;
}

inline ExprPtr make_node(ExprKind k, ExprPtr a, ExprPtr b = nullptr) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

// Constant-folding constructors keep derivative trees tidy.
inline ExprPtr make_neg(ExprPtr a) {
    if (a->kind == ExprKind::constant) return make_const(-a->value);
    return make_node(ExprKind::neg, std::move(a));
}

inline ExprPtr make_add(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::constant && b->kind == ExprKind::constant)
        return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_node(ExprKind::add, std::move(a), std::move(b));
}

inline ExprPtr make_sub(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::constant && b->kind == ExprKind::constant)
        return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_neg(std::move(b));
    return make_node(ExprKind::sub, std::move(a), std::move(b));
}

inline ExprPtr make_mul(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::constant && b->kind == ExprKind::constant)
        return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_node(ExprKind::mul, std::move(a), std::move(b));
}

inline ExprPtr make_div(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::constant && b->kind == ExprKind::constant &&
        b->value != 0.0)
        return make_const(a->value / b->value);
    if (is_const(b, 1.0)) return a;
    return make_node(ExprKind::div, std::move(a), std::move(b));
}

inline ExprPtr make_fn(ExprKind k, ExprPtr a) { return make_node(k, std::move(a)); }

inline const char* kind_name(ExprKind k) {
    switch (k) {
        case ExprKind::constant: return "constant";
        case ExprKind::var_x: return "x";
        case ExprKind::var_t: return "t";
        case ExprKind::neg: return "negation";
        case ExprKind::add: return "addition";
        case ExprKind::sub: return "subtraction";
        case ExprKind::mul: return "multiplication";
        case ExprKind::div: return "division";
        case ExprKind::pow: return "power";
        case ExprKind::fn_sin: return "sin";
        case ExprKind::fn_cos: return "cos";
        case ExprKind::fn_exp: return "exp";
        case ExprKind::fn_sqrt: return "sqrt";
        case ExprKind::fn_abs: return "abs";
        case ExprKind::fn_sign: return "sign";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(const std::string& src) : s_(src) {}

    ExprPtr run() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ < s_.size())
            throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected ") + what, pos_);
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = make_add(std::move(e), parse_term());
            else if (accept('-'))
                e = make_sub(std::move(e), parse_term());
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (accept('*'))
                e = make_mul(std::move(e), parse_factor());
            else if (accept('/'))
                e = make_div(std::move(e), parse_factor());
            else
                return e;
        }
    }

    ExprPtr parse_factor() {
        if (accept('-')) return make_neg(parse_factor());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr e = parse_atom();
        while (peek_is('^')) {
            const std::size_t caret = pos_;
            ++pos_;
            ExprPtr ex = parse_signed_atom();
            if (ex->kind != ExprKind::constant)
                throw ParseError("exponent must be a constant expression", caret);
            e = fold_pow(std::move(e), std::move(ex));
        }
        return e;
    }

    ExprPtr parse_signed_atom() {
        if (accept('-')) return make_neg(parse_signed_atom());
        return parse_atom();
    }

    static ExprPtr fold_pow(ExprPtr base, ExprPtr expo) {
        if (base->kind == ExprKind::constant) {
            const double v = std::pow(base->value, expo->value);
            if (std::isfinite(v)) return make_const(v);
        }
        return make_node(ExprKind::pow, std::move(base), std::move(expo));
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("expected value at end of input", pos_);
        const char c = s_[pos_];
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (is_ident_char(c)) return parse_ident();
        if (accept('(')) {
            ExprPtr e = parse_expr();
            expect(')', "')'");
            return e;
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    static bool is_ident_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
                while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
            } else {
                pos_ = mark;  // 'e' belongs to something else; not our exponent
            }
        }
        const std::string text = s_.substr(start, pos_ - start);
        if (text == ".") throw ParseError("malformed number", start);
        try {
            return make_const(std::stod(text));
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + text + "'", start);
        }
    }

    ExprPtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (is_ident_char(s_[pos_]) ||
                                    (s_[pos_] >= '0' && s_[pos_] <= '9')))
            ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "x") return make_node(ExprKind::var_x, nullptr);
        if (name == "t") return make_node(ExprKind::var_t, nullptr);
        if (name == "pi") return make_const(3.14159265358979323846);
        ExprKind fk;
        if (name == "sin")
            fk = ExprKind::fn_sin;
        else if (name == "cos")
            fk = ExprKind::fn_cos;
        else if (name == "exp")
            fk = ExprKind::fn_exp;
        else if (name == "sqrt")
            fk = ExprKind::fn_sqrt;
        else if (name == "abs")
            fk = ExprKind::fn_abs;
        else
            throw ParseError("unknown identifier '" + name + "'", start);
        expect('(', "'(' after function name");
        ExprPtr arg = parse_expr();
        expect(')', "')'");
        return make_fn(fk, std::move(arg));
    }
};

}  // namespace detail

inline ExprPtr parse(const std::string& source) {
    return detail::Parser(source).run();
}

inline double eval(const ExprPtr& e, double x, double t) {
    using K = ExprKind;
    auto check = [&](double v) {
        if (!std::isfinite(v))
            throw EvalError(std::string("non-finite result in ") +
                            detail::kind_name(e->kind));
        return v;
    };
    switch (e->kind) {
        case K::constant: return e->value;
        case K::var_x: return x;
        case K::var_t: return t;
        case K::neg: return -eval(e->a, x, t);
        case K::add: return check(eval(e->a, x, t) + eval(e->b, x, t));
        case K::sub: return check(eval(e->a, x, t) - eval(e->b, x, t));
        case K::mul: return check(eval(e->a, x, t) * eval(e->b, x, t));
        case K::div: {
            const double num = eval(e->a, x, t);
            const double den = eval(e->b, x, t);
            if (den == 0.0) throw EvalError("division by zero");
            return check(num / den);
        }
        case K::pow: return check(std::pow(eval(e->a, x, t), e->b->value));
        case K::fn_sin: return std::sin(eval(e->a, x, t));
        case K::fn_cos: return std::cos(eval(e->a, x, t));
        case K::fn_exp: return check(std::exp(eval(e->a, x, t)));
        case K::fn_sqrt: {
            const double v = eval(e->a, x, t);
            if (v < 0.0) throw EvalError("sqrt of negative value");
            return std::sqrt(v);
        }
        case K::fn_abs: return std::abs(eval(e->a, x, t));
        case K::fn_sign: {
            const double v = eval(e->a, x, t);
            return (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        }
    }
    throw EvalError("corrupt expression node");
}

// Structural d/dt; x-only subtrees differentiate to 0.
inline ExprPtr differentiate_t(const ExprPtr& e) {
    using K = ExprKind;
    using namespace detail;
    switch (e->kind) {
        case K::constant:
        case K::var_x:
            return make_const(0.0);
        case K::var_t: return make_const(1.0);
        case K::neg: return make_neg(differentiate_t(e->a));
        case K::add: return make_add(differentiate_t(e->a), differentiate_t(e->b));
        case K::sub: return make_sub(differentiate_t(e->a), differentiate_t(e->b));
        case K::mul:
            return make_add(make_mul(differentiate_t(e->a), e->b),
                            make_mul(e->a, differentiate_t(e->b)));
        case K::div:
            return make_div(make_sub(make_mul(differentiate_t(e->a), e->b),
                                     make_mul(e->a, differentiate_t(e->b))),
                            make_mul(e->b, e->b));
        case K::pow: {
            // d/dt a^c = c * a^(c-1) * a'  (c constant by construction)
            const double c = e->b->value;
            return make_mul(make_const(c),
                            make_mul(make_node(K::pow, e->a, make_const(c - 1.0)),
                                     differentiate_t(e->a)));
        }
        case K::fn_sin:
            return make_mul(make_fn(K::fn_cos, e->a), differentiate_t(e->a));
        case K::fn_cos:
            return make_mul(make_neg(make_fn(K::fn_sin, e->a)),
                            differentiate_t(e->a));
        case K::fn_exp:
            return make_mul(make_fn(K::fn_exp, e->a), differentiate_t(e->a));
        case K::fn_sqrt:
            return make_div(differentiate_t(e->a),
                            make_mul(make_const(2.0), make_fn(K::fn_sqrt, e->a)));
        case K::fn_abs:
            // sign(0) = 0 convention
            return make_mul(make_fn(K::fn_sign, e->a), differentiate_t(e->a));
        case K::fn_sign: return make_const(0.0);
    }
    throw EvalError("corrupt expression node");
}

// ----- structure queries (scenario validation) -----

inline bool depends_on(const ExprPtr& e, ExprKind var) {
    if (!e) return false;
    if (e->kind == var) return true;
    return depends_on(e->a, var) || depends_on(e->b, var);
}

inline bool depends_on_x(const ExprPtr& e) { return depends_on(e, ExprKind::var_x); }
inline bool depends_on_t(const ExprPtr& e) { return depends_on(e, ExprKind::var_t); }

inline bool is_constant_zero(const ExprPtr& e) {
    return e->kind == ExprKind::constant && e->value == 0.0;
}

}  // namespace burgersim
