#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "crforge/errors.hpp"
#include "crforge/jet.hpp"

namespace crforge {

// Expression AST for chart functions. Variables are chart coordinates
// (real); coefficients and arithmetic are complex with the reserved
// identifier i as the imaginary unit. Supported unary analytic functions:
// exp log sin cos sinh cosh sqrt conj re im.
enum class expr_kind { literal, var, add, sub, mul, div, pow, neg, call };

struct expr_node;
using expr_ptr = std::shared_ptr<const expr_node>;

struct expr_node {
    expr_kind kind;
    cplx lit{};            // literal
    std::string name;      // var or call
    int exponent = 0;      // pow
    expr_ptr a, b;
    int line = 1, col = 1;
};

inline const std::vector<std::string>& expr_functions() {
    static const std::vector<std::string> fns = {
        "exp", "log", "sin", "cos", "sinh",
        "cosh", "sqrt", "conj", "re", "im"};
    return fns;
}

namespace detail {

struct token {
    enum kind_t { number, ident, plus, minus, star, slash, caret,
                  lparen, rparen, comma, end } kind;
    std::string text;
    double value = 0.0;
    int line = 1, col = 1;
};

inline std::vector<token> lex_expr(const std::string& text, int line0,
                                   int col0) {
    std::vector<token> out;
    int line = line0, col = col0;
    size_t i = 0;
    auto push = [&](token::kind_t k, std::string t) {
        out.push_back({k, std::move(t), 0.0, line, col});
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            col = col0;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                while (j < text.size() &&
                       std::isdigit(static_cast<unsigned char>(text[j])))
                    ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() &&
                    std::isdigit(static_cast<unsigned char>(text[k]))) {
                    ++k;
                    while (k < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[k])))
                        ++k;
                    j = k;
                }
            }
            std::string num = text.substr(i, j - i);
            token t{token::number, num, 0.0, line, col};
            t.value = std::strtod(num.c_str(), nullptr);
            out.push_back(t);
            col += int(j - i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) ||
                    text[j] == '_'))
                ++j;
            push(token::ident, text.substr(i, j - i));
            col += int(j - i);
            i = j;
            continue;
        }
        switch (c) {
            case '+': push(token::plus, "+"); break;
            case '-': push(token::minus, "-"); break;
            case '*': push(token::star, "*"); break;
            case '/': push(token::slash, "/"); break;
            case '^': push(token::caret, "^"); break;
            case '(': push(token::lparen, "("); break;
            case ')': push(token::rparen, ")"); break;
            case ',': push(token::comma, ","); break;
            default:
                throw parse_error(
                    std::string("unexpected character '") + c + "'", line,
                    col);
        }
        ++i;
        ++col;
    }
    out.push_back({token::end, "", 0.0, line, col});
    return out;
}

class expr_parser {
  public:
    explicit expr_parser(std::vector<token> toks) : toks_(std::move(toks)) {}

    expr_ptr parse() {
        expr_ptr e = parse_sum();
        if (cur().kind != token::end)
            fail("expected an operator (+, -, *, /, ^) or end of expression");
        return e;
    }

  private:
    const token& cur() const { return toks_[pos_]; }
    void advance() { ++pos_; }

    [[noreturn]] void fail(const std::string& expected) const {
        const token& t = cur();
        std::string got =
            t.kind == token::end ? "end of input" : "'" + t.text + "'";
        throw parse_error("syntax error: " + expected + ", got " + got,
                          t.line, t.col);
    }

    expr_ptr make(expr_kind k, expr_ptr a = nullptr, expr_ptr b = nullptr) {
        auto n = std::make_shared<expr_node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        n->line = cur().line;
        n->col = cur().col;
        return n;
    }

    expr_ptr parse_sum() {
        expr_ptr e = parse_term();
        while (cur().kind == token::plus || cur().kind == token::minus) {
            expr_kind k =
                cur().kind == token::plus ? expr_kind::add : expr_kind::sub;
            int line = cur().line, col = cur().col;
            advance();
            auto n = std::make_shared<expr_node>();
            n->kind = k;
            n->a = e;
            n->b = parse_term();
            n->line = line;
            n->col = col;
            e = n;
        }
        return e;
    }

    expr_ptr parse_term() {
        expr_ptr e = parse_unary();
        while (cur().kind == token::star || cur().kind == token::slash) {
            expr_kind k =
                cur().kind == token::star ? expr_kind::mul : expr_kind::div;
            int line = cur().line, col = cur().col;
            advance();
            auto n = std::make_shared<expr_node>();
            n->kind = k;
            n->a = e;
            n->b = parse_unary();
            n->line = line;
            n->col = col;
            e = n;
        }
        return e;
    }

    // Power binds tighter than unary minus: -x^2 is -(x^2).
    expr_ptr parse_unary() {
        if (cur().kind == token::minus) {
            int line = cur().line, col = cur().col;
            advance();
            auto n = std::make_shared<expr_node>();
            n->kind = expr_kind::neg;
            n->a = parse_unary();
            n->line = line;
            n->col = col;
            return n;
        }
        return parse_power();
    }

    expr_ptr parse_power() {
        expr_ptr base = parse_atom();
        if (cur().kind != token::caret) return base;
        int line = cur().line, col = cur().col;
        advance();
        int sign = 1;
        if (cur().kind == token::minus) {
            sign = -1;
            advance();
        }
        if (cur().kind != token::number ||
            cur().text.find_first_of(".eE") != std::string::npos)
            fail("expected an integer exponent after '^'");
        if (cur().value > 64.0) fail("expected an exponent of magnitude <= 64");
        auto n = std::make_shared<expr_node>();
        n->kind = expr_kind::pow;
        n->a = base;
        n->exponent = sign * int(cur().value);
        n->line = line;
        n->col = col;
        advance();
        return n;
    }

    expr_ptr parse_atom() {
        const token& t = cur();
        if (t.kind == token::number) {
            auto n = std::make_shared<expr_node>();
            n->kind = expr_kind::literal;
            n->lit = cplx(t.value, 0.0);
            n->line = t.line;
            n->col = t.col;
            advance();
            return n;
        }
        if (t.kind == token::ident) {
            if (t.text == "i") {
                auto n = std::make_shared<expr_node>();
                n->kind = expr_kind::literal;
                n->lit = cplx(0.0, 1.0);
                n->line = t.line;
                n->col = t.col;
                advance();
                return n;
            }
            for (const std::string& fn : expr_functions())
                if (t.text == fn) {
                    auto n = std::make_shared<expr_node>();
                    n->kind = expr_kind::call;
                    n->name = fn;
                    n->line = t.line;
                    n->col = t.col;
                    advance();
                    if (cur().kind != token::lparen)
                        fail("expected '(' after function name");
                    advance();
                    n->a = parse_sum();
                    if (cur().kind != token::rparen)
                        fail("expected ')'");
                    advance();
                    return n;
                }
            auto n = std::make_shared<expr_node>();
            n->kind = expr_kind::var;
            n->name = t.text;
            n->line = t.line;
            n->col = t.col;
            advance();
            return n;
        }
        if (t.kind == token::lparen) {
            advance();
            expr_ptr e = parse_sum();
            if (cur().kind != token::rparen) fail("expected ')'");
            advance();
            return e;
        }
        fail("expected a number, coordinate, function, '(', or '-'");
    }

    std::vector<token> toks_;
    size_t pos_ = 0;
};

}  // namespace detail

// Collects variable names; validate against declared coordinates.
inline void expr_collect_vars(const expr_ptr& e,
                              std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == expr_kind::var) {
        for (const std::string& s : out)
            if (s == e->name) return;
        out.push_back(e->name);
        return;
    }
    expr_collect_vars(e->a, out);
    expr_collect_vars(e->b, out);
}

inline void expr_validate_vars(const expr_ptr& e,
                               const std::vector<std::string>& coords) {
    if (!e) return;
    if (e->kind == expr_kind::var) {
        for (const std::string& s : coords)
            if (s == e->name) return;
        std::string list;
        for (size_t k = 0; k < coords.size(); ++k)
            list += (k ? ", " : "") + coords[k];
        throw parse_error("unknown identifier '" + e->name +
                              "'; declared coordinates: " + list,
                          e->line, e->col);
    }
    expr_validate_vars(e->a, coords);
    expr_validate_vars(e->b, coords);
}

inline expr_ptr parse_expr(const std::string& text, int line0 = 1,
                           int col0 = 1) {
    detail::expr_parser p(detail::lex_expr(text, line0, col0));
    return p.parse();
}

inline expr_ptr parse_expr(const std::string& text,
                           const std::vector<std::string>& coords) {
    expr_ptr e = parse_expr(text);
    expr_validate_vars(e, coords);
    return e;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Precedence levels: sum 1, term 2, unary minus 3, power 4, atom 5.
inline int expr_level(const expr_node& n) {
    switch (n.kind) {
        case expr_kind::add:
        case expr_kind::sub: return 1;
        case expr_kind::mul:
        case expr_kind::div: return 2;
        case expr_kind::neg: return 3;
        case expr_kind::pow: return 4;
        default: return 5;
    }
}

inline void print_rec(const expr_node& n, int min_level, std::string& out) {
    bool parens = expr_level(n) < min_level;
    if (parens) out += "(";
    switch (n.kind) {
        case expr_kind::literal:
            if (n.lit == cplx(0.0, 1.0)) {
                out += "i";
            } else {
                out += format_double(n.lit.real());
            }
            break;
        case expr_kind::var: out += n.name; break;
        case expr_kind::add:
            print_rec(*n.a, 1, out);
            out += " + ";
            print_rec(*n.b, 2, out);
            break;
        case expr_kind::sub:
            print_rec(*n.a, 1, out);
            out += " - ";
            print_rec(*n.b, 2, out);
            break;
        case expr_kind::mul:
            print_rec(*n.a, 2, out);
            out += "*";
            print_rec(*n.b, 3, out);
            break;
        case expr_kind::div:
            print_rec(*n.a, 2, out);
            out += "/";
            print_rec(*n.b, 3, out);
            break;
        case expr_kind::neg:
            out += "-";
            print_rec(*n.a, 3, out);
            break;
        case expr_kind::pow:
            print_rec(*n.a, 5, out);
            out += "^";
            if (n.exponent < 0) out += "-";
            out += std::to_string(n.exponent < 0 ? -n.exponent : n.exponent);
            break;
        case expr_kind::call:
            out += n.name;
            out += "(";
            print_rec(*n.a, 1, out);
            out += ")";
            break;
    }
    if (parens) out += ")";
}

}  // namespace detail

inline std::string print_expr(const expr_ptr& e) {
    std::string out;
    detail::print_rec(*e, 1, out);
    return out;
}

namespace detail {

template <typename S>
struct scalar_ops;

// Pointwise complex arithmetic; the evaluation path used by the
// finite-difference oracles and the CLI's plain evaluations.
template <typename R>
struct scalar_ops<std::complex<R>> {
    using S = std::complex<R>;
    static S from_cplx(cplx z) { return S(R(z.real()), R(z.imag())); }
    static bool near_zero(const S& v) { return std::abs(v) == R(0); }
    static S div(const S& a, const S& b) { return a / b; }
    static S ipow(S base, int e) {
        if (e < 0) return S(R(1)) / ipow(base, -e);
        S acc(R(1));
        for (int k = e; k > 0; k >>= 1) {
            if (k & 1) acc *= base;
            base *= base;
        }
        return acc;
    }
    static S call(const std::string& fn, const S& v) {
        if (fn == "exp") return std::exp(v);
        if (fn == "log") return std::log(v);
        if (fn == "sin") return std::sin(v);
        if (fn == "cos") return std::cos(v);
        if (fn == "sinh") return std::sinh(v);
        if (fn == "cosh") return std::cosh(v);
        if (fn == "sqrt") return std::sqrt(v);
        if (fn == "conj") return std::conj(v);
        if (fn == "re") return S(v.real());
        if (fn == "im") return S(v.imag());
        throw structural_error("unknown function " + fn);
    }
    static bool domain_ok(const std::string& fn, const S& v) {
        if (fn == "log" || fn == "sqrt") return std::abs(v) != R(0);
        return true;
    }
};

template <>
struct scalar_ops<jet> {
    using S = jet;
    static bool near_zero(const S& v) { return std::abs(v.value()) == 0.0; }
    static S div(const S& a, const S& b) { return a / b; }
    static S ipow(const S& base, int e) { return pow(base, e); }
    static S call(const std::string& fn, const S& v) {
        if (fn == "exp") return exp(v);
        if (fn == "log") return log(v);
        if (fn == "sin") return sin(v);
        if (fn == "cos") return cos(v);
        if (fn == "sinh") return sinh(v);
        if (fn == "cosh") return cosh(v);
        if (fn == "sqrt") return sqrt(v);
        if (fn == "conj") return conj(v);
        if (fn == "re") return real(v);
        if (fn == "im") return imag(v);
        throw structural_error("unknown function " + fn);
    }
    static bool domain_ok(const std::string& fn, const S& v) {
        if (fn == "log" || fn == "sqrt") return std::abs(v.value()) != 0.0;
        return true;
    }
};

template <typename S, typename MakeLit>
S eval_rec(const expr_node& n, const std::vector<std::string>& coords,
           const std::vector<S>& vars, MakeLit make_lit) {
    using ops = scalar_ops<S>;
    switch (n.kind) {
        case expr_kind::literal: return make_lit(n.lit);
        case expr_kind::var: {
            for (size_t k = 0; k < coords.size(); ++k)
                if (coords[k] == n.name) return vars[k];
            std::string list;
            for (size_t k = 0; k < coords.size(); ++k)
                list += (k ? ", " : "") + coords[k];
            throw parse_error("unknown identifier '" + n.name +
                                  "'; declared coordinates: " + list,
                              n.line, n.col);
        }
        case expr_kind::add:
            return eval_rec(*n.a, coords, vars, make_lit) +
                   eval_rec(*n.b, coords, vars, make_lit);
        case expr_kind::sub:
            return eval_rec(*n.a, coords, vars, make_lit) -
                   eval_rec(*n.b, coords, vars, make_lit);
        case expr_kind::mul:
            return eval_rec(*n.a, coords, vars, make_lit) *
                   eval_rec(*n.b, coords, vars, make_lit);
        case expr_kind::div: {
            S num = eval_rec(*n.a, coords, vars, make_lit);
            S den = eval_rec(*n.b, coords, vars, make_lit);
            if (ops::near_zero(den))
                throw domain_error("division by zero (line " +
                                   std::to_string(n.line) + ", column " +
                                   std::to_string(n.col) + ")");
            return ops::div(num, den);
        }
        case expr_kind::pow: {
            S base = eval_rec(*n.a, coords, vars, make_lit);
            if (n.exponent < 0 && ops::near_zero(base))
                throw domain_error("zero base with negative exponent (line " +
                                   std::to_string(n.line) + ", column " +
                                   std::to_string(n.col) + ")");
            return ops::ipow(base, n.exponent);
        }
        case expr_kind::neg:
            return -eval_rec(*n.a, coords, vars, make_lit);
        case expr_kind::call: {
            S v = eval_rec(*n.a, coords, vars, make_lit);
            if (!ops::domain_ok(n.name, v))
                throw domain_error(n.name + " of zero (line " +
                                   std::to_string(n.line) + ", column " +
                                   std::to_string(n.col) + ")");
            return ops::call(n.name, v);
        }
    }
    throw structural_error("corrupt expression node");
}

}  // namespace detail

// Degree-K Taylor jet of the expression at the point.
inline jet eval_jet(const expr_ptr& e, const std::vector<std::string>& coords,
                    const std::vector<double>& point, int order) {
    if (point.size() != coords.size())
        throw structural_error("eval_jet: point arity mismatch");
    int n = int(coords.size());
    std::vector<jet> vars;
    vars.reserve(coords.size());
    for (int v = 0; v < n; ++v)
        vars.push_back(jet::variable(n, order, v, point[size_t(v)]));
    auto make_lit = [&](cplx z) { return jet::constant(n, order, z); };
    return detail::eval_rec<jet>(*e, coords, vars, make_lit);
}

// Pointwise value in the requested complex precision.
template <typename R = double>
std::complex<R> eval_value(const expr_ptr& e,
                           const std::vector<std::string>& coords,
                           const std::vector<R>& point) {
    if (point.size() != coords.size())
        throw structural_error("eval_value: point arity mismatch");
    std::vector<std::complex<R>> vars;
    vars.reserve(point.size());
    for (R x : point) vars.emplace_back(x);
    auto make_lit = [](cplx z) {
        return std::complex<R>(R(z.real()), R(z.imag()));
    };
    return detail::eval_rec<std::complex<R>>(*e, coords, vars, make_lit);
}

}  // namespace crforge
