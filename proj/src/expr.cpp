#include "focsolve/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "focsolve/fracops.hpp"

namespace focsolve {

namespace {

Expr node(ExprOp op, double value, Expr lhs, Expr rhs) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->value = value;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

bool is_literal(const Expr& e, double v) {
    return e->op == ExprOp::literal && e->value == v;
}

bool is_constant(const Expr& e) {
    switch (e->op) {
        case ExprOp::literal:
            return true;
        case ExprOp::var_t:
        case ExprOp::var_x:
        case ExprOp::var_u:
            return false;
        default:
            if (e->lhs && !is_constant(e->lhs)) return false;
            if (e->rhs && !is_constant(e->rhs)) return false;
            return true;
    }
}

// Attempt to fold a constant subtree.  On evaluation failure or a non-finite
// result the node is kept symbolic so the error is reported at eval time.
Expr fold(Expr e) {
    if (e->op == ExprOp::literal || !is_constant(e)) return e;
    try {
        const double v = eval_expr(e, 0.0, 0.0, 0.0);
        return make_literal(v);
    } catch (const EvalError&) {
        return e;
    }
}

}  // namespace

Expr make_literal(double v) { return node(ExprOp::literal, v, nullptr, nullptr); }

Expr make_var(char name) {
    switch (name) {
        case 't': return node(ExprOp::var_t, 0.0, nullptr, nullptr);
        case 'x': return node(ExprOp::var_x, 0.0, nullptr, nullptr);
        case 'u': return node(ExprOp::var_u, 0.0, nullptr, nullptr);
        default: throw std::invalid_argument("make_var: variable must be one of t, x, u");
    }
}

Expr make_binary(ExprOp op, Expr lhs, Expr rhs) {
    // Identity simplifications keep derivative trees small.
    switch (op) {
        case ExprOp::add:
            if (is_literal(lhs, 0.0)) return rhs;
            if (is_literal(rhs, 0.0)) return lhs;
            break;
        case ExprOp::sub:
            if (is_literal(rhs, 0.0)) return lhs;
            if (is_literal(lhs, 0.0)) return make_unary(ExprOp::neg, rhs);
            break;
        case ExprOp::mul:
            if (is_literal(lhs, 0.0) || is_literal(rhs, 0.0)) return make_literal(0.0);
            if (is_literal(lhs, 1.0)) return rhs;
            if (is_literal(rhs, 1.0)) return lhs;
            break;
        case ExprOp::div:
            // No 0/r -> 0 rule: it would hide the 0/0 domain error.
            if (is_literal(rhs, 1.0)) return lhs;
            break;
        case ExprOp::pow:
            if (is_literal(rhs, 1.0)) return lhs;
            if (is_literal(rhs, 0.0)) return make_literal(1.0);
            break;
        default:
            throw std::invalid_argument("make_binary: not a binary operator");
    }
    return fold(node(op, 0.0, std::move(lhs), std::move(rhs)));
}

Expr make_unary(ExprOp op, Expr operand) {
    switch (op) {
        case ExprOp::neg:
            if (operand->op == ExprOp::neg) return operand->lhs;
            if (operand->op == ExprOp::literal) return make_literal(-operand->value);
            break;
        case ExprOp::fn_sin:
        case ExprOp::fn_cos:
        case ExprOp::fn_exp:
        case ExprOp::fn_ln:
        case ExprOp::fn_sqrt:
        case ExprOp::fn_abs:
        case ExprOp::fn_gamma:
        case ExprOp::fn_sign:
            break;
        default:
            throw std::invalid_argument("make_unary: not a unary operator");
    }
    return fold(node(op, 0.0, std::move(operand), nullptr));
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
    Kind kind;
    std::size_t offset;
    double number = 0.0;
    std::string ident;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const char* first = text.data() + i;
            const char* last = text.data() + n;
            auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
            if (ec != std::errc{} || ptr == first)
                throw ParseError("syntax error at offset " + std::to_string(i) + ": malformed number", i);
            out.push_back({Token::Kind::number, i, v, {}});
            i = static_cast<std::size_t>(ptr - text.data());
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({Token::Kind::ident, i, 0.0, text.substr(i, j - i)});
            i = j;
            continue;
        }
        Token::Kind k;
        switch (c) {
            case '+': k = Token::Kind::plus; break;
            case '-': k = Token::Kind::minus; break;
            case '*': k = Token::Kind::star; break;
            case '/': k = Token::Kind::slash; break;
            case '^': k = Token::Kind::caret; break;
            case '(': k = Token::Kind::lparen; break;
            case ')': k = Token::Kind::rparen; break;
            default:
                throw ParseError("syntax error at offset " + std::to_string(i) + ": unexpected character '" +
                                     std::string(1, c) + "'",
                                 i);
        }
        out.push_back({k, i, 0.0, {}});
        ++i;
    }
    out.push_back({Token::Kind::end, n, 0.0, {}});
    return out;
}

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Expr run() {
        Expr e = sum();
        if (peek().kind != Token::Kind::end)
            throw ParseError("syntax error at offset " + std::to_string(peek().offset) + ": unexpected trailing input",
                             peek().offset);
        return e;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool accept(Token::Kind k) {
        if (peek().kind == k) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = term();
        for (;;) {
            if (accept(Token::Kind::plus))
                e = make_binary(ExprOp::add, e, term());
            else if (accept(Token::Kind::minus))
                e = make_binary(ExprOp::sub, e, term());
            else
                return e;
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (accept(Token::Kind::star))
                e = make_binary(ExprOp::mul, e, factor());
            else if (accept(Token::Kind::slash))
                e = make_binary(ExprOp::div, e, factor());
            else
                return e;
        }
    }

    // factor handles unary minus; exponentiation binds tighter, so
    // -x^2 parses as -(x^2) while x^-2 is reached through power's rhs.
    Expr factor() {
        if (accept(Token::Kind::minus)) return make_unary(ExprOp::neg, factor());
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (accept(Token::Kind::caret)) return make_binary(ExprOp::pow, base, factor());
        return base;
    }

    Expr atom() {
        const Token& tok = advance();
        switch (tok.kind) {
            case Token::Kind::number:
                return make_literal(tok.number);
            case Token::Kind::lparen: {
                Expr e = sum();
                if (!accept(Token::Kind::rparen))
                    throw ParseError("syntax error at offset " + std::to_string(peek().offset) + ": expected ')'",
                                     peek().offset);
                return e;
            }
            case Token::Kind::ident: {
                if (tok.ident.size() == 1 && (tok.ident[0] == 't' || tok.ident[0] == 'x' || tok.ident[0] == 'u'))
                    return make_var(tok.ident[0]);
                ExprOp fn;
                if (tok.ident == "sin") fn = ExprOp::fn_sin;
                else if (tok.ident == "cos") fn = ExprOp::fn_cos;
                else if (tok.ident == "exp") fn = ExprOp::fn_exp;
                else if (tok.ident == "ln") fn = ExprOp::fn_ln;
                else if (tok.ident == "sqrt") fn = ExprOp::fn_sqrt;
                else if (tok.ident == "abs") fn = ExprOp::fn_abs;
                else if (tok.ident == "gamma") fn = ExprOp::fn_gamma;
                else
                    throw ParseError("unknown identifier '" + tok.ident + "' at offset " + std::to_string(tok.offset),
                                     tok.offset);
                if (!accept(Token::Kind::lparen))
                    throw ParseError("syntax error at offset " + std::to_string(peek().offset) + ": expected '(' after '" +
                                         tok.ident + "'",
                                     peek().offset);
                Expr arg = sum();
                if (!accept(Token::Kind::rparen))
                    throw ParseError("syntax error at offset " + std::to_string(peek().offset) + ": expected ')'",
                                     peek().offset);
                return make_unary(fn, arg);
            }
            default:
                throw ParseError("syntax error at offset " + std::to_string(tok.offset) + ": expected a value",
                                 tok.offset);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(tokenize(text)).run(); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void eval_fail(const char* what, const Expr& e) {
    throw EvalError(std::string(what) + " in '" + format_expr(e) + "'");
}

double check_finite(double v, const Expr& e) {
    if (!std::isfinite(v)) eval_fail("non-finite result", e);
    return v;
}

}  // namespace

double eval_expr(const Expr& e, double t, double x, double u) {
    switch (e->op) {
        case ExprOp::literal: return check_finite(e->value, e);
        case ExprOp::var_t: return check_finite(t, e);
        case ExprOp::var_x: return check_finite(x, e);
        case ExprOp::var_u: return check_finite(u, e);
        case ExprOp::add: return check_finite(eval_expr(e->lhs, t, x, u) + eval_expr(e->rhs, t, x, u), e);
        case ExprOp::sub: return check_finite(eval_expr(e->lhs, t, x, u) - eval_expr(e->rhs, t, x, u), e);
        case ExprOp::mul: return check_finite(eval_expr(e->lhs, t, x, u) * eval_expr(e->rhs, t, x, u), e);
        case ExprOp::div: {
            const double den = eval_expr(e->rhs, t, x, u);
            if (den == 0.0) eval_fail("division by zero", e);
            return check_finite(eval_expr(e->lhs, t, x, u) / den, e);
        }
        case ExprOp::pow: {
            const double b = eval_expr(e->lhs, t, x, u);
            const double p = eval_expr(e->rhs, t, x, u);
            const double v = std::pow(b, p);
            if (std::isnan(v)) eval_fail("power with negative base and non-integer exponent", e);
            return check_finite(v, e);
        }
        case ExprOp::neg: return check_finite(-eval_expr(e->lhs, t, x, u), e);
        case ExprOp::fn_sin: return check_finite(std::sin(eval_expr(e->lhs, t, x, u)), e);
        case ExprOp::fn_cos: return check_finite(std::cos(eval_expr(e->lhs, t, x, u)), e);
        case ExprOp::fn_exp: return check_finite(std::exp(eval_expr(e->lhs, t, x, u)), e);
        case ExprOp::fn_ln: {
            const double a = eval_expr(e->lhs, t, x, u);
            if (a <= 0.0) eval_fail("ln of a non-positive value", e);
            return check_finite(std::log(a), e);
        }
        case ExprOp::fn_sqrt: {
            const double a = eval_expr(e->lhs, t, x, u);
            if (a < 0.0) eval_fail("sqrt of a negative value", e);
            return check_finite(std::sqrt(a), e);
        }
        case ExprOp::fn_abs: return check_finite(std::fabs(eval_expr(e->lhs, t, x, u)), e);
        case ExprOp::fn_gamma: {
            const double a = eval_expr(e->lhs, t, x, u);
            double v;
            try {
                v = gamma_fn(a);
            } catch (const std::domain_error&) {
                eval_fail("gamma evaluated at a pole", e);
            }
            return check_finite(v, e);
        }
        case ExprOp::fn_sign: {
            const double a = eval_expr(e->lhs, t, x, u);
            return (a > 0.0) - (a < 0.0);
        }
    }
    throw std::logic_error("eval_expr: corrupt expression node");
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

Expr diff_expr(const Expr& e, char var) {
    if (var != 'x' && var != 'u') throw std::invalid_argument("diff_expr: variable must be 'x' or 'u'");
    switch (e->op) {
        case ExprOp::literal:
        case ExprOp::var_t:
            return make_literal(0.0);
        case ExprOp::var_x:
            return make_literal(var == 'x' ? 1.0 : 0.0);
        case ExprOp::var_u:
            return make_literal(var == 'u' ? 1.0 : 0.0);
        case ExprOp::add:
            return make_binary(ExprOp::add, diff_expr(e->lhs, var), diff_expr(e->rhs, var));
        case ExprOp::sub:
            return make_binary(ExprOp::sub, diff_expr(e->lhs, var), diff_expr(e->rhs, var));
        case ExprOp::mul:
            return make_binary(ExprOp::add, make_binary(ExprOp::mul, diff_expr(e->lhs, var), e->rhs),
                               make_binary(ExprOp::mul, e->lhs, diff_expr(e->rhs, var)));
        case ExprOp::div:
            // (l/r)' = l'/r - l r'/r^2
            return make_binary(
                ExprOp::sub, make_binary(ExprOp::div, diff_expr(e->lhs, var), e->rhs),
                make_binary(ExprOp::div, make_binary(ExprOp::mul, e->lhs, diff_expr(e->rhs, var)),
                            make_binary(ExprOp::pow, e->rhs, make_literal(2.0))));
        case ExprOp::pow: {
            const Expr& w = e->lhs;
            const Expr& g = e->rhs;
            Expr dw = diff_expr(w, var);
            Expr dg = diff_expr(g, var);
            if (is_literal(dg, 0.0)) {
                // (w^c)' = c w^(c-1) w'; avoids ln(w) so negative bases with
                // integer exponents stay differentiable.
                Expr cm1 = make_binary(ExprOp::sub, g, make_literal(1.0));
                return make_binary(ExprOp::mul, g,
                                   make_binary(ExprOp::mul, make_binary(ExprOp::pow, w, cm1), dw));
            }
            // General w^g: w^g (g' ln w + g w'/w).
            Expr t1 = make_binary(ExprOp::mul, dg, make_unary(ExprOp::fn_ln, w));
            Expr t2 = make_binary(ExprOp::div, make_binary(ExprOp::mul, g, dw), w);
            return make_binary(ExprOp::mul, e, make_binary(ExprOp::add, t1, t2));
        }
        case ExprOp::neg:
            return make_unary(ExprOp::neg, diff_expr(e->lhs, var));
        case ExprOp::fn_sin:
            return make_binary(ExprOp::mul, make_unary(ExprOp::fn_cos, e->lhs), diff_expr(e->lhs, var));
        case ExprOp::fn_cos:
            return make_unary(ExprOp::neg,
                              make_binary(ExprOp::mul, make_unary(ExprOp::fn_sin, e->lhs), diff_expr(e->lhs, var)));
        case ExprOp::fn_exp:
            return make_binary(ExprOp::mul, e, diff_expr(e->lhs, var));
        case ExprOp::fn_ln:
            return make_binary(ExprOp::div, diff_expr(e->lhs, var), e->lhs);
        case ExprOp::fn_sqrt:
            return make_binary(ExprOp::div, diff_expr(e->lhs, var),
                               make_binary(ExprOp::mul, make_literal(2.0), e));
        case ExprOp::fn_abs:
            // Subgradient convention: d|w| = sign(w) w' with sign(0) = 0.
            return make_binary(ExprOp::mul, make_unary(ExprOp::fn_sign, e->lhs), diff_expr(e->lhs, var));
        case ExprOp::fn_sign:
            return make_literal(0.0);
        case ExprOp::fn_gamma: {
            Expr da = diff_expr(e->lhs, var);
            if (is_literal(da, 0.0)) return make_literal(0.0);
            throw DiffError("gamma of a '" + std::string(1, var) +
                            "'-dependent argument has no derivative in this expression grammar");
        }
    }
    throw std::logic_error("diff_expr: corrupt expression node");
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

namespace {

// Precedence levels for parenthesization: sum 1, product 2, unary minus 3,
// power 4, atoms 5.  Negative literals print with a leading '-', so they
// take the unary-minus level.
int precedence(const Expr& e) {
    switch (e->op) {
        case ExprOp::add:
        case ExprOp::sub: return 1;
        case ExprOp::mul:
        case ExprOp::div: return 2;
        case ExprOp::neg: return 3;
        case ExprOp::pow: return 4;
        case ExprOp::literal: return e->value < 0.0 ? 3 : 5;
        default: return 5;
    }
}

std::string format_literal(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "0";
    return std::string(buf, ptr);
}

void render(const Expr& e, std::string& out) {
    auto child = [&out](const Expr& c, int min_prec) {
        const bool parens = precedence(c) < min_prec;
        if (parens) out += '(';
        render(c, out);
        if (parens) out += ')';
    };
    switch (e->op) {
        case ExprOp::literal: out += format_literal(e->value); return;
        case ExprOp::var_t: out += 't'; return;
        case ExprOp::var_x: out += 'x'; return;
        case ExprOp::var_u: out += 'u'; return;
        case ExprOp::add:
            child(e->lhs, 1);
            out += " + ";
            child(e->rhs, 1);
            return;
        case ExprOp::sub:
            child(e->lhs, 1);
            out += " - ";
            child(e->rhs, 2);  // a - (b + c) and a - (b - c) need parens
            return;
        case ExprOp::mul:
            child(e->lhs, 2);
            out += "*";
            child(e->rhs, 2);
            return;
        case ExprOp::div:
            child(e->lhs, 2);
            out += "/";
            child(e->rhs, 3);  // a/(b*c) and a/(b/c) need parens
            return;
        case ExprOp::neg:
            out += '-';
            child(e->lhs, 3);
            return;
        case ExprOp::pow:
            child(e->lhs, 5);  // left side of ^ must be atomic: (-x)^2, (a^b)^c
            out += '^';
            child(e->rhs, 3);  // right-associative; allows x^-2 and x^y^z
            return;
        case ExprOp::fn_sin: out += "sin("; break;
        case ExprOp::fn_cos: out += "cos("; break;
        case ExprOp::fn_exp: out += "exp("; break;
        case ExprOp::fn_ln: out += "ln("; break;
        case ExprOp::fn_sqrt: out += "sqrt("; break;
        case ExprOp::fn_abs: out += "abs("; break;
        case ExprOp::fn_gamma: out += "gamma("; break;
        case ExprOp::fn_sign: out += "sign("; break;
    }
    render(e->lhs, out);
    out += ')';
}

}  // namespace

std::string format_expr(const Expr& e) {
    std::string out;
    render(e, out);
    return out;
}

bool expr_uses(const Expr& e, char var) {
    switch (e->op) {
        case ExprOp::var_t: return var == 't';
        case ExprOp::var_x: return var == 'x';
        case ExprOp::var_u: return var == 'u';
        case ExprOp::literal: return false;
        default:
            if (e->lhs && expr_uses(e->lhs, var)) return true;
            if (e->rhs && expr_uses(e->rhs, var)) return true;
            return false;
    }
}

}  // namespace focsolve
