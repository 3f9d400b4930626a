#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace focsolve {

// Node kinds for the expression AST over variables {t, x, u}.
//
// `sign` is not part of the input grammar; it only arises as the derivative
// of `abs` (with the subgradient convention sign(0) = 0) so that derivative
// trees remain expressible in the same AST.
enum class ExprOp {
    literal,
    var_t,
    var_x,
    var_u,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    fn_sin,
    fn_cos,
    fn_exp,
    fn_ln,
    fn_sqrt,
    fn_abs,
    fn_gamma,
    fn_sign,
};

struct ExprNode;

// Immutable shared AST; cheap to copy, safe for concurrent reads.
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op;
    double value = 0.0;  // payload for ExprOp::literal
    Expr lhs;            // unary operand, or left operand of a binary op
    Expr rhs;            // right operand of a binary op
};

// Syntax / unknown-identifier error; `offset` is the 0-based position in the
// input text where the problem was detected.
struct ParseError : std::runtime_error {
    ParseError(const std::string& message, std::size_t at)
        : std::runtime_error(message), offset(at) {}
    std::size_t offset;
};

// Raised by eval_expr on domain violations (ln of a non-positive value,
// division by zero, ...) and on any non-finite intermediate result.  The
// message names the offending subexpression.
struct EvalError : std::domain_error {
    using std::domain_error::domain_error;
};

// Raised by diff_expr on nodes with no derivative in this grammar
// (gamma of a non-constant argument).
struct DiffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smart constructors.  Constant subtrees whose evaluation succeeds with a
// finite value are folded to literals; anything else is left symbolic so the
// error surfaces at evaluation time, not construction time.
Expr make_literal(double v);
Expr make_var(char name);  // 't', 'x' or 'u'
Expr make_binary(ExprOp op, Expr lhs, Expr rhs);
Expr make_unary(ExprOp op, Expr operand);

// Recursive-descent parser.  Precedence, loosest to tightest:
// +,- (left) < *,/ (left) < unary minus < ^ (right-associative).
// Functions: sin, cos, exp, ln, sqrt, abs, gamma.  Whitespace-insensitive.
// Throws ParseError on malformed input or unknown identifiers.
Expr parse_expr(const std::string& text);

// Exact recursive evaluation.  Throws EvalError on domain violations;
// never returns a non-finite value.
double eval_expr(const Expr& e, double t, double x, double u);

// Symbolic partial derivative with respect to 'x' or 'u'.
// abs is differentiated as sign (subgradient 0 at 0); sign differentiates
// to 0; gamma is only differentiable when its argument does not depend on
// `var` (the derivative is then 0), otherwise a DiffError is thrown.
Expr diff_expr(const Expr& e, char var);

// Pretty-printer with minimal parentheses; literals are printed with
// shortest round-trip formatting so parse(format(e)) evaluates identically.
std::string format_expr(const Expr& e);

// True if the expression references the given variable ('t', 'x' or 'u').
bool expr_uses(const Expr& e, char var);

}  // namespace focsolve
