#pragma once

#include <memory>
#include <string>
#include <vector>

#include "frontlab/jet.hpp"

namespace frontlab {

/// Parse failure with the byte offset of the offending token and the
/// set of token kinds that would have been accepted there.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t offset, std::string expected, const std::string& text);
    std::size_t offset;
    std::string expected;
};

class UnknownIdentifier : public std::runtime_error {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name);
    std::size_t offset;
    std::string name;
};

enum class NodeKind : std::uint8_t {
    Number,
    Pi,
    VarU,
    VarV,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
    Abs,
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable AST node. Unary nodes use only `lhs`.
struct ExprNode {
    NodeKind kind;
    double number = 0.0;
    Expr lhs;
    Expr rhs;
};

/// Parse an expression in variables u,v. Grammar: standard precedence,
/// ^ right-associative and binding tighter than unary minus.
Expr parse(const std::string& text);

/// Canonical rendering; parse(pretty_print(e)) is structurally equal to e.
std::string pretty_print(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Evaluate the truncated Taylor jet of `e` at `point` (order 0..3).
Jet2 eval_jet(const Expr& e, double u, double v, int order);

/// Plain value; shorthand for eval_jet(...).value().
double eval(const Expr& e, double u, double v);

/// Exact symbolic partial derivative (internal utility; no simplification
/// beyond constant folding of trivial zeros/ones).
Expr differentiate(const Expr& e, NodeKind var);

// ---- programmatic AST builders ----------------------------------------

Expr num(double x);
Expr var_u();
Expr var_v();
Expr make_unary(NodeKind kind, Expr a);
Expr make_binary(NodeKind kind, Expr a, Expr b);

inline Expr operator+(Expr a, Expr b) { return make_binary(NodeKind::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return make_binary(NodeKind::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return make_binary(NodeKind::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return make_binary(NodeKind::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return make_unary(NodeKind::Neg, std::move(a)); }
inline Expr pow_expr(Expr a, Expr b) { return make_binary(NodeKind::Pow, std::move(a), std::move(b)); }
inline Expr sqrt_expr(Expr a) { return make_unary(NodeKind::Sqrt, std::move(a)); }

}  // namespace frontlab
