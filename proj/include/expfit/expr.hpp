#ifndef EXPFIT_EXPR_HPP
#define EXPFIT_EXPR_HPP

#include "expfit/common.hpp"

#include <memory>
#include <span>
#include <string>

namespace expfit {

/// Immutable analytic expression in the variables x, y (and z).
///
/// Supported grammar: decimal literals, `x y z pi`, binary `+ - * / ^`
/// (with `^` right-associative and binding tighter than unary minus),
/// unary minus, and the functions exp, sqrt, sin, cos, log, abs.
/// Parsing is whitespace-insensitive. Evaluation is plain IEEE double
/// arithmetic and deterministic; domain violations (division by zero,
/// log of a non-positive value, sqrt of a negative value) raise
/// EvalDomainError instead of returning NaN.
class Expression {
public:
    Expression() = default;

    /// Parse `text`. Throws ParseError (with a 1-based column) on syntax
    /// errors and on unknown identifiers.
    static Expression parse(const std::string& text);

    /// Evaluate at a point; the span supplies values for x, y[, z].
    /// Referencing a variable beyond point.size() raises EvalDomainError.
    double evaluate(std::span<const double> point) const;
    double operator()(double x, double y) const { return evaluate(std::array{x, y}); }
    double operator()(double x, double y, double z) const { return evaluate(std::array{x, y, z}); }

    /// Render back to text; reparsing the result evaluates identically.
    std::string str() const;

    bool valid() const { return root_ != nullptr; }

    /// Adapters for the pointwise-field interfaces used by the solver.
    ScalarField2 field2() const;
    ScalarField3 field3() const;

    struct Node; // AST node, defined in the implementation

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
    friend class ExprParser;
};

} // namespace expfit

#endif
