#include "expfit/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace expfit {

namespace {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Exp, Sqrt, Sin, Cos, Log, Abs };

const char* op_name(Op op) {
    switch (op) {
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Log: return "log";
    case Op::Abs: return "abs";
    default: return "?";
    }
}

} // namespace

struct Expression::Node {
    enum class Kind { Number, Pi, Var, Unary, Binary, Call } kind;
    double value = 0.0;   // Number
    int var = 0;          // Var: 0=x 1=y 2=z
    Op op = Op::Add;      // Unary/Binary/Call
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->value = v;
    return n;
}

NodePtr make_node(Node::Kind kind, Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

// Operator precedence used by the printer; higher binds tighter.
int precedence(const Node& n) {
    switch (n.kind) {
    case Node::Kind::Binary:
        switch (n.op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Pow: return 4;
        default: return 5;
        }
    case Node::Kind::Unary: return 3;
    default: return 5; // atoms and calls never need parentheses
    }
}

void print_node(std::ostringstream& out, const Node& n);

void print_child(std::ostringstream& out, const Node& child, int min_prec) {
    if (precedence(child) < min_prec) {
        out << '(';
        print_node(out, child);
        out << ')';
    } else {
        print_node(out, child);
    }
}

void print_node(std::ostringstream& out, const Node& n) {
    switch (n.kind) {
    case Node::Kind::Number: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        out << buf;
        break;
    }
    case Node::Kind::Pi:
        out << "pi";
        break;
    case Node::Kind::Var:
        out << "xyz"[n.var];
        break;
    case Node::Kind::Unary:
        out << '-';
        // the operand of unary minus must rebind at least as tightly,
        // except ^ which binds tighter than the minus itself
        print_child(out, *n.a, 3);
        break;
    case Node::Kind::Binary: {
        const int p = precedence(n);
        switch (n.op) {
        case Op::Add:
            print_child(out, *n.a, p);
            out << " + ";
            print_child(out, *n.b, p);
            break;
        case Op::Sub:
            print_child(out, *n.a, p);
            out << " - ";
            print_child(out, *n.b, p + 1); // left-associative
            break;
        case Op::Mul:
            print_child(out, *n.a, p);
            out << "*";
            print_child(out, *n.b, p + 1);
            break;
        case Op::Div:
            print_child(out, *n.a, p);
            out << "/";
            print_child(out, *n.b, p + 1);
            break;
        case Op::Pow:
            print_child(out, *n.a, p + 1); // right-associative; left operand is atomic-ish
            out << "^";
            print_child(out, *n.b, 3);
            break;
        default:
            break;
        }
        break;
    }
    case Node::Kind::Call:
        out << op_name(n.op) << '(';
        print_node(out, *n.a);
        out << ')';
        break;
    }
}

std::string to_string(const Node& n) {
    std::ostringstream out;
    print_node(out, n);
    return out.str();
}

[[noreturn]] void domain_error(const std::string& what, const Node& n) {
    throw EvalDomainError(what, to_string(n));
}

double eval_node(const Node& n, std::span<const double> pt) {
    switch (n.kind) {
    case Node::Kind::Number:
        return n.value;
    case Node::Kind::Pi:
        return std::numbers::pi;
    case Node::Kind::Var:
        if (static_cast<size_t>(n.var) >= pt.size())
            domain_error(std::string("variable '") + "xyz"[n.var] + "' not supplied by point", n);
        return pt[static_cast<size_t>(n.var)];
    case Node::Kind::Unary:
        return -eval_node(*n.a, pt);
    case Node::Kind::Binary: {
        const double a = eval_node(*n.a, pt);
        const double b = eval_node(*n.b, pt);
        switch (n.op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
            if (b == 0.0) domain_error("division by zero", n);
            return a / b;
        case Op::Pow: {
            const double r = std::pow(a, b);
            if (std::isnan(r) && !std::isnan(a) && !std::isnan(b))
                domain_error("invalid power", n);
            if (a == 0.0 && b < 0.0) domain_error("zero raised to a negative power", n);
            return r;
        }
        default: return 0.0;
        }
    }
    case Node::Kind::Call: {
        const double a = eval_node(*n.a, pt);
        switch (n.op) {
        case Op::Exp: return std::exp(a);
        case Op::Sqrt:
            if (a < 0.0) domain_error("sqrt of a negative value", n);
            return std::sqrt(a);
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Log:
            if (a <= 0.0) domain_error("log of a non-positive value", n);
            return std::log(a);
        case Op::Abs: return std::fabs(a);
        default: return 0.0;
        }
    }
    }
    return 0.0;
}

} // namespace

// ---------------------------------------------------------------------------
// Recursive descent parser.
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := NUMBER | IDENT ['(' expr ')'] | '(' expr ')'
// ---------------------------------------------------------------------------

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", column());
        return e;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    int column() const { return static_cast<int>(pos_) + 1; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
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

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_node(Node::Kind::Binary, Op::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = make_node(Node::Kind::Binary, Op::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_node(Node::Kind::Binary, Op::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = make_node(Node::Kind::Binary, Op::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-'))
            return make_node(Node::Kind::Unary, Op::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^'))
            return make_node(Node::Kind::Binary, Op::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of expression", column());
        const char c = text_[pos_];

        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')'))
                throw ParseError("expected ')'", column());
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", column());
    }

    NodePtr parse_number() {
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto res = std::from_chars(begin, end, value);
        if (res.ec != std::errc{})
            throw ParseError("invalid number", column());
        pos_ = static_cast<size_t>(res.ptr - text_.data());
        return make_number(value);
    }

    NodePtr parse_identifier() {
        const size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name = text_.substr(start, pos_ - start);

        if (name == "x" || name == "y" || name == "z") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Var;
            n->var = name == "x" ? 0 : name == "y" ? 1 : 2;
            return n;
        }
        if (name == "pi") {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Pi;
            return n;
        }

        Op fn;
        if (name == "exp") fn = Op::Exp;
        else if (name == "sqrt") fn = Op::Sqrt;
        else if (name == "sin") fn = Op::Sin;
        else if (name == "cos") fn = Op::Cos;
        else if (name == "log") fn = Op::Log;
        else if (name == "abs") fn = Op::Abs;
        else
            throw ParseError("unknown identifier '" + name + "'", static_cast<int>(start) + 1);

        if (!accept('('))
            throw ParseError("expected '(' after '" + name + "'", column());
        NodePtr arg = parse_expr();
        if (!accept(')'))
            throw ParseError("expected ')'", column());
        return make_node(Node::Kind::Call, fn, arg);
    }
};

Expression Expression::parse(const std::string& text) {
    return Expression(ExprParser(text).run());
}

double Expression::evaluate(std::span<const double> point) const {
    if (!root_) throw Error("evaluating an empty expression");
    return eval_node(*root_, point);
}

std::string Expression::str() const {
    return root_ ? to_string(*root_) : std::string();
}

ScalarField2 Expression::field2() const {
    Expression copy = *this;
    return [copy](double x, double y) { return copy(x, y); };
}

ScalarField3 Expression::field3() const {
    Expression copy = *this;
    return [copy](double x, double y, double z) { return copy(x, y, z); };
}

} // namespace expfit
