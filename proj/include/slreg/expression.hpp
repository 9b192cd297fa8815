#pragma once

/**
 * @file expression.hpp
 * @brief Tiny expression language for coefficient functions of one variable.
 *
 * Problem files describe p, q, r as strings over the grammar
 *
 *     expr   := term  (('+'|'-') term)*
 *     term   := unary (('*'|'/') unary)*
 *     unary  := ('+'|'-') unary | power
 *     power  := atom ('^' unary)?                 (right-associative)
 *     atom   := number | 'x' | fn '(' expr ')' | '(' expr ')'
 *     fn     := exp | log | sqrt | abs | sin | cos
 *
 * parsed by recursive descent into a small AST that supports evaluation and
 * exact symbolic differentiation (used by the Liouville transform, which
 * needs (pr)' analytically when it can get it).  Parse errors carry the
 * offending position and token text.
 */

#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

namespace slreg {

class ExprParseError : public std::runtime_error {
public:
    ExprParseError(const std::string& what, std::size_t pos, const std::string& tok)
        : std::runtime_error(what + " at position " + std::to_string(pos) +
                             (tok.empty() ? "" : " near '" + tok + "'")),
          position(pos), token(tok) {}
    std::size_t position;
    std::string token;
};

namespace expr_detail {

enum class NodeKind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Abs, Sin, Cos };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0; // Const only
    NodePtr a, b;

    Node(NodeKind k, double v) : kind(k), value(v) {}
    Node(NodeKind k, NodePtr x, NodePtr y = nullptr) : kind(k), a(std::move(x)), b(std::move(y)) {}
};

inline NodePtr make_const(double v) { return std::make_shared<Node>(NodeKind::Const, v); }
inline NodePtr make_var() { return std::make_shared<Node>(NodeKind::Var, 0.0); }
inline NodePtr make(NodeKind k, NodePtr a, NodePtr b = nullptr) {
    return std::make_shared<Node>(k, std::move(a), std::move(b));
}

inline bool is_const(const NodePtr& n, double v) {
    return n->kind == NodeKind::Const && n->value == v;
}

// Light constant folding keeps derivative trees readable and cheap.
inline NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const) return make_const(a->value + b->value);
    return make(NodeKind::Add, a, b);
}
inline NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const) return make_const(a->value - b->value);
    if (is_const(a, 0)) return make(NodeKind::Neg, b);
    return make(NodeKind::Sub, a, b);
}
inline NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const) return make_const(a->value * b->value);
    return make(NodeKind::Mul, a, b);
}
inline NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return make_const(0);
    if (is_const(b, 1)) return a;
    return make(NodeKind::Div, a, b);
}

inline double eval(const Node* n, double x) {
    switch (n->kind) {
        case NodeKind::Const: return n->value;
        case NodeKind::Var: return x;
        case NodeKind::Add: return eval(n->a.get(), x) + eval(n->b.get(), x);
        case NodeKind::Sub: return eval(n->a.get(), x) - eval(n->b.get(), x);
        case NodeKind::Mul: return eval(n->a.get(), x) * eval(n->b.get(), x);
        case NodeKind::Div: return eval(n->a.get(), x) / eval(n->b.get(), x);
        case NodeKind::Pow: return std::pow(eval(n->a.get(), x), eval(n->b.get(), x));
        case NodeKind::Neg: return -eval(n->a.get(), x);
        case NodeKind::Exp: return std::exp(eval(n->a.get(), x));
        case NodeKind::Log: return std::log(eval(n->a.get(), x));
        case NodeKind::Sqrt: return std::sqrt(eval(n->a.get(), x));
        case NodeKind::Abs: return std::abs(eval(n->a.get(), x));
        case NodeKind::Sin: return std::sin(eval(n->a.get(), x));
        case NodeKind::Cos: return std::cos(eval(n->a.get(), x));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline NodePtr derivative(const NodePtr& n);

inline NodePtr pow_node(NodePtr base, NodePtr expo) { return make(NodeKind::Pow, base, expo); }

inline NodePtr derivative(const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::Const: return make_const(0);
        case NodeKind::Var: return make_const(1);
        case NodeKind::Add: return add(derivative(n->a), derivative(n->b));
        case NodeKind::Sub: return sub(derivative(n->a), derivative(n->b));
        case NodeKind::Mul: return add(mul(derivative(n->a), n->b), mul(n->a, derivative(n->b)));
        case NodeKind::Div:
            return div(sub(mul(derivative(n->a), n->b), mul(n->a, derivative(n->b))),
                       mul(n->b, n->b));
        case NodeKind::Pow: {
            if (n->b->kind == NodeKind::Const) {
                // d/dx f^c = c f^{c-1} f'
                const double c = n->b->value;
                return mul(mul(make_const(c), pow_node(n->a, make_const(c - 1))), derivative(n->a));
            }
            // General case via f^g = exp(g log f).
            NodePtr f = n->a, g = n->b;
            NodePtr t = add(mul(derivative(g), make(NodeKind::Log, f)),
                            div(mul(g, derivative(f)), f));
            return mul(pow_node(f, g), t);
        }
        case NodeKind::Neg: return make(NodeKind::Neg, derivative(n->a));
        case NodeKind::Exp: return mul(make(NodeKind::Exp, n->a), derivative(n->a));
        case NodeKind::Log: return div(derivative(n->a), n->a);
        case NodeKind::Sqrt:
            return div(derivative(n->a), mul(make_const(2), make(NodeKind::Sqrt, n->a)));
        case NodeKind::Abs:
            // d|f| = f f'/|f| (undefined at zeros, as expected)
            return div(mul(n->a, derivative(n->a)), make(NodeKind::Abs, n->a));
        case NodeKind::Sin: return mul(make(NodeKind::Cos, n->a), derivative(n->a));
        case NodeKind::Cos: return make(NodeKind::Neg, mul(make(NodeKind::Sin, n->a), derivative(n->a)));
    }
    return make_const(0);
}

inline void to_string(const Node* n, std::ostream& os) {
    auto paren = [&os](const NodePtr& c) {
        os << '(';
        to_string(c.get(), os);
        os << ')';
    };
    switch (n->kind) {
        case NodeKind::Const: os << n->value; return;
        case NodeKind::Var: os << 'x'; return;
        case NodeKind::Add: paren(n->a); os << '+'; paren(n->b); return;
        case NodeKind::Sub: paren(n->a); os << '-'; paren(n->b); return;
        case NodeKind::Mul: paren(n->a); os << '*'; paren(n->b); return;
        case NodeKind::Div: paren(n->a); os << '/'; paren(n->b); return;
        case NodeKind::Pow: paren(n->a); os << '^'; paren(n->b); return;
        case NodeKind::Neg: os << "-"; paren(n->a); return;
        case NodeKind::Exp: os << "exp"; paren(n->a); return;
        case NodeKind::Log: os << "log"; paren(n->a); return;
        case NodeKind::Sqrt: os << "sqrt"; paren(n->a); return;
        case NodeKind::Abs: os << "abs"; paren(n->a); return;
        case NodeKind::Sin: os << "sin"; paren(n->a); return;
        case NodeKind::Cos: os << "cos"; paren(n->a); return;
    }
}

class Parser {
public:
    explicit Parser(std::string src) : src_(std::move(src)) {}

    NodePtr parse() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ExprParseError("unexpected trailing input", pos_, peek_token());
        return e;
    }

private:
    std::string src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    std::string peek_token() {
        skip_ws();
        if (pos_ >= src_.size()) return "";
        std::size_t e = pos_;
        if (std::isalpha(static_cast<unsigned char>(src_[e]))) {
            while (e < src_.size() && std::isalpha(static_cast<unsigned char>(src_[e]))) ++e;
        } else if (std::isdigit(static_cast<unsigned char>(src_[e])) || src_[e] == '.') {
            while (e < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[e])) || src_[e] == '.' ||
                    src_[e] == 'e' || src_[e] == 'E' || src_[e] == '+' || src_[e] == '-'))
                ++e;
        } else {
            ++e;
        }
        return src_.substr(pos_, e - pos_);
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (eat('+')) e = add(e, parse_term());
            else if (eat('-')) e = sub(e, parse_term());
            else return e;
        }
    }
    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            if (eat('*')) e = mul(e, parse_unary());
            else if (eat('/')) e = div(e, parse_unary());
            else return e;
        }
    }
    NodePtr parse_unary() {
        if (eat('-')) return make(NodeKind::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) return pow_node(base, parse_unary());
        return base;
    }
    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ExprParseError("unexpected end of expression", pos_, "");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!eat(')')) throw ExprParseError("expected ')'", pos_, peek_token());
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t e = pos_;
            while (e < src_.size() && std::isalpha(static_cast<unsigned char>(src_[e]))) ++e;
            const std::string name = src_.substr(pos_, e - pos_);
            const std::size_t at = pos_;
            pos_ = e;
            if (name == "x") return make_var();
            NodeKind k;
            if (name == "exp") k = NodeKind::Exp;
            else if (name == "log") k = NodeKind::Log;
            else if (name == "sqrt") k = NodeKind::Sqrt;
            else if (name == "abs") k = NodeKind::Abs;
            else if (name == "sin") k = NodeKind::Sin;
            else if (name == "cos") k = NodeKind::Cos;
            else throw ExprParseError("unknown identifier", at, name);
            if (!eat('(')) throw ExprParseError("expected '(' after function name", pos_, peek_token());
            NodePtr arg = parse_expr();
            if (!eat(')')) throw ExprParseError("expected ')'", pos_, peek_token());
            return make(k, arg);
        }
        throw ExprParseError("unexpected character", pos_, std::string(1, c));
    }
    NodePtr parse_number() {
        std::size_t e = pos_;
        while (e < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[e])) || src_[e] == '.')) ++e;
        if (e < src_.size() && (src_[e] == 'e' || src_[e] == 'E')) {
            std::size_t m = e + 1;
            if (m < src_.size() && (src_[m] == '+' || src_[m] == '-')) ++m;
            if (m < src_.size() && std::isdigit(static_cast<unsigned char>(src_[m]))) {
                ++m;
                while (m < src_.size() && std::isdigit(static_cast<unsigned char>(src_[m]))) ++m;
                e = m;
            }
        }
        const std::string text = src_.substr(pos_, e - pos_);
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            pos_ = e;
            return make_const(v);
        } catch (const std::exception&) {
            throw ExprParseError("malformed number", pos_, text);
        }
    }
};

} // namespace expr_detail

/// Parsed coefficient expression: evaluation plus exact differentiation.
class Expression {
public:
    Expression() = default;

    static Expression parse(const std::string& src) {
        Expression e;
        e.root_ = expr_detail::Parser(src).parse();
        e.source_ = src;
        return e;
    }
    static Expression constant(double v) {
        Expression e;
        e.root_ = expr_detail::make_const(v);
        e.source_ = std::to_string(v);
        return e;
    }

    bool valid() const { return static_cast<bool>(root_); }
    double operator()(double x) const { return expr_detail::eval(root_.get(), x); }

    Expression derivative() const {
        Expression e;
        e.root_ = expr_detail::derivative(root_);
        std::ostringstream os;
        expr_detail::to_string(e.root_.get(), os);
        e.source_ = os.str();
        return e;
    }

    const std::string& source() const { return source_; }

    std::string canonical() const {
        std::ostringstream os;
        expr_detail::to_string(root_.get(), os);
        return os.str();
    }

private:
    expr_detail::NodePtr root_;
    std::string source_;
};

} // namespace slreg
