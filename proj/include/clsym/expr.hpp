#pragma once

// Expression language: parsing, symbolic differentiation, substitution and
// numeric evaluation in complex double arithmetic. Trees are immutable and
// shared; all operations are pure.

#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clsym/errors.hpp"

namespace clsym {

using Complex = std::complex<double>;

enum class NodeKind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call, UFunc };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    Complex value{};                // Constant
    std::string literal;            // Constant: decimal text as parsed (empty if synthesized)
    std::string name;               // Variable / Call / UFunc
    int deriv_order = 0;            // UFunc
    std::vector<NodePtr> args;
};

class Expression {
  public:
    Expression() = default;
    explicit Expression(NodePtr n) : node_(std::move(n)) {}

    const Node& node() const { return *node_; }
    const NodePtr& ptr() const { return node_; }
    bool valid() const { return node_ != nullptr; }

    NodeKind kind() const { return node_->kind; }

    bool operator==(const Expression& o) const { return structurally_equal(node_, o.node_); }

    static bool structurally_equal(const NodePtr& a, const NodePtr& b) {
        if (a == b) return true;
        if (!a || !b) return false;
        if (a->kind != b->kind) return false;
        switch (a->kind) {
            case NodeKind::Constant:
                return a->value == b->value;
            case NodeKind::Variable:
                return a->name == b->name;
            case NodeKind::Call:
            case NodeKind::UFunc:
                if (a->name != b->name || a->deriv_order != b->deriv_order) return false;
                break;
            default:
                break;
        }
        if (a->args.size() != b->args.size()) return false;
        for (std::size_t i = 0; i < a->args.size(); ++i)
            if (!structurally_equal(a->args[i], b->args[i])) return false;
        return true;
    }

  private:
    NodePtr node_;
};

// ---- constructors -------------------------------------------------------

inline Expression constant(Complex v, std::string literal = {}) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    n->literal = std::move(literal);
    return Expression(n);
}

inline Expression num(double v) { return constant(Complex(v, 0.0)); }

inline Expression imaginary_unit() { return constant(Complex(0.0, 1.0), "i"); }

inline Expression var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->name = std::move(name);
    return Expression(n);
}

namespace detail {
inline Expression make(NodeKind k, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    return Expression(n);
}
}  // namespace detail

inline Expression neg(const Expression& a) { return detail::make(NodeKind::Neg, {a.ptr()}); }
inline Expression add(const Expression& a, const Expression& b) {
    return detail::make(NodeKind::Add, {a.ptr(), b.ptr()});
}
inline Expression sub(const Expression& a, const Expression& b) {
    return detail::make(NodeKind::Sub, {a.ptr(), b.ptr()});
}
inline Expression mul(const Expression& a, const Expression& b) {
    return detail::make(NodeKind::Mul, {a.ptr(), b.ptr()});
}
inline Expression div(const Expression& a, const Expression& b) {
    return detail::make(NodeKind::Div, {a.ptr(), b.ptr()});
}
inline Expression pow(const Expression& a, const Expression& b) {
    return detail::make(NodeKind::Pow, {a.ptr(), b.ptr()});
}

inline bool is_known_function(const std::string& name) {
    static const std::set<std::string> fns = {"sin", "cos", "tan",  "sec", "exp",
                                              "log", "sqrt", "atan", "atan2"};
    return fns.count(name) != 0;
}

inline Expression call(const std::string& name, std::vector<Expression> args) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->name = name;
    for (auto& a : args) n->args.push_back(a.ptr());
    return Expression(n);
}

inline Expression ufunc(const std::string& name, int deriv_order, const Expression& arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::UFunc;
    n->name = name;
    n->deriv_order = deriv_order;
    n->args.push_back(arg.ptr());
    return Expression(n);
}

inline bool is_constant(const Expression& e, Complex v) {
    return e.kind() == NodeKind::Constant && e.node().value == v;
}
inline bool is_zero(const Expression& e) { return is_constant(e, Complex(0, 0)); }
inline bool is_one(const Expression& e) { return is_constant(e, Complex(1, 0)); }

// ---- printing -----------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[64];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return buf;
}

inline std::string format_constant(const Node& n) {
    if (!n.literal.empty()) return n.literal;
    if (n.value.imag() == 0.0) return format_double(n.value.real());
    if (n.value.real() == 0.0 && n.value.imag() == 1.0) return "i";
    // Synthesized complex constants (never produced by the parser); the
    // printed form re-parses to an evaluation-equivalent tree.
    if (n.value.real() == 0.0) return "(" + format_double(n.value.imag()) + "*i)";
    return "(" + format_double(n.value.real()) + "+" + format_double(n.value.imag()) + "*i)";
}

// precedence: add/sub 1, mul/div 2, unary neg 3, pow 4, atom 5
inline int precedence(const Node& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub:
            return 1;
        case NodeKind::Mul:
        case NodeKind::Div:
            return 2;
        case NodeKind::Neg:
            return 3;
        case NodeKind::Pow:
            return 4;
        case NodeKind::Constant:
            return (n.value.imag() == 0.0 && n.value.real() < 0 && n.literal.empty()) ? 3 : 5;
        default:
            return 5;
    }
}

inline void print_node(const Node& n, std::string& out);

inline void print_child(const NodePtr& c, int parent_prec, bool tight, std::string& out) {
    bool need = precedence(*c) < parent_prec || (tight && precedence(*c) == parent_prec);
    if (need) out += "(";
    print_node(*c, out);
    if (need) out += ")";
}

inline void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Constant:
            out += format_constant(n);
            break;
        case NodeKind::Variable:
            out += n.name;
            break;
        case NodeKind::Neg:
            out += "-";
            print_child(n.args[0], 4, false, out);
            break;
        case NodeKind::Add:
            print_child(n.args[0], 1, false, out);
            out += " + ";
            print_child(n.args[1], 1, true, out);
            break;
        case NodeKind::Sub:
            print_child(n.args[0], 1, false, out);
            out += " - ";
            print_child(n.args[1], 1, true, out);
            break;
        case NodeKind::Mul:
            print_child(n.args[0], 2, false, out);
            out += "*";
            print_child(n.args[1], 2, true, out);
            break;
        case NodeKind::Div:
            print_child(n.args[0], 2, false, out);
            out += "/";
            print_child(n.args[1], 2, true, out);
            break;
        case NodeKind::Pow:
            print_child(n.args[0], 5, false, out);
            out += "^";
            print_child(n.args[1], 3, false, out);
            break;
        case NodeKind::Call: {
            out += n.name;
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.args[i], out);
            }
            out += ")";
            break;
        }
        case NodeKind::UFunc: {
            out += n.name;
            for (int k = 0; k < n.deriv_order; ++k) out += "'";
            out += "(";
            print_node(*n.args[0], out);
            out += ")";
            break;
        }
    }
}

}  // namespace detail

inline std::string print(const Expression& e) {
    std::string out;
    detail::print_node(e.node(), out);
    return out;
}

// ---- parsing ------------------------------------------------------------
//
//   expr   := term (("+"|"-") term)* ;
//   term   := factor (("*"|"/") factor)* ;
//   factor := ("-")? power ;
//   power  := atom ("^" factor)? ;
//   atom   := NUMBER | "i" | IDENT | IDENT "(" expr ("," expr)? ")" | "(" expr ")" ;
//
// IDENT followed by primes and "(" denotes a derivative of an uninterpreted
// function symbol, e.g. w''(x); the primes extension keeps print/parse
// round-trips stable.

namespace detail {

class Parser {
  public:
    Parser(std::string_view text, const std::set<std::string>& symbols)
        : text_(text), symbols_(symbols) {}

    Expression parse() {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

  private:
    std::string_view text_;
    const std::set<std::string>& symbols_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool peek_char(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume(char c) {
        if (peek_char(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = add(lhs, parse_term());
            else if (consume('-'))
                lhs = sub(lhs, parse_term());
            else
                return lhs;
        }
    }

    Expression parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (consume('*'))
                lhs = mul(lhs, parse_factor());
            else if (consume('/'))
                lhs = div(lhs, parse_factor());
            else
                return lhs;
        }
    }

    Expression parse_factor() {
        if (consume('-')) {
            auto operand = parse_power();
            // fold negated numeric literals so that "-3" round-trips as a constant
            if (operand.kind() == NodeKind::Constant && operand.node().value.imag() == 0.0 &&
                operand.node().value.real() >= 0.0 && operand.node().literal != "i")
                return constant(-operand.node().value,
                                operand.node().literal.empty() ? std::string{}
                                                               : "-" + operand.node().literal);
            return neg(operand);
        }
        return parse_power();
    }

    Expression parse_power() {
        auto base = parse_atom();
        if (consume('^')) return pow(base, parse_factor());
        return base;
    }

    Expression parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expression parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // "2e" is "2" followed by identifier "e"
            }
        }
        std::string lit(text_.substr(start, pos_ - start));
        double v = 0;
        try {
            v = std::stod(lit);
        } catch (const std::exception&) {
            throw SyntaxError("malformed number '" + lit + "'", start);
        }
        return constant(Complex(v, 0.0), lit);
    }

    Expression parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        int primes = 0;
        while (pos_ < text_.size() && text_[pos_] == '\'') {
            ++primes;
            ++pos_;
        }
        if (peek_char('(')) {
            ++pos_;
            std::vector<Expression> args;
            args.push_back(parse_expr());
            if (consume(',')) args.push_back(parse_expr());
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            if (is_known_function(name)) {
                if (primes > 0)
                    throw SyntaxError("derivative primes are only valid on uninterpreted functions",
                                      start);
                std::size_t want = (name == "atan2") ? 2 : 1;
                if (args.size() != want)
                    throw SyntaxError("function '" + name + "' expects " + std::to_string(want) +
                                          " argument(s)",
                                      start);
                return call(name, std::move(args));
            }
            if (args.size() != 1)
                throw SyntaxError("uninterpreted function '" + name + "' takes one argument",
                                  start);
            return ufunc(name, primes, args[0]);
        }
        if (primes > 0) throw SyntaxError("primes require a function application", start);
        if (name == "i") return imaginary_unit();
        if (!symbols_.count(name)) throw UnknownSymbol(name);
        return var(name);
    }
};

}  // namespace detail

inline Expression parse(std::string_view text, const std::set<std::string>& symbols) {
    return detail::Parser(text, symbols).parse();
}

// ---- evaluation ---------------------------------------------------------

struct Bindings {
    std::map<std::string, Complex> values;
    // uninterpreted function symbol -> concrete Expression in the formal
    // parameter "t"
    std::map<std::string, Expression> ufuncs;
};

Expression diff(const Expression& e, const std::string& v);

namespace detail {

inline void check_finite(Complex v, const Node& n) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::string s;
        print_node(n, s);
        throw NonFinite(s);
    }
}

inline Complex eval_node(const Node& n, const Bindings& b);

inline Complex eval_pow(const Node& n, const Bindings& b) {
    Complex base = eval_node(*n.args[0], b);
    // integer exponents by repeated multiplication: better precision and
    // well-defined at base 0 and on the negative real axis
    Complex expv = eval_node(*n.args[1], b);
    bool int_exp = false;
    long iexp = 0;
    if (expv.imag() == 0.0) {
        double r = expv.real();
        if (r == std::floor(r) && std::abs(r) <= 64) {
            int_exp = true;
            iexp = static_cast<long>(r);
        }
    }
    if (int_exp) {
        if (base == Complex(0, 0)) {
            if (iexp > 0) return {0, 0};
            if (iexp == 0) return {1, 0};
            std::string s;
            print_node(n, s);
            throw DomainError("zero raised to a negative power", s);
        }
        Complex acc(1, 0), sq = base;
        long k = iexp < 0 ? -iexp : iexp;
        while (k) {
            if (k & 1) acc *= sq;
            sq *= sq;
            k >>= 1;
        }
        return iexp < 0 ? Complex(1, 0) / acc : acc;
    }
    Complex e = expv;
    if (base == Complex(0, 0)) {
        if (e == Complex(0, 0)) return {1, 0};
        if (e.imag() == 0.0 && e.real() > 0) return {0, 0};
        std::string s;
        print_node(n, s);
        throw DomainError("zero base with non-positive-real exponent", s);
    }
    return std::pow(base, e);
}

inline Complex eval_call(const Node& n, const Bindings& b) {
    auto bad = [&n](const char* what) -> DomainError {
        std::string s;
        print_node(n, s);
        return DomainError(what, s);
    };
    if (n.name == "atan2") {
        Complex a = eval_node(*n.args[0], b);
        Complex c = eval_node(*n.args[1], b);
        if (std::abs(a.imag()) > 1e-12 || std::abs(c.imag()) > 1e-12)
            throw bad("atan2 requires real arguments");
        if (a.real() == 0.0 && c.real() == 0.0) throw bad("atan2(0, 0)");
        return {std::atan2(a.real(), c.real()), 0.0};
    }
    Complex x = eval_node(*n.args[0], b);
    if (n.name == "sin") return std::sin(x);
    if (n.name == "cos") return std::cos(x);
    if (n.name == "tan") {
        Complex c = std::cos(x);
        if (c == Complex(0, 0)) throw bad("tangent pole");
        return std::sin(x) / c;
    }
    if (n.name == "sec") {
        Complex c = std::cos(x);
        if (c == Complex(0, 0)) throw bad("secant pole");
        return Complex(1, 0) / c;
    }
    if (n.name == "exp") return std::exp(x);
    if (n.name == "log") {
        if (x == Complex(0, 0)) throw bad("log of zero");
        return std::log(x);  // principal branch, Im in (-pi, pi]
    }
    if (n.name == "sqrt") return std::sqrt(x);  // branch cut on the negative real axis
    if (n.name == "atan") {
        if (x == Complex(0, 1) || x == Complex(0, -1)) throw bad("atan branch point");
        return std::atan(x);
    }
    std::string s;
    print_node(n, s);
    throw DomainError("unknown function", s);
}

inline Complex eval_node(const Node& n, const Bindings& b) {
    Complex r;
    switch (n.kind) {
        case NodeKind::Constant:
            r = n.value;
            break;
        case NodeKind::Variable: {
            auto it = b.values.find(n.name);
            if (it == b.values.end()) throw UnknownSymbol(n.name);
            r = it->second;
            break;
        }
        case NodeKind::Neg:
            r = -eval_node(*n.args[0], b);
            break;
        case NodeKind::Add:
            r = eval_node(*n.args[0], b) + eval_node(*n.args[1], b);
            break;
        case NodeKind::Sub:
            r = eval_node(*n.args[0], b) - eval_node(*n.args[1], b);
            break;
        case NodeKind::Mul:
            r = eval_node(*n.args[0], b) * eval_node(*n.args[1], b);
            break;
        case NodeKind::Div: {
            Complex den = eval_node(*n.args[1], b);
            if (den == Complex(0, 0)) {
                std::string s;
                print_node(n, s);
                throw DomainError("division by zero", s);
            }
            r = eval_node(*n.args[0], b) / den;
            break;
        }
        case NodeKind::Pow:
            r = eval_pow(n, b);
            break;
        case NodeKind::Call:
            r = eval_call(n, b);
            break;
        case NodeKind::UFunc: {
            auto it = b.ufuncs.find(n.name);
            if (it == b.ufuncs.end()) throw UnknownSymbol(n.name);
            Expression inst = it->second;
            for (int k = 0; k < n.deriv_order; ++k) inst = diff(inst, "t");
            Bindings inner = b;
            inner.values["t"] = eval_node(*n.args[0], b);
            r = eval_node(inst.node(), inner);
            break;
        }
    }
    check_finite(r, n);
    return r;
}

}  // namespace detail

inline Complex eval_complex(const Expression& e, const Bindings& b) {
    return detail::eval_node(e.node(), b);
}

// ---- differentiation ----------------------------------------------------

inline Expression diff(const Expression& e, const std::string& v) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::Constant:
            return num(0);
        case NodeKind::Variable:
            return n.name == v ? num(1) : num(0);
        case NodeKind::Neg:
            return neg(diff(Expression(n.args[0]), v));
        case NodeKind::Add:
            return add(diff(Expression(n.args[0]), v), diff(Expression(n.args[1]), v));
        case NodeKind::Sub:
            return sub(diff(Expression(n.args[0]), v), diff(Expression(n.args[1]), v));
        case NodeKind::Mul: {
            Expression a(n.args[0]), b(n.args[1]);
            return add(mul(diff(a, v), b), mul(a, diff(b, v)));
        }
        case NodeKind::Div: {
            Expression a(n.args[0]), b(n.args[1]);
            return div(sub(mul(diff(a, v), b), mul(a, diff(b, v))), pow(b, num(2)));
        }
        case NodeKind::Pow: {
            Expression f(n.args[0]), g(n.args[1]);
            if (g.kind() == NodeKind::Constant) {
                // power rule keeps evaluation clear of the log branch cut
                Complex c = g.node().value;
                return mul(mul(g, pow(f, constant(c - Complex(1, 0)))), diff(f, v));
            }
            return mul(pow(f, g),
                       add(mul(diff(g, v), call("log", {f})), div(mul(g, diff(f, v)), f)));
        }
        case NodeKind::Call: {
            Expression g(n.args[0]);
            Expression dg = diff(g, v);
            if (n.name == "atan2") {
                Expression a(n.args[0]), b(n.args[1]);
                return div(sub(mul(b, diff(a, v)), mul(a, diff(b, v))),
                           add(pow(a, num(2)), pow(b, num(2))));
            }
            if (n.name == "sin") return mul(call("cos", {g}), dg);
            if (n.name == "cos") return neg(mul(call("sin", {g}), dg));
            if (n.name == "tan") return mul(pow(call("sec", {g}), num(2)), dg);
            if (n.name == "sec") return mul(mul(call("sec", {g}), call("tan", {g})), dg);
            if (n.name == "exp") return mul(call("exp", {g}), dg);
            if (n.name == "log") return div(dg, g);
            if (n.name == "sqrt") return div(dg, mul(num(2), call("sqrt", {g})));
            if (n.name == "atan") return div(dg, add(num(1), pow(g, num(2))));
            throw Error("cannot differentiate call to '" + n.name + "'");
        }
        case NodeKind::UFunc: {
            Expression g(n.args[0]);
            return mul(ufunc(n.name, n.deriv_order + 1, g), diff(g, v));
        }
    }
    throw Error("unreachable");
}

// ---- substitution -------------------------------------------------------

inline Expression substitute(const Expression& e, const std::string& v, const Expression& r) {
    const Node& n = e.node();
    if (n.kind == NodeKind::Variable) return n.name == v ? r : e;
    if (n.args.empty()) return e;
    std::vector<NodePtr> args;
    bool changed = false;
    for (const auto& a : n.args) {
        Expression sa = substitute(Expression(a), v, r);
        changed = changed || sa.ptr() != a;
        args.push_back(sa.ptr());
    }
    if (!changed) return e;
    auto m = std::make_shared<Node>(n);
    m->args = std::move(args);
    return Expression(m);
}

// ---- basic simplification -----------------------------------------------
//
// Constant folding and 0/1 identity elimination only. Deliberately not a
// canonicalizer: identity-to-zero decisions happen numerically elsewhere.

namespace detail {

inline bool is_real_constant(const Expression& e) {
    return e.kind() == NodeKind::Constant && e.node().value.imag() == 0.0;
}

inline Expression fold_binary(NodeKind k, const Expression& a, const Expression& b,
                              const Expression& original) {
    Bindings none;
    Expression node = detail::make(k, {a.ptr(), b.ptr()});
    try {
        Complex v = eval_complex(node, none);
        if (v.imag() == 0.0) return num(v.real());
    } catch (const Error&) {
        // leave unfolded (e.g. 1/0)
    }
    (void)original;
    return node;
}

}  // namespace detail

inline Expression simplify_basic(const Expression& e) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::Constant:
        case NodeKind::Variable:
            return e;
        case NodeKind::Neg: {
            Expression a = simplify_basic(Expression(n.args[0]));
            if (a.kind() == NodeKind::Neg) return Expression(a.node().args[0]);
            if (detail::is_real_constant(a)) return num(-a.node().value.real());
            return neg(a);
        }
        case NodeKind::Add: {
            Expression a = simplify_basic(Expression(n.args[0]));
            Expression b = simplify_basic(Expression(n.args[1]));
            if (is_zero(a)) return b;
            if (is_zero(b)) return a;
            if (detail::is_real_constant(a) && detail::is_real_constant(b))
                return detail::fold_binary(NodeKind::Add, a, b, e);
            return add(a, b);
        }
        case NodeKind::Sub: {
            Expression a = simplify_basic(Expression(n.args[0]));
            Expression b = simplify_basic(Expression(n.args[1]));
            if (is_zero(b)) return a;
            if (is_zero(a)) return simplify_basic(neg(b));
            if (detail::is_real_constant(a) && detail::is_real_constant(b))
                return detail::fold_binary(NodeKind::Sub, a, b, e);
            return sub(a, b);
        }
        case NodeKind::Mul: {
            Expression a = simplify_basic(Expression(n.args[0]));
            Expression b = simplify_basic(Expression(n.args[1]));
            if (is_zero(a) || is_zero(b)) return num(0);
            if (is_one(a)) return b;
            if (is_one(b)) return a;
            if (detail::is_real_constant(a) && detail::is_real_constant(b))
                return detail::fold_binary(NodeKind::Mul, a, b, e);
            return mul(a, b);
        }
        case NodeKind::Div: {
            Expression a = simplify_basic(Expression(n.args[0]));
            Expression b = simplify_basic(Expression(n.args[1]));
            if (is_one(b)) return a;
            if (is_zero(a) && !is_zero(b)) return num(0);
            if (detail::is_real_constant(a) && detail::is_real_constant(b) && !is_zero(b))
                return detail::fold_binary(NodeKind::Div, a, b, e);
            return div(a, b);
        }
        case NodeKind::Pow: {
            Expression a = simplify_basic(Expression(n.args[0]));
            Expression b = simplify_basic(Expression(n.args[1]));
            if (is_one(b)) return a;
            if (is_zero(b)) return num(1);
            if (detail::is_real_constant(a) && detail::is_real_constant(b))
                return detail::fold_binary(NodeKind::Pow, a, b, e);
            return pow(a, b);
        }
        case NodeKind::Call: {
            std::vector<Expression> args;
            for (const auto& a : n.args) args.push_back(simplify_basic(Expression(a)));
            return call(n.name, std::move(args));
        }
        case NodeKind::UFunc:
            return ufunc(n.name, n.deriv_order, simplify_basic(Expression(n.args[0])));
    }
    return e;
}

// ---- free symbols -------------------------------------------------------

inline void collect_symbols(const Expression& e, std::set<std::string>& vars,
                            std::set<std::string>& ufuncs) {
    const Node& n = e.node();
    if (n.kind == NodeKind::Variable) vars.insert(n.name);
    if (n.kind == NodeKind::UFunc) ufuncs.insert(n.name);
    for (const auto& a : n.args) collect_symbols(Expression(a), vars, ufuncs);
}

inline std::set<std::string> free_variables(const Expression& e) {
    std::set<std::string> vars, ufs;
    collect_symbols(e, vars, ufs);
    return vars;
}

inline std::set<std::string> ufunc_symbols(const Expression& e) {
    std::set<std::string> vars, ufs;
    collect_symbols(e, vars, ufs);
    return ufs;
}

}  // namespace clsym
