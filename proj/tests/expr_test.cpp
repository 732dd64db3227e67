#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "clsym/expr.hpp"
#include "clsym/sampling.hpp"

using namespace clsym;

namespace {

const std::set<std::string> xu = {"x", "u"};
const std::set<std::string> xup = {"x", "u", "p"};

Complex ev(const std::string& text, const Bindings& b,
           const std::set<std::string>& syms = xup) {
    return eval_complex(parse(text, syms), b);
}

Bindings at(Complex x, Complex u = {0, 0}, Complex p = {0, 0}) {
    Bindings b;
    b.values["x"] = x;
    b.values["u"] = u;
    b.values["p"] = p;
    return b;
}

}  // namespace

TEST_CASE("parser handles precedence, unary minus and power") {
    Bindings b = at({2, 0}, {3, 0}, {5, 0});
    CHECK(ev("1 + 2*3", b).real() == 7.0);
    CHECK(ev("-x^2", b).real() == -4.0);      // power binds tighter than minus
    CHECK(ev("2^3^2", b).real() == 512.0);    // right associative
    CHECK(ev("(1 + x)*u", b).real() == 9.0);
    CHECK(ev("6/3/2", b).real() == 1.0);      // left associative division
    CHECK(ev("x - -u", b).real() == 5.0);
}

TEST_CASE("imaginary unit and complex arithmetic") {
    Bindings b = at({0, 0});
    CHECK(ev("i*i", b) == Complex(-1, 0));
    Complex v = ev("(1 + i)^2", b);
    CHECK(std::abs(v - Complex(0, 2)) < 1e-15);
}

TEST_CASE("syntax errors carry the failing offset") {
    try {
        parse("2*^x", xup);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.offset == 2);
    }
    CHECK_THROWS_AS(parse("sin()", xup), SyntaxError);
    CHECK_THROWS_AS(parse("(1 + 2", xup), SyntaxError);
    CHECK_THROWS_AS(parse("", xup), SyntaxError);
}

TEST_CASE("unknown symbols are rejected at parse time") {
    CHECK_THROWS_AS(parse("x + q", xu), UnknownSymbol);
    CHECK_NOTHROW(parse("x + w(x)", xu));  // calls are uninterpreted functions
}

TEST_CASE("differentiation agrees with central differences") {
    const char* exprs[] = {
        "x^3 + 2*x*u",        "sin(x)*cos(u)",   "exp(x/2)/(1 + u^2)",
        "log(1 + x^2) + u^x", "sqrt(x + u + 3)", "tan(x/3)*sec(x/5)",
        "atan(x*u)",          "x^(-2) + u^3",
    };
    SamplingConfig cfg = SamplingConfig::defaults();
    Sampler s(7);
    for (const char* text : exprs) {
        Expression e = parse(text, xu);
        Expression ex = diff(e, "x");
        Expression eu = diff(e, "u");
        for (int k = 0; k < 8; ++k) {
            double x = s.uniform(0.4, 1.6), u = s.uniform(0.4, 1.6);
            const double h = 1e-6;
            Complex fp = eval_complex(e, at({x + h, 0}, {u, 0}));
            Complex fm = eval_complex(e, at({x - h, 0}, {u, 0}));
            Complex dx_fd = (fp - fm) / (2 * h);
            Complex dx_sym = eval_complex(ex, at({x, 0}, {u, 0}));
            CHECK(std::abs(dx_fd - dx_sym) < 1e-6 * (1 + std::abs(dx_sym)));

            fp = eval_complex(e, at({x, 0}, {u + h, 0}));
            fm = eval_complex(e, at({x, 0}, {u - h, 0}));
            Complex du_fd = (fp - fm) / (2 * h);
            Complex du_sym = eval_complex(eu, at({x, 0}, {u, 0}));
            CHECK(std::abs(du_fd - du_sym) < 1e-6 * (1 + std::abs(du_sym)));
        }
    }
}

TEST_CASE("atan2 derivative matches the quotient formula") {
    Expression e = parse("atan2(u, x)", xu);
    Expression ex = diff(e, "x");
    Bindings b = at({2, 0}, {1, 0});
    // d/dx atan2(u, x) = -u/(x^2 + u^2)
    CHECK(std::abs(eval_complex(ex, b) - Complex(-0.2, 0)) < 1e-15);
}

TEST_CASE("principal branches") {
    Bindings b = at({0, 0});
    CHECK(std::abs(ev("log(i)", b) - Complex(0, M_PI / 2)) < 1e-15);
    CHECK(std::abs(ev("sqrt(-1 + 0*x)", b) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(ev("(-1 + 0*x)^0.5", b) - Complex(0, 1)) < 1e-15);
}

TEST_CASE("domain and finiteness failures carry the subtree") {
    Expression e = parse("1/(x - 1)", xu);
    try {
        eval_complex(e, at({1, 0}));
        FAIL("expected a domain error");
    } catch (const Error& err) {
        CHECK(std::string(err.what()).find("x - 1") != std::string::npos);
    }
    CHECK_THROWS_AS(eval_complex(parse("log(0*x)", xu), at({1, 0})), Error);
}

TEST_CASE("substitution agrees with two-stage evaluation") {
    Expression e = parse("x^2*u + sin(u)", xu);
    Expression g = parse("1 + x^2", xu);
    Expression sub = substitute(e, "u", g);
    Sampler s(11);
    for (int k = 0; k < 16; ++k) {
        double x = s.uniform(-1.5, 1.5);
        Bindings b = at({x, 0});
        Complex gv = eval_complex(g, b);
        Bindings b2 = at({x, 0}, gv);
        CHECK(std::abs(eval_complex(sub, b) - eval_complex(e, b2)) < 1e-14);
    }
}

TEST_CASE("diff commutes with substitution of an x-free expression") {
    // (d/dx e)[u := c] == d/dx (e[u := c]) when c is constant in x
    Expression e = parse("x*u^2 + exp(u)*x^2", xu);
    Expression c = parse("u + 2", xu);
    Expression lhs = substitute(diff(e, "x"), "u", c);
    Expression rhs = diff(substitute(e, "u", c), "x");
    Sampler s(13);
    for (int k = 0; k < 16; ++k) {
        Bindings b = at({s.uniform(-1, 1), 0}, {s.uniform(-1, 1), 0});
        CHECK(std::abs(eval_complex(lhs, b) - eval_complex(rhs, b)) < 1e-13);
    }
}

TEST_CASE("uninterpreted functions differentiate through the chain rule") {
    Expression e = parse("w(2*u - x^2)", xu);
    Expression ex = diff(e, "x");
    Bindings b = at({0.7, 0}, {1.2, 0});
    b.ufuncs["w"] = parse("t^3 + t", {"t"});
    // d/dx w(2u - x^2) = -2x w'(2u - x^2)
    double arg = 2 * 1.2 - 0.7 * 0.7;
    double expected = -2 * 0.7 * (3 * arg * arg + 1);
    CHECK(std::abs(eval_complex(ex, b) - Complex(expected, 0)) < 1e-12);
}

TEST_CASE("printing round-trips through the parser") {
    const char* exprs[] = {
        "x + u*p",       "-x^2 + 3*(u - 1)",  "w(x)*u/(1 + p^2)",
        "sin(x)^2",      "1/(x - 1/2)",       "atan2(u, x - 2)",
        "exp(x/4) - i*u", "2*(x - 1)^(-3)",
    };
    for (const char* text : exprs) {
        Expression e = parse(text, xup);
        Expression back = parse(print(e), xup);
        INFO(text << " -> " << print(e));
        CHECK(e == back);
    }
}

TEST_CASE("derivatives of function symbols print and reparse") {
    Expression e = diff(diff(parse("w(x)*u", xu), "x"), "x");
    Expression back = parse(print(e), xu);
    CHECK(e == back);
    CHECK(print(e).find("w''") != std::string::npos);
}

TEST_CASE("simplification preserves value and removes trivial structure") {
    Expression e = parse("0*x + 1*u + 0 + u^1", xu);
    Expression s = simplify_basic(e);
    Bindings b = at({0.3, 0}, {1.7, 0});
    CHECK(std::abs(eval_complex(s, b) - eval_complex(e, b)) < 1e-15);
    CHECK(print(s).find("0*") == std::string::npos);
}

TEST_CASE("free variables and function symbols are collected") {
    Expression e = parse("x + w(u) + v(x)*p", xup);
    auto vars = free_variables(e);
    CHECK(vars.count("x") == 1);
    CHECK(vars.count("u") == 1);
    CHECK(vars.count("p") == 1);
    auto fs = ufunc_symbols(e);
    CHECK(fs == std::set<std::string>{"w", "v"});
}
