#include <catch2/catch_amalgamated.hpp>

#include "clsym/cubic.hpp"

using namespace clsym;

namespace {

const std::set<std::string> xup = {"x", "u", "p"};
const std::set<std::string> xu = {"x", "u"};

Bindings at(double x, Complex u, Complex p) {
    Bindings b;
    b.values["x"] = {x, 0};
    b.values["u"] = u;
    b.values["p"] = p;
    return b;
}

}  // namespace

TEST_CASE("on-shell total derivative") {
    // Dx(e) = e_x + p e_u + w e_p
    Expression w = parse("-u", xup);
    Expression e = parse("x*u + p^2", xup);
    Expression de = total_derivative(e, w);
    Bindings b = at(0.5, {2, 0}, {3, 0});
    // u + x p + 2 p w = 2 + 1.5 + 2*3*(-2) = -8.5
    CHECK(std::abs(eval_complex(de, b) - Complex(-8.5, 0)) < 1e-14);
}

TEST_CASE("fourth p-derivative invariant vanishes exactly on cubics") {
    Expression w = parse("x*p^3 + u*p^2 + (x + u)*p + sin(x)", xup);
    auto inv = tresse_invariants(w);
    auto report = evaluate_conditions({inv.I1}, xup, SamplingConfig::defaults());
    CHECK(report.verdict == Verdict::Pass);
}

TEST_CASE("both invariants vanish on a linearizable equation") {
    Expression w = parse("-3*u*p - u^3", xup);
    auto inv = tresse_invariants(w);
    auto report = evaluate_conditions({inv.I1, inv.I2}, xup, SamplingConfig::defaults());
    CHECK(report.verdict == Verdict::Pass);
}

TEST_CASE("second invariant detects non-linearizable cubics") {
    Expression w = parse("u*p", xup);
    auto inv = tresse_invariants(w);
    auto report = evaluate_conditions({inv.I2}, xup, SamplingConfig::defaults());
    CHECK(report.verdict == Verdict::Fail);
}

TEST_CASE("cubic coefficient extraction") {
    SamplingConfig cfg = SamplingConfig::defaults();
    SECTION("polynomial right-hand side") {
        Expression w = parse("2*p^3 - u*p^2 + x*p + u^2", xup);
        ComplexCubicODE ode = extract_cubic(w, cfg);
        Bindings b = at(0.7, {1.3, 0.2}, {0, 0});
        CHECK(std::abs(eval_complex(ode.A, b) - Complex(2, 0)) < 1e-12);
        CHECK(std::abs(eval_complex(ode.B, b) - Complex(-1.3, -0.2)) < 1e-12);
        CHECK(std::abs(eval_complex(ode.C, b) - Complex(0.7, 0)) < 1e-12);
        Complex u{1.3, 0.2};
        CHECK(std::abs(eval_complex(ode.D, b) - u * u) < 1e-12);
    }
    SECTION("rational-in-u right-hand side") {
        Expression w = parse("p^2/u + w(x)*u", xup);
        ComplexCubicODE ode = extract_cubic(w, cfg);
        Bindings b = at(1.0, {2, 0}, {0, 0});
        b.ufuncs["w"] = parse("t", {"t"});
        CHECK(std::abs(eval_complex(ode.A, b)) < 1e-12);
        CHECK(std::abs(eval_complex(ode.B, b) - Complex(0.5, 0)) < 1e-12);
        CHECK(std::abs(eval_complex(ode.C, b)) < 1e-12);
        CHECK(std::abs(eval_complex(ode.D, b) - Complex(2, 0)) < 1e-12);
    }
    SECTION("quartic and transcendental rejections") {
        CHECK_THROWS_AS(extract_cubic(parse("p^4 + u", xup), cfg), NotCubic);
        CHECK_THROWS_AS(extract_cubic(parse("exp(p) + u", xup), cfg), NotCubic);
        try {
            extract_cubic(parse("p^4", xup), cfg);
            FAIL("expected rejection");
        } catch (const NotCubic& e) {
            CHECK(e.max_residual > 1e-3);  // rejection carries a witness residual
        }
    }
}

TEST_CASE("compatibility conditions pass on linearizable equations") {
    SamplingConfig cfg = SamplingConfig::defaults();
    for (const char* text : {"-3*u*p - u^3", "p^2/u + w(x)*u", "0*p", "-u"}) {
        ComplexCubicODE ode = extract_cubic(parse(text, xup), cfg);
        auto report = check_linearizable_complex(ode, cfg);
        INFO(text);
        CHECK(report.verdict == Verdict::Pass);
    }
}

TEST_CASE("compatibility conditions fail off the linearizable class") {
    SamplingConfig cfg = SamplingConfig::defaults();
    for (const char* text : {"u*p", "u^2", "x*p^2 + u^3"}) {
        ComplexCubicODE ode = extract_cubic(parse(text, xup), cfg);
        auto report = check_linearizable_complex(ode, cfg);
        INFO(text);
        CHECK(report.verdict == Verdict::Fail);
        CHECK(report.max_residual() > 1e-3);
    }
}

TEST_CASE("residual reports record failing samples") {
    SamplingConfig cfg = SamplingConfig::defaults();
    ComplexCubicODE ode = extract_cubic(parse("u*p", xup), cfg);
    auto report = check_linearizable_complex(ode, cfg);
    bool any = false;
    for (const auto& c : report.conditions) any = any || !c.failed_samples.empty();
    CHECK(any);
}

TEST_CASE("auxiliary pair for the log-scaling family") {
    // For u u'' = u'^2 + w(x) u^2 the pair k = 0, K = -1/(x - c) satisfies
    // the first-order auxiliary system under the W = K reading.
    SamplingConfig cfg = SamplingConfig::defaults();
    Box xb;
    xb.re_min = 0.6;
    xb.re_max = 2.1;
    xb.real_only = true;
    cfg.box["x"] = xb;
    ComplexCubicODE ode = extract_cubic(parse("p^2/u + w(x)*u", xup), cfg);
    Expression k = parse("0*x", xu);
    Expression K = parse("-1/(x - 1/2)", xu);

    auto pass = check_auxiliary(ode, k, K, cfg, AuxiliaryInterp::W_means_K);
    CHECK(pass.verdict == Verdict::Pass);

    // this family has C = 0, so the two readings of the undefined symbol W
    // coincide on it
    auto alt = check_auxiliary(ode, k, K, cfg, AuxiliaryInterp::W_means_k);
    CHECK(alt.verdict == Verdict::Pass);

    // a wrong K breaks the system
    auto wrong = check_auxiliary(ode, k, parse("1/(x - 1/2)", xu), cfg,
                                 AuxiliaryInterp::W_means_K);
    CHECK(wrong.verdict == Verdict::Fail);
}

TEST_CASE("the two readings of W differ when C is nonzero") {
    SamplingConfig cfg = SamplingConfig::defaults();
    ComplexCubicODE ode = extract_cubic(parse("-3*u*p - u^3", xup), cfg);
    Expression k = parse("x", xu);
    Expression K = parse("u", xu);
    auto rk = auxiliary_residuals(ode, k, K, AuxiliaryInterp::W_means_k);
    auto rK = auxiliary_residuals(ode, k, K, AuxiliaryInterp::W_means_K);
    auto rep_k = evaluate_conditions({rk[2]}, {"x", "u"}, cfg);
    auto rep_K = evaluate_conditions({rK[2]}, {"x", "u"}, cfg);
    CHECK(rep_k.max_residual() != rep_K.max_residual());
}
