#include <catch2/catch_amalgamated.hpp>

#include "clsym/realify.hpp"

using namespace clsym;

namespace {

const std::set<std::string> xup = {"x", "u", "p"};
const std::set<std::string> xu = {"x", "u"};

}  // namespace

TEST_CASE("real and imaginary components of complex coefficients") {
    // B = 1/u at u = 1 + i: 1/(1+i) = (1 - i)/2
    RealFunc3 b1 = RealFunc3::from_complex(parse("1/u", xu), Part::Re);
    RealFunc3 b2 = RealFunc3::from_complex(parse("1/u", xu), Part::Im);
    CHECK(std::abs(b1.eval(1.0, 1.0, 1.0) - 0.5) < 1e-15);
    CHECK(std::abs(b2.eval(1.0, 1.0, 1.0) + 0.5) < 1e-15);

    // a purely imaginary coefficient
    RealFunc3 a1 = RealFunc3::from_complex(parse("i + 0*u", xu), Part::Re);
    RealFunc3 a2 = RealFunc3::from_complex(parse("i + 0*u", xu), Part::Im);
    CHECK(a1.eval(0.3, 0.7, -0.2) == 0.0);
    CHECK(a2.eval(0.3, 0.7, -0.2) == 1.0);
}

TEST_CASE("closure derivatives follow the unscaled split operator") {
    // for F(u): d/dy -> Re/Im of F_u and d/dz -> Re/Im of i F_u
    Expression F = parse("u^2", xu);
    RealFunc3 f1 = RealFunc3::from_complex(F, Part::Re);  // y^2 - z^2
    CHECK(std::abs(f1.d('y').eval(0.0, 1.5, 0.5) - 3.0) < 1e-15);
    CHECK(std::abs(f1.d('z').eval(0.0, 1.5, 0.5) + 1.0) < 1e-15);
    RealFunc3 f2 = RealFunc3::from_complex(F, Part::Im);  // 2 y z
    CHECK(std::abs(f2.d('y').eval(0.0, 1.5, 0.5) - 1.0) < 1e-15);
    CHECK(std::abs(f2.d('z').eval(0.0, 1.5, 0.5) - 3.0) < 1e-15);
}

TEST_CASE("realified system reproduces the cubic decay equation") {
    // u'' = -3 u u' - u^3 splits into the pair with
    //   y'' = -3(y y' - z z') - (y^3 - 3 y z^2)
    //   z'' = -3(z y' + y z') - (3 y^2 z - z^3)
    ComplexCubicODE ode;
    ode.A = parse("0*u", xu);
    ode.B = parse("0*u", xu);
    ode.C = parse("-3*u", xu);
    ode.D = parse("-u^3", xu);
    RealCubicSystem sys = realify_system(ode);
    double x = 0.4, y = 1.1, z = -0.6, dy = 0.3, dz = 0.8;
    auto [ypp, zpp] = sys.rhs(x, y, z, dy, dz);
    double ey = -3 * (y * dy - z * dz) - (y * y * y - 3 * y * z * z);
    double ez = -3 * (z * dy + y * dz) - (3 * y * y * z - z * z * z);
    CHECK(std::abs(ypp - ey) < 1e-13);
    CHECK(std::abs(zpp - ez) < 1e-13);
}

TEST_CASE("realified system matches the complex right-hand side everywhere") {
    SamplingConfig cfg = SamplingConfig::defaults();
    for (const char* text : {"-3*u*p - u^3", "p^2/u + u", "x*p^3 - u*p^2 + p - u^2"}) {
        ComplexCubicODE ode = extract_cubic(parse(text, xup), cfg);
        RealCubicSystem sys = realify_system(ode);
        Expression w = parse(text, xup);
        Sampler s(cfg.seed);
        for (int k = 0; k < 32; ++k) {
            double x = s.uniform(0.1, 2.1);
            double y = s.uniform(0.3, 1.8), z = s.uniform(0.3, 1.8);
            double dy = s.uniform(-1, 1), dz = s.uniform(-1, 1);
            Bindings b;
            b.values["x"] = {x, 0};
            b.values["u"] = {y, z};
            b.values["p"] = {dy, dz};
            Complex wv = eval_complex(w, b);
            auto [ypp, zpp] = sys.rhs(x, y, z, dy, dz);
            INFO(text);
            CHECK(std::abs(ypp - wv.real()) < 1e-10 * (1 + std::abs(wv)));
            CHECK(std::abs(zpp - wv.imag()) < 1e-10 * (1 + std::abs(wv)));
        }
    }
}

TEST_CASE("derived real conditions match the split complex residuals") {
    SamplingConfig cfg = SamplingConfig::defaults();
    for (const char* text : {"-3*u*p - u^3", "u*p", "p^2/u + u"}) {
        ComplexCubicODE ode = extract_cubic(parse(text, xup), cfg);
        auto derived = real_residuals_derived(ode);
        LieResiduals complex_res = lie_residuals_complex(ode);
        Sampler s(7);
        for (int k = 0; k < 16; ++k) {
            double x = s.uniform(0.2, 2.0), y = s.uniform(0.3, 1.5), z = s.uniform(0.3, 1.5);
            auto raw = derived.raw(x, y, z);
            Bindings b;
            b.values["x"] = {x, 0};
            b.values["u"] = {y, z};
            Complex r1{0, 0}, r2{0, 0};
            for (const auto& t : complex_res.R1.terms) r1 += eval_complex(t, b);
            for (const auto& t : complex_res.R2.terms) r2 += eval_complex(t, b);
            CHECK(std::abs(raw[0] - r1.real()) < 1e-12);
            CHECK(std::abs(raw[1] - r1.imag()) < 1e-12);
            CHECK(std::abs(raw[2] - r2.real()) < 1e-12);
            CHECK(std::abs(raw[3] - r2.imag()) < 1e-12);
        }
    }
}

TEST_CASE("derived real conditions decide linearizability") {
    SamplingConfig cfg = SamplingConfig::defaults();
    ComplexCubicODE good = extract_cubic(parse("-3*u*p - u^3", xup), cfg);
    CHECK(check_linearizable_real_derived(good, cfg).verdict == Verdict::Pass);
    ComplexCubicODE bad = extract_cubic(parse("u*p", xup), cfg);
    CHECK(check_linearizable_real_derived(bad, cfg).verdict == Verdict::Fail);
}

TEST_CASE("printed conditions vanish on the parabolic split and catch a perturbation") {
    // the split of u'' = 1 + (u' - x)^2 has coefficients B = 1, C = -2x,
    // D = 1 + x^2; every term of the printed conditions vanishes on it
    auto coeff = [](const char* text) {
        return RealFunc3::from_symbolic(parse(text, {"x", "y", "z"}));
    };
    RealCubicSystem sys;
    sys.coeff = {coeff("0"), coeff("0"), coeff("1"),       coeff("0"),
                 coeff("-2*x"), coeff("0"), coeff("1 + x^2"), coeff("0")};
    const auto& printed = real_residuals_printed();
    Sampler s(11);
    double worst = 0, worst_bad = 0;

    RealCubicSystem bad = sys;
    bad.coeff[4] = coeff("y");  // C1 = y breaks the conditions
    for (int k = 0; k < 16; ++k) {
        double x = s.uniform(0.2, 2.0), y = s.uniform(0.3, 1.5), z = s.uniform(0.3, 1.5);
        for (int eq = 0; eq < 4; ++eq) {
            worst = std::max(worst, real_condition_residual(printed[eq], sys, x, y, z));
            worst_bad = std::max(worst_bad, real_condition_residual(printed[eq], bad, x, y, z));
        }
    }
    CHECK(worst < 1e-12);
    CHECK(worst_bad > 1e-3);
}

TEST_CASE("printed last pair deviates even after the typo corrections") {
    // the printed third and fourth real conditions scale their terms
    // inconsistently, e.g. the third evaluates to a nonzero multiple of y on
    // the cubic decay equation
    SamplingConfig cfg = SamplingConfig::defaults();
    ComplexCubicODE ode = extract_cubic(parse("-3*u*p - u^3", xup), cfg);
    RealCubicSystem sys = realify_system(ode);
    const auto& corrected = real_residuals_corrected();
    double raw2 = 0;
    real_condition_residual(corrected[2], sys, 1.0, 1.0, 0.5, {}, &raw2);
    CHECK(std::abs(raw2) > 1.0);  // derived value is exactly zero
}

TEST_CASE("cross-check surfaces the printed typos") {
    SamplingConfig cfg = SamplingConfig::defaults();
    ComplexCubicODE ode = extract_cubic(parse("-3*u*p - u^3", xup), cfg);
    auto audit = cross_check_conditions(ode, cfg);

    // the three printed sign/index slips: an x-derivative of C in the second
    // equation, a z-derivative of D in the third, a sign on C2 C2_z in the
    // fourth
    bool c_slip = false, d_slip = false, sign_slip = false;
    for (const auto& m : audit.mismatches) {
        if (m.equation == 40 && m.printed.find("C") != std::string::npos &&
            m.printed.find("_x") != std::string::npos)
            c_slip = true;
        if (m.equation == 41 && m.printed.find("D2_z") != std::string::npos) d_slip = true;
        if (m.equation == 42 && m.printed.find("C2*C2_z") != std::string::npos) sign_slip = true;
    }
    CHECK(c_slip);
    CHECK(d_slip);
    CHECK(sign_slip);

    // on an equation exercising every coefficient, the printed conditions
    // deviate in value from the derived split: their terms carrying
    // u-derivatives are scaled by the unscaled split operator
    ComplexCubicODE rich = extract_cubic(parse("u*p^3 + x*u*p + u^2", xup), cfg);
    auto audit2 = cross_check_conditions(rich, cfg);
    for (int eq = 0; eq < 4; ++eq) {
        INFO("condition " << 39 + eq);
        CHECK(audit2.max_deviation[eq] > 1e-6);
    }
}
