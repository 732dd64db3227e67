#include <catch2/catch_amalgamated.hpp>

#include "clsym/symmetry.hpp"

using namespace clsym;

namespace {

const std::set<std::string> xup = {"x", "u", "p"};
const std::set<std::string> xu = {"x", "u"};

VectorField2 field(const char* xi, const char* eta) {
    return {parse(xi, xu), parse(eta, xu)};
}

bool fields_agree(const VectorField2& F, const VectorField2& G) {
    Sampler s(5);
    for (int k = 0; k < 16; ++k) {
        Bindings b;
        b.values["x"] = {s.uniform(0.2, 2.0), s.uniform(-0.5, 0.5)};
        b.values["u"] = {s.uniform(0.2, 2.0), s.uniform(-0.5, 0.5)};
        if (std::abs(eval_complex(F.xi, b) - eval_complex(G.xi, b)) > 1e-12) return false;
        if (std::abs(eval_complex(F.eta, b) - eval_complex(G.eta, b)) > 1e-12) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("second prolongation on a known generator") {
    // for Z = x d/dx + u d/du on any w: eta1 = 0 and eta2 = -w... checked
    // numerically through the invariance residual on the scaling-invariant
    // equation u'' = u^3 (not a symmetry) vs u'' = p^2/u (a symmetry)
    SamplingConfig cfg = SamplingConfig::defaults();
    VectorField2 scaling = field("x", "u");
    CHECK(symmetry_residual(parse("p^2/u", xup), scaling, cfg).verdict == Verdict::Pass);
    CHECK(symmetry_residual(parse("u^3", xup), scaling, cfg).verdict == Verdict::Fail);
}

TEST_CASE("generators of the worked families are symmetries") {
    SamplingConfig cfg = SamplingConfig::defaults();
    struct Case {
        const char* w;
        const char* xi;
        const char* eta;
    } cases[] = {
        {"p^2/u + w(x)*u", "0", "x*u"},
        {"p^2/u + w(x)*u", "0", "u"},
        {"-3*u*p - u^3", "1", "0"},
        {"-3*u*p - u^3", "x", "-u"},
        {"1 + (p - x)^2*w(2*u - x^2)", "1", "x"},
        {"1 + (p - x)^2*w(2*u - x^2)", "x", "x^2"},
    };
    for (const auto& c : cases) {
        auto report = symmetry_residual(parse(c.w, xup), field(c.xi, c.eta), cfg);
        INFO(c.w << " with (" << c.xi << ", " << c.eta << ")");
        CHECK(report.verdict == Verdict::Pass);
        CHECK(report.max_residual() <= 1e-8);
    }
}

TEST_CASE("near-miss generators are rejected") {
    SamplingConfig cfg = SamplingConfig::defaults();
    auto report = symmetry_residual(parse("-3*u*p - u^3", xup), field("x", "u"), cfg);
    CHECK(report.verdict == Verdict::Fail);
}

TEST_CASE("commutators") {
    SamplingConfig cfg = SamplingConfig::defaults();
    // [d/dx, x d/dx - u d/du] = d/dx
    VectorField2 lhs = commutator(field("1", "0"), field("x", "-u"));
    CHECK(fields_agree(lhs, field("1", "0")));
    // [x u d/du, u d/du] = 0
    VectorField2 zero = commutator(field("0", "x*u"), field("0", "u"));
    CHECK(fields_agree(zero, field("0", "0")));
}

TEST_CASE("commutator is antisymmetric and satisfies the Jacobi identity") {
    VectorField2 A = field("x", "u"), B = field("1", "x*u"), C = field("u", "x");
    VectorField2 ab = commutator(A, B), ba = commutator(B, A);
    CHECK(fields_agree(ab, {neg(ba.xi), neg(ba.eta)}));
    VectorField2 j1 = commutator(A, commutator(B, C));
    VectorField2 j2 = commutator(B, commutator(C, A));
    VectorField2 j3 = commutator(C, commutator(A, B));
    VectorField2 sum{add(add(j1.xi, j2.xi), j3.xi), add(add(j1.eta, j2.eta), j3.eta)};
    CHECK(fields_agree(sum, field("0", "0")));
}

TEST_CASE("proportionality detection") {
    SamplingConfig cfg = SamplingConfig::defaults();
    auto prop = proportionality(field("0", "x*u"), field("0", "u"), cfg);
    CHECK(prop.proportional);
    CHECK_FALSE(prop.rho_constant);  // rho = x

    auto scaled = proportionality(field("2*x", "2*u"), field("x", "u"), cfg);
    CHECK(scaled.proportional);
    CHECK(scaled.rho_constant);

    auto indep = proportionality(field("1", "0"), field("x", "-u"), cfg);
    CHECK_FALSE(indep.proportional);
}

TEST_CASE("pair classification of the worked families") {
    SamplingConfig cfg = SamplingConfig::defaults();
    // commuting + proportional with nonconstant ratio
    auto a = classify_pair(parse("p^2/u + w(x)*u", xup), field("0", "x*u"), field("0", "u"), cfg);
    CHECK(a.case_ == PairCase::T1_6);
    // bracket equal to the first generator + independent
    auto b = classify_pair(parse("-3*u*p - u^3", xup), field("1", "0"), field("x", "-u"), cfg);
    CHECK(b.case_ == PairCase::T1_9);
    // bracket equal to the first generator + proportional (rho = 1/x)
    auto c = classify_pair(parse("1 + (p - x)^2*w(2*u - x^2)", xup), field("1", "x"),
                           field("x", "x^2"), cfg);
    CHECK(c.case_ == PairCase::T1_7);
    // commuting + independent
    auto d = classify_pair(parse("0*p", xup), field("1", "0"), field("0", "1"), cfg);
    CHECK(d.case_ == PairCase::T1_8);
}

TEST_CASE("classification requires genuine symmetries") {
    SamplingConfig cfg = SamplingConfig::defaults();
    CHECK_THROWS_AS(classify_pair(parse("-3*u*p - u^3", xup), field("x", "u"), field("1", "0"), cfg),
                    NotSymmetry);
}

TEST_CASE("vector field realification conventions") {
    // Z = i u d/du: xi = 0, eta = iu = -z + iy
    VectorField2 Z = field("0", "i*u");
    auto [X, Y] = realify_vectorfield(Z, SplitConvention::FullWeight);
    double x = 0.3, y = 1.2, z = -0.7;
    CHECK(X.tau.eval(x, y, z) == 0.0);
    CHECK(std::abs(X.phi.eval(x, y, z) - (-z)) < 1e-15);  // eta1 = -z
    CHECK(std::abs(X.psi.eval(x, y, z) - y) < 1e-15);     // eta2 = y
    CHECK(std::abs(Y.phi.eval(x, y, z) - y) < 1e-15);     // eta2
    CHECK(std::abs(Y.psi.eval(x, y, z) - z) < 1e-15);     // -eta1

    auto [Xh, Yh] = realify_vectorfield(Z, SplitConvention::HalfWeight);
    CHECK(std::abs(Xh.phi.eval(x, y, z) - 0.5 * (-z)) < 1e-15);
    CHECK(std::abs(Yh.psi.eval(x, y, z) - 0.5 * z) < 1e-15);
}

TEST_CASE("real parts of commuting complex fields satisfy the combo relations") {
    SamplingConfig cfg = SamplingConfig::defaults();
    VectorField2 Z1 = field("0", "x*u"), Z2 = field("0", "u");  // commuting pair
    auto [X1, Y1] = realify_vectorfield(Z1);
    auto [X2, Y2] = realify_vectorfield(Z2);
    auto rc = real_commutation_checks(X1, Y1, X2, Y2, cfg);
    CHECK(rc.both_vanish);

    // a non-commuting pair breaks them
    VectorField2 W1 = field("1", "0"), W2 = field("x", "-u");
    auto [XW1, YW1] = realify_vectorfield(W1);
    auto [XW2, YW2] = realify_vectorfield(W2);
    auto rc2 = real_commutation_checks(XW1, YW1, XW2, YW2, cfg);
    CHECK_FALSE(rc2.both_vanish);
}

TEST_CASE("proportional pairs satisfy the real linear relations") {
    SamplingConfig cfg = SamplingConfig::defaults();
    VectorField2 Z1 = field("0", "x*u"), Z2 = field("0", "u");
    auto prop = proportionality(Z1, Z2, cfg);
    REQUIRE(prop.proportional);
    auto [X1, Y1] = realify_vectorfield(Z1);
    auto [X2, Y2] = realify_vectorfield(Z2);
    // rho = x at real sample points
    std::vector<std::pair<std::array<double, 3>, Complex>> rho_at;
    for (double x : {0.4, 1.0, 1.7})
        rho_at.push_back({{x, 0.9, -0.3}, Complex(x, 0)});
    auto rc = real_commutation_checks(X1, Y1, X2, Y2, cfg, &rho_at);
    CHECK(rc.linear_relations_hold);
}
