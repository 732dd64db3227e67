#pragma once

// Complex-side linearizability analysis for u'' = w(x, u, u'). The first
// derivative is carried as the symbol "p". Identity-to-zero questions are
// decided by seeded numeric sampling, never by symbolic simplification.

#include <string>
#include <vector>

#include "clsym/expr.hpp"
#include "clsym/report.hpp"
#include "clsym/sampling.hpp"

namespace clsym {

// the four coefficients of u'' = A u'^3 + B u'^2 + C u' + D
struct ComplexCubicODE {
    Expression A, B, C, D;

    Expression rhs() const {
        Expression p = var("p");
        return add(add(mul(A, pow(p, num(3))), mul(B, pow(p, num(2)))), add(mul(C, p), D));
    }
};

// on-shell total derivative along u'' = w:  d/dx = d_x + p d_u + w d_p
inline Expression total_derivative(const Expression& e, const Expression& w) {
    return add(add(diff(e, "x"), mul(var("p"), diff(e, "u"))), mul(w, diff(e, "p")));
}

// The two relative invariants whose identical vanishing characterizes
// linearizability. Returned as named term sums so residuals normalize
// term-by-term.
struct TresseInvariants {
    TermSum I1, I2;
};

inline TresseInvariants tresse_invariants(const Expression& w) {
    TresseInvariants out;
    Expression wp = diff(w, "p");
    Expression wpp = diff(wp, "p");
    Expression wpu = diff(wp, "u");
    Expression wu = diff(w, "u");
    Expression wuu = diff(wu, "u");

    out.I1.name = "I1";
    out.I1.terms = {diff(diff(wpp, "p"), "p")};

    out.I2.name = "I2";
    Expression dx_wpp = total_derivative(wpp, w);
    out.I2.terms = {
        total_derivative(dx_wpp, w),              // d^2/dx^2 w_pp
        neg(mul(num(4), total_derivative(wpu, w))),  // -4 d/dx w_pu
        neg(mul(num(3), mul(wu, wpp))),           // -3 w_u w_pp
        mul(num(6), wuu),                         // +6 w_uu
        mul(num(4), mul(wp, wpu)),                // +4 w_p w_pu
        neg(mul(wp, dx_wpp)),                     // -w_p d/dx w_pp
    };
    return out;
}

namespace detail {

inline std::set<std::string> bound_symbols(std::initializer_list<Expression> exprs,
                                           std::initializer_list<const char*> always) {
    std::set<std::string> symbols(always.begin(), always.end());
    for (const auto& e : exprs)
        for (const auto& v : free_variables(e)) symbols.insert(v);
    symbols.erase("t");  // formal parameter of ufunc instantiations
    return symbols;
}

// run a condition set against every ufunc instantiation; pass only if all
// instantiations pass
inline ResidualReport evaluate_with_instantiations(const std::vector<TermSum>& conditions,
                                                   const std::set<std::string>& symbols,
                                                   const std::set<std::string>& ufunc_names,
                                                   const SamplingConfig& cfg) {
    if (ufunc_names.empty()) return evaluate_conditions(conditions, symbols, cfg);
    std::vector<ResidualReport> reports;
    for (const auto& inst : cfg.ufunc_instantiations) {
        Bindings base;
        for (const auto& name : ufunc_names) base.ufuncs[name] = inst;
        reports.push_back(evaluate_conditions(conditions, symbols, cfg, base));
    }
    return merge_worst(reports);
}

}  // namespace detail

// Verifies cubicity in p numerically (I1 == 0 on the sample set), then reads
// the coefficients off as Taylor coefficients at p = 0.
inline ComplexCubicODE extract_cubic(const Expression& w,
                                     const SamplingConfig& cfg = SamplingConfig::defaults()) {
    auto inv = tresse_invariants(w);
    auto symbols = detail::bound_symbols({w}, {"x", "u", "p"});
    auto report =
        detail::evaluate_with_instantiations({inv.I1}, symbols, ufunc_symbols(w), cfg);
    if (!report.passed()) {
        std::string witness = "<none>";
        for (const auto& c : report.conditions)
            if (!c.failed_samples.empty()) {
                witness.clear();
                for (const auto& [k, v] : c.failed_samples.front())
                    witness += k + "=(" + detail::format_double(v.real()) + "," +
                               detail::format_double(v.imag()) + ") ";
            }
        throw NotCubic(report.max_residual(), witness);
    }

    auto at_p0 = [](const Expression& e) { return simplify_basic(substitute(e, "p", num(0))); };
    ComplexCubicODE ode;
    Expression wp = diff(w, "p");
    Expression wpp = diff(wp, "p");
    Expression wppp = diff(wpp, "p");
    ode.D = at_p0(w);
    ode.C = at_p0(wp);
    ode.B = at_p0(mul(num(0.5), wpp));
    ode.A = at_p0(div(wppp, num(6)));
    return ode;
}

// Lie compatibility conditions on the cubic coefficients, assembled
// term-by-term.
struct LieResiduals {
    TermSum R1, R2;
};

// the dependent variable defaults to "u"; realified coefficient tables over
// (x, y, z) reuse the same terms with the u-derivative taken along y
inline LieResiduals lie_residuals_complex(const ComplexCubicODE& ode,
                                          const std::string& uvar = "u") {
    const Expression &A = ode.A, &B = ode.B, &C = ode.C, &D = ode.D;
    auto dx = [](const Expression& e) { return diff(e, "x"); };
    auto du = [&uvar](const Expression& e) { return diff(e, uvar); };

    LieResiduals out;
    out.R1.name = "R1";
    out.R1.terms = {
        mul(num(3), dx(dx(A))),        // 3 A_xx
        mul(num(3), mul(dx(A), C)),    // 3 A_x C
        mul(num(3), mul(A, dx(C))),    // 3 A C_x
        neg(mul(num(3), mul(du(A), D))),  // -3 A_u D
        du(du(C)),                     // C_uu
        neg(mul(num(6), mul(A, du(D)))),  // -6 A D_u
        mul(B, du(C)),                 // B C_u
        neg(mul(num(2), mul(B, dx(B)))),  // -2 B B_x
        neg(mul(num(2), du(dx(B)))),   // -2 B_xu
    };
    out.R2.name = "R2";
    out.R2.terms = {
        mul(num(6), mul(dx(A), D)),    // 6 A_x D
        neg(mul(num(3), mul(du(B), D))),  // -3 B_u D
        mul(num(3), mul(A, dx(D))),    // 3 A D_x
        dx(dx(B)),                     // B_xx
        neg(mul(num(2), du(dx(C)))),   // -2 C_xu
        neg(mul(num(3), mul(B, du(D)))),  // -3 B D_u
        mul(num(3), du(du(D))),        // 3 D_uu
        mul(num(2), mul(C, du(C))),    // 2 C C_u
        neg(mul(C, dx(B))),            // -C B_x
    };
    return out;
}

inline ResidualReport check_linearizable_complex(const ComplexCubicODE& ode,
                                                 const SamplingConfig& cfg) {
    auto res = lie_residuals_complex(ode);
    auto symbols = detail::bound_symbols({ode.A, ode.B, ode.C, ode.D}, {"x", "u"});
    std::set<std::string> ufs;
    for (const auto& e : {ode.A, ode.B, ode.C, ode.D})
        for (const auto& f : ufunc_symbols(e)) ufs.insert(f);
    return detail::evaluate_with_instantiations({res.R1, res.R2}, symbols, ufs, cfg);
}

// The auxiliary first-order system on (k, K). Its printed third relation
// contains an undefined symbol W; both plausible readings are kept.
enum class AuxiliaryInterp { W_means_K, W_means_k };

inline std::vector<TermSum> auxiliary_residuals(const ComplexCubicODE& ode, const Expression& k,
                                                const Expression& K,
                                                AuxiliaryInterp interp = AuxiliaryInterp::W_means_K) {
    const Expression &A = ode.A, &B = ode.B, &C = ode.C, &D = ode.D;
    auto dx = [](const Expression& e) { return diff(e, "x"); };
    auto du = [](const Expression& e) { return diff(e, "u"); };
    Expression W = (interp == AuxiliaryInterp::W_means_K) ? K : k;

    std::vector<TermSum> out(4);
    out[0].name = "aux_k_x";
    out[0].terms = {dx(k), neg(mul(k, K)), mul(A, D), neg(div(du(C), num(3))),
                    mul(div(num(2), num(3)), dx(B))};
    out[1].name = "aux_k_u";
    out[1].terms = {du(k), pow(k, num(2)), mul(B, k), mul(A, K), dx(A), mul(A, C)};
    out[2].name = "aux_K_x";
    out[2].terms = {dx(K),     neg(pow(K, num(2))), neg(mul(D, k)), neg(mul(C, W)),
                    du(D),     neg(mul(B, D))};
    out[3].name = "aux_K_u";
    out[3].terms = {du(K), mul(K, k), neg(mul(A, D)), neg(div(dx(B), num(3))),
                    mul(div(num(2), num(3)), du(C))};
    return out;
}

inline ResidualReport check_auxiliary(const ComplexCubicODE& ode, const Expression& k,
                                      const Expression& K, const SamplingConfig& cfg,
                                      AuxiliaryInterp interp = AuxiliaryInterp::W_means_K) {
    auto conds = auxiliary_residuals(ode, k, K, interp);
    auto symbols = detail::bound_symbols({ode.A, ode.B, ode.C, ode.D, k, K}, {"x", "u"});
    std::set<std::string> ufs;
    for (const auto& e : {ode.A, ode.B, ode.C, ode.D, k, K})
        for (const auto& f : ufunc_symbols(e)) ufs.insert(f);
    return detail::evaluate_with_instantiations(conds, symbols, ufs, cfg);
}

}  // namespace clsym
