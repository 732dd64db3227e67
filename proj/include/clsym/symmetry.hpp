#pragma once

// Verification of candidate Lie point symmetries by second prolongation,
// commutators, proportionality, classification of symmetry pairs, and the
// split of complex generators into real pairs.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "clsym/cubic.hpp"
#include "clsym/expr.hpp"
#include "clsym/realify.hpp"
#include "clsym/report.hpp"

namespace clsym {

// generator xi d/dx + eta d/du with complex coefficient functions of (x, u)
struct VectorField2 {
    Expression xi, eta;

    Expression apply(const Expression& f) const {
        return add(mul(xi, diff(f, "x")), mul(eta, diff(f, "u")));
    }
};

// second prolongation coefficients on-shell along u'' = w
struct Prolongation2 {
    Expression eta1, eta2;
};

inline Prolongation2 prolong2(const VectorField2& Z, const Expression& w) {
    Expression dxi = total_derivative(Z.xi, w);
    Expression eta1 = sub(total_derivative(Z.eta, w), mul(var("p"), dxi));
    Expression eta2 = sub(total_derivative(eta1, w), mul(w, dxi));
    return {eta1, eta2};
}

// invariance condition of u'' = w under the twice-prolonged field:
//   xi w_x + eta w_u + eta1 w_p - eta2 = 0 on-shell
inline TermSum symmetry_condition(const Expression& w, const VectorField2& Z) {
    auto pr = prolong2(Z, w);
    TermSum cond;
    cond.name = "symmetry";
    cond.terms = {mul(Z.xi, diff(w, "x")), mul(Z.eta, diff(w, "u")), mul(pr.eta1, diff(w, "p")),
                  neg(pr.eta2)};
    return cond;
}

inline ResidualReport symmetry_residual(const Expression& w, const VectorField2& Z,
                                        const SamplingConfig& cfg) {
    auto cond = symmetry_condition(w, Z);
    auto symbols = detail::bound_symbols({w, Z.xi, Z.eta}, {"x", "u", "p"});
    std::set<std::string> ufs = ufunc_symbols(w);
    for (const auto& e : {Z.xi, Z.eta})
        for (const auto& f : ufunc_symbols(e)) ufs.insert(f);
    return detail::evaluate_with_instantiations({cond}, symbols, ufs, cfg);
}

inline VectorField2 commutator(const VectorField2& Z1, const VectorField2& Z2) {
    return {sub(Z1.apply(Z2.xi), Z2.apply(Z1.xi)), sub(Z1.apply(Z2.eta), Z2.apply(Z1.eta))};
}

struct ProportionalityResult {
    bool proportional = false;
    bool rho_constant = false;
    std::vector<Complex> rho_samples;
};

// Z1 = rho * Z2 tested by the vanishing of the cross product xi1*eta2 -
// xi2*eta1; rho estimated from the larger component of Z2 at each sample.
inline ProportionalityResult proportionality(const VectorField2& Z1, const VectorField2& Z2,
                                             const SamplingConfig& cfg) {
    auto symbols = detail::bound_symbols({Z1.xi, Z1.eta, Z2.xi, Z2.eta}, {"x", "u"});
    Sampler sampler(cfg.seed);
    ProportionalityResult out;
    out.proportional = true;
    int degenerate = 0;
    for (int i = 0; i < cfg.points; ++i) {
        Bindings b;
        for (const auto& [k, v] : sampler.draw_point(cfg, symbols)) b.values[k] = v;
        try {
            Complex xi1 = eval_complex(Z1.xi, b), eta1 = eval_complex(Z1.eta, b);
            Complex xi2 = eval_complex(Z2.xi, b), eta2 = eval_complex(Z2.eta, b);
            double denom = 1 + std::abs(xi1 * eta2) + std::abs(xi2 * eta1);
            if (std::abs(xi1 * eta2 - xi2 * eta1) / denom > cfg.tolerance)
                out.proportional = false;
            if (std::abs(xi2) < 1e-12 && std::abs(eta2) < 1e-12) {
                ++degenerate;
                continue;
            }
            out.rho_samples.push_back(std::abs(xi2) >= std::abs(eta2) ? xi1 / xi2 : eta1 / eta2);
        } catch (const DomainError&) {
        } catch (const NonFinite&) {
        }
    }
    if (degenerate == cfg.points || out.rho_samples.empty())
        throw Degenerate("Z2 vanishes identically on the sample set");
    Complex mean{0, 0};
    for (const auto& r : out.rho_samples) mean += r;
    mean /= static_cast<double>(out.rho_samples.size());
    double variance = 0;
    for (const auto& r : out.rho_samples) variance += std::norm(r - mean);
    variance /= static_cast<double>(out.rho_samples.size());
    out.rho_constant = variance <= cfg.tolerance;
    return out;
}

enum class PairCase { T1_6, T1_7, T1_8, T1_9, Unclassified };

inline const char* to_string(PairCase c) {
    switch (c) {
        case PairCase::T1_6:
            return "T1_6";
        case PairCase::T1_7:
            return "T1_7";
        case PairCase::T1_8:
            return "T1_8";
        case PairCase::T1_9:
            return "T1_9";
        default:
            return "unclassified";
    }
}

struct PairClassification {
    bool commutes = false;
    bool bracket_equals_Z1 = false;
    bool proportional = false;
    bool rho_constant = false;
    PairCase case_ = PairCase::Unclassified;
};

namespace detail {

inline bool field_vanishes(const VectorField2& Z, const SamplingConfig& cfg) {
    TermSum cx{"xi", {Z.xi}}, cu{"eta", {Z.eta}};
    auto symbols = bound_symbols({Z.xi, Z.eta}, {"x", "u"});
    return evaluate_conditions({cx, cu}, symbols, cfg).passed();
}

}  // namespace detail

// Classifies the pair as given; no basis change is attempted.
inline PairClassification classify_pair(const Expression& w, const VectorField2& Z1,
                                        const VectorField2& Z2, const SamplingConfig& cfg) {
    if (!symmetry_residual(w, Z1, cfg).passed() || !symmetry_residual(w, Z2, cfg).passed())
        throw NotSymmetry("candidate field is not a symmetry of the equation");

    PairClassification out;
    VectorField2 bracket = commutator(Z1, Z2);
    out.commutes = detail::field_vanishes(bracket, cfg);
    VectorField2 diff_field{sub(bracket.xi, Z1.xi), sub(bracket.eta, Z1.eta)};
    out.bracket_equals_Z1 = detail::field_vanishes(diff_field, cfg);
    auto prop = proportionality(Z1, Z2, cfg);
    out.proportional = prop.proportional;
    out.rho_constant = prop.rho_constant;

    if (out.commutes && out.proportional && !out.rho_constant)
        out.case_ = PairCase::T1_6;
    else if (out.bracket_equals_Z1 && out.proportional && !out.rho_constant)
        out.case_ = PairCase::T1_7;
    else if (out.commutes && !out.proportional)
        out.case_ = PairCase::T1_8;
    else if (out.bracket_equals_Z1 && !out.proportional)
        out.case_ = PairCase::T1_9;
    return out;
}

// ---- real split ------------------------------------------------------------

// real generator tau d/dx + phi d/dy + psi d/dz
struct VectorField3 {
    RealFunc3 tau, phi, psi;
};

enum class SplitConvention { FullWeight, HalfWeight };

// Z = X + iY: with xi = xi1 + i xi2 and eta = eta1 + i eta2 split at
// u = y + iz, the full-weight convention takes
//   X = xi1 d/dx + eta1 d/dy + eta2 d/dz,
//   Y = xi2 d/dx + eta2 d/dy - eta1 d/dz.
inline std::pair<VectorField3, VectorField3> realify_vectorfield(
    const VectorField2& Z, SplitConvention convention = SplitConvention::FullWeight) {
    double s = convention == SplitConvention::HalfWeight ? 0.5 : 1.0;
    VectorField3 X{RealFunc3::from_complex(Z.xi, Part::Re),
                   RealFunc3::from_complex(Z.eta, Part::Re).scaled(s),
                   RealFunc3::from_complex(Z.eta, Part::Im).scaled(s)};
    VectorField3 Y{RealFunc3::from_complex(Z.xi, Part::Im),
                   RealFunc3::from_complex(Z.eta, Part::Im).scaled(s),
                   RealFunc3::from_complex(Z.eta, Part::Re).scaled(-s)};
    return {X, Y};
}

// pointwise Lie bracket of 3-component fields over (x, y, z)
inline std::array<double, 3> bracket3_at(const VectorField3& F, const VectorField3& G, double x,
                                         double y, double z) {
    auto comps = [&](const VectorField3& V) {
        return std::array<const RealFunc3*, 3>{&V.tau, &V.phi, &V.psi};
    };
    auto f = comps(F), g = comps(G);
    double fv[3], gv[3];
    for (int i = 0; i < 3; ++i) {
        fv[i] = f[i]->eval(x, y, z);
        gv[i] = g[i]->eval(x, y, z);
    }
    const char vars[3] = {'x', 'y', 'z'};
    std::array<double, 3> out{};
    for (int j = 0; j < 3; ++j) {
        double acc = 0;
        for (int k = 0; k < 3; ++k) {
            acc += fv[k] * g[j]->d(vars[k]).eval(x, y, z);
            acc -= gv[k] * f[j]->d(vars[k]).eval(x, y, z);
        }
        out[j] = acc;
    }
    return out;
}

struct RealCommutationReport {
    // [X1,X2] - [Y1,Y2] and [X1,Y2] + [Y1,X2], max norm over samples
    double max_combo1 = 0;
    double max_combo2 = 0;
    bool both_vanish = false;
    // residuals of X1 = rho1 X2 - rho2 Y2 and Y1 = rho1 Y2 + rho2 X2 when
    // rho samples are supplied
    double max_linear_relation = 0;
    bool linear_relations_hold = false;
};

inline RealCommutationReport real_commutation_checks(const VectorField3& X1,
                                                     const VectorField3& Y1,
                                                     const VectorField3& X2,
                                                     const VectorField3& Y2,
                                                     const SamplingConfig& cfg,
                                                     const std::vector<std::pair<std::array<double, 3>,
                                                                                 Complex>>* rho_at =
                                                         nullptr) {
    RealCommutationReport out;
    Sampler sampler(cfg.seed);
    Box ub = cfg.box_for("u");
    for (int i = 0; i < cfg.points; ++i) {
        double x = sampler.uniform(0.1, 2.1);
        double y = sampler.uniform(ub.re_min, ub.re_max);
        double z = sampler.uniform(ub.im_min, ub.im_max);
        try {
            auto b11 = bracket3_at(X1, X2, x, y, z);
            auto b22 = bracket3_at(Y1, Y2, x, y, z);
            auto b12 = bracket3_at(X1, Y2, x, y, z);
            auto b21 = bracket3_at(Y1, X2, x, y, z);
            for (int j = 0; j < 3; ++j) {
                out.max_combo1 = std::max(out.max_combo1, std::abs(b11[j] - b22[j]));
                out.max_combo2 = std::max(out.max_combo2, std::abs(b12[j] + b21[j]));
            }
        } catch (const DomainError&) {
        } catch (const NonFinite&) {
        }
    }
    out.both_vanish = out.max_combo1 <= cfg.tolerance && out.max_combo2 <= cfg.tolerance;

    if (rho_at) {
        for (const auto& [pt, rho] : *rho_at) {
            double rho1 = rho.real(), rho2 = rho.imag();
            auto at = [&](const RealFunc3& f) { return f.eval(pt[0], pt[1], pt[2]); };
            double rx[3] = {at(X1.tau) - (rho1 * at(X2.tau) - rho2 * at(Y2.tau)),
                            at(X1.phi) - (rho1 * at(X2.phi) - rho2 * at(Y2.phi)),
                            at(X1.psi) - (rho1 * at(X2.psi) - rho2 * at(Y2.psi))};
            double ry[3] = {at(Y1.tau) - (rho1 * at(Y2.tau) + rho2 * at(X2.tau)),
                            at(Y1.phi) - (rho1 * at(Y2.phi) + rho2 * at(X2.phi)),
                            at(Y1.psi) - (rho1 * at(Y2.psi) + rho2 * at(X2.psi))};
            for (int j = 0; j < 3; ++j)
                out.max_linear_relation =
                    std::max({out.max_linear_relation, std::abs(rx[j]), std::abs(ry[j])});
        }
        out.linear_relations_hold = out.max_linear_relation <= cfg.tolerance;
    }
    return out;
}

}  // namespace clsym
