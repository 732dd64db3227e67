#pragma once

// Decomposition of a complex cubic ODE into the real system
//   y'' = A1(y'^3 - 3 y' z'^2) - A2(3 y'^2 z' - z'^3) + B1(y'^2 - z'^2)
//         - 2 B2 y' z' + C1 y' - C2 z' + D1,
//   z'' = A1(3 y'^2 z' - z'^3) + A2(y'^3 - 3 y' z'^2) + 2 B1 y' z'
//         + B2(y'^2 - z'^2) + C2 y' + C1 z' + D2,
// and the real Lie-type conditions, both as printed in the source theorem
// and as the normative Re/Im split of the complex conditions.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clsym/cubic.hpp"
#include "clsym/expr.hpp"
#include "clsym/report.hpp"

namespace clsym {

enum class Part { Re, Im };

// A real-valued function of (x, y, z), either a symbolic Expression in
// (x, y, z) or a closure: Re/Im of an analytic complex source F(x, u)
// evaluated at u = y + iz. Closure derivatives ride on the Cauchy-Riemann
// structure: d/dy = d/du and d/dz = i d/du on the analytic source.
class RealFunc3 {
  public:
    RealFunc3() : symbolic_(num(0)), is_symbolic_(true) {}

    static RealFunc3 from_symbolic(Expression e) {
        RealFunc3 f;
        f.symbolic_ = std::move(e);
        f.is_symbolic_ = true;
        return f;
    }

    static RealFunc3 from_complex(Expression source, Part part, Complex prefactor = {1, 0}) {
        RealFunc3 f;
        f.source_ = std::move(source);
        f.part_ = part;
        f.prefactor_ = prefactor;
        f.is_symbolic_ = false;
        return f;
    }

    bool is_symbolic() const { return is_symbolic_; }
    const Expression& symbolic() const { return symbolic_; }

    double eval(double x, double y, double z, const Bindings& base = {}) const {
        Bindings b = base;
        if (is_symbolic_) {
            b.values["x"] = {x, 0};
            b.values["y"] = {y, 0};
            b.values["z"] = {z, 0};
            Complex v = eval_complex(symbolic_, b);
            return v.real();
        }
        b.values["x"] = {x, 0};
        b.values["u"] = {y, z};
        Complex v = prefactor_ * eval_complex(source_, b);
        return part_ == Part::Re ? v.real() : v.imag();
    }

    RealFunc3 d(char variable) const {
        if (is_symbolic_) return from_symbolic(diff(symbolic_, std::string(1, variable)));
        switch (variable) {
            case 'x':
                return from_complex(diff(source_, "x"), part_, prefactor_);
            case 'y':
                return from_complex(diff(source_, "u"), part_, prefactor_);
            case 'z':
                return from_complex(diff(source_, "u"), part_, prefactor_ * Complex(0, 1));
            default:
                throw Error("RealFunc3: bad derivative variable");
        }
    }

    RealFunc3 scaled(double s) const {
        if (is_symbolic_) return from_symbolic(mul(num(s), symbolic_));
        return from_complex(source_, part_, prefactor_ * s);
    }

  private:
    Expression symbolic_;
    Expression source_;
    Part part_ = Part::Re;
    Complex prefactor_{1, 0};
    bool is_symbolic_ = true;
};

struct RealCubicSystem {
    // coefficient order: A1 A2 B1 B2 C1 C2 D1 D2
    std::array<RealFunc3, 8> coeff;
    std::optional<ComplexCubicODE> source;  // set when obtained by realification

    const RealFunc3& A1() const { return coeff[0]; }
    const RealFunc3& A2() const { return coeff[1]; }
    const RealFunc3& B1() const { return coeff[2]; }
    const RealFunc3& B2() const { return coeff[3]; }
    const RealFunc3& C1() const { return coeff[4]; }
    const RealFunc3& C2() const { return coeff[5]; }
    const RealFunc3& D1() const { return coeff[6]; }
    const RealFunc3& D2() const { return coeff[7]; }

    // reconstructed right-hand sides, fixed term pattern
    std::pair<double, double> rhs(double x, double y, double z, double dy, double dz,
                                  const Bindings& base = {}) const {
        double a1 = A1().eval(x, y, z, base), a2 = A2().eval(x, y, z, base);
        double b1 = B1().eval(x, y, z, base), b2 = B2().eval(x, y, z, base);
        double c1 = C1().eval(x, y, z, base), c2 = C2().eval(x, y, z, base);
        double d1 = D1().eval(x, y, z, base), d2 = D2().eval(x, y, z, base);
        double cube_re = dy * dy * dy - 3 * dy * dz * dz;
        double cube_im = 3 * dy * dy * dz - dz * dz * dz;
        double sq_re = dy * dy - dz * dz;
        double sq_im = 2 * dy * dz;
        double ypp = a1 * cube_re - a2 * cube_im + b1 * sq_re - b2 * sq_im + c1 * dy - c2 * dz + d1;
        double zpp = a1 * cube_im + a2 * cube_re + b1 * sq_im + b2 * sq_re + c2 * dy + c1 * dz + d2;
        return {ypp, zpp};
    }
};

inline RealCubicSystem realify_system(const ComplexCubicODE& ode) {
    RealCubicSystem sys;
    sys.source = ode;
    const Expression* src[4] = {&ode.A, &ode.B, &ode.C, &ode.D};
    for (int i = 0; i < 4; ++i) {
        sys.coeff[2 * i] = RealFunc3::from_complex(*src[i], Part::Re);
        sys.coeff[2 * i + 1] = RealFunc3::from_complex(*src[i], Part::Im);
    }
    return sys;
}

// ---- the real Lie-type conditions ----------------------------------------

// One product term of a real condition: coef * prod_j deriv(coeff_j, derivs_j).
// Coefficient indices follow RealCubicSystem::coeff ordering.
struct RealTerm {
    double coef;
    struct Factor {
        int coeff_index;    // 0..7
        std::string derivs;  // e.g. "xy", "" for the bare coefficient
    };
    std::vector<Factor> factors;

    std::string pattern() const {
        static const char* names[8] = {"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"};
        std::string s;
        for (const auto& f : factors) {
            if (!s.empty()) s += "*";
            s += names[f.coeff_index];
            if (!f.derivs.empty()) s += "_" + f.derivs;
        }
        return s;
    }

    double eval(const RealCubicSystem& sys, double x, double y, double z,
                const Bindings& base = {}) const {
        double v = coef;
        for (const auto& f : factors) {
            RealFunc3 g = sys.coeff[f.coeff_index];
            for (char c : f.derivs) g = g.d(c);
            v *= g.eval(x, y, z, base);
        }
        return v;
    }
};

using RealTermList = std::vector<RealTerm>;

namespace detail {

// coefficient indices
constexpr int cA1 = 0, cA2 = 1, cB1 = 2, cB2 = 3, cC1 = 4, cC2 = 5, cD1 = 6, cD2 = 7;

inline RealTerm t(double coef, std::initializer_list<RealTerm::Factor> fs) {
    RealTerm term;
    term.coef = coef;
    term.factors = fs;
    return term;
}

// Equations (39)-(42) exactly as printed, including the suspected typos in
// (40), (41) and (42); kept verbatim for audit.
inline const std::array<RealTermList, 4>& printed_real_conditions() {
    static const std::array<RealTermList, 4> eqs = {
        // Eq. (39)
        RealTermList{
            t(3, {{cA1, "xx"}}),
            t(3, {{cC1, ""}, {cA1, "x"}}),
            t(-3, {{cA2, "x"}, {cC2, ""}}),
            t(-3, {{cA1, "y"}, {cD1, ""}}),
            t(-3, {{cD1, ""}, {cA2, "z"}}),
            t(3, {{cD2, ""}, {cA2, "y"}}),
            t(-3, {{cD2, ""}, {cA1, "z"}}),
            t(3, {{cA1, ""}, {cC1, "x"}}),
            t(-3, {{cA2, ""}, {cC2, "x"}}),
            t(1, {{cC1, "yy"}}),
            t(-1, {{cC1, "zz"}}),
            t(2, {{cC2, "yz"}}),
            t(-6, {{cA1, ""}, {cD1, "y"}}),
            t(-6, {{cA1, ""}, {cD2, "z"}}),
            t(6, {{cA2, ""}, {cD2, "y"}}),
            t(-6, {{cA2, ""}, {cD1, "z"}}),
            t(1, {{cB1, ""}, {cC1, "y"}}),
            t(1, {{cB1, ""}, {cC2, "z"}}),
            t(-1, {{cB2, ""}, {cC2, "y"}}),
            t(1, {{cB2, ""}, {cC1, "z"}}),
            t(-2, {{cB1, ""}, {cB1, "x"}}),
            t(2, {{cB2, ""}, {cB2, "x"}}),
            t(-2, {{cB1, "xy"}}),
            t(-2, {{cB2, "xz"}}),
        },
        // Eq. (40)
        RealTermList{
            t(3, {{cA2, "xx"}}),
            t(3, {{cC2, ""}, {cA1, "x"}}),
            t(3, {{cA2, "x"}, {cC1, ""}}),
            t(-3, {{cD2, ""}, {cA1, "y"}}),
            t(-3, {{cD2, ""}, {cA2, "z"}}),
            t(-3, {{cD1, ""}, {cA2, "y"}}),
            t(3, {{cD1, ""}, {cA1, "z"}}),
            t(3, {{cA2, ""}, {cC1, "x"}}),
            t(-3, {{cA1, ""}, {cC1, "x"}}),  // printed; the split gives +3 A1 C2_x
            t(1, {{cC2, "yy"}}),
            t(-1, {{cC2, "zz"}}),
            t(-2, {{cC1, "yz"}}),
            t(-6, {{cA2, ""}, {cD1, "y"}}),
            t(-6, {{cA2, ""}, {cD2, "z"}}),
            t(-6, {{cA1, ""}, {cD2, "y"}}),
            t(6, {{cA1, ""}, {cD1, "z"}}),
            t(1, {{cB2, ""}, {cC1, "y"}}),
            t(1, {{cB2, ""}, {cC2, "z"}}),
            t(1, {{cB1, ""}, {cC2, "y"}}),
            t(-1, {{cB1, ""}, {cC1, "z"}}),
            t(-2, {{cB2, ""}, {cB1, "x"}}),
            t(-2, {{cB1, ""}, {cB2, "x"}}),
            t(-2, {{cB2, "xy"}}),
            t(2, {{cB1, "xz"}}),
        },
        // Eq. (41)
        RealTermList{
            t(6, {{cD1, ""}, {cA1, "x"}}),
            t(-6, {{cD2, ""}, {cA2, "x"}}),
            t(-3, {{cD1, ""}, {cB1, "y"}}),
            t(-3, {{cD1, ""}, {cB2, "z"}}),
            t(3, {{cD2, ""}, {cB2, "y"}}),
            t(-3, {{cD2, ""}, {cB1, "z"}}),
            t(3, {{cA1, ""}, {cD1, "x"}}),
            t(-3, {{cA2, ""}, {cD2, "x"}}),
            t(1, {{cB1, "xx"}}),
            t(-2, {{cC1, "xy"}}),
            t(-2, {{cC2, "xz"}}),
            t(-3, {{cB1, ""}, {cD1, "y"}}),
            t(-3, {{cB1, ""}, {cD2, "z"}}),
            t(3, {{cB2, ""}, {cD2, "z"}}),  // printed; the split gives +3 B2 D2_y
            t(-3, {{cB2, ""}, {cD1, "z"}}),
            t(3, {{cD1, "yy"}}),
            t(-3, {{cD1, "zz"}}),
            t(6, {{cD2, "yz"}}),
            t(2, {{cC1, ""}, {cC1, "y"}}),
            t(2, {{cC1, ""}, {cC2, "z"}}),
            t(-2, {{cC2, ""}, {cC2, "y"}}),
            t(2, {{cC2, ""}, {cC1, "z"}}),
            t(-1, {{cC1, ""}, {cB1, "x"}}),
            t(1, {{cC2, ""}, {cB2, "x"}}),
        },
        // Eq. (42)
        RealTermList{
            t(6, {{cD2, ""}, {cA1, "x"}}),
            t(6, {{cD1, ""}, {cA2, "x"}}),
            t(-3, {{cD2, ""}, {cB1, "y"}}),
            t(-3, {{cD2, ""}, {cB2, "z"}}),
            t(-3, {{cD1, ""}, {cB2, "y"}}),
            t(3, {{cD1, ""}, {cB1, "z"}}),
            t(3, {{cA2, ""}, {cD1, "x"}}),
            t(3, {{cA1, ""}, {cD2, "x"}}),
            t(1, {{cB2, "xx"}}),
            t(-2, {{cC2, "xy"}}),
            t(2, {{cC1, "xz"}}),
            t(-3, {{cB2, ""}, {cD1, "y"}}),
            t(-3, {{cB2, ""}, {cD2, "z"}}),
            t(-3, {{cB1, ""}, {cD2, "y"}}),
            t(3, {{cB1, ""}, {cD1, "z"}}),
            t(3, {{cD2, "yy"}}),
            t(-3, {{cD2, "zz"}}),
            t(-6, {{cD1, "yz"}}),
            t(2, {{cC2, ""}, {cC1, "y"}}),
            t(-2, {{cC2, ""}, {cC2, "z"}}),  // printed; the split gives +2 C2 C2_z
            t(2, {{cC1, ""}, {cC2, "y"}}),
            t(-2, {{cC1, ""}, {cC1, "z"}}),
            t(-1, {{cC2, ""}, {cB1, "x"}}),
            t(-1, {{cC1, ""}, {cB2, "x"}}),
        },
    };
    return eqs;
}

// The same four equations with every term obtained by splitting the complex
// conditions with the unscaled operator d_u -> (d_y - i d_z); this is the
// term pattern the printed equations evidently intend.
inline const std::array<RealTermList, 4>& corrected_real_conditions() {
    static const std::array<RealTermList, 4> eqs = [] {
        std::array<RealTermList, 4> fixed = printed_real_conditions();
        auto replace = [](RealTermList& list, const RealTerm& from, const RealTerm& to) {
            for (auto& term : list)
                if (term.pattern() == from.pattern() && term.coef == from.coef) {
                    term = to;
                    return;
                }
            throw Error("corrected_real_conditions: printed term not found");
        };
        // Eq. (40): -3 A1 C1_x  ->  +3 A1 C2_x
        replace(fixed[1], t(-3, {{cA1, ""}, {cC1, "x"}}), t(3, {{cA1, ""}, {cC2, "x"}}));
        // Eq. (41): +3 B2 D2_z  ->  +3 B2 D2_y
        replace(fixed[2], t(3, {{cB2, ""}, {cD2, "z"}}), t(3, {{cB2, ""}, {cD2, "y"}}));
        // Eq. (42): -2 C2 C2_z  ->  +2 C2 C2_z
        replace(fixed[3], t(-2, {{cC2, ""}, {cC2, "z"}}), t(2, {{cC2, ""}, {cC2, "z"}}));
        return fixed;
    }();
    return eqs;
}

}  // namespace detail

// residual of one printed/corrected condition at a point, normalized like
// TermSum residuals
inline double real_condition_residual(const RealTermList& terms, const RealCubicSystem& sys,
                                      double x, double y, double z, const Bindings& base = {},
                                      double* out_raw = nullptr) {
    double sum = 0, denom = 1;
    for (const auto& term : terms) {
        double v = term.eval(sys, x, y, z, base);
        sum += v;
        denom += std::abs(v);
    }
    if (out_raw) *out_raw = sum;
    return std::abs(sum) / denom;
}

inline const std::array<RealTermList, 4>& real_residuals_printed() {
    return detail::printed_real_conditions();
}

inline const std::array<RealTermList, 4>& real_residuals_corrected() {
    return detail::corrected_real_conditions();
}

// The normative real conditions: Re and Im parts of the complex Lie
// compatibility residuals evaluated at u = y + iz.
struct DerivedRealResiduals {
    TermSum R1, R2;  // complex term sums over (x, u)

    // returns (Re R1, Im R1, Re R2, Im R2) raw values and the shared
    // normalization denominators
    std::array<double, 4> raw(double x, double y, double z, const Bindings& base = {}) const {
        Bindings b = base;
        b.values["x"] = {x, 0};
        b.values["u"] = {y, z};
        Complex r1{0, 0}, r2{0, 0};
        for (const auto& t : R1.terms) r1 += eval_complex(t, b);
        for (const auto& t : R2.terms) r2 += eval_complex(t, b);
        return {r1.real(), r1.imag(), r2.real(), r2.imag()};
    }

    std::array<double, 4> normalized(double x, double y, double z,
                                     const Bindings& base = {}) const {
        Bindings b = base;
        b.values["x"] = {x, 0};
        b.values["u"] = {y, z};
        Complex r1{0, 0}, r2{0, 0};
        double d1 = 1, d2 = 1;
        for (const auto& t : R1.terms) {
            Complex v = eval_complex(t, b);
            r1 += v;
            d1 += std::abs(v);
        }
        for (const auto& t : R2.terms) {
            Complex v = eval_complex(t, b);
            r2 += v;
            d2 += std::abs(v);
        }
        return {std::abs(r1.real()) / d1, std::abs(r1.imag()) / d1, std::abs(r2.real()) / d2,
                std::abs(r2.imag()) / d2};
    }
};

inline DerivedRealResiduals real_residuals_derived(const ComplexCubicODE& ode) {
    auto lie = lie_residuals_complex(ode);
    return DerivedRealResiduals{lie.R1, lie.R2};
}

inline ResidualReport check_linearizable_real_derived(const ComplexCubicODE& ode,
                                                      const SamplingConfig& cfg) {
    auto derived = real_residuals_derived(ode);
    ResidualReport report;
    report.seed = cfg.seed;
    report.tolerance = cfg.tolerance;
    static const char* names[4] = {"Re(R1)", "Im(R1)", "Re(R2)", "Im(R2)"};
    for (auto* n : names) {
        ConditionEntry e;
        e.name = n;
        report.conditions.push_back(e);
    }

    std::set<std::string> ufs;
    for (const auto& e : {ode.A, ode.B, ode.C, ode.D})
        for (const auto& f : ufunc_symbols(e)) ufs.insert(f);
    std::vector<Bindings> bases;
    if (ufs.empty()) {
        bases.emplace_back();
    } else {
        for (const auto& inst : cfg.ufunc_instantiations) {
            Bindings b;
            for (const auto& name : ufs) b.ufuncs[name] = inst;
            bases.push_back(b);
        }
    }

    int singular = 0;
    for (const auto& base : bases) {
        Sampler sampler(cfg.seed);
        for (int i = 0; i < cfg.points; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < cfg.retry_limit && !placed; ++attempt) {
                double x = sampler.uniform(0.1, 2.1);
                Box b = cfg.box_for("u");
                double y = sampler.uniform(b.re_min, b.re_max);
                double z = sampler.uniform(b.im_min, b.im_max);
                try {
                    auto r = derived.normalized(x, y, z, base);
                    for (int j = 0; j < 4; ++j) {
                        auto& entry = report.conditions[j];
                        entry.sample_count++;
                        if (r[j] > entry.max_normalized_residual)
                            entry.max_normalized_residual = r[j];
                        if (r[j] > cfg.tolerance &&
                            static_cast<int>(entry.failed_samples.size()) <
                                detail::kMaxFailedSamples)
                            entry.failed_samples.push_back(
                                {{"x", {x, 0}}, {"y", {y, 0}}, {"z", {z, 0}}});
                    }
                    placed = true;
                } catch (const DomainError&) {
                } catch (const NonFinite&) {
                }
            }
            if (!placed) ++singular;
        }
    }
    report.finalize(singular > cfg.points / 2);
    return report;
}

// ---- printed-vs-derived audit ---------------------------------------------

struct TermMismatch {
    int equation;            // 39..42
    std::string printed;     // empty when the term is missing from print
    double printed_coef = 0;
    std::string expected;    // pattern from the derived split
    double expected_coef = 0;
    double printed_value = 0;   // evaluated at the witness point
    double expected_value = 0;
    std::array<double, 3> witness{};  // (x, y, z)
};

struct CrossCheckReport {
    // max |printed - derived| raw deviation per condition (39..42)
    std::array<double, 4> max_deviation{};
    std::array<std::array<double, 3>, 4> deviation_witness{};
    std::vector<TermMismatch> mismatches;
    std::uint64_t seed = 0;
};

inline CrossCheckReport cross_check_conditions(const ComplexCubicODE& ode,
                                               const SamplingConfig& cfg) {
    CrossCheckReport out;
    out.seed = cfg.seed;
    RealCubicSystem sys = realify_system(ode);
    auto derived = real_residuals_derived(ode);
    const auto& printed = detail::printed_real_conditions();
    const auto& corrected = detail::corrected_real_conditions();

    std::set<std::string> ufs;
    for (const auto& e : {ode.A, ode.B, ode.C, ode.D})
        for (const auto& f : ufunc_symbols(e)) ufs.insert(f);
    Bindings base;
    if (!ufs.empty())
        for (const auto& name : ufs) base.ufuncs[name] = cfg.ufunc_instantiations.front();

    Sampler sampler(cfg.seed);
    std::array<double, 3> first_pt{1.0, 1.0, 1.0};
    bool have_first = false;
    for (int i = 0; i < cfg.points; ++i) {
        for (int attempt = 0; attempt < cfg.retry_limit; ++attempt) {
            double x = sampler.uniform(0.1, 2.1);
            Box b = cfg.box_for("u");
            double y = sampler.uniform(b.re_min, b.re_max);
            double z = sampler.uniform(b.im_min, b.im_max);
            try {
                auto d = derived.raw(x, y, z, base);
                for (int eq = 0; eq < 4; ++eq) {
                    double raw = 0;
                    real_condition_residual(printed[eq], sys, x, y, z, base, &raw);
                    double dev = std::abs(raw - d[eq]);
                    if (dev > out.max_deviation[eq]) {
                        out.max_deviation[eq] = dev;
                        out.deviation_witness[eq] = {x, y, z};
                    }
                }
                if (!have_first) {
                    first_pt = {x, y, z};
                    have_first = true;
                }
                break;
            } catch (const DomainError&) {
            } catch (const NonFinite&) {
            }
        }
    }

    // structural term comparison: printed vs the corrected split pattern
    for (int eq = 0; eq < 4; ++eq) {
        auto find = [](const RealTermList& list, const std::string& pattern) -> const RealTerm* {
            for (const auto& term : list)
                if (term.pattern() == pattern) return &term;
            return nullptr;
        };
        for (const auto& pterm : printed[eq]) {
            const RealTerm* match = find(corrected[eq], pterm.pattern());
            if (match && match->coef == pterm.coef) continue;
            TermMismatch m;
            m.equation = 39 + eq;
            m.printed = pterm.pattern();
            m.printed_coef = pterm.coef;
            if (match) {
                m.expected = match->pattern();
                m.expected_coef = match->coef;
            }
            m.witness = first_pt;
            try {
                m.printed_value = pterm.eval(sys, first_pt[0], first_pt[1], first_pt[2], base);
                if (match)
                    m.expected_value =
                        match->eval(sys, first_pt[0], first_pt[1], first_pt[2], base);
            } catch (const Error&) {
            }
            out.mismatches.push_back(m);
        }
        for (const auto& cterm : corrected[eq]) {
            if (find(printed[eq], cterm.pattern())) continue;
            TermMismatch m;
            m.equation = 39 + eq;
            m.expected = cterm.pattern();
            m.expected_coef = cterm.coef;
            m.witness = first_pt;
            try {
                m.expected_value = cterm.eval(sys, first_pt[0], first_pt[1], first_pt[2], base);
            } catch (const Error&) {
            }
            out.mismatches.push_back(m);
        }
    }
    return out;
}

}  // namespace clsym
