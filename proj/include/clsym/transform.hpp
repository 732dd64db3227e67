#pragma once

// Verification that a point transformation carries a source ODE (or real
// system) to a target, by pushing derivatives forward through the chain rule
// at sample points. Transformations are verified, never derived.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "clsym/cubic.hpp"
#include "clsym/expr.hpp"
#include "clsym/realify.hpp"
#include "clsym/report.hpp"

namespace clsym {

// complex point map (x, u) -> (chi, U)
struct PointMap2 {
    Expression chi, U;
    // optional declared inverse (x(chi, U), u(chi, U)); chi/U play the
    // symbols x/u in the inverse expressions
    std::optional<std::pair<Expression, Expression>> inverse;
};

// real point map (x, y, z) -> (chi, upsilon, zeta)
struct PointMap3 {
    RealFunc3 chi, upsilon, zeta;
    // set when chi takes complex values on real samples (the analytic
    // continuation reading); such maps are only checkable at the complex level
    bool analytic_continuation = false;
};

namespace detail {

// U' and U'' as expressions in (x, u, p) given the source w; Dchi is
// returned so callers can reject degenerate points
struct Pushforward {
    Expression Dchi;   // chi_x + chi_u p
    Expression Uprime; // (U_x + U_u p) / Dchi
    Expression Usecond;
};

inline Pushforward pushforward_expressions(const Expression& source_w, const PointMap2& map) {
    Expression p = var("p");
    Pushforward out;
    out.Dchi = add(diff(map.chi, "x"), mul(diff(map.chi, "u"), p));
    out.Uprime = div(add(diff(map.U, "x"), mul(diff(map.U, "u"), p)), out.Dchi);
    out.Usecond = div(total_derivative(out.Uprime, source_w), out.Dchi);
    return out;
}

}  // namespace detail

// Pointwise second-order pushforward residual:
//   | U'' - target_w(chi, U, U') |  normalized by (1 + |U''| + |target|).
// target_w is an expression in (x, u, p) read as (chi, U, U').
inline double pushforward_check(const Expression& source_w, const Expression& target_w,
                                const PointMap2& map, double x, Complex u, Complex p,
                                const Bindings& base = {}) {
    auto pf = detail::pushforward_expressions(source_w, map);
    Bindings b = base;
    b.values["x"] = {x, 0};
    b.values["u"] = u;
    b.values["p"] = p;
    Complex dchi = eval_complex(pf.Dchi, b);
    if (std::abs(dchi) < 1e-12) throw DegenerateJacobian("Dchi vanishes at the sample point");
    Complex usecond = eval_complex(pf.Usecond, b);
    Bindings tb = base;
    tb.values["x"] = eval_complex(map.chi, b);
    tb.values["u"] = eval_complex(map.U, b);
    tb.values["p"] = eval_complex(pf.Uprime, b);
    Complex tw = eval_complex(target_w, tb);
    return std::abs(usecond - tw) / (1 + std::abs(usecond) + std::abs(tw));
}

// first-order variant: U' = (U_x + U_u f)/(chi_x + chi_u f) against
// target g(chi, U), where f is the source RHS u' = f(x, u)
inline double pushforward_check_first_order(const Expression& source_f,
                                            const Expression& target_g, const PointMap2& map,
                                            double x, Complex u, const Bindings& base = {}) {
    Bindings b = base;
    b.values["x"] = {x, 0};
    b.values["u"] = u;
    Complex f = eval_complex(source_f, b);
    Complex dchi = eval_complex(diff(map.chi, "x"), b) + eval_complex(diff(map.chi, "u"), b) * f;
    if (std::abs(dchi) < 1e-12) throw DegenerateJacobian("Dchi vanishes at the sample point");
    Complex uprime =
        (eval_complex(diff(map.U, "x"), b) + eval_complex(diff(map.U, "u"), b) * f) / dchi;
    Bindings tb = base;
    tb.values["x"] = eval_complex(map.chi, b);
    tb.values["u"] = eval_complex(map.U, b);
    Complex g = eval_complex(target_g, tb);
    return std::abs(uprime - g) / (1 + std::abs(uprime) + std::abs(g));
}

inline ResidualReport verify_transformation(const Expression& source_w,
                                            const Expression& target_w, const PointMap2& map,
                                            const SamplingConfig& cfg, bool first_order = false) {
    ResidualReport report;
    report.seed = cfg.seed;
    report.tolerance = cfg.tolerance;
    ConditionEntry entry;
    entry.name = first_order ? "pushforward_first_order" : "pushforward";
    report.conditions.push_back(entry);

    std::set<std::string> ufs = ufunc_symbols(source_w);
    for (const auto& e : {target_w, map.chi, map.U})
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

    auto& cond = report.conditions[0];
    int singular = 0;
    for (const auto& base : bases) {
        Sampler sampler(cfg.seed);
        Box xb = cfg.box_for("x"), ub = cfg.box_for("u"), pb = cfg.box_for("p");
        for (int i = 0; i < cfg.points; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < cfg.retry_limit && !placed; ++attempt) {
                double x = sampler.uniform(xb.re_min, xb.re_max);
                Complex u = sampler.draw(ub);
                Complex p = sampler.draw(pb);
                try {
                    double r = first_order
                                   ? pushforward_check_first_order(source_w, target_w, map, x, u,
                                                                   base)
                                   : pushforward_check(source_w, target_w, map, x, u, p, base);
                    cond.sample_count++;
                    if (r > cond.max_normalized_residual) cond.max_normalized_residual = r;
                    if (r > cfg.tolerance &&
                        static_cast<int>(cond.failed_samples.size()) < detail::kMaxFailedSamples)
                        cond.failed_samples.push_back({{"x", {x, 0}}, {"u", u}, {"p", p}});
                    placed = true;
                } catch (const DegenerateJacobian&) {
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

// ---- realification of point maps -------------------------------------------

inline PointMap3 realify_map(const PointMap2& map,
                             const SamplingConfig& cfg = SamplingConfig::defaults()) {
    PointMap3 out;
    out.chi = RealFunc3::from_complex(map.chi, Part::Re);
    out.upsilon = RealFunc3::from_complex(map.U, Part::Re);
    out.zeta = RealFunc3::from_complex(map.U, Part::Im);

    // flag complex-valued chi on real samples
    RealFunc3 chi_im = RealFunc3::from_complex(map.chi, Part::Im);
    Sampler sampler(cfg.seed);
    Box ub = cfg.box_for("u");
    int checked = 0;
    for (int i = 0; i < cfg.points && checked < cfg.points; ++i) {
        double x = sampler.uniform(0.1, 2.1);
        double y = sampler.uniform(ub.re_min, ub.re_max);
        double z = sampler.uniform(ub.im_min, ub.im_max);
        try {
            if (std::abs(chi_im.eval(x, y, z)) > 1e-12) {
                out.analytic_continuation = true;
                break;
            }
            ++checked;
        } catch (const DomainError&) {
        } catch (const NonFinite&) {
        }
    }
    return out;
}

// right-hand side of a real system: either the Re/Im closure of a complex
// w(x, u, p), or a symbolic pair in (x, y, z, dy, dz)
struct RealRhs {
    std::optional<Expression> complex_w;
    std::optional<std::pair<Expression, Expression>> pair;
    // first-order systems use (y', z') = rhs(x, y, z); dy/dz are ignored
    bool first_order = false;

    std::pair<double, double> eval(double x, double y, double z, double dy, double dz,
                                   const Bindings& base = {}) const {
        Bindings b = base;
        if (complex_w) {
            b.values["x"] = {x, 0};
            b.values["u"] = {y, z};
            b.values["p"] = {dy, dz};
            Complex w = eval_complex(*complex_w, b);
            return {w.real(), w.imag()};
        }
        b.values["x"] = {x, 0};
        b.values["y"] = {y, 0};
        b.values["z"] = {z, 0};
        b.values["dy"] = {dy, 0};
        b.values["dz"] = {dz, 0};
        double f1 = eval_complex(pair->first, b).real();
        double f2 = eval_complex(pair->second, b).real();
        return {f1, f2};
    }
};

namespace detail {

// total x-derivative of a map component along trajectories:
//   DxM = M_x + y' M_y + z' M_z
inline double total1(const RealFunc3& M, double x, double y, double z, double dy, double dz) {
    return M.d('x').eval(x, y, z) + dy * M.d('y').eval(x, y, z) + dz * M.d('z').eval(x, y, z);
}

// Dx(DxM) with y'', z'' substituted from the source RHS
inline double total2(const RealFunc3& M, double x, double y, double z, double dy, double dz,
                     double ypp, double zpp) {
    RealFunc3 Mx = M.d('x'), My = M.d('y'), Mz = M.d('z');
    double second = Mx.d('x').eval(x, y, z) + 2 * dy * Mx.d('y').eval(x, y, z) +
                    2 * dz * Mx.d('z').eval(x, y, z) + dy * dy * My.d('y').eval(x, y, z) +
                    2 * dy * dz * My.d('z').eval(x, y, z) + dz * dz * Mz.d('z').eval(x, y, z);
    return second + ypp * My.eval(x, y, z) + zpp * Mz.eval(x, y, z);
}

}  // namespace detail

// Pushforward of a real source system through a real point map, compared
// against the target RHS at samples.
inline ResidualReport verify_real_transformation(const RealRhs& source, const RealRhs& target,
                                                 const PointMap3& map, const SamplingConfig& cfg) {
    if (map.analytic_continuation)
        throw AnalyticContinuationUnsupported(
            "complex-valued real maps are verified at the complex level");

    ResidualReport report;
    report.seed = cfg.seed;
    report.tolerance = cfg.tolerance;
    ConditionEntry e1, e2;
    e1.name = source.first_order ? "upsilon_prime" : "upsilon_second";
    e2.name = source.first_order ? "zeta_prime" : "zeta_second";
    report.conditions = {e1, e2};

    std::set<std::string> ufs;
    if (source.complex_w)
        for (const auto& f : ufunc_symbols(*source.complex_w)) ufs.insert(f);
    if (source.pair)
        for (const auto& e : {source.pair->first, source.pair->second})
            for (const auto& f : ufunc_symbols(e)) ufs.insert(f);
    if (target.complex_w)
        for (const auto& f : ufunc_symbols(*target.complex_w)) ufs.insert(f);
    if (target.pair)
        for (const auto& e : {target.pair->first, target.pair->second})
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
        Box ub = cfg.box_for("u"), pb = cfg.box_for("p");
        for (int i = 0; i < cfg.points; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < cfg.retry_limit && !placed; ++attempt) {
                double x = sampler.uniform(0.1, 2.1);
                double y = sampler.uniform(ub.re_min, ub.re_max);
                double z = sampler.uniform(ub.im_min, ub.im_max);
                double dy = sampler.uniform(pb.re_min, pb.re_max);
                double dz = sampler.uniform(pb.im_min, pb.im_max);
                try {
                    double r1, r2, chi_v, ups_v, zeta_v;
                    chi_v = map.chi.eval(x, y, z, base);
                    ups_v = map.upsilon.eval(x, y, z, base);
                    zeta_v = map.zeta.eval(x, y, z, base);
                    double dchi;
                    if (source.first_order) {
                        auto [f1, f2] = source.eval(x, y, z, 0, 0, base);
                        dchi = detail::total1(map.chi, x, y, z, f1, f2);
                        if (std::abs(dchi) < 1e-12)
                            throw DegenerateJacobian("Dchi vanishes");
                        double up = detail::total1(map.upsilon, x, y, z, f1, f2) / dchi;
                        double zp = detail::total1(map.zeta, x, y, z, f1, f2) / dchi;
                        auto [t1, t2] = target.eval(chi_v, ups_v, zeta_v, 0, 0, base);
                        r1 = std::abs(up - t1) / (1 + std::abs(up) + std::abs(t1));
                        r2 = std::abs(zp - t2) / (1 + std::abs(zp) + std::abs(t2));
                    } else {
                        auto [ypp, zpp] = source.eval(x, y, z, dy, dz, base);
                        dchi = detail::total1(map.chi, x, y, z, dy, dz);
                        if (std::abs(dchi) < 1e-12)
                            throw DegenerateJacobian("Dchi vanishes");
                        double Pu = detail::total1(map.upsilon, x, y, z, dy, dz);
                        double Pz = detail::total1(map.zeta, x, y, z, dy, dz);
                        double up = Pu / dchi, zp = Pz / dchi;
                        // U'' = (Dx(DxU) - U' Dx(Dx chi)) / Dchi^2
                        double d2chi = detail::total2(map.chi, x, y, z, dy, dz, ypp, zpp);
                        double d2u = detail::total2(map.upsilon, x, y, z, dy, dz, ypp, zpp);
                        double d2z = detail::total2(map.zeta, x, y, z, dy, dz, ypp, zpp);
                        double upp = (d2u - up * d2chi) / (dchi * dchi);
                        double zpp2 = (d2z - zp * d2chi) / (dchi * dchi);
                        auto [t1, t2] = target.eval(chi_v, ups_v, zeta_v, up, zp, base);
                        r1 = std::abs(upp - t1) / (1 + std::abs(upp) + std::abs(t1));
                        r2 = std::abs(zpp2 - t2) / (1 + std::abs(zpp2) + std::abs(t2));
                    }
                    auto& c1 = report.conditions[0];
                    auto& c2 = report.conditions[1];
                    c1.sample_count++;
                    c2.sample_count++;
                    c1.max_normalized_residual = std::max(c1.max_normalized_residual, r1);
                    c2.max_normalized_residual = std::max(c2.max_normalized_residual, r2);
                    if (r1 > cfg.tolerance &&
                        static_cast<int>(c1.failed_samples.size()) < detail::kMaxFailedSamples)
                        c1.failed_samples.push_back(
                            {{"x", {x, 0}}, {"y", {y, 0}}, {"z", {z, 0}}});
                    if (r2 > cfg.tolerance &&
                        static_cast<int>(c2.failed_samples.size()) < detail::kMaxFailedSamples)
                        c2.failed_samples.push_back(
                            {{"x", {x, 0}}, {"y", {y, 0}}, {"z", {z, 0}}});
                    placed = true;
                } catch (const DegenerateJacobian&) {
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

// ---- canonical cubic form ---------------------------------------------------

// canonical RHS of chi U'' = a U'^3 + b U'^2 + (1 + b^2/(3a)) U' + b/(3a)
// + b^3/(27 a^2), solved for U''; expression in (x, u, p) read as (chi, U, U')
inline Expression canonical_cubic_rhs(Complex a, Complex b) {
    if (a == Complex(0, 0)) throw InvalidConstant("canonical form requires a != 0");
    Complex c1 = Complex(1, 0) + b * b / (3.0 * a);
    Complex c0 = b / (3.0 * a) + b * b * b / (27.0 * a * a);
    Expression p = var("p");
    Expression numer = add(add(mul(constant(a), pow(p, num(3))), mul(constant(b), pow(p, num(2)))),
                           add(mul(constant(c1), p), constant(c0)));
    return div(numer, var("x"));
}

inline ResidualReport match_canonical_cubic(const Expression& ode_in_chiU, Complex a, Complex b,
                                            const SamplingConfig& cfg) {
    Expression canon = canonical_cubic_rhs(a, b);
    TermSum cond;
    cond.name = "canonical_match";
    cond.terms = {ode_in_chiU, neg(canon)};
    auto symbols = detail::bound_symbols({ode_in_chiU}, {"x", "u", "p"});
    return detail::evaluate_with_instantiations(cond.terms.empty() ? std::vector<TermSum>{}
                                                                   : std::vector<TermSum>{cond},
                                                symbols, ufunc_symbols(ode_in_chiU), cfg);
}

// the real canonical twin, Eqs. (59)-(60), assembled from (a1, a2, b1, b2);
// returns the solved-for (y'', z'') right-hand sides as a RealRhs closure
inline RealRhs canonical_real_system(double a1, double a2, double b1, double b2) {
    Complex a{a1, a2}, b{b1, b2};
    if (a == Complex(0, 0)) throw InvalidConstant("canonical form requires a != 0");
    RealRhs out;
    out.complex_w = canonical_cubic_rhs(a, b);
    return out;
}

}  // namespace clsym
