#pragma once

// Classical RK4 integration of the first-order reduction (y, z, y', z') and
// numeric verification of closed-form solutions.

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "clsym/expr.hpp"
#include "clsym/report.hpp"
#include "clsym/transform.hpp"

namespace clsym {

struct Trajectory {
    std::vector<double> x;
    std::vector<std::array<double, 4>> state;  // (y, z, y', z')
    double step = 0;
    int rejected_steps = 0;

    std::string to_csv() const {
        std::string out = "x,y,z,dy,dz\n";
        char buf[160];
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", x[i], state[i][0],
                          state[i][1], state[i][2], state[i][3]);
            out += buf;
        }
        return out;
    }
};

enum class IntegratorMethod { Rk4Fixed, Rk4StepDoubling };

struct IntegratorConfig {
    double h = 1e-3;
    IntegratorMethod method = IntegratorMethod::Rk4Fixed;
    double tol = 1e-9;
};

namespace detail {

using State4 = std::array<double, 4>;

inline State4 system_rhs(const RealRhs& rhs, double x, const State4& s, const Bindings& base) {
    auto [ypp, zpp] = rhs.eval(x, s[0], s[1], s[2], s[3], base);
    if (!std::isfinite(ypp) || !std::isfinite(zpp))
        throw SingularityEncountered("non-finite RHS at x = " + std::to_string(x));
    return {s[2], s[3], ypp, zpp};
}

inline State4 rk4_step(const RealRhs& rhs, double x, const State4& s, double h,
                       const Bindings& base) {
    auto axpy = [](const State4& a, double c, const State4& b) {
        State4 r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    State4 k1 = system_rhs(rhs, x, s, base);
    State4 k2 = system_rhs(rhs, x + h / 2, axpy(s, h / 2, k1), base);
    State4 k3 = system_rhs(rhs, x + h / 2, axpy(s, h / 2, k2), base);
    State4 k4 = system_rhs(rhs, x + h, axpy(s, h, k3), base);
    State4 r;
    for (int i = 0; i < 4; ++i) r[i] = s[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return r;
}

}  // namespace detail

struct InitialState {
    double x0;
    double y, z, dy, dz;
};

inline Trajectory integrate(const RealRhs& rhs, const InitialState& initial, double x_end,
                            const IntegratorConfig& cfg = {}, const Bindings& base = {}) {
    Trajectory traj;
    traj.step = cfg.h;
    double x = initial.x0;
    detail::State4 s{initial.y, initial.z, initial.dy, initial.dz};
    traj.x.push_back(x);
    traj.state.push_back(s);
    double direction = x_end >= x ? 1.0 : -1.0;
    double h = cfg.h * direction;

    const double span_eps = 1e-12 * (1 + std::abs(x_end));
    while (direction * (x_end - x) > span_eps) {
        if (direction * h > direction * (x_end - x)) h = x_end - x;
        try {
            if (cfg.method == IntegratorMethod::Rk4Fixed) {
                s = detail::rk4_step(rhs, x, s, h, base);
                x += h;
            } else {
                // step doubling: halve until the full-step/two-half-step
                // discrepancy meets tol
                for (;;) {
                    if (std::abs(h) < 1e-12) throw StepUnderflow("step underflow");
                    detail::State4 full = detail::rk4_step(rhs, x, s, h, base);
                    detail::State4 half = detail::rk4_step(rhs, x, s, h / 2, base);
                    half = detail::rk4_step(rhs, x + h / 2, half, h / 2, base);
                    double err = 0;
                    for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(full[i] - half[i]));
                    if (err <= cfg.tol) {
                        s = half;
                        x += h;
                        break;
                    }
                    h /= 2;
                    ++traj.rejected_steps;
                }
            }
        } catch (const DomainError& e) {
            throw SingularityEncountered(std::string("singular RHS: ") + e.what());
        } catch (const NonFinite& e) {
            throw SingularityEncountered(std::string("non-finite RHS: ") + e.what());
        }
        for (double v : s)
            if (!std::isfinite(v)) throw SingularityEncountered("non-finite state");
        traj.x.push_back(x);
        traj.state.push_back(s);
    }
    return traj;
}

// ---- closed-form solution verification -------------------------------------

// y(x), z(x) as Expressions in x (with parameters bound via Bindings), or a
// single complex u(x)
struct ClosedFormSolution {
    std::optional<Expression> u;                        // complex u(x)
    std::optional<std::pair<Expression, Expression>> yz;  // real pair
    Bindings parameters;
};

inline ResidualReport verify_solution(const RealRhs& equation, const ClosedFormSolution& sol,
                                      const std::vector<double>& x_samples, double tolerance = 1e-8,
                                      std::uint64_t seed = 42) {
    ResidualReport report;
    report.seed = seed;
    report.tolerance = tolerance;
    ConditionEntry e1, e2;
    e1.name = "y_equation";
    e2.name = "z_equation";
    report.conditions = {e1, e2};

    Expression y_expr, z_expr;
    if (sol.u) {
        y_expr = *sol.u;
        z_expr = *sol.u;
    } else {
        y_expr = sol.yz->first;
        z_expr = sol.yz->second;
    }
    Expression dy_expr = diff(y_expr, "x"), d2y_expr = diff(dy_expr, "x");
    Expression dz_expr = diff(z_expr, "x"), d2z_expr = diff(dz_expr, "x");

    int singular = 0;
    for (double x : x_samples) {
        Bindings b = sol.parameters;
        b.values["x"] = {x, 0};
        try {
            double y, z, dy, dz, ypp, zpp;
            if (sol.u) {
                Complex u = eval_complex(*sol.u, b);
                Complex du = eval_complex(dy_expr, b);
                Complex d2u = eval_complex(d2y_expr, b);
                y = u.real();
                z = u.imag();
                dy = du.real();
                dz = du.imag();
                ypp = d2u.real();
                zpp = d2u.imag();
            } else {
                y = eval_complex(y_expr, b).real();
                z = eval_complex(z_expr, b).real();
                dy = eval_complex(dy_expr, b).real();
                dz = eval_complex(dz_expr, b).real();
                ypp = eval_complex(d2y_expr, b).real();
                zpp = eval_complex(d2z_expr, b).real();
            }
            auto [f1, f2] = equation.eval(x, y, z, dy, dz, sol.parameters);
            double r1 = std::abs(ypp - f1) / (1 + std::abs(ypp) + std::abs(f1));
            double r2 = std::abs(zpp - f2) / (1 + std::abs(zpp) + std::abs(f2));
            auto& c1 = report.conditions[0];
            auto& c2 = report.conditions[1];
            c1.sample_count++;
            c2.sample_count++;
            c1.max_normalized_residual = std::max(c1.max_normalized_residual, r1);
            c2.max_normalized_residual = std::max(c2.max_normalized_residual, r2);
            if (r1 > tolerance &&
                static_cast<int>(c1.failed_samples.size()) < detail::kMaxFailedSamples)
                c1.failed_samples.push_back({{"x", {x, 0}}});
            if (r2 > tolerance &&
                static_cast<int>(c2.failed_samples.size()) < detail::kMaxFailedSamples)
                c2.failed_samples.push_back({{"x", {x, 0}}});
        } catch (const DomainError&) {
            ++singular;
        } catch (const NonFinite&) {
            ++singular;
        }
    }
    report.finalize(singular > static_cast<int>(x_samples.size()) / 2);
    return report;
}

// draws pole-free sample abscissae for a closed form, rejecting points where
// the solution or its derivatives blow up
inline std::vector<double> pole_free_samples(const ClosedFormSolution& sol, int count,
                                             std::uint64_t seed, double lo = 0.1, double hi = 2.1,
                                             int retry_limit = 100) {
    Sampler sampler(seed);
    Expression probe = sol.u ? *sol.u : add(sol.yz->first, sol.yz->second);
    Expression dprobe = diff(probe, "x");
    Expression d2probe = diff(dprobe, "x");
    std::vector<double> xs;
    for (int i = 0; i < count; ++i) {
        for (int attempt = 0; attempt < retry_limit; ++attempt) {
            double x = sampler.uniform(lo, hi);
            Bindings b = sol.parameters;
            b.values["x"] = {x, 0};
            try {
                Complex v = eval_complex(probe, b) + eval_complex(dprobe, b) +
                            eval_complex(d2probe, b);
                if (std::abs(v) < 1e6) {
                    xs.push_back(x);
                    break;
                }
            } catch (const DomainError&) {
            } catch (const NonFinite&) {
            }
        }
    }
    return xs;
}

}  // namespace clsym
