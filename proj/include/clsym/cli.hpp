#pragma once

// Command layer: problem files in, text or JSON reports out.
// Exit codes: 0 all conditions pass, 1 a condition fails, 2 inconclusive,
// 64 usage error, 65 problem-file or expression error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "clsym/cubic.hpp"
#include "clsym/errors.hpp"
#include "clsym/odeint.hpp"
#include "clsym/problem.hpp"
#include "clsym/realify.hpp"
#include "clsym/registry.hpp"
#include "clsym/report.hpp"
#include "clsym/symmetry.hpp"
#include "clsym/transform.hpp"

namespace clsym::cli {

using json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "inconclusive";
    }
}

inline int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Pass: return kExitPass;
        case Verdict::Fail: return kExitFail;
        default: return kExitInconclusive;
    }
}

struct Output {
    std::string format = "text";  // "text" | "json"
    std::string command;
    std::string input;

    bool is_json() const { return format == "json"; }

    json skeleton() const {
        json j;
        j["schema"] = 1;
        j["command"] = command;
        j["input"] = input;
        return j;
    }

    void emit_report(const ResidualReport& r, const std::vector<std::string>& notes = {}) const {
        if (is_json()) {
            json j = skeleton();
            j["conditions"] = json::array();
            for (const auto& c : r.conditions) {
                json jc;
                jc["name"] = c.name;
                jc["max_residual"] = c.max_normalized_residual;
                jc["samples"] = c.sample_count;
                jc["verdict"] =
                    verdict_name(c.max_normalized_residual <= r.tolerance && c.sample_count > 0
                                     ? Verdict::Pass
                                     : (c.sample_count == 0 ? Verdict::Inconclusive
                                                            : Verdict::Fail));
                j["conditions"].push_back(jc);
            }
            if (!notes.empty() || !r.notes.empty()) {
                j["notes"] = json::array();
                for (const auto& n : r.notes) j["notes"].push_back(n);
                for (const auto& n : notes) j["notes"].push_back(n);
            }
            j["verdict"] = verdict_name(r.verdict);
            j["seed"] = r.seed;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << command << " " << input << "\n";
            for (const auto& c : r.conditions)
                std::cout << "  " << c.name << ": max residual " << c.max_normalized_residual
                          << " over " << c.sample_count << " samples\n";
            for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
            for (const auto& n : notes) std::cout << "  note: " << n << "\n";
            std::cout << "verdict: " << verdict_name(r.verdict) << " (tol " << r.tolerance
                      << ", seed " << r.seed << ")\n";
        }
    }

    // a report for commands whose result is a single message rather than
    // residual conditions
    void emit_simple(Verdict v, std::uint64_t seed, const json& extra) const {
        if (is_json()) {
            json j = skeleton();
            for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
            j["verdict"] = verdict_name(v);
            j["seed"] = seed;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << command << " " << input << "\n";
            for (auto it = extra.begin(); it != extra.end(); ++it)
                std::cout << "  " << it.key() << ": " << it.value().dump() << "\n";
            std::cout << "verdict: " << verdict_name(v) << " (seed " << seed << ")\n";
        }
    }
};

struct GlobalOptions {
    double tol = -1;       // <0 means "use the problem file / defaults"
    int samples = -1;
    long long seed = -1;
    std::vector<std::string> boxes;
    std::string format = "text";
    std::string interp = "W=K";
    std::string convention = "full";

    void apply(SamplingConfig& cfg) const {
        if (tol >= 0) cfg.tolerance = tol;
        if (samples > 0) cfg.points = samples;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        for (const auto& spec : boxes) {
            // sym:lo:hi or sym:lo:hi:imlo:imhi
            std::vector<std::string> parts;
            std::string cur;
            for (char c : spec) {
                if (c == ':') {
                    parts.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            parts.push_back(cur);
            if (parts.size() != 3 && parts.size() != 5)
                throw ValidationError("--box expects sym:lo:hi or sym:lo:hi:imlo:imhi");
            Box b = cfg.box_for(parts[0]);
            try {
                b.re_min = std::stod(parts[1]);
                b.re_max = std::stod(parts[2]);
                if (parts.size() == 5) {
                    b.im_min = std::stod(parts[3]);
                    b.im_max = std::stod(parts[4]);
                    b.real_only = false;
                }
            } catch (const std::exception&) {
                throw ValidationError("--box bounds must be numbers");
            }
            cfg.box[parts[0]] = b;
        }
    }

    AuxiliaryInterp aux_interp() const {
        if (interp == "W=K") return AuxiliaryInterp::W_means_K;
        if (interp == "W=k") return AuxiliaryInterp::W_means_k;
        throw ValidationError("--interp expects W=K or W=k");
    }

    SplitConvention split_convention() const {
        if (convention == "full") return SplitConvention::FullWeight;
        if (convention == "half") return SplitConvention::HalfWeight;
        throw ValidationError("--convention expects full or half");
    }
};

namespace detail {

inline Problem load(const std::string& path, const GlobalOptions& opt, ProblemKind expected,
                    const char* command) {
    Problem prob = load_problem(path);
    if (prob.kind != expected)
        throw ValidationError(std::string(command) + " requires a problem of the matching kind");
    opt.apply(prob.sampling);
    return prob;
}

inline int cmd_check_complex(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::ComplexOde, "check-complex");
    Output out{opt.format, "check-complex", path};
    std::vector<std::string> notes;
    ResidualReport report;
    try {
        ComplexCubicODE ode = extract_cubic(*prob.rhs, prob.sampling);
        report = check_linearizable_complex(ode, prob.sampling);
        if (prob.aux) {
            ResidualReport aux =
                check_auxiliary(ode, prob.aux->first, prob.aux->second, prob.sampling,
                                opt.aux_interp());
            report = merge_worst({report, aux});
            notes.push_back(std::string("auxiliary pair checked under interpretation ") +
                            (opt.aux_interp() == AuxiliaryInterp::W_means_K ? "W=K" : "W=k"));
        }
    } catch (const NotCubic& e) {
        report.seed = prob.sampling.seed;
        report.tolerance = prob.sampling.tolerance;
        ConditionEntry c;
        c.name = "cubic_in_first_derivative";
        c.max_normalized_residual = e.max_residual;
        c.sample_count = prob.sampling.points;
        report.conditions.push_back(c);
        report.verdict = Verdict::Fail;
        notes.push_back("right-hand side is not cubic in u'");
    }
    out.emit_report(report, notes);
    return verdict_exit(report.verdict);
}

inline int cmd_check_real(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::RealSystem, "check-real");
    Output out{opt.format, "check-real", path};
    std::vector<std::string> notes;
    ResidualReport report;
    if (prob.rhs) {
        ComplexCubicODE ode = extract_cubic(*prob.rhs, prob.sampling);
        report = check_linearizable_real_derived(ode, prob.sampling);
        notes.push_back("conditions derived from the complex compatibility residuals");
    } else {
        // hand-entered coefficients: rebuild Q = Q1 + i Q2 over (x, y, z);
        // on a genuine realification d/du acts as d/dy, so the complex
        // compatibility terms apply verbatim with that substitution
        const auto& cs = *prob.coefficients;
        ComplexCubicODE ode;
        auto pack = [&](int i) {
            return add(cs[2 * i], mul(imaginary_unit(), cs[2 * i + 1]));
        };
        ode.A = pack(0);
        ode.B = pack(1);
        ode.C = pack(2);
        ode.D = pack(3);
        auto res = lie_residuals_complex(ode, "y");

        // Cauchy-Riemann residuals Q_z - i Q_y: nonzero means the entered
        // coefficients are not the split of any complex ODE
        std::vector<TermSum> conds = {res.R1, res.R2};
        static const char* qnames[4] = {"A", "B", "C", "D"};
        for (int i = 0; i < 4; ++i) {
            TermSum cr;
            cr.name = std::string("cauchy_riemann_") + qnames[i];
            Expression q = pack(i);
            cr.terms.push_back(diff(q, "z"));
            cr.terms.push_back(neg(mul(imaginary_unit(), diff(q, "y"))));
            conds.push_back(cr);
        }
        SamplingConfig cfg = prob.sampling;
        Box ub = cfg.box_for("u");
        Box real_box;
        real_box.re_min = ub.re_min;
        real_box.re_max = ub.re_max;
        real_box.real_only = true;
        if (!cfg.box.count("y")) cfg.box["y"] = real_box;
        if (!cfg.box.count("z")) cfg.box["z"] = real_box;
        report = evaluate_conditions(conds, {"x", "y", "z"}, cfg);
        notes.push_back("derived conditions evaluated on the rebuilt complex coefficients");
    }
    out.emit_report(report, notes);
    return verdict_exit(report.verdict);
}

inline int cmd_decompose(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::ComplexOde, "decompose");
    Output out{opt.format, "decompose", path};
    ComplexCubicODE ode = extract_cubic(*prob.rhs, prob.sampling);
    RealCubicSystem sys = realify_system(ode);

    static const char* cnames[8] = {"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"};
    json extra;
    extra["complex"] = {{"A", print(ode.A)},
                        {"B", print(ode.B)},
                        {"C", print(ode.C)},
                        {"D", print(ode.D)}};
    // numeric table of the eight real components on a small sample grid
    Bindings base;
    if (!prob.sampling.ufunc_instantiations.empty()) {
        for (const auto& name : ufunc_symbols(*prob.rhs))
            base.ufuncs[name] = prob.sampling.ufunc_instantiations.front();
    }
    Sampler sampler(prob.sampling.seed);
    Box ub = prob.sampling.box_for("u");
    json table = json::array();
    for (int i = 0; i < 3; ++i) {
        double x = sampler.uniform(0.1, 2.1);
        double y = sampler.uniform(ub.re_min, ub.re_max);
        double z = sampler.uniform(ub.im_min, ub.im_max);
        json row;
        row["x"] = x;
        row["y"] = y;
        row["z"] = z;
        for (int c = 0; c < 8; ++c) row[cnames[c]] = sys.coeff[c].eval(x, y, z, base);
        table.push_back(row);
    }
    extra["components"] = table;
    out.emit_simple(Verdict::Pass, prob.sampling.seed, extra);
    return kExitPass;
}

inline int cmd_symmetry(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::SymmetryCheck, "symmetry");
    Output out{opt.format, "symmetry", path};
    ResidualReport report;
    for (std::size_t i = 0; i < prob.generators.size(); ++i) {
        ResidualReport r = symmetry_residual(*prob.rhs, prob.generators[i], prob.sampling);
        r.conditions[0].name = "generator_" + std::to_string(i + 1);
        report = i == 0 ? r : merge_worst({report, r});
    }
    std::vector<std::string> notes;
    if (prob.generators.size() == 2) {
        auto [X1, Y1] = realify_vectorfield(prob.generators[0], opt.split_convention());
        auto [X2, Y2] = realify_vectorfield(prob.generators[1], opt.split_convention());
        auto rc = real_commutation_checks(X1, Y1, X2, Y2, prob.sampling);
        notes.push_back(std::string("real commutation combos ") +
                        (rc.both_vanish ? "vanish" : "do not vanish") + " (max " +
                        clsym::detail::format_double(std::max(rc.max_combo1, rc.max_combo2)) +
                        ")");
    }
    out.emit_report(report, notes);
    return verdict_exit(report.verdict);
}

inline int cmd_classify(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::SymmetryCheck, "classify");
    if (prob.generators.size() != 2)
        throw ValidationError("classify requires two generators (xi, eta, xi2, eta2)");
    Output out{opt.format, "classify", path};
    json extra;
    Verdict v = Verdict::Pass;
    try {
        auto cls = classify_pair(*prob.rhs, prob.generators[0], prob.generators[1], prob.sampling);
        extra["case"] = to_string(cls.case_);
        extra["commutes"] = cls.commutes;
        extra["bracket_equals_Z1"] = cls.bracket_equals_Z1;
        extra["proportional"] = cls.proportional;
        extra["rho_constant"] = cls.rho_constant;
        if (cls.case_ == PairCase::Unclassified) v = Verdict::Fail;
    } catch (const NotSymmetry& e) {
        extra["error"] = e.what();
        v = Verdict::Fail;
    }
    out.emit_simple(v, prob.sampling.seed, extra);
    return verdict_exit(v);
}

inline int cmd_transform(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::TransformCheck, "transform");
    Output out{opt.format, "transform", path};
    std::vector<std::string> notes;
    ResidualReport report;
    if (prob.real_level) {
        RealRhs source, target;
        source.complex_w = *prob.rhs;
        source.first_order = prob.order == 1;
        target.complex_w = *prob.target;
        target.first_order = source.first_order;
        PointMap3 rmap = realify_map(*prob.map, prob.sampling);
        report = verify_real_transformation(source, target, rmap, prob.sampling);
        notes.push_back("checked on the realified system");
    } else {
        report = verify_transformation(*prob.rhs, *prob.target, *prob.map, prob.sampling,
                                       prob.order == 1);
    }
    out.emit_report(report, notes);
    return verdict_exit(report.verdict);
}

inline int cmd_verify_solution(const std::string& path, const GlobalOptions& opt) {
    Problem prob = detail::load(path, opt, ProblemKind::SolutionCheck, "verify-solution");
    Output out{opt.format, "verify-solution", path};
    RealRhs eq;
    if (prob.rhs) eq.complex_w = *prob.rhs;
    else eq.pair = *prob.rhs_pair;
    auto xs = pole_free_samples(prob.solution, prob.sampling.points, prob.sampling.seed);
    ResidualReport report =
        verify_solution(eq, prob.solution, xs, prob.sampling.tolerance, prob.sampling.seed);
    out.emit_report(report);
    return verdict_exit(report.verdict);
}

inline int cmd_integrate(const std::string& path, const GlobalOptions& opt,
                         const std::string& output_path) {
    Problem prob = detail::load(path, opt, ProblemKind::Integrate, "integrate");
    RealRhs eq;
    if (prob.rhs) eq.complex_w = *prob.rhs;
    else eq.pair = *prob.rhs_pair;
    Bindings base;
    if (prob.rhs && !prob.sampling.ufunc_instantiations.empty())
        for (const auto& name : ufunc_symbols(*prob.rhs))
            base.ufuncs[name] = prob.sampling.ufunc_instantiations.front();
    Trajectory traj = integrate(eq, *prob.initial, prob.x_end, prob.idt, base);
    std::string csv = traj.to_csv();
    if (output_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(output_path);
        if (!f) throw ValidationError("cannot open output file '" + output_path + "'");
        f << csv;
        std::cout << "wrote " << traj.x.size() << " rows to " << output_path << "\n";
    }
    return kExitPass;
}

inline json check_to_json(const CheckResult& c) {
    json j;
    j["name"] = c.name;
    j["verdict"] = verdict_name(c.verdict);
    j["expected"] = verdict_name(c.expected);
    j["max_residual"] = c.max_residual;
    if (!c.detail.empty()) j["detail"] = c.detail;
    j["as_expected"] = c.as_expected();
    return j;
}

inline int cmd_examples(const std::string& action, const std::string& id,
                        const GlobalOptions& opt) {
    SamplingConfig cfg = SamplingConfig::defaults();
    opt.apply(cfg);
    Output out{opt.format, "examples " + action + (id.empty() ? "" : " " + id), id};

    if (action == "list") {
        if (out.is_json()) {
            json j = out.skeleton();
            j["entries"] = json::array();
            for (const auto& e : registry()) j["entries"].push_back({{"id", e.id}, {"title", e.title}});
            std::cout << j.dump(2) << "\n";
        } else {
            for (const auto& e : registry()) std::cout << e.id << "  " << e.title << "\n";
        }
        return kExitPass;
    }

    std::vector<const RegistryEntry*> selected;
    if (action == "run-all") {
        for (const auto& e : registry()) selected.push_back(&e);
    } else {
        for (const auto& e : registry())
            if (e.id == id) selected.push_back(&e);
        if (selected.empty()) throw ValidationError("unknown example id '" + id + "'");
    }

    bool all_ok = true;
    json entries = json::array();
    for (const auto* e : selected) {
        auto checks = e->run(cfg);
        bool ok = true;
        for (const auto& c : checks) ok = ok && c.as_expected();
        all_ok = all_ok && ok;
        if (out.is_json()) {
            json je;
            je["id"] = e->id;
            je["title"] = e->title;
            je["checks"] = json::array();
            for (const auto& c : checks) je["checks"].push_back(check_to_json(c));
            je["verdict"] = ok ? "pass" : "fail";
            entries.push_back(je);
        } else {
            std::cout << e->id << "  " << e->title << "\n";
            for (const auto& c : checks) {
                std::cout << "  " << c.name << ": " << verdict_name(c.verdict);
                if (c.expected != Verdict::Pass)
                    std::cout << " (expected " << verdict_name(c.expected) << ")";
                if (c.max_residual > 0)
                    std::cout << "  max residual " << clsym::detail::format_double(c.max_residual);
                if (!c.detail.empty()) std::cout << "  [" << c.detail << "]";
                std::cout << (c.as_expected() ? "" : "  <-- UNEXPECTED") << "\n";
            }
            std::cout << "  " << (ok ? "pass" : "fail") << "\n";
        }
    }
    if (out.is_json()) {
        json j = out.skeleton();
        j["entries"] = entries;
        j["verdict"] = all_ok ? "pass" : "fail";
        j["seed"] = cfg.seed;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "overall: " << (all_ok ? "pass" : "fail") << " (seed " << cfg.seed << ")\n";
    }
    return all_ok ? kExitPass : kExitFail;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"linearizability toolkit for complex second-order ODEs"};
    app.require_subcommand(1);

    GlobalOptions opt;
    app.add_option("--tol", opt.tol, "residual tolerance (normalized)");
    app.add_option("--samples", opt.samples, "sample count per condition");
    app.add_option("--seed", opt.seed, "RNG seed");
    app.add_option("--box", opt.boxes, "sampling box sym:lo:hi[:imlo:imhi]");
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--interp", opt.interp, "reading of the auxiliary symbol W")
        ->check(CLI::IsMember({"W=K", "W=k"}));
    app.add_option("--convention", opt.convention, "vector-field split convention")
        ->check(CLI::IsMember({"full", "half"}));

    std::string file, output_path, example_action, example_id;
    auto* c1 = app.add_subcommand("check-complex", "test the complex Lie conditions");
    c1->add_option("file", file)->required();
    auto* c2 = app.add_subcommand("check-real", "test the real linearizability conditions");
    c2->add_option("file", file)->required();
    auto* c3 = app.add_subcommand("decompose", "split a complex ODE into its real system");
    c3->add_option("file", file)->required();
    auto* c4 = app.add_subcommand("symmetry", "verify point-symmetry generators");
    c4->add_option("file", file)->required();
    auto* c5 = app.add_subcommand("classify", "classify a two-generator symmetry pair");
    c5->add_option("file", file)->required();
    auto* c6 = app.add_subcommand("transform", "verify a point transformation");
    c6->add_option("file", file)->required();
    auto* c7 = app.add_subcommand("verify-solution", "check a closed-form solution");
    c7->add_option("file", file)->required();
    auto* c8 = app.add_subcommand("integrate", "integrate the real system, CSV out");
    c8->add_option("file", file)->required();
    c8->add_option("--output", output_path, "CSV output path (default stdout)");
    auto* c9 = app.add_subcommand("examples", "built-in worked examples");
    c9->add_option("action", example_action, "list | run | run-all")->required();
    c9->add_option("id", example_id, "example id for 'run'");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (c1->parsed()) return detail::cmd_check_complex(file, opt);
        if (c2->parsed()) return detail::cmd_check_real(file, opt);
        if (c3->parsed()) return detail::cmd_decompose(file, opt);
        if (c4->parsed()) return detail::cmd_symmetry(file, opt);
        if (c5->parsed()) return detail::cmd_classify(file, opt);
        if (c6->parsed()) return detail::cmd_transform(file, opt);
        if (c7->parsed()) return detail::cmd_verify_solution(file, opt);
        if (c8->parsed()) return detail::cmd_integrate(file, opt, output_path);
        if (c9->parsed()) {
            if (example_action == "run" && example_id.empty()) {
                std::cerr << "examples run requires an id\n";
                return kExitUsage;
            }
            if (example_action != "list" && example_action != "run" &&
                example_action != "run-all") {
                std::cerr << "unknown examples action '" << example_action << "'\n";
                return kExitUsage;
            }
            return detail::cmd_examples(example_action, example_id, opt);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace clsym::cli
