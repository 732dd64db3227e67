#pragma once

// Problem-file schema on top of the TOML subset reader. A problem file names
// a kind and the expressions that kind needs; sampling overrides live in a
// [sampling] table and per-symbol boxes in [box.<symbol>] tables.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clsym/cubic.hpp"
#include "clsym/errors.hpp"
#include "clsym/expr.hpp"
#include "clsym/odeint.hpp"
#include "clsym/sampling.hpp"
#include "clsym/symmetry.hpp"
#include "clsym/toml.hpp"
#include "clsym/transform.hpp"

namespace clsym {

enum class ProblemKind {
    ComplexOde,
    RealSystem,
    SymmetryCheck,
    TransformCheck,
    SolutionCheck,
    Integrate,
};

inline ProblemKind problem_kind_from_string(const std::string& s) {
    if (s == "complex_ode") return ProblemKind::ComplexOde;
    if (s == "real_system") return ProblemKind::RealSystem;
    if (s == "symmetry_check") return ProblemKind::SymmetryCheck;
    if (s == "transform_check") return ProblemKind::TransformCheck;
    if (s == "solution_check") return ProblemKind::SolutionCheck;
    if (s == "integrate") return ProblemKind::Integrate;
    throw ValidationError("unknown problem kind '" + s + "'");
}

struct Problem {
    ProblemKind kind = ProblemKind::ComplexOde;
    std::string source_path;

    // complex_ode / symmetry_check / transform_check / solution_check /
    // integrate: w(x, u, p)
    std::optional<Expression> rhs;
    // complex_ode: candidate auxiliary pair (k, K) in (x, u)
    std::optional<std::pair<Expression, Expression>> aux;
    // real_system / solution_check / integrate alternative: symbolic pair
    // in (x, y, z, dy, dz)
    std::optional<std::pair<Expression, Expression>> rhs_pair;
    // real_system alternative: the eight cubic coefficients in (x, y, z)
    std::optional<std::array<Expression, 8>> coefficients;

    // symmetry_check: one or two generators
    std::vector<VectorField2> generators;

    // transform_check
    std::optional<Expression> target;
    std::optional<std::pair<Expression, Expression>> target_pair;
    std::optional<PointMap2> map;
    int order = 2;
    bool real_level = false;

    // solution_check
    ClosedFormSolution solution;

    // integrate
    std::optional<InitialState> initial;
    double x_end = 1.0;
    IntegratorConfig idt;

    SamplingConfig sampling = SamplingConfig::defaults();
};

namespace detail {

inline const toml::Value* find(const toml::Document& doc, const std::string& table,
                               const std::string& key) {
    auto t = doc.find(table);
    if (t == doc.end()) return nullptr;
    auto k = t->second.find(key);
    if (k == t->second.end()) return nullptr;
    return &k->second;
}

inline std::string require_string(const toml::Document& doc, const std::string& table,
                                  const std::string& key) {
    const toml::Value* v = find(doc, table, key);
    if (!v || !v->is_string())
        throw ValidationError("missing or non-string key '" + key + "'" +
                              (table.empty() ? "" : " in [" + table + "]"));
    return v->as_string();
}

inline Expression parse_expr_key(const toml::Document& doc, const std::string& table,
                                 const std::string& key, const std::set<std::string>& symbols) {
    std::string text = require_string(doc, table, key);
    try {
        return parse(text, symbols);
    } catch (const Error& e) {
        throw ValidationError("key '" + key + "': " + e.what());
    }
}

inline std::set<std::string> prob_xu() { return {"x", "u"}; }
inline std::set<std::string> prob_xup() { return {"x", "u", "p"}; }
inline std::set<std::string> prob_xyz() { return {"x", "y", "z"}; }
inline std::set<std::string> prob_sys() { return {"x", "y", "z", "dy", "dz"}; }

inline void load_sampling(const toml::Document& doc, SamplingConfig& cfg) {
    if (const auto* v = find(doc, "sampling", "points")) cfg.points = static_cast<int>(v->as_number());
    if (const auto* v = find(doc, "sampling", "seed"))
        cfg.seed = static_cast<std::uint64_t>(v->as_number());
    if (const auto* v = find(doc, "sampling", "tolerance")) cfg.tolerance = v->as_number();
    if (const auto* v = find(doc, "sampling", "retry_limit"))
        cfg.retry_limit = static_cast<int>(v->as_number());
    if (const auto* v = find(doc, "sampling", "ufuncs")) {
        if (!v->is_string_array())
            throw ValidationError("[sampling] ufuncs must be an array of expressions in t");
        cfg.ufunc_instantiations.clear();
        for (const auto& s : v->as_string_array())
            cfg.ufunc_instantiations.push_back(parse(s, {"t"}));
    }
    for (const auto& [table, keys] : doc) {
        if (table.rfind("box.", 0) != 0) continue;
        std::string symbol = table.substr(4);
        Box b = cfg.box_for(symbol);
        auto range = [&](const char* key, double& lo, double& hi) {
            auto it = keys.find(key);
            if (it == keys.end()) return;
            if (!it->second.is_number_array() || it->second.as_number_array().size() != 2)
                throw ValidationError("[" + table + "] " + key + " must be [lo, hi]");
            lo = it->second.as_number_array()[0];
            hi = it->second.as_number_array()[1];
        };
        range("re", b.re_min, b.re_max);
        range("im", b.im_min, b.im_max);
        if (auto it = keys.find("real_only"); it != keys.end()) b.real_only = it->second.as_bool();
        cfg.box[symbol] = b;
    }
}

inline void load_parameters(const toml::Document& doc, Bindings& params) {
    auto t = doc.find("params");
    if (t == doc.end()) return;
    for (const auto& [name, v] : t->second) {
        if (v.is_number()) {
            params.values[name] = {v.as_number(), 0};
        } else if (v.is_number_array() && v.as_number_array().size() == 2) {
            params.values[name] = {v.as_number_array()[0], v.as_number_array()[1]};
        } else {
            throw ValidationError("[params] " + name + " must be a number or [re, im]");
        }
    }
}

}  // namespace detail

inline Problem load_problem_text(const std::string& text, const std::string& path = "<string>") {
    toml::Document doc = toml::parse(text);
    Problem prob;
    prob.source_path = path;
    prob.kind = problem_kind_from_string(detail::require_string(doc, "", "kind"));
    detail::load_sampling(doc, prob.sampling);

    auto has = [&](const std::string& key) { return detail::find(doc, "", key) != nullptr; };
    auto load_rhs = [&](bool allow_pair) {
        if (has("rhs")) {
            prob.rhs = detail::parse_expr_key(doc, "", "rhs", detail::prob_xup());
        } else if (allow_pair && has("f1") && has("f2")) {
            prob.rhs_pair = {detail::parse_expr_key(doc, "", "f1", detail::prob_sys()),
                             detail::parse_expr_key(doc, "", "f2", detail::prob_sys())};
        } else {
            throw ValidationError(allow_pair ? "expected 'rhs' or the pair 'f1', 'f2'"
                                             : "expected 'rhs'");
        }
    };

    switch (prob.kind) {
        case ProblemKind::ComplexOde:
            load_rhs(false);
            if (has("aux_k") || has("aux_K"))
                prob.aux = {detail::parse_expr_key(doc, "", "aux_k", detail::prob_xu()),
                            detail::parse_expr_key(doc, "", "aux_K", detail::prob_xu())};
            break;
        case ProblemKind::RealSystem: {
            static const char* names[8] = {"A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2"};
            bool any_coeff = false;
            for (const char* n : names) any_coeff = any_coeff || has(n);
            if (any_coeff) {
                std::array<Expression, 8> cs = {num(0), num(0), num(0), num(0),
                                                num(0), num(0), num(0), num(0)};
                for (int i = 0; i < 8; ++i)
                    cs[i] = detail::parse_expr_key(doc, "", names[i], detail::prob_xyz());
                prob.coefficients = cs;
            } else if (has("rhs")) {
                prob.rhs = detail::parse_expr_key(doc, "", "rhs", detail::prob_xup());
            } else {
                throw ValidationError("expected 'rhs' or the coefficients A1..D2");
            }
            break;
        }
        case ProblemKind::SymmetryCheck: {
            load_rhs(false);
            VectorField2 Z1{detail::parse_expr_key(doc, "", "xi", detail::prob_xu()),
                            detail::parse_expr_key(doc, "", "eta", detail::prob_xu())};
            prob.generators.push_back(Z1);
            if (has("xi2") || has("eta2")) {
                VectorField2 Z2{detail::parse_expr_key(doc, "", "xi2", detail::prob_xu()),
                                detail::parse_expr_key(doc, "", "eta2", detail::prob_xu())};
                prob.generators.push_back(Z2);
            }
            break;
        }
        case ProblemKind::TransformCheck: {
            load_rhs(false);
            prob.map = PointMap2{detail::parse_expr_key(doc, "", "chi", detail::prob_xu()),
                                 detail::parse_expr_key(doc, "", "U", detail::prob_xu()),
                                 std::nullopt};
            prob.target = detail::parse_expr_key(doc, "", "target", detail::prob_xup());
            if (const auto* v = detail::find(doc, "", "order"))
                prob.order = static_cast<int>(v->as_number());
            if (prob.order != 1 && prob.order != 2)
                throw ValidationError("order must be 1 or 2");
            if (const auto* v = detail::find(doc, "", "real_level"))
                prob.real_level = v->as_bool();
            break;
        }
        case ProblemKind::SolutionCheck: {
            load_rhs(true);
            detail::load_parameters(doc, prob.solution.parameters);
            std::set<std::string> solsyms = {"x"};
            for (const auto& [name, value] : prob.solution.parameters.values)
                solsyms.insert(name);
            if (has("u")) {
                prob.solution.u = detail::parse_expr_key(doc, "", "u", solsyms);
            } else if (has("y") && has("z")) {
                prob.solution.yz = {detail::parse_expr_key(doc, "", "y", solsyms),
                                    detail::parse_expr_key(doc, "", "z", solsyms)};
            } else {
                throw ValidationError("expected a solution 'u' or the pair 'y', 'z'");
            }
            break;
        }
        case ProblemKind::Integrate: {
            load_rhs(true);
            const auto* v = detail::find(doc, "", "initial");
            if (!v || !v->is_number_array() || v->as_number_array().size() != 5)
                throw ValidationError("expected initial = [x0, y, z, dy, dz]");
            const auto& a = v->as_number_array();
            prob.initial = InitialState{a[0], a[1], a[2], a[3], a[4]};
            if (const auto* e = detail::find(doc, "", "x_end")) prob.x_end = e->as_number();
            else throw ValidationError("expected 'x_end'");
            if (const auto* h = detail::find(doc, "", "h")) prob.idt.h = h->as_number();
            if (const auto* t = detail::find(doc, "", "tol")) prob.idt.tol = t->as_number();
            if (const auto* m = detail::find(doc, "", "method")) {
                std::string s = m->as_string();
                if (s == "rk4") prob.idt.method = IntegratorMethod::Rk4Fixed;
                else if (s == "rk4_doubling") prob.idt.method = IntegratorMethod::Rk4StepDoubling;
                else throw ValidationError("method must be 'rk4' or 'rk4_doubling'");
            }
            break;
        }
    }
    return prob;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_problem_text(buf.str(), path);
}

}  // namespace clsym
