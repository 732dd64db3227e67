#pragma once

// Residual reports: per-condition normalized max residuals over a
// deterministic sample set, with a pass/fail/inconclusive verdict.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "clsym/expr.hpp"
#include "clsym/sampling.hpp"

namespace clsym {

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass:
            return "pass";
        case Verdict::Fail:
            return "fail";
        default:
            return "inconclusive";
    }
}

struct ConditionEntry {
    std::string name;
    double max_normalized_residual = 0.0;
    int sample_count = 0;
    std::vector<std::map<std::string, Complex>> failed_samples;  // capped
};

struct ResidualReport {
    std::vector<ConditionEntry> conditions;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> notes;

    double max_residual() const {
        double m = 0;
        for (const auto& c : conditions) m = std::max(m, c.max_normalized_residual);
        return m;
    }

    bool passed() const { return verdict == Verdict::Pass; }

    void finalize(bool inconclusive = false) {
        if (inconclusive) {
            verdict = Verdict::Inconclusive;
            return;
        }
        verdict = Verdict::Pass;
        for (const auto& c : conditions)
            if (c.max_normalized_residual > tolerance) verdict = Verdict::Fail;
    }
};

// A residual assembled as a sum of named terms; the normalization divides by
// (1 + sum of the absolute values of the assembled terms) so verdicts are
// scale-free across sample boxes.
struct TermSum {
    std::string name;
    std::vector<Expression> terms;

    Expression as_expression() const {
        if (terms.empty()) return num(0);
        Expression acc = terms[0];
        for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
        return acc;
    }

    // returns |sum| / (1 + sum |term_i|)
    double normalized_residual(const Bindings& b) const {
        Complex sum{0, 0};
        double denom = 1.0;
        for (const auto& t : terms) {
            Complex v = eval_complex(t, b);
            sum += v;
            denom += std::abs(v);
        }
        return std::abs(sum) / denom;
    }
};

namespace detail {

constexpr int kMaxFailedSamples = 5;

}  // namespace detail

// Evaluate a set of TermSum conditions over the deterministic sample box.
// `symbols` are the variables to bind at each point; singular points are
// rejected and redrawn up to cfg.retry_limit.
inline ResidualReport evaluate_conditions(const std::vector<TermSum>& conditions,
                                          const std::set<std::string>& symbols,
                                          const SamplingConfig& cfg, const Bindings& base = {}) {
    ResidualReport report;
    report.seed = cfg.seed;
    report.tolerance = cfg.tolerance;
    for (const auto& c : conditions) {
        ConditionEntry entry;
        entry.name = c.name;
        report.conditions.push_back(entry);
    }

    Sampler sampler(cfg.seed);
    int singular_points = 0;
    for (int i = 0; i < cfg.points; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < cfg.retry_limit && !placed; ++attempt) {
            Bindings b = base;
            for (const auto& [k, v] : sampler.draw_point(cfg, symbols)) b.values[k] = v;
            try {
                std::vector<double> residuals;
                residuals.reserve(conditions.size());
                for (const auto& c : conditions) residuals.push_back(c.normalized_residual(b));
                for (std::size_t j = 0; j < conditions.size(); ++j) {
                    auto& entry = report.conditions[j];
                    entry.sample_count++;
                    if (residuals[j] > entry.max_normalized_residual)
                        entry.max_normalized_residual = residuals[j];
                    if (residuals[j] > cfg.tolerance &&
                        static_cast<int>(entry.failed_samples.size()) < detail::kMaxFailedSamples)
                        entry.failed_samples.push_back(b.values);
                }
                placed = true;
            } catch (const DomainError&) {
            } catch (const NonFinite&) {
            }
        }
        if (!placed) ++singular_points;
    }
    report.finalize(singular_points > cfg.points / 2);
    return report;
}

inline ResidualReport merge_worst(const std::vector<ResidualReport>& reports) {
    ResidualReport merged;
    if (reports.empty()) return merged;
    merged = reports.front();
    for (std::size_t r = 1; r < reports.size(); ++r) {
        const auto& rep = reports[r];
        for (const auto& c : rep.conditions) {
            auto it = std::find_if(merged.conditions.begin(), merged.conditions.end(),
                                   [&](const ConditionEntry& e) { return e.name == c.name; });
            if (it == merged.conditions.end()) {
                merged.conditions.push_back(c);
            } else if (c.max_normalized_residual > it->max_normalized_residual) {
                it->max_normalized_residual = c.max_normalized_residual;
                it->failed_samples = c.failed_samples;
            }
        }
        if (rep.verdict == Verdict::Fail && merged.verdict == Verdict::Pass)
            merged.verdict = Verdict::Fail;
        if (rep.verdict == Verdict::Inconclusive) merged.verdict = Verdict::Inconclusive;
        for (const auto& n : rep.notes) merged.notes.push_back(n);
    }
    return merged;
}

}  // namespace clsym
