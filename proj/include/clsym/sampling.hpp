#pragma once

// Deterministic sample generation for numeric identity testing. All draws go
// through a seeded 64-bit generator and a fixed uint64->double mapping so
// reports are reproducible run to run.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "clsym/expr.hpp"

namespace clsym {

struct Box {
    double re_min = -2.0, re_max = 2.0;
    double im_min = -2.0, im_max = 2.0;
    bool real_only = false;
};

struct SamplingConfig {
    int points = 64;
    std::uint64_t seed = 42;
    std::map<std::string, Box> box;  // per-symbol overrides
    int retry_limit = 100;
    double tolerance = 1e-8;
    // test family applied to every uninterpreted function symbol; each
    // Expression is in the formal parameter "t"
    std::vector<Expression> ufunc_instantiations;

    static SamplingConfig defaults() {
        SamplingConfig cfg;
        std::set<std::string> t = {"t"};
        cfg.ufunc_instantiations = {parse("1 + t + t^2", t), parse("exp(t/4)", t),
                                    parse("1/(t + 3)", t)};
        return cfg;
    }

    Box box_for(const std::string& symbol) const {
        auto it = box.find(symbol);
        if (it != box.end()) return it->second;
        if (symbol == "x") {
            // the paper's independent variable is real
            Box b;
            b.re_min = 0.1;
            b.re_max = 2.1;
            b.real_only = true;
            return b;
        }
        return Box{};
    }
};

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        // fixed 53-bit mapping, independent of the stdlib distribution
        double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    Complex draw(const Box& b) {
        double re = uniform(b.re_min, b.re_max);
        double im = b.real_only ? 0.0 : uniform(b.im_min, b.im_max);
        return {re, im};
    }

    std::map<std::string, Complex> draw_point(const SamplingConfig& cfg,
                                              const std::set<std::string>& symbols) {
        std::map<std::string, Complex> pt;
        for (const auto& s : symbols) pt[s] = draw(cfg.box_for(s));
        return pt;
    }

  private:
    std::mt19937_64 rng_;
};

}  // namespace clsym
