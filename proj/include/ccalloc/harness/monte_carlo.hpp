#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ccalloc/ams.hpp"
#include "ccalloc/harness/stationary.hpp"

namespace ccalloc {

struct MonteCarloSample {
    Vec nu;
    std::vector<TrialRecord> trials;  // same order as the config's algorithm list
    bool inside_ams = false;
};

struct SummaryRow {
    Algorithm algorithm;
    std::string metric;  // cost, error or time_s
    double p5 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double mean = 0.0;
};

struct MonteCarloReport {
    std::vector<Algorithm> algorithms;
    std::vector<MonteCarloSample> samples;
    std::vector<SummaryRow> summary;
};

/// Linear interpolation between order statistics; q in [0, 1].
inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= v.size()) return v.back();
    return v[k] + (pos - static_cast<double>(k)) * (v[k + 1] - v[k]);
}

/// Draw for sample `index`; depends only on (seed, index), not on thread layout.
inline Vec draw_command(const CommandSource& c, std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Vec nu(c.mean.size());
    for (Eigen::Index i = 0; i < nu.size(); ++i) nu(i) = c.mean(i) + c.sigma(i) * normal(rng);
    return nu;
}

inline std::vector<SummaryRow> summarize(const MonteCarloReport& rep) {
    std::vector<SummaryRow> out;
    for (std::size_t k = 0; k < rep.algorithms.size(); ++k) {
        for (const char* metric : {"cost", "error", "time_s"}) {
            std::vector<double> v;
            v.reserve(rep.samples.size());
            for (const auto& s : rep.samples) {
                const auto& r = s.trials[k].result;
                v.push_back(metric[0] == 'c' ? r.cost : metric[0] == 'e' ? r.error() : r.elapsed);
            }
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(std::max<std::size_t>(v.size(), 1));
            out.push_back({rep.algorithms[k], metric, percentile(v, 0.05), percentile(v, 0.5),
                           percentile(v, 0.95), mean});
        }
    }
    return out;
}

/// Runs every algorithm on N sampled commands. With certify_membership each
/// sample is also checked against the attainable set of the box.
inline MonteCarloReport run_monte_carlo(const ScenarioConfig& cfg, bool certify_membership = true) {
    MonteCarloReport rep;
    rep.algorithms = cfg.algorithms;
    const int n = cfg.command.samples;
    rep.samples.resize(static_cast<std::size_t>(n));
    const ActuatorLimits limits = cfg.limits_at(0.0);
    const EffectiveBounds bounds = effective_bounds(limits, cfg.initial);
    const Vec u_r = cfg.baseline.at(0.0);

    auto work = [&](int first, int stride) {
        for (int i = first; i < n; i += stride) {
            auto& s = rep.samples[static_cast<std::size_t>(i)];
            s.nu = draw_command(cfg.command, cfg.command.seed, static_cast<std::uint64_t>(i));
            const auto problem = make_problem(cfg, s.nu, limits, cfg.initial, u_r);
            for (auto a : cfg.algorithms) {
                auto r = allocate(a, problem, cfg.allocator);
                const bool ok = is_feasible(r.u, bounds, cfg.feasibility_tol);
                s.trials.push_back({a, std::move(r), ok});
            }
            if (certify_membership) s.inside_ams = contains(cfg.b.matrix(), bounds, s.nu, cfg.membership_tol);
        }
    };
    const int threads = std::clamp(cfg.threads, 1, std::max(n, 1));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(threads));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    work(t, threads);
                } catch (...) {
                    failures[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (const auto& f : failures)
            if (f) std::rethrow_exception(f);
    }
    rep.summary = summarize(rep);
    return rep;
}

}  // namespace ccalloc
