// ccalloc: run allocation scenarios and write CSV results.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccalloc/ccalloc.hpp"

#ifndef CCALLOC_SCENARIO_DIR
#define CCALLOC_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace ccalloc;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> algorithms;
    bool quiet = false;
    bool no_timing = false;
    int repeat = 1000;
};

// A bare name like "ghgv2_stationary" falls back to the bundled scenarios.
fs::path resolve_config(const std::string& arg) {
    const fs::path p(arg);
    if (fs::exists(p)) return p;
    if (!p.has_parent_path()) {
        for (const fs::path& dir : {fs::path("scenarios"), fs::path(CCALLOC_SCENARIO_DIR)}) {
            fs::path candidate = dir / p;
            if (!candidate.has_extension()) candidate += ".json";
            if (fs::exists(candidate)) return candidate;
        }
    }
    return p;
}

ScenarioConfig load(const Options& opt) {
    ScenarioConfig cfg = load_config(resolve_config(opt.config));
    if (!opt.algorithms.empty()) {
        std::vector<std::string> bad;
        cfg.algorithms.clear();
        for (const auto& name : opt.algorithms) {
            if (auto a = parse_algorithm(name)) cfg.algorithms.push_back(*a);
            else bad.push_back("--algorithms: unknown algorithm '" + name + "'");
        }
        if (!bad.empty()) throw ConfigError(bad);
    }
    if (opt.seed) cfg.command.seed = *opt.seed;
    if (opt.no_timing) cfg.record_timing = false;
    return cfg;
}

void expect_kind(const ScenarioConfig& cfg, ScenarioKind kind, const char* name) {
    if (cfg.kind != kind) throw ConfigError({std::string("kind: this subcommand needs a ") + name + " scenario"});
}

std::string cell(double x, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out) throw OutputError("cannot write " + path.string());
}

int cmd_static(const Options& opt) {
    const auto cfg = load(opt);
    expect_kind(cfg, ScenarioKind::stationary, "stationary");
    const auto rep = run_stationary(cfg);
    std::ostringstream csv;
    write_stationary_csv(csv, rep, cfg.record_timing);
    write_file(fs::path(opt.out) / "stationary.csv", csv.str());
    if (!opt.quiet) {
        std::printf("%-13s %12s %12s %12s %5s %8s  %s\n", "algorithm", "cost", "error", "time_us", "iter",
                    "feasible", "u");
        for (const auto& row : rep.rows) {
            std::string u;
            for (Eigen::Index i = 0; i < row.result.u.size(); ++i) u += (i ? " " : "") + cell(row.result.u(i));
            std::printf("%-13s %12s %12s %12s %5d %8s  [%s]\n", std::string(to_string(row.algorithm)).c_str(),
                        cell(row.result.cost).c_str(), cell(row.result.error(), 5).c_str(),
                        cell(row.result.elapsed * 1e6, 4).c_str(), row.result.iterations,
                        row.feasible ? "yes" : "NO", u.c_str());
        }
    }
    return 0;
}

int cmd_montecarlo(const Options& opt) {
    const auto cfg = load(opt);
    expect_kind(cfg, ScenarioKind::monte_carlo, "montecarlo");
    const auto rep = run_monte_carlo(cfg);
    std::ostringstream raw, summary;
    write_mc_raw_csv(raw, rep, cfg.record_timing);
    write_mc_summary_csv(summary, rep, cfg.record_timing);
    write_file(fs::path(opt.out) / "mc_raw.csv", raw.str());
    write_file(fs::path(opt.out) / "mc_summary.csv", summary.str());
    if (!opt.quiet) {
        const auto inside = std::count_if(rep.samples.begin(), rep.samples.end(),
                                          [](const auto& s) { return s.inside_ams; });
        std::printf("%zu samples, %ld inside the attainable set, seed %llu\n", rep.samples.size(),
                    static_cast<long>(inside), static_cast<unsigned long long>(cfg.command.seed));
        std::printf("%-13s %-7s %12s %12s %12s %12s\n", "algorithm", "metric", "p5", "p50", "p95", "mean");
        for (const auto& s : rep.summary)
            std::printf("%-13s %-7s %12s %12s %12s %12s\n", std::string(to_string(s.algorithm)).c_str(),
                        s.metric.c_str(), cell(s.p5).c_str(), cell(s.p50).c_str(), cell(s.p95).c_str(),
                        cell(s.mean).c_str());
    }
    return 0;
}

int cmd_timesim(const Options& opt) {
    const auto cfg = load(opt);
    expect_kind(cfg, ScenarioKind::timesim, "timesim");
    bool first = true;
    for (auto a : cfg.algorithms) {
        const auto log = run_timesim(cfg, a);
        std::ostringstream csv;
        write_timesim_csv(csv, log);
        const std::string name = first ? "timesim.csv" : "timesim_" + std::string(to_string(a)) + ".csv";
        write_file(fs::path(opt.out) / name, csv.str());
        if (!opt.quiet) {
            const auto audit = audit_timesim(cfg, log);
            std::printf("%s -> %s: %d steps, magnitude violations %d, rate violations %d, "
                        "attainable steps %d (missed %d, max error %s), bound-rate violations %d\n",
                        std::string(to_string(a)).c_str(), name.c_str(), audit.steps, audit.magnitude_violations,
                        audit.rate_violations, audit.feasible_steps, audit.feasible_misses,
                        cell(audit.max_feasible_error, 3).c_str(), audit.bound_rate_violations);
        }
        first = false;
    }
    return 0;
}

int cmd_ams(const Options& opt) {
    const auto cfg = load(opt);
    const ActuatorLimits l = cfg.limits_at(0.0);
    const auto ms = moment_set(cfg.b.matrix(), {l.u_min, l.u_max});
    std::ostringstream v, f;
    write_vertices_csv(v, ms);
    write_file(fs::path(opt.out) / "vertices.csv", v.str());
    // The vertex list is still useful for other axis counts; only the hull needs o = 3.
    if (cfg.axes() != 3) throw DimensionError("hull export needs 3 axes, scenario has " + std::to_string(cfg.axes()));
    write_facets_csv(f, ms);
    write_file(fs::path(opt.out) / "facets.csv", f.str());
    if (!opt.quiet) {
        std::printf("%zu vertices, %zu hull facets\n", ms.vertices.size(), ms.hull_facets.size());
        for (Eigen::Index i = 0; i < ms.lower.size(); ++i)
            std::printf("axis %ld: [%s, %s]\n", static_cast<long>(i + 1), cell(ms.lower(i)).c_str(),
                        cell(ms.upper(i)).c_str());
    }
    return 0;
}

// Repeated stationary calls per algorithm; reports wall-time distribution.
int cmd_compare(const Options& opt) {
    auto cfg = load(opt);
    expect_kind(cfg, ScenarioKind::stationary, "stationary");
    if (opt.repeat < 1) throw ConfigError({"--repeat: must be >= 1"});
    const ActuatorLimits limits = cfg.limits_at(0.0);
    const auto problem = make_problem(cfg, cfg.command.value, limits, cfg.initial, cfg.baseline.at(0.0));
    std::ostringstream csv;
    csv << "algorithm,median_s,p95_s,mean_s\n";
    if (!opt.quiet) std::printf("%-13s %12s %12s %12s\n", "algorithm", "median_us", "p95_us", "mean_us");
    for (auto a : cfg.algorithms) {
        std::vector<double> t;
        t.reserve(static_cast<std::size_t>(opt.repeat));
        for (int k = 0; k < opt.repeat; ++k) t.push_back(allocate(a, problem, cfg.allocator).elapsed);
        double mean = 0.0;
        for (double x : t) mean += x;
        mean /= static_cast<double>(t.size());
        const double med = percentile(t, 0.5);
        const double p95 = percentile(t, 0.95);
        csv << to_string(a) << ',' << fmt(med) << ',' << fmt(p95) << ',' << fmt(mean) << '\n';
        if (!opt.quiet)
            std::printf("%-13s %12s %12s %12s\n", std::string(to_string(a)).c_str(), cell(med * 1e6, 4).c_str(),
                        cell(p95 * 1e6, 4).c_str(), cell(mean * 1e6, 4).c_str());
    }
    write_file(fs::path(opt.out) / "compare.csv", csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained control allocation: scenarios, Monte Carlo and time simulation"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Scenario file, or the name of a bundled scenario")->required();
        sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
        sub->add_option("--algorithms", opt.algorithms, "Comma-separated algorithm list")->delimiter(',');
        sub->add_flag("--quiet", opt.quiet, "Suppress the summary table");
        sub->add_flag("--no-timing", opt.no_timing, "Write zero wall times so outputs are byte-reproducible");
    };
    auto* s_static = app.add_subcommand("static", "Run every algorithm once on a constant command");
    auto* s_mc = app.add_subcommand("montecarlo", "Sample commands and compare distributions");
    auto* s_ts = app.add_subcommand("timesim", "Time-varying limits and commands");
    auto* s_ams = app.add_subcommand("ams", "Export the attainable moment set");
    auto* s_cmp = app.add_subcommand("compare", "Time repeated stationary calls");
    for (auto* s : {s_static, s_mc, s_ts, s_ams, s_cmp}) add_common(s);
    s_mc->add_option("--seed", opt.seed, "Override the sampler seed");
    s_cmp->add_option("--repeat", opt.repeat, "Calls per algorithm")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*s_static) return cmd_static(opt);
        if (*s_mc) return cmd_montecarlo(opt);
        if (*s_ts) return cmd_timesim(opt);
        if (*s_ams) return cmd_ams(opt);
        if (*s_cmp) return cmd_compare(opt);
    } catch (const ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << "config error: " << d << '\n';
        return 1;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
