#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccalloc/ccalloc.hpp"
#include "support.hpp"

using namespace ccalloc;
using testing_support::vec;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CCALLOC_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::vector<std::string> errors_of(const std::string& text) { return validate_config(std::string_view(text)).errors; }

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
    for (const auto& e : errs)
        if (e.find(needle) != std::string::npos) return true;
    return false;
}

const char* kToy = R"({"kind": "stationary", "B": [[0.5, -0.5]],
  "limits": {"u_min": [0, 0], "u_max": [1.5, 1.5]},
  "command": {"type": "constant", "value": [0.5]}})";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ccalloc_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + CCALLOC_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
    return WEXITSTATUS(status);
#else
    return status;
#endif
}

}  // namespace

TEST(Config, BundledScenariosValidate) {
    for (const char* name : {"toy", "ghgv2_stationary", "ghgv2_montecarlo", "ghgv2_timesim"}) {
        const auto cfg = load_config(kScenarios / (std::string(name) + ".json"));
        EXPECT_EQ(cfg.name, name);
    }
    const auto cfg = load_config(kScenarios / "ghgv2_stationary.json");
    EXPECT_EQ(cfg.b.matrix(), testing_support::ghgv2());
    EXPECT_EQ(cfg.steady_state, SteadyStatePolicy::conditionalized);
    EXPECT_EQ(cfg.algorithms.size(), 6u);
}

TEST(Config, TimesimScheduleMatchesDefaults) {
    const auto cfg = load_config(kScenarios / "ghgv2_timesim.json");
    EXPECT_EQ(timesim_steps(cfg), 6000);
    const auto l0 = cfg.limits_at(0.0);
    const auto l1 = cfg.limits_at(60.0);
    EXPECT_DOUBLE_EQ(l0.u_max(0), 20.0);
    EXPECT_DOUBLE_EQ(l0.rate_max(0), 20.0);
    EXPECT_DOUBLE_EQ(l1.rate_max(0), 10.0);
    EXPECT_DOUBLE_EQ(l1.rate_min(0), -30.0);
    for (double t = 0; t <= 60.0; t += 0.5) EXPECT_GE(cfg.limits_at(t).u_max.minCoeff(), 0.0);
}

TEST(Config, MinAboveMaxNamesEffector) {
    const auto errs = errors_of(R"({"kind": "stationary", "B": [[1, 1, 1]],
      "limits": {"u_min": [0, 5, 0], "u_max": [1, 1, 1]}, "command": {"type": "constant", "value": [0]}})");
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_TRUE(mentions(errs, "limits.u_min[1]"));
    EXPECT_TRUE(mentions(errs, "effector 2"));
}

TEST(Config, ModulationDrivingLimitNegativeIsRejected) {
    const auto errs = errors_of(R"({"kind": "timesim", "B": [[1, 1]],
      "limits": {"u_min": [0, 0], "u_max": [20, 20]},
      "schedule": {"u_max_full": [20, 20], "modulation": {"type": "raised_cosine", "amplitude": 2.0, "period": 60}},
      "command": {"type": "constant", "value": [0]}})");
    EXPECT_TRUE(mentions(errs, "schedule.modulation"));
}

TEST(Config, DiagnosticsAreAggregated) {
    const auto errs = errors_of(R"({"kind": "stationary", "B": [[1, 1]], "dt": -1, "bogus": 3,
      "limits": {"u_min": [0, 0], "u_max": [1]}, "command": {"type": "constant", "value": [0]},
      "algorithms": ["pica", "simplex"]})");
    EXPECT_GE(errs.size(), 4u);
    EXPECT_TRUE(mentions(errs, "dt"));
    EXPECT_TRUE(mentions(errs, "bogus"));
    EXPECT_TRUE(mentions(errs, "limits.u_max"));
    EXPECT_TRUE(mentions(errs, "algorithms[1]"));
}

TEST(Config, MissingRequiredKeysAndBadSyntax) {
    EXPECT_TRUE(mentions(errors_of(R"({"kind": "stationary"})"), "B"));
    EXPECT_TRUE(mentions(errors_of("{"), "<syntax>"));
    EXPECT_TRUE(mentions(errors_of(R"({"kind": "montecarlo", "B": [[1]], "limits": {"u_min": [0], "u_max": [1]},
      "command": {"type": "gaussian", "mean": [0], "sigma": [1], "samples": 5}})"), "seed"));
    EXPECT_THROW(load_config("/nonexistent/scenario.json"), ConfigError);
}

TEST(Stationary, ToyTable) {
    const auto rep = run_stationary(parse_config(kToy));
    ASSERT_EQ(rep.rows.size(), 6u);
    EXPECT_EQ(rep.rows[0].algorithm, Algorithm::pica);
    EXPECT_FALSE(rep.rows[0].feasible);
    for (std::size_t k = 1; k < rep.rows.size(); ++k) EXPECT_TRUE(rep.rows[k].feasible);
    EXPECT_LE((rep.rows[4].result.u - vec({1, 0})).norm(), 1e-9);
}

TEST(Stationary, EmptyAlgorithmListGivesEmptyTable) {
    auto cfg = parse_config(kToy);
    cfg.algorithms.clear();
    const auto rep = run_stationary(cfg);
    EXPECT_TRUE(rep.rows.empty());
    std::ostringstream csv;
    write_stationary_csv(csv, rep);
    EXPECT_EQ(csv.str(), "algorithm,cost,error,time_s,u1,u2\n");
}

TEST(MonteCarlo, ZeroSigmaRepeatsTheMean) {
    auto cfg = load_config(kScenarios / "ghgv2_montecarlo.json");
    cfg.command.sigma.setZero();
    cfg.command.samples = 20;
    const auto rep = run_monte_carlo(cfg, false);
    for (const auto& s : rep.samples) {
        EXPECT_EQ(s.nu, cfg.command.mean);
        for (std::size_t k = 0; k < s.trials.size(); ++k)
            EXPECT_EQ(s.trials[k].result.u, rep.samples[0].trials[k].result.u);
    }
    for (const auto& row : rep.summary)
        if (row.metric != "time_s") {
            EXPECT_DOUBLE_EQ(row.p5, row.p95);
        }
}

TEST(MonteCarlo, SingleSample) {
    auto cfg = load_config(kScenarios / "ghgv2_montecarlo.json");
    cfg.command.samples = 1;
    const auto rep = run_monte_carlo(cfg);
    ASSERT_EQ(rep.samples.size(), 1u);
    for (const auto& row : rep.summary) {
        EXPECT_EQ(row.p5, row.p50);
        EXPECT_EQ(row.p50, row.p95);
    }
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
    auto cfg = load_config(kScenarios / "ghgv2_montecarlo.json");
    cfg.command.samples = 64;
    cfg.record_timing = false;
    auto csv = [&](int threads) {
        cfg.threads = threads;
        const auto rep = run_monte_carlo(cfg, false);
        std::ostringstream os;
        write_mc_raw_csv(os, rep, false);
        write_mc_summary_csv(os, rep, false);
        return os.str();
    };
    const std::string one = csv(1);
    EXPECT_EQ(one, csv(1));
    EXPECT_EQ(one, csv(4));
    cfg.command.seed += 1;
    EXPECT_NE(one, csv(1));
}

TEST(MonteCarlo, DrawDependsOnlyOnSeedAndIndex) {
    CommandSource c;
    c.kind = CommandSource::Kind::gaussian;
    c.mean = vec({0, 0, 0});
    c.sigma = vec({1, 1, 1});
    EXPECT_EQ(draw_command(c, 7, 3), draw_command(c, 7, 3));
    EXPECT_NE(draw_command(c, 7, 3), draw_command(c, 7, 4));
}

TEST(Percentile, LinearInterpolation) {
    EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4, 5}, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4, 5}, 0.95), 4.8);
    EXPECT_DOUBLE_EQ(percentile({7}, 0.05), 7.0);
    EXPECT_DOUBLE_EQ(percentile({}, 0.5), 0.0);
}

TEST(Timesim, ZeroCommandStaysAtRest) {
    auto cfg = load_config(kScenarios / "ghgv2_timesim.json");
    cfg.command = {};
    cfg.command.value = Vec::Zero(3);
    cfg.duration = 1.0;
    const auto log = run_timesim(cfg);
    ASSERT_EQ(log.steps.size(), 100u);
    for (const auto& s : log.steps) {
        EXPECT_LE(s.err.norm(), 1e-9);
        EXPECT_TRUE(s.u.isZero(1e-9));
    }
    const auto audit = audit_timesim(cfg, log);
    EXPECT_EQ(audit.magnitude_violations + audit.rate_violations + audit.bound_rate_violations, 0);
}

TEST(Timesim, AutoAmplitudeUsesHalfExtent) {
    const auto cfg = load_config(kScenarios / "ghgv2_timesim.json");
    const auto amp = resolve_amplitude(cfg);
    const auto ms = moment_set(cfg.b.matrix(), {Vec::Zero(4), Vec::Constant(4, 20)});
    EXPECT_LE((amp - 1.2 * ms.half_extent()).norm(), 1e-9);
}

TEST(Csv, ShortestRoundTripNumbers) {
    EXPECT_EQ(fmt(0.1), "0.1");
    EXPECT_EQ(fmt(1e-300), "1e-300");
    EXPECT_EQ(std::stod(fmt(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, TimesimHeader) {
    auto cfg = load_config(kScenarios / "ghgv2_timesim.json");
    cfg.duration = 0.02;
    std::ostringstream os;
    write_timesim_csv(os, run_timesim(cfg));
    const std::string h = first_line(os.str());
    EXPECT_EQ(h.rfind("t,nu_cmd_x,nu_cmd_y,nu_cmd_z,nu_ach_x", 0), 0u);
    EXPECT_NE(h.find("udot4,lo1"), std::string::npos);
    EXPECT_NE(h.find("rhi4"), std::string::npos);
}

TEST(Cli, StaticToyWritesTable) {
    const auto out = scratch("static");
    ASSERT_EQ(run_cli("static --config toy --quiet --no-timing --out \"" + out.string() + "\"", out / "log.txt"), 0)
        << slurp(out / "log.txt");
    const std::string csv = slurp(out / "stationary.csv");
    EXPECT_EQ(first_line(csv), "algorithm,cost,error,time_s,u1,u2");
    EXPECT_NE(csv.find("\nqpca,1,"), std::string::npos);
}

TEST(Cli, MissingConfigExitsOneWithPath) {
    const auto out = scratch("missing");
    EXPECT_EQ(run_cli("static --config /nonexistent/x.json --out \"" + out.string() + "\"", out / "log.txt"), 1);
    EXPECT_NE(slurp(out / "log.txt").find("/nonexistent/x.json"), std::string::npos);
}

TEST(Cli, BadFlagsExitOne) {
    const auto out = scratch("flags");
    EXPECT_EQ(run_cli("static", out / "log.txt"), 1);
    EXPECT_EQ(run_cli("static --config toy --algorithms simplex --out \"" + out.string() + "\"", out / "log.txt"), 1);
    EXPECT_NE(slurp(out / "log.txt").find("simplex"), std::string::npos);
    EXPECT_EQ(run_cli("timesim --config toy --out \"" + out.string() + "\"", out / "log.txt"), 1);
}

TEST(Cli, AmsExport) {
    const auto out = scratch("ams");
    ASSERT_EQ(run_cli("ams --config ghgv2_stationary --quiet --out \"" + out.string() + "\"", out / "log.txt"), 0);
    const std::string v = slurp(out / "vertices.csv");
    EXPECT_EQ(first_line(v), "index,nu_x,nu_y,nu_z");
    EXPECT_EQ(std::count(v.begin(), v.end(), '\n'), 17);
    EXPECT_EQ(first_line(slurp(out / "facets.csv")), "a,b,c");
    // Hull export needs three axes; the vertex list is still written.
    const auto toy = scratch("ams_toy");
    EXPECT_EQ(run_cli("ams --config toy --quiet --out \"" + toy.string() + "\"", toy / "log.txt"), 1);
    EXPECT_TRUE(fs::exists(toy / "vertices.csv"));
}
