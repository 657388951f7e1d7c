#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccalloc/allocators/allocate.hpp"
#include "ccalloc/weighting.hpp"

namespace ccalloc {

enum class ScenarioKind { stationary, monte_carlo, timesim };

/// Raised with every problem found in a config, one diagnostic per entry.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> diagnostics)
        : Error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<std::string>& d) {
        std::string s;
        for (const auto& line : d) s += (s.empty() ? "" : "\n") + line;
        return s;
    }
    std::vector<std::string> diagnostics_;
};

/// Waveform Lambda(t) modulating u_max(t) = u_max_full cos(Lambda(t)).
struct Modulation {
    enum class Kind { constant, raised_cosine, sine } kind = Kind::constant;
    double value = 0.0;      // constant
    double amplitude = 0.0;  // raised_cosine: peak; sine: half swing
    double period = 60.0;    // raised_cosine
    double frequency = 0.0;  // sine, Hz
    double offset = 0.0;     // sine

    double operator()(double t) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::raised_cosine:
                return amplitude * (1.0 - std::cos(2.0 * std::numbers::pi * t / period)) / 2.0;
            case Kind::sine: return offset + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
        }
        return 0.0;
    }

    double min_value() const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::raised_cosine: return std::min(0.0, amplitude);
            case Kind::sine: return offset - std::abs(amplitude);
        }
        return 0.0;
    }

    double max_value() const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::raised_cosine: return std::max(0.0, amplitude);
            case Kind::sine: return offset + std::abs(amplitude);
        }
        return 0.0;
    }
};

struct Ramp {
    Vec start;
    Vec end;

    Vec at(double t, double duration) const {
        const double s = duration > 0.0 ? std::clamp(t / duration, 0.0, 1.0) : 0.0;
        return start + s * (end - start);
    }
};

/// Time-varying magnitude and rate limits; u_min stays at its base value.
struct LimitSchedule {
    Vec u_max_full;
    Modulation modulation;
    std::optional<Ramp> rate_max;
    std::optional<Ramp> rate_min;

    ActuatorLimits at(double t, double duration, const ActuatorLimits& base) const {
        ActuatorLimits l = base;
        l.u_max = u_max_full * std::cos(modulation(t));
        if (rate_max) l.rate_max = rate_max->at(t, duration);
        if (rate_min) l.rate_min = rate_min->at(t, duration);
        return l;
    }
};

struct CommandSource {
    enum class Kind { constant, sinusoid, gaussian } kind = Kind::constant;
    Vec value;  // constant

    // sinusoid: offset + amplitude * sin(2 pi f t + phase)
    Vec amplitude;
    bool auto_amplitude = false;  // amplitude = scale * AMS half-extent at t = 0
    double amplitude_scale = 1.2;
    Vec frequency;
    Vec phase;
    Vec offset;

    // gaussian: mean + sigma .* z
    Vec mean;
    Vec sigma;
    int samples = 0;
    std::uint64_t seed = 0;

    Vec sinusoid_at(double t, const Vec& amp) const {
        Vec v(amp.size());
        for (Eigen::Index i = 0; i < amp.size(); ++i)
            v(i) = offset(i) + amp(i) * std::sin(2.0 * std::numbers::pi * frequency(i) * t + phase(i));
        return v;
    }
};

/// Baseline u_r(t): piecewise linear through the knots, held outside them.
struct BaselineSchedule {
    std::vector<double> times;
    std::vector<Vec> values;

    Vec at(double t) const {
        if (values.size() == 1 || t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        std::size_t k = 1;
        while (times[k] < t) ++k;
        const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return values[k - 1] + s * (values[k] - values[k - 1]);
    }
};

enum class SteadyStatePolicy { conditionalized, baseline };

struct ScenarioConfig {
    std::string name;
    ScenarioKind kind = ScenarioKind::stationary;
    EffectivenessMatrix b;
    ActuatorLimits limits;
    std::optional<LimitSchedule> schedule;
    double dt = kDefaultDt;
    double duration = 60.0;
    ActuatorState initial;
    CommandSource command;
    BaselineSchedule baseline;
    SteadyStatePolicy steady_state = SteadyStatePolicy::baseline;
    WeightingConfig weighting;
    AllocatorOptions allocator;
    std::vector<Algorithm> algorithms;
    double feasibility_tol = kDefaultFeasibilityTol;
    double membership_tol = 1e-6;
    bool record_timing = true;
    int threads = 1;

    int effectors() const { return b.effectors(); }
    int axes() const { return b.axes(); }

    ActuatorLimits limits_at(double t) const {
        return schedule ? schedule->at(t, duration, limits) : limits;
    }
};

namespace detail {

// Collects diagnostics while walking a JSON document.
class ConfigReader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    const nlohmann::json* child(const nlohmann::json& j, const std::string& key, const std::string& path,
                                bool required) {
        if (!j.is_object()) return nullptr;
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) {
            if (required) fail(join(path, key), "missing required key");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const nlohmann::json& j, const std::string& key, const std::string& path,
                                 bool required = false) {
        const auto* v = child(j, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(join(path, key), "expected a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(join(path, key), "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<bool> boolean(const nlohmann::json& j, const std::string& key, const std::string& path) {
        const auto* v = child(j, key, path, false);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(join(path, key), "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<std::string> string(const nlohmann::json& j, const std::string& key, const std::string& path,
                                      bool required = false) {
        const auto* v = child(j, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(join(path, key), "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    /// Array of n numbers, or a scalar broadcast to n entries. n < 0 accepts any length.
    std::optional<Vec> vector(const nlohmann::json& j, const std::string& key, const std::string& path, int n,
                              bool required = false, bool allow_infinite = false) {
        const auto* v = child(j, key, path, required);
        if (!v) return std::nullopt;
        const std::string p = join(path, key);
        if (v->is_number()) {
            if (n < 0) {
                fail(p, "expected an array");
                return std::nullopt;
            }
            return Vec::Constant(n, v->get<double>());
        }
        if (!v->is_array()) {
            fail(p, "expected a number or an array of numbers");
            return std::nullopt;
        }
        if (n >= 0 && static_cast<int>(v->size()) != n) {
            fail(p, "expected " + std::to_string(n) + " entries, got " + std::to_string(v->size()));
            return std::nullopt;
        }
        if (v->size() > static_cast<std::size_t>(kMaxDim)) {
            fail(p, "too many entries");
            return std::nullopt;
        }
        Vec out(static_cast<Eigen::Index>(v->size()));
        bool ok = true;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            if (allow_infinite && e.is_string() && (e == "inf" || e == "-inf")) {
                out(static_cast<Eigen::Index>(i)) = (e == "inf" ? 1.0 : -1.0) * std::numeric_limits<double>::infinity();
            } else if (!e.is_number() || !std::isfinite(e.get<double>())) {
                fail(p + "[" + std::to_string(i) + "]", "expected a finite number");
                ok = false;
            } else {
                out(static_cast<Eigen::Index>(i)) = e.get<double>();
            }
        }
        if (!ok) return std::nullopt;
        return out;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

inline void check_known_keys(ConfigReader& rd, const nlohmann::json& j, const std::string& path,
                             std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) return;
    for (const auto& [k, _] : j.items()) {
        bool known = false;
        for (auto allowed : keys) known = known || allowed == k;
        if (!known) rd.fail(ConfigReader::join(path, k), "unknown key");
    }
}

inline std::optional<Mat> read_matrix(ConfigReader& rd, const nlohmann::json& root) {
    const auto* jb = rd.child(root, "B", "", true);
    if (!jb) return std::nullopt;
    if (!jb->is_array() || jb->empty() || !(*jb)[0].is_array()) {
        rd.fail("B", "expected a non-empty array of rows");
        return std::nullopt;
    }
    const auto o = jb->size();
    const auto m = (*jb)[0].size();
    if (o > 8 || m > static_cast<std::size_t>(kMaxEffectors) || m == 0) {
        rd.fail("B", "supported sizes are 1 <= o <= 8 axes and 1 <= m <= 16 effectors");
        return std::nullopt;
    }
    Mat b(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(m));
    bool ok = true;
    for (std::size_t r = 0; r < o; ++r) {
        const auto& row = (*jb)[r];
        if (!row.is_array() || row.size() != m) {
            rd.fail("B[" + std::to_string(r) + "]", "expected " + std::to_string(m) + " entries");
            ok = false;
            continue;
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (!row[c].is_number() || !std::isfinite(row[c].get<double>())) {
                rd.fail("B[" + std::to_string(r) + "][" + std::to_string(c) + "]", "expected a finite number");
                ok = false;
            } else {
                b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
            }
        }
    }
    if (ok && m < o) {
        rd.fail("B", "needs at least as many effectors (columns) as axes (rows)");
        ok = false;
    }
    if (!ok) return std::nullopt;
    return b;
}

inline std::optional<Modulation> read_modulation(ConfigReader& rd, const nlohmann::json& j,
                                                 const std::string& path) {
    Modulation mod;
    const auto type = rd.string(j, "type", path, true);
    if (!type) return std::nullopt;
    if (*type == "constant") {
        check_known_keys(rd, j, path, {"type", "value"});
        mod.kind = Modulation::Kind::constant;
        mod.value = rd.number(j, "value", path).value_or(0.0);
    } else if (*type == "raised_cosine") {
        check_known_keys(rd, j, path, {"type", "amplitude", "period"});
        mod.kind = Modulation::Kind::raised_cosine;
        mod.amplitude = rd.number(j, "amplitude", path, true).value_or(0.0);
        mod.period = rd.number(j, "period", path).value_or(mod.period);
        if (!(mod.period > 0.0)) rd.fail(path + ".period", "must be positive");
    } else if (*type == "sine") {
        check_known_keys(rd, j, path, {"type", "amplitude", "frequency", "offset"});
        mod.kind = Modulation::Kind::sine;
        mod.amplitude = rd.number(j, "amplitude", path, true).value_or(0.0);
        mod.frequency = rd.number(j, "frequency", path, true).value_or(0.0);
        mod.offset = rd.number(j, "offset", path).value_or(0.0);
    } else {
        rd.fail(path + ".type", "unknown modulation '" + *type + "' (constant, raised_cosine, sine)");
        return std::nullopt;
    }
    // u_max = u_max_full cos(Lambda) must stay positive.
    if (mod.min_value() < 0.0 || mod.max_value() >= std::numbers::pi / 2)
        rd.fail(path, "Lambda(t) ranges over [" + std::to_string(mod.min_value()) + ", " +
                          std::to_string(mod.max_value()) + "], must stay within [0, pi/2)");
    return mod;
}

inline std::optional<Ramp> read_ramp(ConfigReader& rd, const nlohmann::json& j, const std::string& key,
                                     const std::string& path, int m) {
    const auto* r = rd.child(j, key, path, false);
    if (!r) return std::nullopt;
    const std::string p = ConfigReader::join(path, key);
    check_known_keys(rd, *r, p, {"start", "end"});
    auto start = rd.vector(*r, "start", p, m, true);
    auto end = rd.vector(*r, "end", p, m, true);
    if (!start || !end) return std::nullopt;
    return Ramp{*start, *end};
}

}  // namespace detail

/// Parses and validates a scenario document. Returns the config or every problem found.
struct ValidationResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value(); }
};

inline ValidationResult validate_config(const nlohmann::json& root) {
    using detail::check_known_keys;
    detail::ConfigReader rd;
    ScenarioConfig cfg;
    if (!root.is_object()) return {std::nullopt, {"<root>: expected a JSON object"}};
    check_known_keys(rd, root, "",
                     {"name", "kind", "B", "limits", "schedule", "dt", "duration", "initial", "command",
                      "baseline", "steady_state", "weighting", "idca", "rpica", "qpca", "algorithms",
                      "feasibility_tol", "membership_tol", "record_timing", "threads"});

    cfg.name = rd.string(root, "name", "").value_or("scenario");
    if (auto kind = rd.string(root, "kind", "", true)) {
        if (*kind == "stationary") cfg.kind = ScenarioKind::stationary;
        else if (*kind == "montecarlo") cfg.kind = ScenarioKind::monte_carlo;
        else if (*kind == "timesim") cfg.kind = ScenarioKind::timesim;
        else rd.fail("kind", "unknown kind '" + *kind + "' (stationary, montecarlo, timesim)");
    }

    const auto b = detail::read_matrix(rd, root);
    if (!b) return {std::nullopt, rd.errors};  // everything below is sized by B
    cfg.b = EffectivenessMatrix(*b);
    const int m = cfg.effectors();
    const int o = cfg.axes();

    cfg.dt = rd.number(root, "dt", "").value_or(kDefaultDt);
    if (!(cfg.dt > 0.0)) rd.fail("dt", "must be positive");
    cfg.duration = rd.number(root, "duration", "").value_or(60.0);
    if (!(cfg.duration > 0.0)) rd.fail("duration", "must be positive");

    // limits
    const double inf = std::numeric_limits<double>::infinity();
    cfg.limits = ActuatorLimits::uniform(m, -inf, inf, -inf, inf);
    if (const auto* jl = rd.child(root, "limits", "", true)) {
        check_known_keys(rd, *jl, "limits", {"u_min", "u_max", "rate_min", "rate_max"});
        if (auto v = rd.vector(*jl, "u_min", "limits", m, true)) cfg.limits.u_min = *v;
        if (auto v = rd.vector(*jl, "u_max", "limits", m, true)) cfg.limits.u_max = *v;
        if (auto v = rd.vector(*jl, "rate_min", "limits", m, false, true)) cfg.limits.rate_min = *v;
        if (auto v = rd.vector(*jl, "rate_max", "limits", m, false, true)) cfg.limits.rate_max = *v;
        for (int i = 0; i < m; ++i) {
            const std::string idx = "[" + std::to_string(i) + "]";
            const std::string eff = " (effector " + std::to_string(i + 1) + ")";
            if (cfg.limits.u_min(i) > cfg.limits.u_max(i))
                rd.fail("limits.u_min" + idx, "u_min > u_max" + eff);
            if (cfg.limits.rate_min(i) >= 0.0) rd.fail("limits.rate_min" + idx, "must be negative" + eff);
            if (cfg.limits.rate_max(i) <= 0.0) rd.fail("limits.rate_max" + idx, "must be positive" + eff);
        }
    }

    // schedule
    if (const auto* js = rd.child(root, "schedule", "", false)) {
        check_known_keys(rd, *js, "schedule", {"u_max_full", "modulation", "rate_max", "rate_min"});
        LimitSchedule s;
        bool ok = true;
        if (auto v = rd.vector(*js, "u_max_full", "schedule", m, true)) s.u_max_full = *v;
        else ok = false;
        if (const auto* jm = rd.child(*js, "modulation", "schedule", true)) {
            if (auto mod = detail::read_modulation(rd, *jm, "schedule.modulation")) s.modulation = *mod;
            else ok = false;
        } else {
            ok = false;
        }
        s.rate_max = detail::read_ramp(rd, *js, "rate_max", "schedule", m);
        s.rate_min = detail::read_ramp(rd, *js, "rate_min", "schedule", m);
        if (ok) {
            for (int i = 0; i < m; ++i) {
                const std::string eff = " (effector " + std::to_string(i + 1) + ")";
                const double lowest = s.u_max_full(i) * std::cos(s.modulation.max_value());
                if (lowest < cfg.limits.u_min(i))
                    rd.fail("schedule.u_max_full[" + std::to_string(i) + "]",
                            "scheduled u_max drops below u_min" + eff);
            }
            for (const auto* ramp : {&s.rate_max, &s.rate_min}) {
                if (!*ramp) continue;
                const bool is_max = ramp == &s.rate_max;
                const std::string p = is_max ? "schedule.rate_max" : "schedule.rate_min";
                for (int i = 0; i < m; ++i)
                    for (double v : {(*ramp)->start(i), (*ramp)->end(i)})
                        if (is_max ? v <= 0.0 : v >= 0.0)
                            rd.fail(p + "[" + std::to_string(i) + "]",
                                    std::string("rate bound must be ") + (is_max ? "positive" : "negative") +
                                        " over the whole run (effector " + std::to_string(i + 1) + ")");
            }
            cfg.schedule = s;
        }
    }

    // initial state
    cfg.initial = ActuatorState::at_rest(Vec::Zero(m), cfg.dt);
    if (const auto* ji = rd.child(root, "initial", "", false)) {
        check_known_keys(rd, *ji, "initial", {"u_prev", "u_prev2"});
        if (auto v = rd.vector(*ji, "u_prev", "initial", m)) cfg.initial.u_prev = cfg.initial.u_prev2 = *v;
        if (auto v = rd.vector(*ji, "u_prev2", "initial", m)) cfg.initial.u_prev2 = *v;
    }

    // command
    if (const auto* jc = rd.child(root, "command", "", true)) {
        auto& c = cfg.command;
        const auto type = rd.string(*jc, "type", "command", true);
        if (type == "constant") {
            check_known_keys(rd, *jc, "command", {"type", "value"});
            c.kind = CommandSource::Kind::constant;
            c.value = rd.vector(*jc, "value", "command", o, true).value_or(Vec::Zero(o));
        } else if (type == "sinusoid") {
            check_known_keys(rd, *jc, "command",
                             {"type", "amplitude", "amplitude_scale", "frequency", "phase", "offset"});
            c.kind = CommandSource::Kind::sinusoid;
            const auto* amp = rd.child(*jc, "amplitude", "command", true);
            if (amp && amp->is_string()) {
                if (*amp == "auto") c.auto_amplitude = true;
                else rd.fail("command.amplitude", "expected \"auto\" or an array of numbers");
            } else if (amp) {
                c.amplitude = rd.vector(*jc, "amplitude", "command", o).value_or(Vec::Zero(o));
            }
            c.amplitude_scale = rd.number(*jc, "amplitude_scale", "command").value_or(1.2);
            if (!(c.amplitude_scale >= 0.0)) rd.fail("command.amplitude_scale", "must be >= 0");
            c.frequency = rd.vector(*jc, "frequency", "command", o, true).value_or(Vec::Zero(o));
            c.phase = rd.vector(*jc, "phase", "command", o).value_or(Vec::Zero(o));
            c.offset = rd.vector(*jc, "offset", "command", o).value_or(Vec::Zero(o));
        } else if (type == "gaussian") {
            check_known_keys(rd, *jc, "command", {"type", "mean", "sigma", "sigma_scale", "samples", "seed"});
            c.kind = CommandSource::Kind::gaussian;
            c.mean = rd.vector(*jc, "mean", "command", o, true).value_or(Vec::Zero(o));
            const auto sigma = rd.vector(*jc, "sigma", "command", o);
            const auto scale = rd.number(*jc, "sigma_scale", "command");
            if (sigma && scale) rd.fail("command.sigma", "give either sigma or sigma_scale, not both");
            if (sigma) c.sigma = *sigma;
            else if (scale) c.sigma = *scale * c.mean.cwiseAbs();
            else rd.fail("command.sigma", "missing required key (or sigma_scale)");
            if (c.sigma.size() == o && (c.sigma.array() < 0.0).any()) rd.fail("command.sigma", "must be >= 0");
            const auto samples = rd.number(*jc, "samples", "command", true);
            if (samples) {
                if (*samples < 1 || *samples != std::floor(*samples) || *samples > 1e8)
                    rd.fail("command.samples", "must be a positive integer");
                else
                    c.samples = static_cast<int>(*samples);
            }
            const auto* seed = rd.child(*jc, "seed", "command", true);
            if (seed) {
                if (seed->is_number_unsigned()) c.seed = seed->get<std::uint64_t>();
                else if (seed->is_number_integer() && seed->get<std::int64_t>() >= 0)
                    c.seed = static_cast<std::uint64_t>(seed->get<std::int64_t>());
                else rd.fail("command.seed", "must be a non-negative integer");
            }
        } else if (type) {
            rd.fail("command.type", "unknown command type '" + *type + "' (constant, sinusoid, gaussian)");
        }
    }

    // baseline u_r
    cfg.baseline = {{0.0}, {Vec::Zero(m)}};
    if (const auto* jr = rd.child(root, "baseline", "", false)) {
        check_known_keys(rd, *jr, "baseline", {"u_r", "times", "values"});
        if (rd.child(*jr, "u_r", "baseline", false)) {
            if (auto v = rd.vector(*jr, "u_r", "baseline", m)) cfg.baseline = {{0.0}, {*v}};
        } else if (const auto* jt = rd.child(*jr, "times", "baseline", true)) {
            const auto* jv = rd.child(*jr, "values", "baseline", true);
            if (!jt->is_array() || jt->empty() || !jv || !jv->is_array() || jv->size() != jt->size()) {
                rd.fail("baseline", "times and values must be non-empty arrays of equal length");
            } else {
                BaselineSchedule s;
                for (std::size_t k = 0; k < jt->size(); ++k) {
                    const std::string p = "baseline.times[" + std::to_string(k) + "]";
                    if (!(*jt)[k].is_number()) {
                        rd.fail(p, "expected a number");
                        continue;
                    }
                    const double t = (*jt)[k].get<double>();
                    if (!s.times.empty() && !(t > s.times.back())) rd.fail(p, "times must increase");
                    s.times.push_back(t);
                    nlohmann::json wrap = {{"v", (*jv)[k]}};
                    s.values.push_back(
                        rd.vector(wrap, "v", "baseline.values[" + std::to_string(k) + "]", m).value_or(Vec::Zero(m)));
                }
                if (s.times.size() == jt->size()) cfg.baseline = s;
            }
        }
    }

    // steady-state target
    const bool can_condition = o == 3 && m == 4;
    cfg.steady_state = can_condition ? SteadyStatePolicy::conditionalized : SteadyStatePolicy::baseline;
    if (auto s = rd.string(root, "steady_state", "")) {
        if (*s == "conditionalized") {
            if (!can_condition) rd.fail("steady_state", "conditionalized target needs a 3x4 B");
            cfg.steady_state = SteadyStatePolicy::conditionalized;
        } else if (*s == "baseline") {
            cfg.steady_state = SteadyStatePolicy::baseline;
        } else {
            rd.fail("steady_state", "unknown policy '" + *s + "' (conditionalized, baseline)");
        }
    }

    // weighting
    cfg.weighting.drag = DragModel::default_for(m);
    if (const auto* jw = rd.child(root, "weighting", "", false)) {
        check_known_keys(rd, *jw, "weighting", {"epsilon", "drag"});
        cfg.weighting.epsilon = rd.number(*jw, "epsilon", "weighting").value_or(1e-3);
        if (!(cfg.weighting.epsilon > 0.0)) rd.fail("weighting.epsilon", "must be positive");
        if (const auto* jd = rd.child(*jw, "drag", "weighting", false)) {
            check_known_keys(rd, *jd, "weighting.drag", {"c0", "c1", "floor"});
            if (auto v = rd.vector(*jd, "c0", "weighting.drag", m)) cfg.weighting.drag.c0 = *v;
            if (auto v = rd.vector(*jd, "c1", "weighting.drag", m)) cfg.weighting.drag.c1 = *v;
            cfg.weighting.drag.floor = rd.number(*jd, "floor", "weighting.drag").value_or(1e-6);
            if (!(cfg.weighting.drag.floor > 0.0)) rd.fail("weighting.drag.floor", "must be positive");
        }
    }

    // allocator options
    auto& al = cfg.allocator;
    if (const auto* ji = rd.child(root, "idca", "", false)) {
        check_known_keys(rd, *ji, "idca",
                         {"max_iterations", "residual_tol", "rank_tol", "shift_steady_state", "release_saturated"});
        if (auto n = rd.number(*ji, "max_iterations", "idca")) {
            if (*n < 1 || *n != std::floor(*n) || *n > 1e6) rd.fail("idca.max_iterations", "must be an integer >= 1");
            else al.idca.max_iterations = static_cast<int>(*n);
        }
        al.idca.residual_tol = rd.number(*ji, "residual_tol", "idca").value_or(al.idca.residual_tol);
        if (!(al.idca.residual_tol > 0.0)) rd.fail("idca.residual_tol", "must be positive");
        al.idca.rank_tol = rd.number(*ji, "rank_tol", "idca").value_or(al.idca.rank_tol);
        if (!(al.idca.rank_tol >= 0.0)) rd.fail("idca.rank_tol", "must be >= 0");
        al.idca.shift_steady_state = rd.boolean(*ji, "shift_steady_state", "idca").value_or(true);
        al.idca.release_saturated = rd.boolean(*ji, "release_saturated", "idca").value_or(true);
    }
    if (const auto* jr = rd.child(root, "rpica", "", false)) {
        check_known_keys(rd, *jr, "rpica", {"max_iterations", "residual_tol", "rank_tol"});
        if (auto n = rd.number(*jr, "max_iterations", "rpica")) {
            if (*n < 1 || *n != std::floor(*n) || *n > 1e6) rd.fail("rpica.max_iterations", "must be an integer >= 1");
            else al.redistribution.max_iterations = static_cast<int>(*n);
        }
        al.redistribution.residual_tol = rd.number(*jr, "residual_tol", "rpica").value_or(1e-6);
        if (!(al.redistribution.residual_tol > 0.0)) rd.fail("rpica.residual_tol", "must be positive");
        al.redistribution.rank_tol = rd.number(*jr, "rank_tol", "rpica").value_or(kDefaultRankTol);
    }
    if (const auto* jq = rd.child(root, "qpca", "", false)) {
        check_known_keys(rd, *jq, "qpca", {"reg_lambda", "weight", "u_ref", "polish"});
        al.qpca.reg_lambda = rd.number(*jq, "reg_lambda", "qpca").value_or(1e-6);
        if (!(al.qpca.reg_lambda >= 0.0)) rd.fail("qpca.reg_lambda", "must be >= 0");
        if (auto v = rd.vector(*jq, "u_ref", "qpca", m)) al.qpca.u_ref = *v;
        al.qpca.polish = rd.boolean(*jq, "polish", "qpca").value_or(true);
        if (const auto* jw = rd.child(*jq, "weight", "qpca", false)) {
            Mat w(o, o);
            bool ok = jw->is_array() && static_cast<int>(jw->size()) == o;
            for (int r = 0; ok && r < o; ++r) {
                const auto& row = (*jw)[static_cast<std::size_t>(r)];
                ok = row.is_array() && static_cast<int>(row.size()) == o;
                for (int c = 0; ok && c < o; ++c) {
                    ok = row[static_cast<std::size_t>(c)].is_number();
                    if (ok) w(r, c) = row[static_cast<std::size_t>(c)].get<double>();
                }
            }
            if (!ok) {
                rd.fail("qpca.weight", "expected an " + std::to_string(o) + "x" + std::to_string(o) + " matrix");
            } else {
                Eigen::LLT<Mat> llt(w);
                if (!w.isApprox(w.transpose(), 1e-12) || llt.info() != Eigen::Success)
                    rd.fail("qpca.weight", "must be symmetric positive definite");
                else
                    al.qpca.weight = w;
            }
        }
    }

    // algorithms
    if (const auto* ja = rd.child(root, "algorithms", "", false)) {
        if (!ja->is_array()) {
            rd.fail("algorithms", "expected an array of names");
        } else {
            for (std::size_t k = 0; k < ja->size(); ++k) {
                const auto& e = (*ja)[k];
                auto a = e.is_string() ? parse_algorithm(e.get<std::string>()) : std::nullopt;
                if (!a) rd.fail("algorithms[" + std::to_string(k) + "]", "unknown algorithm " + e.dump());
                else cfg.algorithms.push_back(*a);
            }
        }
    } else if (cfg.kind == ScenarioKind::timesim) {
        cfg.algorithms = {Algorithm::idca};
    } else {
        cfg.algorithms = {Algorithm::pica, Algorithm::saturated_pica, Algorithm::rpica, Algorithm::rspica,
                          Algorithm::qpca, Algorithm::idca};
    }

    cfg.feasibility_tol = rd.number(root, "feasibility_tol", "").value_or(kDefaultFeasibilityTol);
    if (!(cfg.feasibility_tol >= 0.0)) rd.fail("feasibility_tol", "must be >= 0");
    cfg.membership_tol = rd.number(root, "membership_tol", "").value_or(1e-6);
    if (!(cfg.membership_tol > 0.0)) rd.fail("membership_tol", "must be positive");
    cfg.record_timing = rd.boolean(root, "record_timing", "").value_or(true);
    if (auto t = rd.number(root, "threads", "")) {
        if (*t < 1 || *t != std::floor(*t) || *t > 256) rd.fail("threads", "must be an integer in [1, 256]");
        else cfg.threads = static_cast<int>(*t);
    }

    // cross-field checks
    if (cfg.kind == ScenarioKind::stationary && cfg.command.kind != CommandSource::Kind::constant)
        rd.fail("command.type", "stationary scenarios need a constant command");
    if (cfg.kind == ScenarioKind::monte_carlo && cfg.command.kind != CommandSource::Kind::gaussian)
        rd.fail("command.type", "montecarlo scenarios need a gaussian command");
    if (cfg.kind == ScenarioKind::timesim && cfg.command.kind == CommandSource::Kind::gaussian)
        rd.fail("command.type", "timesim scenarios need a constant or sinusoid command");
    if (cfg.kind == ScenarioKind::timesim && cfg.dt > cfg.duration) rd.fail("dt", "must not exceed duration");
    if (cfg.baseline.times.size() > 1 &&
        (cfg.baseline.times.front() > 0.0 || cfg.baseline.times.back() < cfg.duration))
        rd.fail("baseline.times", "schedule must cover [0, duration]");
    cfg.initial.dt = cfg.dt;

    if (!rd.errors.empty()) return {std::nullopt, rd.errors};
    return {std::move(cfg), {}};
}

inline ValidationResult validate_config(std::string_view text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        return {std::nullopt, {std::string("<syntax>: ") + e.what()}};
    }
    return validate_config(root);
}

inline ScenarioConfig parse_config(std::string_view text) {
    auto r = validate_config(text);
    if (!r.config) throw ConfigError(std::move(r.errors));
    return std::move(*r.config);
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open config file"});
    std::ostringstream ss;
    ss << in.rdbuf();
    auto r = validate_config(std::string_view(ss.str()));
    if (!r.config) {
        for (auto& e : r.errors) e = path.string() + ": " + e;
        throw ConfigError(std::move(r.errors));
    }
    return std::move(*r.config);
}

}  // namespace ccalloc
