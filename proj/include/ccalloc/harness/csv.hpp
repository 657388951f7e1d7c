#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "ccalloc/harness/monte_carlo.hpp"
#include "ccalloc/harness/stationary.hpp"
#include "ccalloc/harness/timesim.hpp"

namespace ccalloc {

/// Shortest text that reads back to the same double.
inline std::string fmt(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace detail {

inline void header_series(std::ostream& os, const char* prefix, int n) {
    for (int i = 1; i <= n; ++i) os << ',' << prefix << i;
}

inline void row_series(std::ostream& os, const Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << fmt(v(i));
}

inline const char* axis_suffix(int i) {
    static const char* names[] = {"x", "y", "z"};
    return i < 3 ? names[i] : nullptr;
}

// nu_cmd_x, nu_cmd_y, nu_cmd_z for three axes, nu_cmd_1.. otherwise
inline void header_axes(std::ostream& os, const std::string& prefix, int o) {
    for (int i = 0; i < o; ++i)
        os << ',' << prefix << '_' << (o == 3 ? axis_suffix(i) : std::to_string(i + 1));
}

}  // namespace detail

inline void write_stationary_csv(std::ostream& os, const StationaryReport& rep, bool record_timing = true) {
    const int m = rep.bounds.size();
    os << "algorithm,cost,error,time_s";
    detail::header_series(os, "u", m);
    os << '\n';
    for (const auto& row : rep.rows) {
        os << to_string(row.algorithm) << ',' << fmt(row.result.cost) << ',' << fmt(row.result.error()) << ','
           << fmt(record_timing ? row.result.elapsed : 0.0);
        detail::row_series(os, row.result.u);
        os << '\n';
    }
}

inline void write_mc_raw_csv(std::ostream& os, const MonteCarloReport& rep, bool record_timing = true) {
    os << "sample,algorithm,cost,error,time_s\n";
    for (std::size_t i = 0; i < rep.samples.size(); ++i)
        for (const auto& t : rep.samples[i].trials)
            os << i << ',' << to_string(t.algorithm) << ',' << fmt(t.result.cost) << ',' << fmt(t.result.error())
               << ',' << fmt(record_timing ? t.result.elapsed : 0.0) << '\n';
}

inline void write_mc_summary_csv(std::ostream& os, const MonteCarloReport& rep, bool record_timing = true) {
    os << "algorithm,metric,p5,p50,p95,mean\n";
    for (const auto& s : rep.summary) {
        const bool zero = !record_timing && s.metric == "time_s";
        os << to_string(s.algorithm) << ',' << s.metric << ',' << fmt(zero ? 0.0 : s.p5) << ','
           << fmt(zero ? 0.0 : s.p50) << ',' << fmt(zero ? 0.0 : s.p95) << ',' << fmt(zero ? 0.0 : s.mean) << '\n';
    }
}

inline void write_timesim_csv(std::ostream& os, const TimesimLog& log) {
    if (log.steps.empty()) return;
    const int o = static_cast<int>(log.steps.front().nu_cmd.size());
    const int m = static_cast<int>(log.steps.front().u.size());
    os << 't';
    detail::header_axes(os, "nu_cmd", o);
    detail::header_axes(os, "nu_ach", o);
    detail::header_axes(os, "err", o);
    for (const char* p : {"u", "udot", "lo", "hi", "rlo", "rhi"}) detail::header_series(os, p, m);
    os << '\n';
    for (const auto& s : log.steps) {
        os << fmt(s.t);
        for (const Vec* v : {&s.nu_cmd, &s.nu_ach, &s.err, &s.u, &s.udot, &s.limits.u_min, &s.limits.u_max,
                             &s.limits.rate_min, &s.limits.rate_max})
            detail::row_series(os, *v);
        os << '\n';
    }
}

inline void write_vertices_csv(std::ostream& os, const MomentSet& ms) {
    const int o = ms.vertices.empty() ? 0 : static_cast<int>(ms.vertices.front().size());
    os << "index";
    detail::header_axes(os, "nu", o);
    os << '\n';
    for (std::size_t k = 0; k < ms.vertices.size(); ++k) {
        os << k;
        detail::row_series(os, ms.vertices[k]);
        os << '\n';
    }
}

inline void write_facets_csv(std::ostream& os, const MomentSet& ms) {
    os << "a,b,c\n";
    for (const auto& f : ms.hull_facets) os << f[0] << ',' << f[1] << ',' << f[2] << '\n';
}

class OutputError : public Error {
public:
    using Error::Error;
};

/// Opens path for writing, creating parent directories; throws Error on failure.
inline std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write " + path.string());
    return out;
}

}  // namespace ccalloc
