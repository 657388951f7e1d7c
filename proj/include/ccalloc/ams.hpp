#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Geometry>

#include "ccalloc/bvls.hpp"
#include "ccalloc/core.hpp"

namespace ccalloc {

/// Attainable moment set of a box: vertex images and, for o = 3, a triangulated hull.
struct MomentSet {
    std::vector<Vec> vertices;  // vertex k is B applied to corner k (bit i set -> hi_i)
    std::vector<std::array<int, 3>> hull_facets;
    Vec lower;  // per-axis extent
    Vec upper;

    Vec half_extent() const { return (upper - lower) / 2.0; }
};

/// Incremental 3-D convex hull. Points within rel_tol * scale of a face plane
/// count as on it. Facets are oriented with outward normals (right-hand rule).
/// Returns no facets when the points do not span three dimensions.
inline std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<Eigen::Vector3d>& pts,
                                                      double rel_tol = 1e-10) {
    struct Face {
        std::array<int, 3> v;
        Eigen::Vector3d n;
        double d;
        bool alive;
    };
    const int n = static_cast<int>(pts.size());
    if (n < 4) return {};
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double eps = rel_tol * std::max(scale, 1e-300);

    // Initial tetrahedron from extreme points.
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (pts[i].x() < pts[i0].x()) i0 = i;
    int i1 = i0;
    for (int i = 0; i < n; ++i)
        if ((pts[i] - pts[i0]).norm() > (pts[i1] - pts[i0]).norm()) i1 = i;
    if ((pts[i1] - pts[i0]).norm() <= eps) return {};
    const Eigen::Vector3d axis = (pts[i1] - pts[i0]).normalized();
    int i2 = i0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dist = (pts[i] - pts[i0]).cross(axis).norm();
        if (dist > best) {
            best = dist;
            i2 = i;
        }
    }
    if (best <= eps) return {};
    const Eigen::Vector3d plane = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    int i3 = i0;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dist = std::abs(plane.dot(pts[i] - pts[i0]));
        if (dist > best) {
            best = dist;
            i3 = i;
        }
    }
    if (best <= eps) return {};
    const Eigen::Vector3d inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;

    std::vector<Face> faces;
    auto add_face = [&](int a, int b, int c) {
        Eigen::Vector3d nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        const double len = nrm.norm();
        if (len > 0.0) nrm /= len;
        if (nrm.dot(inside - pts[a]) > 0.0) {
            std::swap(b, c);
            nrm = -nrm;
        }
        faces.push_back({{a, b, c}, nrm, nrm.dot(pts[a]), true});
    };
    add_face(i0, i1, i2);
    add_face(i0, i1, i3);
    add_face(i0, i2, i3);
    add_face(i1, i2, i3);

    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (faces[f].alive && faces[f].n.dot(pts[p]) - faces[f].d > eps) visible.push_back(f);
        if (visible.empty()) continue;
        // Directed edges of visible faces; an edge whose reverse is absent lies on the horizon.
        std::map<std::pair<int, int>, int> edges;
        for (int f : visible) {
            const auto& v = faces[f].v;
            for (int k = 0; k < 3; ++k) edges[{v[k], v[(k + 1) % 3]}] = f;
            faces[f].alive = false;
        }
        for (const auto& [e, f] : edges) {
            if (edges.count({e.second, e.first})) continue;
            Eigen::Vector3d nrm = (pts[e.second] - pts[e.first]).cross(pts[p] - pts[e.first]);
            const double len = nrm.norm();
            if (len > 0.0) nrm /= len;
            faces.push_back({{e.first, e.second, p}, nrm, nrm.dot(pts[p]), true});
        }
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back(f.v);
    return out;
}

inline MomentSet moment_set(const Mat& b, const EffectiveBounds& box) {
    const int m = static_cast<int>(b.cols());
    const int o = static_cast<int>(b.rows());
    if (box.size() != m) throw DimensionError("box length does not match effector count");
    if (m > kMaxEffectors) throw DimensionError("vertex enumeration limited to 16 effectors");
    MomentSet ms;
    const long count = 1L << m;
    ms.vertices.reserve(static_cast<std::size_t>(count));
    ms.lower = Vec::Constant(o, std::numeric_limits<double>::infinity());
    ms.upper = -ms.lower;
    Vec corner(m);
    for (long k = 0; k < count; ++k) {
        for (int i = 0; i < m; ++i) corner(i) = (k >> i) & 1 ? box.hi(i) : box.lo(i);
        Vec v = b * corner;
        ms.lower = ms.lower.cwiseMin(v);
        ms.upper = ms.upper.cwiseMax(v);
        ms.vertices.push_back(std::move(v));
    }
    if (o == 3) {
        std::vector<Eigen::Vector3d> pts;
        pts.reserve(ms.vertices.size());
        for (const auto& v : ms.vertices) pts.emplace_back(v(0), v(1), v(2));
        ms.hull_facets = convex_hull_3d(pts);
    }
    return ms;
}

/// Smallest ||B u - nu|| over the box, from the bounded least-squares solver.
inline double attainable_distance(const Mat& b, const EffectiveBounds& box, const Vec& nu) {
    const int m = static_cast<int>(b.cols());
    return solve_box_lsq(b, nu, box.lo, box.hi, 10 * m * static_cast<int>(b.rows()) + 10 * m).residual_norm;
}

inline bool contains(const Mat& b, const EffectiveBounds& box, const Vec& nu, double tol = 1e-6) {
    if (!(tol > 0.0)) throw InvalidArgumentError("membership tolerance must be positive");
    return attainable_distance(b, box, nu) <= tol;
}

}  // namespace ccalloc
