// Copyright 2026 The biped-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIPED_SUPPORT_POLYGON_HPP
#define BIPED_SUPPORT_POLYGON_HPP

#include <biped/model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace biped {

/// Convex, counter-clockwise planar polygon.
struct SupportPolygon {
    std::vector<PlanarPoint> vertices;

    double area() const {
        double a = 0.0;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto &p = vertices[i];
            const auto &q = vertices[(i + 1) % n];
            a += p.x * q.y - q.x * p.y;
        }
        return 0.5 * a;
    }
};

namespace detail {

inline double cross(const PlanarPoint &o, const PlanarPoint &a, const PlanarPoint &b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double segment_distance(const PlanarPoint &p, const PlanarPoint &a, const PlanarPoint &b) {
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * ex), p.y - (a.y + t * ey));
}

} // namespace detail

/// Andrew's monotone chain; collinear points are dropped.
inline SupportPolygon convex_hull(std::vector<PlanarPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const PlanarPoint &a, const PlanarPoint &b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    if (pts.size() < 3) return {pts};
    std::vector<PlanarPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto &p : pts) {
        while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return {hull};
}

/// Sole rectangle of a foot centred at (x, y) with heading yaw.
inline SupportPolygon foot_polygon(double x, double y, double yaw, double length, double width) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const double hl = 0.5 * length, hw = 0.5 * width;
    const double corners[4][2] = {{-hl, -hw}, {hl, -hw}, {hl, hw}, {-hl, hw}};
    SupportPolygon poly;
    for (const auto &c2 : corners)
        poly.vertices.push_back({x + c * c2[0] - s * c2[1], y + s * c2[0] + c * c2[1]});
    return poly;
}

inline SupportPolygon merge_polygons(const SupportPolygon &a, const SupportPolygon &b) {
    std::vector<PlanarPoint> pts = a.vertices;
    pts.insert(pts.end(), b.vertices.begin(), b.vertices.end());
    return convex_hull(std::move(pts));
}

/// Signed Euclidean distance from p to the polygon boundary, positive inside.
inline double zmp_margin(const PlanarPoint &p, const SupportPolygon &poly) {
    const std::size_t n = poly.vertices.size();
    if (n < 3 || !(poly.area() > 0.0))
        throw ValidationError("degenerate support polygon");
    double dist = std::numeric_limits<double>::infinity();
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
        const auto &a = poly.vertices[i];
        const auto &b = poly.vertices[(i + 1) % n];
        dist = std::min(dist, detail::segment_distance(p, a, b));
        if (detail::cross(a, b, p) < 0.0) inside = false;
    }
    return inside ? dist : -dist;
}

} // namespace biped

#endif
