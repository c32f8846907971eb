// SPDX-License-Identifier: Apache-2.0
//
// Planar geometry primitives used by the scene and propagation code.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mmsense {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Angle of the direction a->b in (-pi, pi].
inline double bearing(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r >= kTwoPi ? 0.0 : r;
}

/// Absolute angular separation in [0, pi].
inline double angular_offset(double a, double b) {
    const double d = wrap_angle(a - b);
    return d > std::numbers::pi ? kTwoPi - d : d;
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool valid() const { return x1 > x0 && y1 > y0; }
    bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    /// Disk of the given radius fits entirely inside.
    bool contains_disk(Vec2 c, double r) const {
        return c.x - r >= x0 && c.x + r <= x1 && c.y - r >= y0 && c.y + r <= y1;
    }
    bool contains_rect(const Rect& o) const {
        return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
    }
    /// Open-interior overlap; rectangles sharing only an edge do not overlap.
    bool overlaps(const Rect& o) const {
        return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
    }
    Vec2 center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Distance from p to the closed segment [a, b].
inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

/// True when the segment passes strictly inside the disk (tangency does not block).
inline bool segment_hits_disk(Vec2 a, Vec2 b, Vec2 center, double radius) {
    return point_segment_distance(center, a, b) < radius;
}

/// Squared distance from p to the rectangle (0 inside).
inline double point_rect_distance_sq(Vec2 p, const Rect& r) {
    const double dx = std::max({r.x0 - p.x, 0.0, p.x - r.x1});
    const double dy = std::max({r.y0 - p.y, 0.0, p.y - r.y1});
    return dx * dx + dy * dy;
}

/// Disk intersects the rectangle's open interior.
inline bool disk_overlaps_rect(Vec2 c, double radius, const Rect& r) {
    return point_rect_distance_sq(c, r) < radius * radius;
}

/// True when the segment crosses the open interior of the rectangle (Liang-Barsky clip).
/// Segments running along an edge do not count as crossing.
inline bool segment_hits_rect(Vec2 a, Vec2 b, const Rect& r) {
    double t0 = 0.0;
    double t1 = 1.0;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.x0, r.x1 - a.x, a.y - r.y0, r.y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] <= 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 >= t1) return false;
    }
    // Clipped piece must have a midpoint strictly inside.
    const Vec2 m = a + (0.5 * (t0 + t1)) * (b - a);
    return m.x > r.x0 && m.x < r.x1 && m.y > r.y0 && m.y < r.y1;
}

}  // namespace mmsense
