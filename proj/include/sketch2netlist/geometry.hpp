#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace s2n {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

/// Non-degenerate segment: p1 != p2.
struct LineSegment {
    Point p1;
    Point p2;
};

/// Axis-aligned box, origin top-left, y down. Requires x_min < x_max and
/// y_min < y_max.
struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool valid() const { return x_min < x_max && y_min < y_max; }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
};

enum class Orientation { Horizontal, Vertical };

inline double euclidean_distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Classifies by the absolute inclination angle: vertical iff the angle of
/// |dy|/|dx| exceeds 45 degrees. Exactly 45 degrees is horizontal.
inline Orientation segment_orientation(const LineSegment& seg) {
    const double adx = std::abs(seg.p2.x - seg.p1.x);
    const double ady = std::abs(seg.p2.y - seg.p1.y);
    return ady > adx ? Orientation::Vertical : Orientation::Horizontal;
}

/// Denominator threshold below which two lines are treated as parallel.
inline constexpr double kParallelEps = 1e-9;

/// Intersection of the infinite lines through the two segments, via the
/// implicit-form coefficients a = y2-y1, b = x1-x2, c = a*x1 + b*y1.
/// Returns nothing when the lines are (near-)parallel.
inline std::optional<Point> line_intersection(const LineSegment& s1, const LineSegment& s2) {
    const double a1 = s1.p2.y - s1.p1.y;
    const double b1 = s1.p1.x - s1.p2.x;
    const double c1 = a1 * s1.p1.x + b1 * s1.p1.y;
    const double a2 = s2.p2.y - s2.p1.y;
    const double b2 = s2.p1.x - s2.p2.x;
    const double c2 = a2 * s2.p1.x + b2 * s2.p1.y;
    const double det = a1 * b2 - a2 * b1;
    if (std::abs(det) <= kParallelEps) return std::nullopt;
    return Point{(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
}

inline bool point_in_segment_interval(const Point& p, const LineSegment& s, double tol) {
    const double lo_x = std::min(s.p1.x, s.p2.x) - tol;
    const double hi_x = std::max(s.p1.x, s.p2.x) + tol;
    const double lo_y = std::min(s.p1.y, s.p2.y) - tol;
    const double hi_y = std::max(s.p1.y, s.p2.y) + tol;
    return p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y;
}

/// True iff p lies inside the tol-expanded axis-aligned interval of each
/// segment separately.
inline bool point_on_both_segments(const Point& p, const LineSegment& s1, const LineSegment& s2,
                                   double tol) {
    return point_in_segment_interval(p, s1, tol) && point_in_segment_interval(p, s2, tol);
}

/// Pooled variant: one min/max over all four endpoints' coordinates. Kept for
/// fidelity experiments; accepts points far outside either segment.
inline bool point_on_both_segments_pooled(const Point& p, const LineSegment& s1,
                                          const LineSegment& s2, double tol) {
    const double lo_x = std::min({s1.p1.x, s1.p2.x, s2.p1.x, s2.p2.x}) - tol;
    const double hi_x = std::max({s1.p1.x, s1.p2.x, s2.p1.x, s2.p2.x}) + tol;
    const double lo_y = std::min({s1.p1.y, s1.p2.y, s2.p1.y, s2.p2.y}) - tol;
    const double hi_y = std::max({s1.p1.y, s1.p2.y, s2.p1.y, s2.p2.y}) + tol;
    return p.x >= lo_x && p.x <= hi_x && p.y >= lo_y && p.y <= hi_y;
}

/// Intersection-over-union of two boxes; 0 when disjoint.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

/// Euclidean distance from a point to the outline (not the filled area) of a
/// box. Zero on the outline, positive inside and outside.
inline double distance_to_box_perimeter(const Point& p, const BoundingBox& box) {
    const double dx = std::max({box.x_min - p.x, p.x - box.x_max, 0.0});
    const double dy = std::max({box.y_min - p.y, p.y - box.y_max, 0.0});
    if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
    return std::min({p.x - box.x_min, box.x_max - p.x, p.y - box.y_min, box.y_max - p.y});
}

/// Chebyshev counterpart, used for rasterizing box outlines.
inline double chebyshev_to_box_perimeter(const Point& p, const BoundingBox& box) {
    const double dx = std::max({box.x_min - p.x, p.x - box.x_max, 0.0});
    const double dy = std::max({box.y_min - p.y, p.y - box.y_max, 0.0});
    if (dx > 0.0 || dy > 0.0) return std::max(dx, dy);
    return std::min({p.x - box.x_min, box.x_max - p.x, p.y - box.y_min, box.y_max - p.y});
}

}  // namespace s2n
