#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sketch2netlist/clustering.hpp"
#include "sketch2netlist/detection.hpp"
#include "sketch2netlist/errors.hpp"
#include "sketch2netlist/geometry.hpp"
#include "sketch2netlist/pipeline.hpp"
#include "sketch2netlist/raster.hpp"

namespace s2n {

struct SynthSpec {
    std::uint64_t seed = 1;
    int canvas = 416;
    int component_count = 3;  // 2..6
    double jitter = 2.0;      // per-endpoint noise in pixels
    double stroke = 3.0;      // drawn line thickness
};

/// A generated case: image plus pixel-exact ground truth.
struct SynthCase {
    GrayImage image;
    GroundTruthSet detections;
    std::vector<Point> nodes;
    std::vector<Point> terminals;  // wire/box crossings, two per component
    Netlist netlist;
};

namespace synth_detail {

inline void draw_disc(GrayImage& img, double cx, double cy, double radius) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius) img.set(x, y, 0);
}

inline void draw_line(GrayImage& img, Point a, Point b, double stroke, double overshoot = 0.0) {
    const double len = euclidean_distance(a, b);
    if (len <= 0.0) {
        draw_disc(img, a.x, a.y, stroke / 2.0);
        return;
    }
    const double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;
    a.x -= ux * overshoot;
    a.y -= uy * overshoot;
    b.x += ux * overshoot;
    b.y += uy * overshoot;
    const double full = len + 2.0 * overshoot;
    const int steps = static_cast<int>(std::ceil(full * 2.0));
    for (int i = 0; i <= steps; ++i) {
        const double t = full * i / steps;
        draw_disc(img, a.x + ux * t, a.y + uy * t, stroke / 2.0);
    }
}

inline void draw_polyline(GrayImage& img, const std::vector<Point>& pts, double stroke) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) draw_line(img, pts[i], pts[i + 1], stroke);
}

/// Component glyph drawn in a local frame: `axis` is the unit vector along
/// the branch, `across` its perpendicular. Glyph ink stays within +/-21 along
/// the axis and +/-13 across, comfortably inside the 28 x 18 half-size box.
inline void draw_glyph(GrayImage& img, ComponentClass cls, Point c, Point axis, double stroke) {
    const Point across{-axis.y, axis.x};
    auto at = [&](double s, double t) { return Point{c.x + s * axis.x + t * across.x, c.y + s * axis.y + t * across.y}; };

    switch (cls) {
        case ComponentClass::Resistor: {
            std::vector<Point> z{at(-20, 0), at(-15, 0)};
            for (int i = 0; i < 6; ++i) z.push_back(at(-15 + 5 * (i + 1), (i % 2 == 0) ? -8 : 8));
            z.push_back(at(15, 0));
            z.push_back(at(20, 0));
            draw_polyline(img, z, stroke);
            break;
        }
        case ComponentClass::VoltageSource: {
            std::vector<Point> circle;
            for (int i = 0; i <= 24; ++i) {
                const double a = 2.0 * M_PI * i / 24;
                circle.push_back(at(12 * std::cos(a), 12 * std::sin(a)));
            }
            draw_polyline(img, circle, stroke);
            draw_line(img, at(-20, 0), at(-12, 0), stroke);
            draw_line(img, at(12, 0), at(20, 0), stroke);
            draw_line(img, at(-4, 0), at(4, 0), stroke);  // "+" bar
            draw_line(img, at(0, -4), at(0, 4), stroke);
            break;
        }
        case ComponentClass::Capacitor: {
            draw_line(img, at(-20, 0), at(-4, 0), stroke);
            draw_line(img, at(4, 0), at(20, 0), stroke);
            draw_line(img, at(-4, -12), at(-4, 12), stroke);
            draw_line(img, at(4, -12), at(4, 12), stroke);
            break;
        }
        case ComponentClass::Inductor: {
            draw_line(img, at(-20, 0), at(-16, 0), stroke);
            draw_line(img, at(16, 0), at(20, 0), stroke);
            for (int k = 0; k < 4; ++k) {
                std::vector<Point> bump;
                const double s0 = -16 + 8 * k + 4;
                for (int i = 0; i <= 12; ++i) {
                    const double a = M_PI - M_PI * i / 12;
                    bump.push_back(at(s0 + 4 * std::cos(a), -8 * std::sin(a)));
                }
                draw_polyline(img, bump, stroke);
            }
            break;
        }
        case ComponentClass::Diode: {
            draw_line(img, at(-20, 0), at(-10, 0), stroke);
            draw_line(img, at(8, 0), at(20, 0), stroke);
            draw_polyline(img, {at(-10, -10), at(-10, 10), at(8, 0), at(-10, -10)}, stroke);
            draw_line(img, at(8, -10), at(8, 10), stroke);
            break;
        }
    }
}

struct Branch {
    int u = 0, v = 0;      // node indices
    double length = 0.0;   // ideal length, before jitter
    bool horizontal = true;
    int component = -1;    // index into the chosen component list, or -1
};

}  // namespace synth_detail

/// Generates a rectilinear single-loop circuit (with one T-branch for larger
/// component counts), draws it with jittered thick strokes, and returns the
/// image together with ground-truth boxes, node locations and netlist.
/// Deterministic per seed. Components land on the longest branches so that
/// nearest-node linking reconstructs the intended connectivity.
inline SynthCase generate_circuit(const SynthSpec& spec) {
    if (spec.component_count < 2 || spec.component_count > 6)
        throw Error(ErrorKind::ConfigError, "component_count must be in [2, 6]");
    if (!(spec.jitter < spec.stroke * 4.0))
        throw Error(ErrorKind::ConfigError, "jitter must stay below stroke x 4");

    using namespace synth_detail;
    SplitMix64 rng(spec.seed);
    const double scale = spec.canvas / 416.0;

    auto rand_in = [&](int lo, int hi) {  // inclusive
        return lo + static_cast<int>(rng.next_below(static_cast<std::size_t>(hi - lo + 1)));
    };

    // Loop rectangle; width and height kept at least 25 px apart so branch
    // lengths stay well separated.
    const int lx = static_cast<int>(rand_in(40, 70) * scale);
    const int rx = spec.canvas - static_cast<int>(rand_in(40, 70) * scale);
    int ty, by;
    do {
        ty = static_cast<int>(rand_in(40, 70) * scale);
        by = spec.canvas - static_cast<int>(rand_in(40, 70) * scale);
    } while (std::abs((rx - lx) - (by - ty)) < 25 * scale);

    const bool use_t = spec.component_count >= 5 || (spec.component_count == 4 && rng.next_double() < 0.5);
    const int mid_sign = rng.next_double() < 0.5 ? -1 : 1;
    const int mx = (lx + rx) / 2 + mid_sign * rand_in(10, 25);

    // Ideal node layout.
    std::vector<Point> ideal{{(double)lx, (double)ty}, {(double)rx, (double)ty},
                             {(double)rx, (double)by}, {(double)lx, (double)by}};
    std::vector<Branch> branches;
    if (!use_t) {
        branches = {{0, 1, double(rx - lx), true}, {1, 2, double(by - ty), false},
                    {3, 2, double(rx - lx), true}, {0, 3, double(by - ty), false}};
    } else {
        ideal.push_back({(double)mx, (double)ty});  // 4: top middle
        ideal.push_back({(double)mx, (double)by});  // 5: bottom middle
        branches = {{0, 4, double(mx - lx), true},  {4, 1, double(rx - mx), true},
                    {1, 2, double(by - ty), false}, {3, 5, double(mx - lx), true},
                    {5, 2, double(rx - mx), true},  {0, 3, double(by - ty), false},
                    {4, 5, double(by - ty), false}};
    }

    // Components take the longest branches; plain wires are shortest, so a
    // deficient node's nearest neighbour is always its wire-connected one.
    std::vector<std::size_t> by_length(branches.size());
    std::iota(by_length.begin(), by_length.end(), 0);
    std::sort(by_length.begin(), by_length.end(), [&](std::size_t a, std::size_t b) {
        if (branches[a].length != branches[b].length) return branches[a].length > branches[b].length;
        return a < b;
    });
    std::vector<std::size_t> comp_branches(by_length.begin(), by_length.begin() + spec.component_count);
    std::sort(comp_branches.begin(), comp_branches.end());
    for (std::size_t i = 0; i < comp_branches.size(); ++i)
        branches[comp_branches[i]].component = static_cast<int>(i);

    // Classes: one voltage source, the rest random.
    std::vector<ComponentClass> classes(spec.component_count);
    classes[0] = ComponentClass::VoltageSource;
    for (int i = 1; i < spec.component_count; ++i)
        classes[i] = static_cast<ComponentClass>(rng.next_below(kClassCount));

    // Jittered node positions (one jitter per node, shared by all wires).
    const int J = static_cast<int>(std::lround(spec.jitter));
    auto jit = [&]() { return static_cast<double>(rand_in(-J, J)); };
    std::vector<Point> nodes(ideal.size());
    for (std::size_t i = 0; i < ideal.size(); ++i) nodes[i] = Point{ideal[i].x + jit(), ideal[i].y + jit()};

    SynthCase out;
    out.image = GrayImage(spec.canvas, spec.canvas, 255);
    out.detections.image_ref = "synth_" + std::to_string(spec.seed);
    out.detections.width = spec.canvas;
    out.detections.height = spec.canvas;
    out.nodes = nodes;

    const double wire_overshoot = 2.0;  // pen overshoot past corners
    constexpr double kHalfAlong = 28.0, kHalfAcross = 18.0, kGlyphHalf = 20.0;

    for (const Branch& br : branches) {
        const Point& u = nodes[br.u];
        const Point& v = nodes[br.v];
        if (br.component < 0) {
            draw_line(out.image, u, v, spec.stroke, wire_overshoot);
            continue;
        }
        // Component centered near the branch midpoint, offset a little along,
        // but keeping both wire stubs at least 25 px long.
        const int max_off = std::max(0, std::min(10, static_cast<int>(br.length / 2.0 - 53.0)));
        const double along_off = static_cast<double>(rand_in(-max_off, max_off));
        Point c{(u.x + v.x) / 2, (u.y + v.y) / 2};
        Point axis = br.horizontal ? Point{1.0, 0.0} : Point{0.0, 1.0};
        // Orient the axis from u toward v so terminal order is stable.
        if ((v.x - u.x) * axis.x + (v.y - u.y) * axis.y < 0) axis = Point{-axis.x, -axis.y};
        c.x += axis.x * along_off;
        c.y += axis.y * along_off;

        const Point t1{c.x - axis.x * kHalfAlong, c.y - axis.y * kHalfAlong};
        const Point t2{c.x + axis.x * kHalfAlong, c.y + axis.y * kHalfAlong};
        const Point lead1{c.x - axis.x * kGlyphHalf, c.y - axis.y * kGlyphHalf};
        const Point lead2{c.x + axis.x * kGlyphHalf, c.y + axis.y * kGlyphHalf};

        draw_line(out.image, u, t1, spec.stroke, wire_overshoot);
        draw_line(out.image, t1, lead1, spec.stroke);
        draw_line(out.image, lead2, t2, spec.stroke);
        draw_line(out.image, t2, v, spec.stroke, wire_overshoot);
        draw_glyph(out.image, classes[br.component], c, axis, spec.stroke);

        GroundTruthItem item;
        item.cls = classes[br.component];
        const double hx = br.horizontal ? kHalfAlong : kHalfAcross;
        const double hy = br.horizontal ? kHalfAcross : kHalfAlong;
        item.bbox = BoundingBox{c.x - hx, c.y - hy, c.x + hx, c.y + hy};
        out.detections.items.push_back(item);
        out.terminals.push_back(t1);
        out.terminals.push_back(t2);
    }

    // Ground-truth netlist: nets are node groups joined by plain wires.
    std::vector<int> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    for (const Branch& br : branches) {
        if (br.component >= 0) continue;
        const int a = find(br.u), b = find(br.v);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> roots;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (find(static_cast<int>(i)) == static_cast<int>(i)) roots.push_back(static_cast<int>(i));
    std::vector<Point> reps(roots.size());
    for (std::size_t r = 0; r < roots.size(); ++r) {
        Point best{1e18, 1e18};
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (find(static_cast<int>(i)) != roots[r]) continue;
            if (nodes[i].y < best.y || (nodes[i].y == best.y && nodes[i].x < best.x)) best = nodes[i];
        }
        reps[r] = best;
    }
    std::vector<std::size_t> order(roots.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (reps[a].y != reps[b].y) return reps[a].y < reps[b].y;
        return reps[a].x < reps[b].x;
    });
    std::vector<int> root_to_net(nodes.size(), -1);
    out.netlist.nets.resize(roots.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        root_to_net[roots[order[rank]]] = static_cast<int>(rank);
        out.netlist.nets[rank] = reps[order[rank]];
    }

    int counters[kClassCount] = {0};
    for (std::size_t bi : comp_branches) {
        const Branch& br = branches[bi];
        NetlistComponent comp;
        comp.cls = classes[br.component];
        comp.designator = std::string(1, class_prefix(comp.cls)) +
                          std::to_string(++counters[static_cast<int>(comp.cls)]);
        comp.net_a = root_to_net[find(br.u)];
        comp.net_b = root_to_net[find(br.v)];
        out.netlist.components.push_back(comp);
    }
    return out;
}

}  // namespace s2n
