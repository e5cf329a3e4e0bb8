#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sketch2netlist/clustering.hpp"
#include "sketch2netlist/detection.hpp"
#include "sketch2netlist/errors.hpp"
#include "sketch2netlist/geometry.hpp"
#include "sketch2netlist/hough.hpp"
#include "sketch2netlist/raster.hpp"

namespace s2n {

/// A component endpoint: where its wire crosses the detected bounding box.
struct Terminal {
    int id = 0;
    Point point;
    int component_id = 0;  // index into the filtered detection set
};

/// A wire junction or corner.
struct Node {
    int id = 0;
    Point point;
};

struct NetlistComponent {
    ComponentClass cls = ComponentClass::Resistor;
    std::string designator;
    int net_a = 0;
    int net_b = 0;
};

/// Labeled multigraph: components as edges between dense net ids.
struct Netlist {
    std::vector<NetlistComponent> components;
    std::vector<Point> nets;  // representative point per dense net id
};

struct PipelineParams {
    AdaptiveThresholdParams adaptive;
    HoughParams hough;
    std::uint64_t kmeans_seed = 0;
    double perimeter_stroke = 3.0;
    int node_dilate_radius = 6;
    double containment_tol = 2.0;
    double score_threshold = 0.5;
    // The pooled variant checks one interval over all four endpoints; the
    // per-segment check is the default, the pooled one is an experiment.
    bool pooled_containment = false;
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct Diagnostics {
    std::vector<StageTiming> timings;
    std::size_t evidence_pixels = 0;
    std::size_t segments = 0;
    std::size_t horizontal_segments = 0;
    std::size_t vertical_segments = 0;
    std::size_t intersections = 0;
    std::size_t contours = 0;
};

struct ReconstructionResult {
    Netlist netlist;
    std::vector<Terminal> terminals;
    std::vector<Node> nodes;
    std::vector<LineSegment> segments;
    Diagnostics diagnostics;
};

namespace detail {

inline std::vector<BoundingBox> boxes_of(const DetectionSet& dets) {
    std::vector<BoundingBox> boxes;
    boxes.reserve(dets.detections.size());
    for (const Detection& d : dets.detections) boxes.push_back(d.bbox);
    return boxes;
}

/// Nearest box perimeter; ties go to the lower detection index.
inline int nearest_box(const Point& p, const std::vector<BoundingBox>& boxes) {
    int best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double d = distance_to_box_perimeter(p, boxes[i]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace detail

/// Terminal recognition: intersect the adaptively thresholded ink with the
/// rendered bounding-box outlines, then k-means the evidence pixels with
/// k = 2 x component count. If plain clustering leaves a component with a
/// terminal count other than two, that component's evidence is re-clustered
/// with k = 2 on its own.
inline std::vector<Terminal> recognize_terminals(const GrayImage& img, const DetectionSet& dets,
                                                 const PipelineParams& p) {
    if (dets.detections.empty())
        throw Error(ErrorKind::InsufficientTerminalEvidence, "no detections to attach terminals to");
    if (dets.width != img.width || dets.height != img.height)
        throw Error(ErrorKind::DimensionMismatch, "detection set dims do not match image");

    const std::vector<BoundingBox> boxes = detail::boxes_of(dets);
    const BinaryMask ink = adaptive_threshold(img, p.adaptive);
    const BinaryMask outlines = render_box_perimeters(boxes, img.width, img.height, p.perimeter_stroke);
    const BinaryMask evidence = intersect_masks(ink, outlines);

    std::vector<Point> pts;
    for (int y = 0; y < evidence.height; ++y)
        for (int x = 0; x < evidence.width; ++x)
            if (evidence.at(x, y)) pts.push_back(Point{static_cast<double>(x), static_cast<double>(y)});

    const std::size_t k = 2 * dets.detections.size();
    if (pts.size() < k)
        throw Error(ErrorKind::InsufficientTerminalEvidence,
                    "only " + std::to_string(pts.size()) + " evidence pixels for " + std::to_string(k) +
                        " terminals");

    KMeansParams kp;
    kp.k = static_cast<int>(k);
    kp.seed = p.kmeans_seed;
    const ClusterResult clusters = kmeans(pts, kp);

    // Attach each centroid to the component whose perimeter is nearest.
    std::vector<std::vector<Point>> per_component(dets.detections.size());
    for (const Point& c : clusters.centroids) per_component[detail::nearest_box(c, boxes)].push_back(c);

    // Pre-split the evidence pixels by nearest perimeter for the repair pass.
    std::vector<std::vector<Point>> pixels_by_component(dets.detections.size());
    for (const Point& pt : pts) pixels_by_component[detail::nearest_box(pt, boxes)].push_back(pt);

    std::vector<Terminal> terminals;
    for (std::size_t ci = 0; ci < dets.detections.size(); ++ci) {
        std::vector<Point> own = per_component[ci];
        if (own.size() != 2) {
            const std::vector<Point>& local = pixels_by_component[ci];
            if (local.empty())
                throw Error(ErrorKind::InsufficientTerminalEvidence,
                            "no ink on the perimeter of component " + std::to_string(ci));
            if (local.size() == 1) {
                own.assign(2, local.front());
            } else {
                KMeansParams rp;
                rp.k = 2;
                rp.seed = p.kmeans_seed;
                own = kmeans(local, rp).centroids;
            }
        }
        std::sort(own.begin(), own.end(), [](const Point& a, const Point& b) {
            if (a.y != b.y) return a.y < b.y;
            return a.x < b.x;
        });
        for (const Point& pt : own)
            terminals.push_back(Terminal{0, pt, static_cast<int>(ci)});
    }
    for (std::size_t i = 0; i < terminals.size(); ++i) terminals[i].id = static_cast<int>(i);
    return terminals;
}

/// Node recognition: erase the components, binarize, detect line segments,
/// intersect every horizontal/vertical pair, keep intersections lying on both
/// segments, count contours of the dilated point raster, and k-means the kept
/// points with k = contour count. Node ids follow the (y, x) order of the
/// resulting centroids.
inline std::vector<Node> recognize_nodes(const GrayImage& img, const DetectionSet& dets,
                                         const PipelineParams& p, Diagnostics* diag = nullptr,
                                         std::vector<LineSegment>* segments_out = nullptr) {
    if (dets.width != img.width || dets.height != img.height)
        throw Error(ErrorKind::DimensionMismatch, "detection set dims do not match image");

    const GrayImage connections = erase_regions(img, detail::boxes_of(dets));
    BinaryMask ink = adaptive_threshold(connections, p.adaptive);
    ink = dilate(ink, 1);  // heal 1-px binarization breaks before Hough
    const std::vector<LineSegment> segments = detect_line_segments(ink, p.hough);
    if (segments_out) *segments_out = segments;

    std::vector<LineSegment> horizontal, vertical;
    for (const LineSegment& s : segments) {
        if (segment_orientation(s) == Orientation::Horizontal)
            horizontal.push_back(s);
        else
            vertical.push_back(s);
    }

    std::vector<Point> kept;
    for (const LineSegment& hseg : horizontal) {
        for (const LineSegment& vseg : vertical) {
            const auto pt = line_intersection(hseg, vseg);
            if (!pt) continue;
            const bool inside = p.pooled_containment
                                    ? point_on_both_segments_pooled(*pt, hseg, vseg, p.containment_tol)
                                    : point_on_both_segments(*pt, hseg, vseg, p.containment_tol);
            if (inside) kept.push_back(*pt);
        }
    }
    if (diag) {
        diag->segments = segments.size();
        diag->horizontal_segments = horizontal.size();
        diag->vertical_segments = vertical.size();
        diag->intersections = kept.size();
    }
    if (kept.empty()) throw Error(ErrorKind::NoNodesFound, "no valid line intersections");

    BinaryMask points(img.width, img.height);
    for (const Point& pt : kept) {
        const int x = std::clamp(static_cast<int>(std::lround(pt.x)), 0, img.width - 1);
        const int y = std::clamp(static_cast<int>(std::lround(pt.y)), 0, img.height - 1);
        points.set(x, y, true);
    }
    const std::vector<ComponentRegion> contours = connected_components(dilate(points, p.node_dilate_radius));
    const std::size_t m = contours.size();
    if (diag) diag->contours = m;

    KMeansParams kp;
    kp.k = static_cast<int>(m);
    kp.seed = p.kmeans_seed;
    std::vector<Point> centroids = kmeans(kept, kp).centroids;
    std::sort(centroids.begin(), centroids.end(), [](const Point& a, const Point& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    std::vector<Node> nodes;
    nodes.reserve(m);
    for (std::size_t i = 0; i < centroids.size(); ++i)
        nodes.push_back(Node{static_cast<int>(i), centroids[i]});
    return nodes;
}

/// Maps each terminal to the node at minimum Euclidean distance; ties break
/// to the lower node id. Returns one node index per terminal.
inline std::vector<int> map_terminals_to_nodes(const std::vector<Terminal>& terminals,
                                               const std::vector<Node>& nodes) {
    if (nodes.empty()) throw Error(ErrorKind::NoNodesFound, "cannot map terminals onto zero nodes");
    std::vector<int> mapping(terminals.size(), 0);
    for (std::size_t t = 0; t < terminals.size(); ++t) {
        double best = std::numeric_limits<double>::max();
        int best_n = 0;
        for (const Node& n : nodes) {
            const double d = euclidean_distance(terminals[t].point, n.point);
            if (d < best) {
                best = d;
                best_n = n.id;
            }
        }
        mapping[t] = best_n;
    }
    return mapping;
}

/// Net partition over node ids; node_to_root[i] is the lowest node id in the
/// net containing node i.
struct NetPartition {
    std::vector<int> node_to_root;
};

/// Links under-connected nodes: while some net has fewer than two attached
/// terminals and more than one net remains, each deficient node is unioned
/// with its nearest node in another net (Euclidean, ties to the lower id).
/// Terminal counts pool over the merged net after each merge.
inline NetPartition link_underconnected_nodes(const std::vector<int>& mapping,
                                              const std::vector<Node>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a;  // roots stay the lowest member id
        else parent[a] = b;
    };

    auto net_count = [&]() {
        int c = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (find(static_cast<int>(i)) == static_cast<int>(i)) ++c;
        return c;
    };
    auto terminal_count = [&](int root) {
        int c = 0;
        for (int node : mapping)
            if (find(node) == root) ++c;
        return c;
    };

    bool changed = true;
    while (changed && net_count() > 1) {
        changed = false;
        for (std::size_t i = 0; i < n && net_count() > 1; ++i) {
            const int root = find(static_cast<int>(i));
            if (terminal_count(root) >= 2) continue;
            double best = std::numeric_limits<double>::max();
            int best_j = -1;
            for (std::size_t j = 0; j < n; ++j) {
                if (find(static_cast<int>(j)) == root) continue;
                const double d = euclidean_distance(nodes[i].point, nodes[j].point);
                if (d < best) {
                    best = d;
                    best_j = static_cast<int>(j);
                }
            }
            if (best_j >= 0) {
                unite(static_cast<int>(i), best_j);
                changed = true;
            }
        }
    }

    NetPartition part;
    part.node_to_root.resize(n);
    for (std::size_t i = 0; i < n; ++i) part.node_to_root[i] = find(static_cast<int>(i));
    return part;
}

/// Builds the netlist: per-class designator counters in detection order, two
/// nets per component, nets renumbered densely by (y, x) of each net's
/// topmost-leftmost node.
inline Netlist build_netlist(const DetectionSet& dets, const std::vector<Terminal>& terminals,
                             const std::vector<int>& mapping, const NetPartition& partition,
                             const std::vector<Node>& nodes) {
    // Dense renumbering of partition roots.
    std::vector<int> roots;
    for (std::size_t i = 0; i < partition.node_to_root.size(); ++i)
        if (partition.node_to_root[i] == static_cast<int>(i)) roots.push_back(static_cast<int>(i));

    std::vector<Point> reps(roots.size());
    for (std::size_t r = 0; r < roots.size(); ++r) {
        Point best{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (partition.node_to_root[i] != roots[r]) continue;
            const Point& pt = nodes[i].point;
            if (pt.y < best.y || (pt.y == best.y && pt.x < best.x)) best = pt;
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
    Netlist netlist;
    netlist.nets.resize(roots.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        root_to_net[roots[order[rank]]] = static_cast<int>(rank);
        netlist.nets[rank] = reps[order[rank]];
    }

    // Two terminals per component, gathered by component id.
    std::vector<std::vector<int>> terminal_nets(dets.detections.size());
    for (std::size_t t = 0; t < terminals.size(); ++t) {
        const int root = partition.node_to_root[mapping[t]];
        terminal_nets[terminals[t].component_id].push_back(root_to_net[root]);
    }

    int counters[kClassCount] = {0};
    for (std::size_t ci = 0; ci < dets.detections.size(); ++ci) {
        if (terminal_nets[ci].size() != 2)
            throw Error(ErrorKind::DegenerateComponent,
                        "component " + std::to_string(ci) + " has " +
                            std::to_string(terminal_nets[ci].size()) + " terminals");
        const ComponentClass cls = dets.detections[ci].cls;
        NetlistComponent comp;
        comp.cls = cls;
        comp.designator = std::string(1, class_prefix(cls)) +
                          std::to_string(++counters[static_cast<int>(cls)]);
        comp.net_a = terminal_nets[ci][0];
        comp.net_b = terminal_nets[ci][1];
        if (comp.net_a == comp.net_b && roots.size() > 1)
            throw Error(ErrorKind::DegenerateComponent,
                        "both terminals of " + comp.designator + " map to net " +
                            std::to_string(comp.net_a));
        netlist.components.push_back(comp);
    }
    return netlist;
}

/// Canonical netlist text: header comment, one component per line, LF, and a
/// trailing newline.
inline std::string netlist_to_text(const Netlist& netlist) {
    std::string out = "* sketch2netlist v1\n";
    for (const NetlistComponent& c : netlist.components)
        out += c.designator + " N" + std::to_string(c.net_a) + " N" + std::to_string(c.net_b) + "\n";
    return out;
}

inline ComponentClass class_from_prefix(char prefix) {
    switch (prefix) {
        case 'V': return ComponentClass::VoltageSource;
        case 'R': return ComponentClass::Resistor;
        case 'C': return ComponentClass::Capacitor;
        case 'L': return ComponentClass::Inductor;
        case 'D': return ComponentClass::Diode;
    }
    throw Error(ErrorKind::ParseError, std::string("unknown designator prefix '") + prefix + "'");
}

inline Netlist parse_netlist_text(const std::string& text) {
    Netlist netlist;
    int max_net = -1;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ss(line);
        std::string designator, na, nb;
        if (!(ss >> designator >> na >> nb) || na.size() < 2 || nb.size() < 2 || na[0] != 'N' || nb[0] != 'N')
            throw Error(ErrorKind::ParseError, "bad netlist line: " + line);
        NetlistComponent comp;
        comp.cls = class_from_prefix(designator[0]);
        comp.designator = designator;
        try {
            comp.net_a = std::stoi(na.substr(1));
            comp.net_b = std::stoi(nb.substr(1));
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, "bad net name in: " + line);
        }
        max_net = std::max({max_net, comp.net_a, comp.net_b});
        netlist.components.push_back(comp);
    }
    netlist.nets.resize(max_net + 1);
    return netlist;
}

/// Debug JSON for terminals and nodes, canonical field order.
inline std::string debug_json(const std::vector<Terminal>& terminals, const std::vector<Node>& nodes) {
    std::string out = "{\"terminals\":[";
    for (std::size_t i = 0; i < terminals.size(); ++i) {
        if (i > 0) out += ',';
        out += "{\"id\":" + std::to_string(terminals[i].id) + ",\"x\":" +
               detail::format_double(terminals[i].point.x) + ",\"y\":" +
               detail::format_double(terminals[i].point.y) + ",\"component\":" +
               std::to_string(terminals[i].component_id) + "}";
    }
    out += "],\"nodes\":[";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) out += ',';
        out += "{\"id\":" + std::to_string(nodes[i].id) + ",\"x\":" +
               detail::format_double(nodes[i].point.x) + ",\"y\":" +
               detail::format_double(nodes[i].point.y) + "}";
    }
    out += "]}";
    return out;
}

/// Full reconstruction: score filter, terminal recognition, node recognition,
/// terminal-node mapping, under-connected linking, netlist construction.
/// Stage failures are rethrown tagged with the stage name.
inline ReconstructionResult reconstruct(const GrayImage& img, const DetectionSet& dets,
                                        const PipelineParams& p) {
    using clock = std::chrono::steady_clock;
    ReconstructionResult result;

    auto timed = [&result](const char* stage, auto&& fn) {
        const auto start = clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                result.diagnostics.timings.push_back(
                    {stage, std::chrono::duration<double, std::milli>(clock::now() - start).count()});
            } else {
                auto value = fn();
                result.diagnostics.timings.push_back(
                    {stage, std::chrono::duration<double, std::milli>(clock::now() - start).count()});
                return value;
            }
        } catch (const Error& e) {
            throw Error(e.kind(), e.what(), stage);
        }
    };

    const DetectionSet filtered = timed("filter", [&] { return filter_by_score(dets, p.score_threshold); });
    result.terminals = timed("terminals", [&] { return recognize_terminals(img, filtered, p); });
    result.nodes = timed("nodes", [&] {
        return recognize_nodes(img, filtered, p, &result.diagnostics, &result.segments);
    });
    const std::vector<int> mapping =
        timed("map", [&] { return map_terminals_to_nodes(result.terminals, result.nodes); });
    const NetPartition partition =
        timed("link", [&] { return link_underconnected_nodes(mapping, result.nodes); });
    result.netlist = timed("netlist", [&] {
        return build_netlist(filtered, result.terminals, mapping, partition, result.nodes);
    });
    return result;
}

}  // namespace s2n
