#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <tuple>
#include <vector>

#include "sketch2netlist/detection.hpp"
#include "sketch2netlist/geometry.hpp"
#include "sketch2netlist/pipeline.hpp"

namespace s2n {

struct MatchPair {
    int gt_index = 0;
    int det_index = 0;
    double iou = 0.0;
};

struct MatchList {
    std::vector<MatchPair> matches;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_det;  // kept by the score filter but unmatched
};

/// (C+1) x (C+1) counts; row = ground-truth class, column = detected class.
/// The extra column counts misses, the extra row counts ghosts.
struct ConfusionMatrix {
    static constexpr int kSize = kClassCount + 1;
    std::array<std::array<long, kSize>, kSize> counts{};

    long& at(int row, int col) { return counts[row][col]; }
    long at(int row, int col) const { return counts[row][col]; }
    long total() const {
        long t = 0;
        for (const auto& row : counts)
            for (long v : row) t += v;
        return t;
    }
};

/// IoU-greedy matching: drop low-score detections, sort candidate pairs by
/// descending IoU, keep pairs at or above the threshold using each ground
/// truth and detection at most once. Class agreement is not required here; it
/// is scored in the confusion matrix.
inline MatchList match_detections(const GroundTruthSet& gt, const DetectionSet& pred, double iou_thr,
                                  double score_thr) {
    std::vector<int> kept;
    for (std::size_t d = 0; d < pred.detections.size(); ++d)
        if (pred.detections[d].score >= score_thr) kept.push_back(static_cast<int>(d));

    struct Candidate {
        double iou;
        int g, d;
    };
    std::vector<Candidate> cands;
    for (std::size_t g = 0; g < gt.items.size(); ++g) {
        for (int d : kept) {
            const double v = iou(gt.items[g].bbox, pred.detections[d].bbox);
            if (v >= iou_thr) cands.push_back({v, static_cast<int>(g), d});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        return std::tie(a.g, a.d) < std::tie(b.g, b.d);
    });

    MatchList out;
    std::vector<bool> gt_used(gt.items.size(), false);
    std::vector<bool> det_used(pred.detections.size(), false);
    for (const Candidate& c : cands) {
        if (gt_used[c.g] || det_used[c.d]) continue;
        gt_used[c.g] = true;
        det_used[c.d] = true;
        out.matches.push_back({c.g, c.d, c.iou});
    }
    for (std::size_t g = 0; g < gt.items.size(); ++g)
        if (!gt_used[g]) out.unmatched_gt.push_back(static_cast<int>(g));
    for (int d : kept)
        if (!det_used[d]) out.unmatched_det.push_back(d);
    return out;
}

inline ConfusionMatrix confusion_matrix(const MatchList& matches, const GroundTruthSet& gt,
                                        const DetectionSet& pred) {
    ConfusionMatrix cm;
    for (const MatchPair& m : matches.matches)
        ++cm.at(static_cast<int>(gt.items[m.gt_index].cls), static_cast<int>(pred.detections[m.det_index].cls));
    for (int g : matches.unmatched_gt)
        ++cm.at(static_cast<int>(gt.items[g].cls), ConfusionMatrix::kSize - 1);
    for (int d : matches.unmatched_det)
        ++cm.at(ConfusionMatrix::kSize - 1, static_cast<int>(pred.detections[d].cls));
    return cm;
}

struct ClassMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    std::array<ClassMetrics, kClassCount> per_class;
    ClassMetrics macro;
};

/// Per-class precision/recall/F1/accuracy from the confusion matrix,
/// including the ghost row and miss column in the FP/FN tallies. Divisions by
/// zero yield 0.
inline ClassificationReport classification_metrics(const ConfusionMatrix& cm) {
    ClassificationReport report;
    const long total = cm.total();
    auto safe_div = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    for (int c = 0; c < kClassCount; ++c) {
        const long tp = cm.at(c, c);
        long fp = 0, fn = 0;
        for (int r = 0; r < ConfusionMatrix::kSize; ++r)
            if (r != c) fp += cm.at(r, c);
        for (int col = 0; col < ConfusionMatrix::kSize; ++col)
            if (col != c) fn += cm.at(c, col);
        const long tn = total - tp - fp - fn;
        ClassMetrics& m = report.per_class[c];
        m.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
        m.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
        m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall);
        m.accuracy = safe_div(static_cast<double>(tp + tn), static_cast<double>(total));
    }
    for (const ClassMetrics& m : report.per_class) {
        report.macro.accuracy += m.accuracy / kClassCount;
        report.macro.precision += m.precision / kClassCount;
        report.macro.recall += m.recall / kClassCount;
        report.macro.f1 += m.f1 / kClassCount;
    }
    return report;
}

/// Average precision for one class at a fixed IoU threshold: detections of
/// the class sorted by descending score (ties by bbox lexicographic), greedy
/// TP/FP marking against unused same-class ground truths, all-point
/// interpolated area under the precision-recall curve.
inline double average_precision(const GroundTruthSet& gt, const DetectionSet& pred, ComponentClass cls,
                                double iou_thr) {
    std::vector<int> gts;
    for (std::size_t g = 0; g < gt.items.size(); ++g)
        if (gt.items[g].cls == cls) gts.push_back(static_cast<int>(g));
    if (gts.empty()) return 0.0;

    std::vector<int> dets;
    for (std::size_t d = 0; d < pred.detections.size(); ++d)
        if (pred.detections[d].cls == cls) dets.push_back(static_cast<int>(d));
    std::sort(dets.begin(), dets.end(), [&](int a, int b) {
        const Detection& da = pred.detections[a];
        const Detection& db = pred.detections[b];
        if (da.score != db.score) return da.score > db.score;
        return std::tie(da.bbox.x_min, da.bbox.y_min, da.bbox.x_max, da.bbox.y_max) <
               std::tie(db.bbox.x_min, db.bbox.y_min, db.bbox.x_max, db.bbox.y_max);
    });

    std::vector<bool> gt_used(gts.size(), false);
    std::vector<double> recalls, precisions;
    long tp = 0, fp = 0;
    for (int d : dets) {
        double best = 0.0;
        int best_g = -1;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (gt_used[gi]) continue;
            const double v = iou(gt.items[gts[gi]].bbox, pred.detections[d].bbox);
            if (v >= iou_thr && v > best) {
                best = v;
                best_g = static_cast<int>(gi);
            }
        }
        if (best_g >= 0) {
            gt_used[best_g] = true;
            ++tp;
        } else {
            ++fp;
        }
        recalls.push_back(static_cast<double>(tp) / gts.size());
        precisions.push_back(static_cast<double>(tp) / (tp + fp));
    }

    // Monotonize precision from the right, then integrate over recall.
    for (int i = static_cast<int>(precisions.size()) - 2; i >= 0; --i)
        precisions[i] = std::max(precisions[i], precisions[i + 1]);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < recalls.size(); ++i) {
        ap += (recalls[i] - prev_recall) * precisions[i];
        prev_recall = recalls[i];
    }
    return ap;
}

/// Mean AP at IoU 0.5 over classes with at least one ground truth.
inline double map_at_05(const GroundTruthSet& gt, const DetectionSet& pred) {
    double sum = 0.0;
    int n = 0;
    for (int c = 0; c < kClassCount; ++c) {
        const ComponentClass cls = static_cast<ComponentClass>(c);
        bool has_gt = false;
        for (const GroundTruthItem& item : gt.items)
            if (item.cls == cls) has_gt = true;
        if (!has_gt) continue;
        sum += average_precision(gt, pred, cls, 0.5);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

namespace detail {

struct CanonEdge {
    int cls;
    int lo, hi;
    bool operator<(const CanonEdge& o) const { return std::tie(cls, lo, hi) < std::tie(o.cls, o.lo, o.hi); }
    bool operator==(const CanonEdge& o) const { return cls == o.cls && lo == o.lo && hi == o.hi; }
};

inline std::vector<CanonEdge> canon_edges(const Netlist& nl, const std::vector<int>& net_map) {
    std::vector<CanonEdge> edges;
    for (const NetlistComponent& c : nl.components) {
        const int a = net_map.empty() ? c.net_a : net_map[c.net_a];
        const int b = net_map.empty() ? c.net_b : net_map[c.net_b];
        edges.push_back({static_cast<int>(c.cls), std::min(a, b), std::max(a, b)});
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

inline bool equivalence_backtrack(const std::vector<CanonEdge>& target, const Netlist& b, int nets,
                                  std::vector<int>& assign, std::vector<bool>& used, int next) {
    if (next == nets) return canon_edges(b, assign) == target;
    for (int cand = 0; cand < nets; ++cand) {
        if (used[cand]) continue;
        assign[next] = cand;
        used[cand] = true;
        if (equivalence_backtrack(target, b, nets, assign, used, next + 1)) return true;
        used[cand] = false;
    }
    return false;
}

}  // namespace detail

/// True iff some bijection of net ids makes the component multisets of the
/// two netlists coincide. Backtracks over net permutations; circuits here are
/// small, so this is cheap.
inline bool netlist_equivalence(const Netlist& a, const Netlist& b) {
    if (a.components.size() != b.components.size()) return false;
    if (a.nets.size() != b.nets.size()) return false;
    const int nets = static_cast<int>(a.nets.size());

    // Quick reject: per-class component counts must agree.
    std::array<int, kClassCount> ca{}, cb{};
    for (const NetlistComponent& c : a.components) ++ca[static_cast<int>(c.cls)];
    for (const NetlistComponent& c : b.components) ++cb[static_cast<int>(c.cls)];
    if (ca != cb) return false;

    const std::vector<detail::CanonEdge> target = detail::canon_edges(a, {});
    std::vector<int> assign(nets, -1);
    std::vector<bool> used(nets, false);
    return detail::equivalence_backtrack(target, b, nets, assign, used, 0);
}

struct NodeAccuracy {
    int matched = 0;
    int missed = 0;
    int spurious = 0;

    bool accurate() const { return missed == 0 && spurious == 0; }
};

/// Greedy nearest-pair matching within tol: repeatedly match the closest
/// unmatched (ground truth, predicted) pair.
inline NodeAccuracy node_accuracy(const std::vector<Point>& gt_nodes,
                                  const std::vector<Point>& pred_nodes, double tol) {
    struct Pair {
        double d;
        int g, p;
    };
    std::vector<Pair> pairs;
    for (std::size_t g = 0; g < gt_nodes.size(); ++g)
        for (std::size_t pi = 0; pi < pred_nodes.size(); ++pi) {
            const double d = euclidean_distance(gt_nodes[g], pred_nodes[pi]);
            if (d <= tol) pairs.push_back({d, static_cast<int>(g), static_cast<int>(pi)});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d != b.d) return a.d < b.d;
        return std::tie(a.g, a.p) < std::tie(b.g, b.p);
    });
    std::vector<bool> gt_used(gt_nodes.size(), false), pred_used(pred_nodes.size(), false);
    NodeAccuracy acc;
    for (const Pair& pr : pairs) {
        if (gt_used[pr.g] || pred_used[pr.p]) continue;
        gt_used[pr.g] = true;
        pred_used[pr.p] = true;
        ++acc.matched;
    }
    acc.missed = static_cast<int>(gt_nodes.size()) - acc.matched;
    acc.spurious = static_cast<int>(pred_nodes.size()) - acc.matched;
    return acc;
}

}  // namespace s2n
