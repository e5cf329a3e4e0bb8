#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "sketch2netlist/errors.hpp"
#include "sketch2netlist/geometry.hpp"

namespace s2n {

/// Fixed-algorithm RNG so clustering results are reproducible across
/// platforms and standard libraries.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return (next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n).
    std::size_t next_below(std::size_t n) {
        return static_cast<std::size_t>(next_double() * static_cast<double>(n));
    }
};

struct KMeansParams {
    int k = 1;
    std::uint64_t seed = 0;
    int max_iter = 100;
    double tol = 1e-4;
};

struct ClusterResult {
    std::vector<Point> centroids;     // length k
    std::vector<int> assignment;      // per input point
    double inertia = 0.0;             // summed squared distances
};

namespace detail {

inline double sq_dist(const Point& a, const Point& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// k-means++ seeding with D^2 sampling driven by the given RNG.
inline std::vector<Point> kmeanspp_seed(const std::vector<Point>& pts, int k, SplitMix64& rng) {
    std::vector<Point> centroids;
    centroids.reserve(k);
    centroids.push_back(pts[rng.next_below(pts.size())]);
    std::vector<double> d2(pts.size());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = std::numeric_limits<double>::max();
            for (const Point& cen : centroids) best = std::min(best, sq_dist(pts[i], cen));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All remaining points coincide with chosen centroids.
            centroids.push_back(pts[rng.next_below(pts.size())]);
            continue;
        }
        double r = rng.next_double() * total;
        std::size_t pick = pts.size() - 1;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            r -= d2[i];
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(pts[pick]);
    }
    return centroids;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed input
/// order and seed. Empty clusters are repaired by moving in the point
/// currently farthest from its own centroid (tie: lowest input index).
inline ClusterResult kmeans(const std::vector<Point>& pts, const KMeansParams& p) {
    const std::size_t n = pts.size();
    const int k = p.k;
    if (n < static_cast<std::size_t>(k))
        throw Error(ErrorKind::TooFewPoints, "need at least k points for k-means");

    SplitMix64 rng(p.seed);
    std::vector<Point> centroids = detail::kmeanspp_seed(pts, k, rng);
    std::vector<int> assignment(n, 0);

    for (int iter = 0; iter < p.max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d = detail::sq_dist(pts[i], centroids[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            assignment[i] = best_c;
        }

        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[assignment[i]];
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            double worst = -1.0;
            std::size_t worst_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assignment[i]] <= 1) continue;  // do not empty another cluster
                const double d = detail::sq_dist(pts[i], centroids[assignment[i]]);
                if (d > worst) {
                    worst = d;
                    worst_i = i;
                }
            }
            --counts[assignment[worst_i]];
            assignment[worst_i] = c;
            counts[c] = 1;
        }

        std::vector<Point> next(k, Point{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            next[assignment[i]].x += pts[i].x;
            next[assignment[i]].y += pts[i].y;
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            next[c].x /= counts[c];
            next[c].y /= counts[c];
            shift = std::max(shift, euclidean_distance(next[c], centroids[c]));
        }
        centroids = std::move(next);
        if (shift < p.tol) break;
    }

    // Final assignment against the converged centroids.
    ClusterResult result;
    result.centroids = centroids;
    result.assignment.assign(n, 0);
    std::vector<std::size_t> counts(k, 0);
    std::vector<Point> sums(k, Point{0.0, 0.0});
    result.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::max();
        int best_c = 0;
        for (int c = 0; c < k; ++c) {
            const double d = detail::sq_dist(pts[i], centroids[c]);
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        result.assignment[i] = best_c;
        result.inertia += best;
        ++counts[best_c];
    }
    // Coinciding centroids can re-empty a cluster here; apply the same repair
    // so the returned assignment always uses every cluster.
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        double worst = -1.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[result.assignment[i]] <= 1) continue;
            const double d = detail::sq_dist(pts[i], centroids[result.assignment[i]]);
            if (d > worst) {
                worst = d;
                worst_i = i;
            }
        }
        --counts[result.assignment[worst_i]];
        result.assignment[worst_i] = c;
        counts[c] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        sums[result.assignment[i]].x += pts[i].x;
        sums[result.assignment[i]].y += pts[i].y;
    }
    // Snap each centroid to the mean of its final assignment so the returned
    // centroids satisfy the mean invariant even when iteration stopped early.
    result.inertia = 0.0;
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) result.centroids[c] = Point{sums[c].x / counts[c], sums[c].y / counts[c]};
    }
    for (std::size_t i = 0; i < n; ++i)
        result.inertia += detail::sq_dist(pts[i], result.centroids[result.assignment[i]]);
    return result;
}

}  // namespace s2n
