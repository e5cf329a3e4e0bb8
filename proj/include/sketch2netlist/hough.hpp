#pragma once

#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "sketch2netlist/geometry.hpp"
#include "sketch2netlist/raster.hpp"

namespace s2n {

struct HoughParams {
    double rho_res = 1.0;            // pixels per accumulator bin
    double theta_res = M_PI / 180.0; // radians per bin; must divide pi evenly
    int votes_min = 30;
    double min_len = 20.0;           // minimum emitted segment length
    double max_gap = 6.0;            // bridgeable gap while walking a line
};

namespace detail {

struct HoughCandidate {
    int votes;
    int theta_bin;
    int rho_bin;
};

struct RawSegment {
    LineSegment seg;
    int theta_bin;
    int rho_bin;
};

}  // namespace detail

/// Line-segment detection: standard (rho, theta) vote accumulation, then each
/// over-threshold line is walked across the mask collecting runs of
/// foreground pixels with gap bridging. A run is emitted only while most of
/// its pixels are not yet consumed by an earlier emission, and emitting a run
/// consumes its pixels plus a small perpendicular halo; that suppresses the
/// duplicate near-collinear bins a thick stroke produces without disturbing
/// the endpoints of lines that cross it. Candidates are processed in
/// descending vote order (ties by bin index) so the best-fitting line claims
/// its pixels first; output is sorted by (theta bin, rho bin, start) and is
/// fully deterministic.
inline std::vector<LineSegment> detect_line_segments(const BinaryMask& mask, const HoughParams& p) {
    const int w = mask.width, h = mask.height;
    std::vector<LineSegment> out;
    if (w <= 0 || h <= 0) return out;

    const int n_theta = static_cast<int>(std::lround(M_PI / p.theta_res));
    const double diag = std::hypot(static_cast<double>(w), static_cast<double>(h));
    const int n_rho = 2 * static_cast<int>(std::ceil(diag / p.rho_res)) + 1;
    const int rho_offset = n_rho / 2;

    std::vector<double> cos_t(n_theta), sin_t(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        cos_t[j] = std::cos(j * p.theta_res);
        sin_t[j] = std::sin(j * p.theta_res);
    }

    std::vector<std::int32_t> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (int j = 0; j < n_theta; ++j) {
                const double rho = x * cos_t[j] + y * sin_t[j];
                const int bin = static_cast<int>(std::lround(rho / p.rho_res)) + rho_offset;
                ++acc[static_cast<std::size_t>(j) * n_rho + bin];
            }
        }
    }

    std::vector<detail::HoughCandidate> candidates;
    for (int j = 0; j < n_theta; ++j)
        for (int b = 0; b < n_rho; ++b)
            if (acc[static_cast<std::size_t>(j) * n_rho + b] >= p.votes_min)
                candidates.push_back({acc[static_cast<std::size_t>(j) * n_rho + b], j, b});
    std::sort(candidates.begin(), candidates.end(),
              [](const detail::HoughCandidate& a, const detail::HoughCandidate& b) {
                  if (a.votes != b.votes) return a.votes > b.votes;
                  if (a.theta_bin != b.theta_bin) return a.theta_bin < b.theta_bin;
                  return a.rho_bin < b.rho_bin;
              });

    BinaryMask consumed(w, h);
    std::vector<detail::RawSegment> raw;
    const int consume_halo = 2;  // perpendicular half-width marked consumed per hit

    for (const detail::HoughCandidate& cand : candidates) {
        const double ct = cos_t[cand.theta_bin], st = sin_t[cand.theta_bin];
        const double rho = (cand.rho_bin - rho_offset) * p.rho_res;
        // Line point p(t) = rho*(ct, st) + t*(-st, ct), t clipped to the image.
        const double px = rho * ct, py = rho * st;

        struct Hit {
            int x, y;  // foreground pixel found at this step
        };
        std::vector<Hit> run;
        double gap = 0.0;
        bool in_run = false;

        auto flush = [&] {
            if (!run.empty()) {
                const Point a{static_cast<double>(run.front().x), static_cast<double>(run.front().y)};
                const Point b{static_cast<double>(run.back().x), static_cast<double>(run.back().y)};
                if (euclidean_distance(a, b) >= p.min_len) {
                    std::size_t fresh = 0;
                    for (const Hit& hit : run)
                        if (!consumed.at(hit.x, hit.y)) ++fresh;
                    if (fresh * 2 > run.size()) {
                        raw.push_back({LineSegment{a, b}, cand.theta_bin, cand.rho_bin});
                        for (const Hit& hit : run) {
                            for (int o = -consume_halo; o <= consume_halo; ++o) {
                                const int qx = static_cast<int>(std::lround(hit.x + o * ct));
                                const int qy = static_cast<int>(std::lround(hit.y + o * st));
                                if (consumed.in_bounds(qx, qy)) consumed.set(qx, qy, true);
                            }
                        }
                    }
                }
            }
            run.clear();
            in_run = false;
            gap = 0.0;
        };

        for (double t = -diag; t <= diag; t += 1.0) {
            const double wx = px - t * st;
            const double wy = py + t * ct;
            if (wx < -2.0 || wx > w + 1.0 || wy < -2.0 || wy > h + 1.0) continue;
            bool found = false;
            int fx = 0, fy = 0;
            for (int o : {0, -1, 1}) {
                const int qx = static_cast<int>(std::lround(wx + o * ct));
                const int qy = static_cast<int>(std::lround(wy + o * st));
                if (mask.in_bounds(qx, qy) && mask.at(qx, qy)) {
                    found = true;
                    fx = qx;
                    fy = qy;
                    break;
                }
            }
            if (found) {
                in_run = true;
                run.push_back({fx, fy});
                gap = 0.0;
            } else if (in_run) {
                gap += 1.0;
                if (gap > p.max_gap) flush();
            }
        }
        flush();
    }

    std::sort(raw.begin(), raw.end(), [](const detail::RawSegment& a, const detail::RawSegment& b) {
        return std::tie(a.theta_bin, a.rho_bin, a.seg.p1.y, a.seg.p1.x) <
               std::tie(b.theta_bin, b.rho_bin, b.seg.p1.y, b.seg.p1.x);
    });
    out.reserve(raw.size());
    for (const detail::RawSegment& rs : raw) out.push_back(rs.seg);
    return out;
}

}  // namespace s2n
