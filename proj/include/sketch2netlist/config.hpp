#pragma once

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "sketch2netlist/detection.hpp"
#include "sketch2netlist/errors.hpp"
#include "sketch2netlist/pipeline.hpp"

namespace s2n {

/// Flat JSON configuration: all pipeline knobs plus the metric thresholds.
/// Absent keys keep their defaults; unknown keys are rejected.
struct Config {
    int adaptive_window = 21;
    double adaptive_c = 10.0;
    double adaptive_sigma = 0.0;  // <= 0 means derive from the window size
    double hough_rho_res = 1.0;
    double hough_theta_res_deg = 1.0;
    int hough_votes_min = 30;
    double hough_min_len = 20.0;
    double hough_max_gap = 6.0;
    std::uint64_t kmeans_seed = 0;
    double perimeter_stroke = 3.0;
    int node_dilate_radius = 6;
    double containment_tol = 2.0;
    bool pooled_containment = false;
    double score_threshold = 0.5;
    double iou_threshold = 0.5;
    double node_match_tol = 10.0;

    PipelineParams pipeline_params() const {
        PipelineParams p;
        p.adaptive.window = adaptive_window;
        p.adaptive.c = adaptive_c;
        p.adaptive.sigma = adaptive_sigma > 0.0 ? adaptive_sigma
                                                : AdaptiveThresholdParams::default_sigma(adaptive_window);
        p.hough.rho_res = hough_rho_res;
        p.hough.theta_res = hough_theta_res_deg * M_PI / 180.0;
        p.hough.votes_min = hough_votes_min;
        p.hough.min_len = hough_min_len;
        p.hough.max_gap = hough_max_gap;
        p.kmeans_seed = kmeans_seed;
        p.perimeter_stroke = perimeter_stroke;
        p.node_dilate_radius = node_dilate_radius;
        p.containment_tol = containment_tol;
        p.score_threshold = score_threshold;
        p.pooled_containment = pooled_containment;
        return p;
    }
};

inline Config parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigError, e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");

    static const std::set<std::string> known{
        "adaptive_window", "adaptive_c", "adaptive_sigma", "hough_rho_res", "hough_theta_res_deg",
        "hough_votes_min", "hough_min_len", "hough_max_gap", "kmeans_seed", "perimeter_stroke",
        "node_dilate_radius", "containment_tol", "pooled_containment", "score_threshold",
        "iou_threshold", "node_match_tol"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");

    Config cfg;
    try {
        cfg.adaptive_window = j.value("adaptive_window", cfg.adaptive_window);
        cfg.adaptive_c = j.value("adaptive_c", cfg.adaptive_c);
        cfg.adaptive_sigma = j.value("adaptive_sigma", cfg.adaptive_sigma);
        cfg.hough_rho_res = j.value("hough_rho_res", cfg.hough_rho_res);
        cfg.hough_theta_res_deg = j.value("hough_theta_res_deg", cfg.hough_theta_res_deg);
        cfg.hough_votes_min = j.value("hough_votes_min", cfg.hough_votes_min);
        cfg.hough_min_len = j.value("hough_min_len", cfg.hough_min_len);
        cfg.hough_max_gap = j.value("hough_max_gap", cfg.hough_max_gap);
        cfg.kmeans_seed = j.value("kmeans_seed", cfg.kmeans_seed);
        cfg.perimeter_stroke = j.value("perimeter_stroke", cfg.perimeter_stroke);
        cfg.node_dilate_radius = j.value("node_dilate_radius", cfg.node_dilate_radius);
        cfg.containment_tol = j.value("containment_tol", cfg.containment_tol);
        cfg.pooled_containment = j.value("pooled_containment", cfg.pooled_containment);
        cfg.score_threshold = j.value("score_threshold", cfg.score_threshold);
        cfg.iou_threshold = j.value("iou_threshold", cfg.iou_threshold);
        cfg.node_match_tol = j.value("node_match_tol", cfg.node_match_tol);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigError, e.what());
    }

    if (cfg.adaptive_window < 3 || cfg.adaptive_window % 2 == 0)
        throw Error(ErrorKind::ConfigError, "adaptive_window must be odd and >= 3");
    if (cfg.hough_rho_res <= 0 || cfg.hough_theta_res_deg <= 0 || cfg.hough_votes_min <= 0 ||
        cfg.hough_min_len <= 0 || cfg.hough_max_gap <= 0)
        throw Error(ErrorKind::ConfigError, "hough parameters must be positive");
    const double bins = 180.0 / cfg.hough_theta_res_deg;
    if (std::abs(bins - std::lround(bins)) > 1e-9)
        throw Error(ErrorKind::ConfigError, "hough_theta_res_deg must divide 180 evenly");
    if (cfg.perimeter_stroke < 1.0) throw Error(ErrorKind::ConfigError, "perimeter_stroke must be >= 1");
    if (cfg.node_dilate_radius < 0) throw Error(ErrorKind::ConfigError, "node_dilate_radius must be >= 0");
    if (cfg.containment_tol < 0) throw Error(ErrorKind::ConfigError, "containment_tol must be >= 0");
    if (cfg.score_threshold < 0 || cfg.score_threshold > 1 || cfg.iou_threshold < 0 || cfg.iou_threshold > 1)
        throw Error(ErrorKind::ConfigError, "thresholds must be in [0, 1]");
    if (cfg.node_match_tol <= 0) throw Error(ErrorKind::ConfigError, "node_match_tol must be > 0");
    return cfg;
}

inline Config load_config(const std::string& path) {
    return parse_config(detail::read_file(path));
}

/// Effective configuration echo, canonical key order.
inline std::string serialize_config(const Config& c) {
    std::string out = "{";
    out += "\"adaptive_window\":" + std::to_string(c.adaptive_window);
    out += ",\"adaptive_c\":" + detail::format_double(c.adaptive_c);
    out += ",\"adaptive_sigma\":" + detail::format_double(c.adaptive_sigma);
    out += ",\"hough_rho_res\":" + detail::format_double(c.hough_rho_res);
    out += ",\"hough_theta_res_deg\":" + detail::format_double(c.hough_theta_res_deg);
    out += ",\"hough_votes_min\":" + std::to_string(c.hough_votes_min);
    out += ",\"hough_min_len\":" + detail::format_double(c.hough_min_len);
    out += ",\"hough_max_gap\":" + detail::format_double(c.hough_max_gap);
    out += ",\"kmeans_seed\":" + std::to_string(c.kmeans_seed);
    out += ",\"perimeter_stroke\":" + detail::format_double(c.perimeter_stroke);
    out += ",\"node_dilate_radius\":" + std::to_string(c.node_dilate_radius);
    out += ",\"containment_tol\":" + detail::format_double(c.containment_tol);
    out += ",\"pooled_containment\":" + std::string(c.pooled_containment ? "true" : "false");
    out += ",\"score_threshold\":" + detail::format_double(c.score_threshold);
    out += ",\"iou_threshold\":" + detail::format_double(c.iou_threshold);
    out += ",\"node_match_tol\":" + detail::format_double(c.node_match_tol);
    out += "}";
    return out;
}

}  // namespace s2n
