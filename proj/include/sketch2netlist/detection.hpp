#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketch2netlist/errors.hpp"
#include "sketch2netlist/geometry.hpp"

namespace s2n {

enum class ComponentClass { VoltageSource, Resistor, Capacitor, Inductor, Diode };

inline constexpr int kClassCount = 5;

inline const char* class_name(ComponentClass c) {
    switch (c) {
        case ComponentClass::VoltageSource: return "voltage_source";
        case ComponentClass::Resistor: return "resistor";
        case ComponentClass::Capacitor: return "capacitor";
        case ComponentClass::Inductor: return "inductor";
        case ComponentClass::Diode: return "diode";
    }
    return "?";
}

/// Designator prefix used in netlist text (V1, R1, C1, L1, D1).
inline char class_prefix(ComponentClass c) {
    switch (c) {
        case ComponentClass::VoltageSource: return 'V';
        case ComponentClass::Resistor: return 'R';
        case ComponentClass::Capacitor: return 'C';
        case ComponentClass::Inductor: return 'L';
        case ComponentClass::Diode: return 'D';
    }
    return '?';
}

inline ComponentClass parse_class(const std::string& s) {
    if (s == "voltage_source") return ComponentClass::VoltageSource;
    if (s == "resistor") return ComponentClass::Resistor;
    if (s == "capacitor") return ComponentClass::Capacitor;
    if (s == "inductor") return ComponentClass::Inductor;
    if (s == "diode") return ComponentClass::Diode;
    throw Error(ErrorKind::UnknownClass, "unknown component class '" + s + "'");
}

struct Detection {
    ComponentClass cls = ComponentClass::Resistor;
    BoundingBox bbox;
    double score = 0.0;
};

struct DetectionSet {
    std::string image_ref;
    int width = 0;
    int height = 0;
    std::vector<Detection> detections;  // input order preserved
};

struct GroundTruthItem {
    ComponentClass cls = ComponentClass::Resistor;
    BoundingBox bbox;
};

struct GroundTruthSet {
    std::string image_ref;
    int width = 0;
    int height = 0;
    std::vector<GroundTruthItem> items;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "0";
    return std::string(buf, end);
}

/// Validates a raw box against image bounds: clamps boxes that stick out,
/// rejects degenerate or fully-outside ones.
inline BoundingBox validate_box(BoundingBox b, int width, int height) {
    if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max))
        throw Error(ErrorKind::InvalidBox, "degenerate bounding box");
    if (b.x_max <= 0 || b.y_max <= 0 || b.x_min >= width || b.y_min >= height)
        throw Error(ErrorKind::InvalidBox, "bounding box fully outside image");
    b.x_min = std::max(b.x_min, 0.0);
    b.y_min = std::max(b.y_min, 0.0);
    b.x_max = std::min(b.x_max, static_cast<double>(width));
    b.y_max = std::min(b.y_max, static_cast<double>(height));
    return b;
}

inline BoundingBox box_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw Error(ErrorKind::ParseError, "bbox must be [x_min, y_min, x_max, y_max]");
    return BoundingBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace detail

inline DetectionSet parse_detections(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    try {
        DetectionSet set;
        set.image_ref = j.at("image").get<std::string>();
        set.width = j.at("width").get<int>();
        set.height = j.at("height").get<int>();
        if (set.width <= 0 || set.height <= 0) throw Error(ErrorKind::ParseError, "non-positive image dims");
        for (const auto& d : j.at("detections")) {
            Detection det;
            det.cls = parse_class(d.at("class").get<std::string>());
            det.score = d.at("score").get<double>();
            if (det.score < 0.0 || det.score > 1.0) throw Error(ErrorKind::ParseError, "score outside [0, 1]");
            det.bbox = detail::validate_box(detail::box_from_json(d.at("bbox")), set.width, set.height);
            set.detections.push_back(det);
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

inline DetectionSet load_detections(const std::string& path) {
    return parse_detections(detail::read_file(path));
}

inline GroundTruthSet parse_ground_truth(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    try {
        GroundTruthSet set;
        set.image_ref = j.at("image").get<std::string>();
        set.width = j.at("width").get<int>();
        set.height = j.at("height").get<int>();
        if (set.width <= 0 || set.height <= 0) throw Error(ErrorKind::ParseError, "non-positive image dims");
        for (const auto& d : j.at("detections")) {
            GroundTruthItem item;
            item.cls = parse_class(d.at("class").get<std::string>());
            item.bbox = detail::validate_box(detail::box_from_json(d.at("bbox")), set.width, set.height);
            set.items.push_back(item);
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

inline GroundTruthSet load_ground_truth(const std::string& path) {
    return parse_ground_truth(detail::read_file(path));
}

/// Canonical serialization: fixed field order and shortest round-trip float
/// formatting, so load -> serialize is a stable fixed point.
inline std::string serialize_detections(const DetectionSet& set) {
    std::string out = "{\"image\":" + nlohmann::json(set.image_ref).dump() +
                      ",\"width\":" + std::to_string(set.width) +
                      ",\"height\":" + std::to_string(set.height) + ",\"detections\":[";
    for (std::size_t i = 0; i < set.detections.size(); ++i) {
        const Detection& d = set.detections[i];
        if (i > 0) out += ',';
        out += std::string("{\"class\":\"") + class_name(d.cls) + "\",\"score\":" +
               detail::format_double(d.score) + ",\"bbox\":[" + detail::format_double(d.bbox.x_min) +
               ',' + detail::format_double(d.bbox.y_min) + ',' + detail::format_double(d.bbox.x_max) +
               ',' + detail::format_double(d.bbox.y_max) + "]}";
    }
    out += "]}";
    return out;
}

inline std::string serialize_ground_truth(const GroundTruthSet& set) {
    std::string out = "{\"image\":" + nlohmann::json(set.image_ref).dump() +
                      ",\"width\":" + std::to_string(set.width) +
                      ",\"height\":" + std::to_string(set.height) + ",\"detections\":[";
    for (std::size_t i = 0; i < set.items.size(); ++i) {
        const GroundTruthItem& d = set.items[i];
        if (i > 0) out += ',';
        out += std::string("{\"class\":\"") + class_name(d.cls) + "\",\"bbox\":[" +
               detail::format_double(d.bbox.x_min) + ',' + detail::format_double(d.bbox.y_min) + ',' +
               detail::format_double(d.bbox.x_max) + ',' + detail::format_double(d.bbox.y_max) + "]}";
    }
    out += "]}";
    return out;
}

/// Keeps detections with score >= threshold, order preserved.
inline DetectionSet filter_by_score(const DetectionSet& set, double threshold) {
    DetectionSet out;
    out.image_ref = set.image_ref;
    out.width = set.width;
    out.height = set.height;
    for (const Detection& d : set.detections)
        if (d.score >= threshold) out.detections.push_back(d);
    return out;
}

/// Promotes ground truth to a detection set with unit confidence; used to run
/// the pipeline on synthetic cases.
inline DetectionSet to_detection_set(const GroundTruthSet& gt, double score = 1.0) {
    DetectionSet out;
    out.image_ref = gt.image_ref;
    out.width = gt.width;
    out.height = gt.height;
    for (const GroundTruthItem& item : gt.items) out.detections.push_back({item.cls, item.bbox, score});
    return out;
}

}  // namespace s2n
