#include <catch2/catch_amalgamated.hpp>

#include "sketch2netlist/detection.hpp"

using namespace s2n;

namespace {

const char* kSample = R"({
  "image": "circuit_001.png",
  "width": 416, "height": 416,
  "detections": [
    {"class": "resistor", "score": 0.91, "bbox": [120.5, 80.0, 180.5, 110.0]},
    {"class": "voltage_source", "score": 0.75, "bbox": [30.0, 150.0, 80.0, 210.0]}
  ]
})";

}  // namespace

TEST_CASE("class names, prefixes and parsing round-trip") {
    for (int c = 0; c < kClassCount; ++c) {
        const ComponentClass cls = static_cast<ComponentClass>(c);
        CHECK(parse_class(class_name(cls)) == cls);
    }
    CHECK(class_prefix(ComponentClass::VoltageSource) == 'V');
    CHECK(class_prefix(ComponentClass::Resistor) == 'R');
    CHECK(class_prefix(ComponentClass::Capacitor) == 'C');
    CHECK(class_prefix(ComponentClass::Inductor) == 'L');
    CHECK(class_prefix(ComponentClass::Diode) == 'D');
    CHECK_THROWS_AS(parse_class("transistor"), Error);
    CHECK_THROWS_AS(parse_class("Resistor"), Error);
    CHECK_THROWS_AS(parse_class(""), Error);
}

TEST_CASE("detection json parsing") {
    const DetectionSet set = parse_detections(kSample);
    CHECK(set.image_ref == "circuit_001.png");
    CHECK(set.width == 416);
    CHECK(set.height == 416);
    REQUIRE(set.detections.size() == 2);
    CHECK(set.detections[0].cls == ComponentClass::Resistor);
    CHECK(set.detections[0].score == 0.91);
    CHECK(set.detections[0].bbox.x_min == 120.5);
    CHECK(set.detections[1].cls == ComponentClass::VoltageSource);
}

TEST_CASE("detection json rejects malformed input") {
    CHECK_THROWS_AS(parse_detections("not json"), Error);
    CHECK_THROWS_AS(parse_detections("{}"), Error);
    CHECK_THROWS_AS(parse_detections(R"({"image":"a","width":0,"height":10,"detections":[]})"), Error);
    // Unknown class is its own error kind.
    try {
        parse_detections(R"({"image":"a","width":10,"height":10,"detections":[
            {"class":"transistor","score":0.5,"bbox":[1,1,5,5]}]})");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownClass);
    }
    // Score outside [0, 1].
    CHECK_THROWS_AS(parse_detections(R"({"image":"a","width":10,"height":10,"detections":[
        {"class":"diode","score":1.5,"bbox":[1,1,5,5]}]})"), Error);
    // Wrong bbox arity.
    CHECK_THROWS_AS(parse_detections(R"({"image":"a","width":10,"height":10,"detections":[
        {"class":"diode","score":0.5,"bbox":[1,1,5]}]})"), Error);
}

TEST_CASE("bounding boxes are clamped or rejected against image bounds") {
    const std::string head = R"({"image":"a","width":100,"height":100,"detections":[)";
    auto one = [&](const std::string& bbox) {
        return parse_detections(head + R"({"class":"diode","score":0.5,"bbox":)" + bbox + "}]}");
    };
    // Partially outside: clamped.
    const DetectionSet clamped = one("[-10,-5,50,50]");
    CHECK(clamped.detections[0].bbox.x_min == 0.0);
    CHECK(clamped.detections[0].bbox.y_min == 0.0);
    const DetectionSet clamped2 = one("[60,60,140,120]");
    CHECK(clamped2.detections[0].bbox.x_max == 100.0);
    CHECK(clamped2.detections[0].bbox.y_max == 100.0);
    // Fully outside or degenerate: rejected.
    CHECK_THROWS_AS(one("[120,10,150,40]"), Error);
    CHECK_THROWS_AS(one("[10,10,10,40]"), Error);
    CHECK_THROWS_AS(one("[30,40,20,50]"), Error);
}

TEST_CASE("canonical serialization is a fixed point of parse") {
    const DetectionSet set = parse_detections(kSample);
    const std::string once = serialize_detections(set);
    const std::string twice = serialize_detections(parse_detections(once));
    CHECK(once == twice);
    // Shortest float formatting: no trailing zeros, integers stay compact.
    CHECK(once.find("0.91") != std::string::npos);
    CHECK(once.find("120.5") != std::string::npos);
    CHECK(once.find("80.000") == std::string::npos);
}

TEST_CASE("ground truth parsing and serialization") {
    const std::string text =
        R"({"image":"g.png","width":200,"height":150,"detections":[{"class":"inductor","bbox":[10,20,60,50]}]})";
    const GroundTruthSet gt = parse_ground_truth(text);
    CHECK(gt.image_ref == "g.png");
    REQUIRE(gt.items.size() == 1);
    CHECK(gt.items[0].cls == ComponentClass::Inductor);
    CHECK(serialize_ground_truth(parse_ground_truth(serialize_ground_truth(gt))) ==
          serialize_ground_truth(gt));
}

TEST_CASE("score filtering keeps order and is idempotent") {
    const DetectionSet set = parse_detections(kSample);
    const DetectionSet kept = filter_by_score(set, 0.8);
    REQUIRE(kept.detections.size() == 1);
    CHECK(kept.detections[0].cls == ComponentClass::Resistor);
    CHECK(filter_by_score(kept, 0.8).detections.size() == 1);
    // Threshold exactly at a score keeps it.
    CHECK(filter_by_score(set, 0.75).detections.size() == 2);
    CHECK(filter_by_score(set, 0.0).detections.size() == set.detections.size());
    // Monotone: raising the threshold never adds detections.
    std::size_t prev = set.detections.size();
    for (double t : {0.5, 0.76, 0.92, 1.0}) {
        const std::size_t n = filter_by_score(set, t).detections.size();
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("ground truth promotes to unit-confidence detections") {
    const GroundTruthSet gt = parse_ground_truth(
        R"({"image":"g.png","width":200,"height":150,"detections":[{"class":"capacitor","bbox":[10,20,60,50]}]})");
    const DetectionSet det = to_detection_set(gt);
    REQUIRE(det.detections.size() == 1);
    CHECK(det.detections[0].score == 1.0);
    CHECK(det.detections[0].cls == ComponentClass::Capacitor);
    CHECK(det.width == 200);
}
