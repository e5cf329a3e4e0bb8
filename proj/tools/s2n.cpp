// sketch2netlist command-line front end: circuit reconstruction from scanned
// images plus component detections, detection/netlist evaluation, and the
// synthetic test-case generator.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sketch2netlist/config.hpp"
#include "sketch2netlist/detection.hpp"
#include "sketch2netlist/metrics.hpp"
#include "sketch2netlist/pipeline.hpp"
#include "sketch2netlist/pnm.hpp"
#include "sketch2netlist/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPipeline = 2;
constexpr int kExitNotEquivalent = 3;

s2n::Config resolve_config(const std::string& config_path, bool verbose) {
    s2n::Config cfg;
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SKETCH2NETLIST_CONFIG")) path = env;
    }
    if (!path.empty()) cfg = s2n::load_config(path);
    if (verbose) std::cerr << "config: " << s2n::serialize_config(cfg) << "\n";
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw s2n::Error(s2n::ErrorKind::IoError, "cannot write " + path);
    out << text;
}

void draw_marker(s2n::ColorImage& img, const s2n::Point& p, int half, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
    const int cx = static_cast<int>(std::lround(p.x));
    const int cy = static_cast<int>(std::lround(p.y));
    for (int y = cy - half; y <= cy + half; ++y)
        for (int x = cx - half; x <= cx + half; ++x)
            if (img.in_bounds(x, y)) img.set(x, y, r, g, b);
}

void draw_segment(s2n::ColorImage& img, const s2n::LineSegment& s, std::uint8_t r, std::uint8_t g,
                  std::uint8_t b) {
    const double len = s2n::euclidean_distance(s.p1, s.p2);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(s.p1.x + (s.p2.x - s.p1.x) * t));
        const int y = static_cast<int>(std::lround(s.p1.y + (s.p2.y - s.p1.y) * t));
        if (img.in_bounds(x, y)) img.set(x, y, r, g, b);
    }
}

// Overlay colors: terminals red, horizontal segments blue, vertical segments
// yellow, nodes green.
void write_debug_artifacts(const std::string& dir, const std::string& stem, const s2n::GrayImage& img,
                           const s2n::PipelineParams& params, const s2n::ReconstructionResult& result) {
    fs::create_directories(dir);
    const s2n::BinaryMask ink = s2n::adaptive_threshold(img, params.adaptive);
    s2n::ColorImage ink_rgb(img.width, img.height);
    s2n::ColorImage overlay(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t v = ink.at(x, y) ? 0 : 255;
            ink_rgb.set(x, y, v, v, v);
            overlay.set(x, y, v, v, v);
        }
    }
    for (const s2n::LineSegment& s : result.segments) {
        if (s2n::segment_orientation(s) == s2n::Orientation::Horizontal)
            draw_segment(overlay, s, 0, 0, 255);
        else
            draw_segment(overlay, s, 255, 255, 0);
    }
    for (const s2n::Terminal& t : result.terminals) draw_marker(overlay, t.point, 2, 255, 0, 0);
    for (const s2n::Node& n : result.nodes) draw_marker(overlay, n.point, 3, 0, 200, 0);
    s2n::write_ppm((fs::path(dir) / (stem + "_ink.ppm")).string(), ink_rgb);
    s2n::write_ppm((fs::path(dir) / (stem + "_overlay.ppm")).string(), overlay);

    std::string timings = "{\"stages\":[";
    for (std::size_t i = 0; i < result.diagnostics.timings.size(); ++i) {
        if (i > 0) timings += ',';
        timings += "{\"stage\":\"" + result.diagnostics.timings[i].stage + "\",\"ms\":" +
                   s2n::detail::format_double(result.diagnostics.timings[i].ms) + "}";
    }
    timings += "]}";
    write_text((fs::path(dir) / (stem + "_timings.json")).string(), timings);
}

struct ReconstructJob {
    std::string image;
    std::string detections;
    std::string out;
};

int run_reconstruct(const std::vector<ReconstructJob>& jobs, const s2n::Config& cfg,
                    const std::string& debug_dir, int n_threads) {
    std::atomic<int> next{0};
    std::atomic<int> exit_code{kExitOk};
    std::mutex io_mutex;

    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= static_cast<int>(jobs.size())) return;
            const ReconstructJob& job = jobs[i];
            try {
                const s2n::GrayImage img = s2n::read_pgm(job.image);
                const s2n::DetectionSet dets = s2n::load_detections(job.detections);
                const s2n::PipelineParams params = cfg.pipeline_params();
                const s2n::ReconstructionResult result = s2n::reconstruct(img, dets, params);
                write_text(job.out, s2n::netlist_to_text(result.netlist));
                if (!debug_dir.empty())
                    write_debug_artifacts(debug_dir, fs::path(job.image).stem().string(), img, params,
                                          result);
            } catch (const s2n::Error& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "error";
                if (!e.stage().empty()) std::cerr << " at stage '" << e.stage() << "'";
                std::cerr << ": " << e.what() << "\n";
                int expect = kExitOk;
                const int code = (e.kind() == s2n::ErrorKind::IoError ||
                                  e.kind() == s2n::ErrorKind::ParseError ||
                                  e.kind() == s2n::ErrorKind::ConfigError)
                                     ? kExitUsage
                                     : kExitPipeline;
                exit_code.compare_exchange_strong(expect, code);
            }
        }
    };

    if (n_threads <= 1 || jobs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(n_threads, static_cast<int>(jobs.size())); ++t)
            pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return exit_code.load();
}

std::string metrics_report_json(const s2n::GroundTruthSet& gt, const s2n::DetectionSet& pred,
                                const s2n::Config& cfg) {
    const s2n::MatchList matches = s2n::match_detections(gt, pred, cfg.iou_threshold, cfg.score_threshold);
    const s2n::ConfusionMatrix cm = s2n::confusion_matrix(matches, gt, pred);
    const s2n::ClassificationReport report = s2n::classification_metrics(cm);

    std::string out = "{\"map\":" + s2n::detail::format_double(s2n::map_at_05(gt, pred)) + ",\"ap\":{";
    for (int c = 0; c < s2n::kClassCount; ++c) {
        if (c > 0) out += ',';
        out += std::string("\"") + s2n::class_name(static_cast<s2n::ComponentClass>(c)) + "\":" +
               s2n::detail::format_double(
                   s2n::average_precision(gt, pred, static_cast<s2n::ComponentClass>(c), cfg.iou_threshold));
    }
    out += "},\"confusion_matrix\":[";
    for (int r = 0; r < s2n::ConfusionMatrix::kSize; ++r) {
        if (r > 0) out += ',';
        out += '[';
        for (int c = 0; c < s2n::ConfusionMatrix::kSize; ++c) {
            if (c > 0) out += ',';
            out += std::to_string(cm.at(r, c));
        }
        out += ']';
    }
    out += "],\"metrics\":{";
    for (int c = 0; c < s2n::kClassCount; ++c) {
        if (c > 0) out += ',';
        const s2n::ClassMetrics& m = report.per_class[c];
        out += std::string("\"") + s2n::class_name(static_cast<s2n::ComponentClass>(c)) +
               "\":{\"accuracy\":" + s2n::detail::format_double(m.accuracy) +
               ",\"precision\":" + s2n::detail::format_double(m.precision) +
               ",\"recall\":" + s2n::detail::format_double(m.recall) +
               ",\"f1\":" + s2n::detail::format_double(m.f1) + "}";
    }
    out += ",\"macro\":{\"accuracy\":" + s2n::detail::format_double(report.macro.accuracy) +
           ",\"precision\":" + s2n::detail::format_double(report.macro.precision) +
           ",\"recall\":" + s2n::detail::format_double(report.macro.recall) +
           ",\"f1\":" + s2n::detail::format_double(report.macro.f1) + "}}}";
    return out;
}

void print_metrics_table(const s2n::GroundTruthSet& gt, const s2n::DetectionSet& pred,
                         const s2n::Config& cfg) {
    const s2n::MatchList matches = s2n::match_detections(gt, pred, cfg.iou_threshold, cfg.score_threshold);
    const s2n::ConfusionMatrix cm = s2n::confusion_matrix(matches, gt, pred);
    const s2n::ClassificationReport report = s2n::classification_metrics(cm);

    std::printf("mAP@%.2f: %.4f\n", cfg.iou_threshold, s2n::map_at_05(gt, pred));
    std::printf("\nPer-class AP:\n");
    for (int c = 0; c < s2n::kClassCount; ++c)
        std::printf("  %-15s %.4f\n", s2n::class_name(static_cast<s2n::ComponentClass>(c)),
                    s2n::average_precision(gt, pred, static_cast<s2n::ComponentClass>(c), cfg.iou_threshold));

    std::printf("\nConfusion matrix (rows = ground truth, cols = detected; last row ghosts, last col misses):\n");
    std::printf("%-16s", "");
    for (int c = 0; c < s2n::kClassCount; ++c)
        std::printf("%-16s", s2n::class_name(static_cast<s2n::ComponentClass>(c)));
    std::printf("%-16s\n", "miss");
    for (int r = 0; r < s2n::ConfusionMatrix::kSize; ++r) {
        std::printf("%-16s", r < s2n::kClassCount ? s2n::class_name(static_cast<s2n::ComponentClass>(r))
                                                  : "ghost");
        for (int c = 0; c < s2n::ConfusionMatrix::kSize; ++c) std::printf("%-16ld", cm.at(r, c));
        std::printf("\n");
    }

    std::printf("\n%-16s%-12s%-12s%-12s%-12s\n", "class", "accuracy", "precision", "recall", "f1");
    for (int c = 0; c < s2n::kClassCount; ++c) {
        const s2n::ClassMetrics& m = report.per_class[c];
        std::printf("%-16s%-12.4f%-12.4f%-12.4f%-12.4f\n",
                    s2n::class_name(static_cast<s2n::ComponentClass>(c)), m.accuracy, m.precision,
                    m.recall, m.f1);
    }
    std::printf("%-16s%-12.4f%-12.4f%-12.4f%-12.4f\n", "macro", report.macro.accuracy,
                report.macro.precision, report.macro.recall, report.macro.f1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sketch2netlist: hand-drawn circuit reconstruction"};
    app.require_subcommand(1);

    std::vector<std::string> images, detection_paths, out_paths;
    std::string out, debug_dir, config_path, gt_path, pred_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int count = 1, jobs = 1;
    bool json_output = false, verbose = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (env SKETCH2NETLIST_CONFIG as fallback)");
        cmd->add_flag("--verbose", verbose, "echo the effective configuration");
    };

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "reconstruct a netlist from image + detections");
    reconstruct->add_option("--image", images, "input PGM image(s)")->required();
    reconstruct->add_option("--detections", detection_paths, "detection JSON file(s), one per image")->required();
    reconstruct->add_option("--out", out_paths, "output netlist path(s), one per image")->required();
    reconstruct->add_option("--debug-dir", debug_dir, "write overlay PPMs and stage timings here");
    reconstruct->add_option("--seed", seed, "k-means seed override")->each([&](const std::string&) { seed_given = true; });
    reconstruct->add_option("--jobs", jobs, "worker threads for batch input")->check(CLI::PositiveNumber);
    add_common(reconstruct);

    CLI::App* terminals_cmd = app.add_subcommand("terminals", "terminal recognition only, debug JSON out");
    terminals_cmd->add_option("--image", images, "input PGM image")->required();
    terminals_cmd->add_option("--detections", detection_paths, "detection JSON file")->required();
    terminals_cmd->add_option("--out", out, "output JSON path")->required();
    terminals_cmd->add_option("--seed", seed, "k-means seed override")->each([&](const std::string&) { seed_given = true; });
    add_common(terminals_cmd);

    CLI::App* nodes_cmd = app.add_subcommand("nodes", "node recognition only, debug JSON out");
    nodes_cmd->add_option("--image", images, "input PGM image")->required();
    nodes_cmd->add_option("--detections", detection_paths, "detection JSON file")->required();
    nodes_cmd->add_option("--out", out, "output JSON path")->required();
    nodes_cmd->add_option("--seed", seed, "k-means seed override")->each([&](const std::string&) { seed_given = true; });
    add_common(nodes_cmd);

    CLI::App* eval_det = app.add_subcommand("eval-det", "evaluate detections against ground truth");
    eval_det->add_option("--gt", gt_path, "ground-truth JSON")->required();
    eval_det->add_option("--pred", pred_path, "predicted detections JSON")->required();
    eval_det->add_flag("--json", json_output, "machine-readable report");
    add_common(eval_det);

    CLI::App* eval_netlist = app.add_subcommand("eval-netlist", "check two netlists for equivalence");
    eval_netlist->add_option("--gt", gt_path, "reference netlist")->required();
    eval_netlist->add_option("--pred", pred_path, "candidate netlist")->required();

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic ground-truth cases");
    synth->add_option("--seed", seed, "base seed")->each([&](const std::string&) { seed_given = true; });
    synth->add_option("--count", count, "number of cases")->required();
    synth->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (reconstruct->parsed()) {
            if (images.size() != detection_paths.size() || images.size() != out_paths.size()) {
                std::cerr << "error: --image, --detections and --out must be given equally often\n";
                return kExitUsage;
            }
            s2n::Config cfg = resolve_config(config_path, verbose);
            if (seed_given) cfg.kmeans_seed = seed;
            std::vector<ReconstructJob> batch;
            for (std::size_t i = 0; i < images.size(); ++i)
                batch.push_back({images[i], detection_paths[i], out_paths[i]});
            return run_reconstruct(batch, cfg, debug_dir, jobs);
        }

        if (terminals_cmd->parsed() || nodes_cmd->parsed()) {
            s2n::Config cfg = resolve_config(config_path, verbose);
            if (seed_given) cfg.kmeans_seed = seed;
            const s2n::GrayImage img = s2n::read_pgm(images.front());
            const s2n::DetectionSet dets =
                s2n::filter_by_score(s2n::load_detections(detection_paths.front()), cfg.score_threshold);
            const s2n::PipelineParams params = cfg.pipeline_params();
            try {
                if (terminals_cmd->parsed()) {
                    const auto terminals = s2n::recognize_terminals(img, dets, params);
                    write_text(out, s2n::debug_json(terminals, {}));
                } else {
                    const auto nodes = s2n::recognize_nodes(img, dets, params);
                    write_text(out, s2n::debug_json({}, nodes));
                }
            } catch (const s2n::Error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitPipeline;
            }
            return kExitOk;
        }

        if (eval_det->parsed()) {
            s2n::Config cfg = resolve_config(config_path, verbose);
            const s2n::GroundTruthSet gt = s2n::load_ground_truth(gt_path);
            const s2n::DetectionSet pred = s2n::load_detections(pred_path);
            if (gt.image_ref != pred.image_ref) {
                std::cerr << "error: image refs differ ('" << gt.image_ref << "' vs '" << pred.image_ref
                          << "')\n";
                return kExitUsage;
            }
            if (json_output)
                std::printf("%s\n", metrics_report_json(gt, pred, cfg).c_str());
            else
                print_metrics_table(gt, pred, cfg);
            return kExitOk;
        }

        if (eval_netlist->parsed()) {
            const s2n::Netlist a = s2n::parse_netlist_text(s2n::detail::read_file(gt_path));
            const s2n::Netlist b = s2n::parse_netlist_text(s2n::detail::read_file(pred_path));
            if (s2n::netlist_equivalence(a, b)) {
                std::printf("equivalent\n");
                return kExitOk;
            }
            std::printf("not equivalent\n");
            return kExitNotEquivalent;
        }

        if (synth->parsed()) {
            if (count <= 0) {
                std::cerr << "error: --count must be positive\n";
                return kExitUsage;
            }
            fs::create_directories(out_dir);
            for (int i = 0; i < count; ++i) {
                s2n::SynthSpec spec;
                spec.seed = (seed_given ? seed : 1) + static_cast<std::uint64_t>(i);
                spec.component_count = 2 + static_cast<int>(spec.seed % 5);
                const s2n::SynthCase c = s2n::generate_circuit(spec);
                char stem[32];
                std::snprintf(stem, sizeof(stem), "case_%03d", i);
                const fs::path base = fs::path(out_dir) / stem;
                s2n::write_pgm(base.string() + ".pgm", c.image);
                write_text(base.string() + ".gt.json", s2n::serialize_ground_truth(c.detections));
                write_text(base.string() + ".net", s2n::netlist_to_text(c.netlist));
                std::vector<s2n::Node> gt_nodes;
                for (std::size_t n = 0; n < c.nodes.size(); ++n)
                    gt_nodes.push_back({static_cast<int>(n), c.nodes[n]});
                write_text(base.string() + ".nodes.json", s2n::debug_json({}, gt_nodes));
            }
            return kExitOk;
        }
    } catch (const s2n::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
