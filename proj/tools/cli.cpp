// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "paftrack/annotation_io.hpp"
#include "paftrack/field_io.hpp"
#include "paftrack/metrics.hpp"
#include "paftrack/pipeline.hpp"
#include "paftrack/render.hpp"
#include "paftrack/simgen.hpp"
#include "paftrack/validate.hpp"

namespace paftrack {
namespace {

std::string read_text_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::schema, path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::schema, path, "cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(IoError::Kind::schema, path, "write failed");
}

PoseAnnotation to_annotation_pose(const AssembledPose& pose, int scale, int image_w, int image_h,
                                  int person_id) {
    PoseAnnotation out;
    out.person_id = person_id;
    out.score = pose.total_score;
    for (int j = 0; j < kJointCount; ++j) {
        const auto& joint = pose.joints[j];
        if (!joint) continue;
        Keypoint kp;
        kp.position_px = {
            std::clamp(joint->position.x * scale, 0.0f, static_cast<float>(image_w) - 0.01f),
            std::clamp(joint->position.y * scale, 0.0f, static_cast<float>(image_h) - 0.01f)};
        kp.camera_distance = 1.0f;  // unknown for predictions
        kp.occluded = joint->from_occluded;
        out.keypoints[j] = kp;
    }
    return out;
}

struct SceneFlags {
    SceneConfig cfg;
    void attach(CLI::App* app) {
        app->add_option("--seed", cfg.seed, "scene seed");
        app->add_option("--num-people-min", cfg.num_people_min, "min people");
        app->add_option("--num-people-max", cfg.num_people_max, "max people");
        app->add_option("--image-width", cfg.image_width, "image width, px");
        app->add_option("--image-height", cfg.image_height, "image height, px");
        app->add_option("--distance-min", cfg.distance_min, "min camera distance, m");
        app->add_option("--distance-max", cfg.distance_max, "max camera distance, m");
        app->add_option("--speed-min", cfg.speed_min, "min speed, px/frame");
        app->add_option("--speed-max", cfg.speed_max, "max speed, px/frame");
        app->add_option("--occluder-events", cfg.occluder_events, "occluder rectangles per sequence");
        app->add_option("--duration", cfg.duration, "frames");
        app->add_option("--crossing-pairs", cfg.crossing_pairs, "crossing trajectory pairs");
        app->add_option("--fps", cfg.fps, "frames per second");
        app->add_option("--clip-stride", cfg.clip_stride, "temporal link stride");
        app->add_option("--clip-length", cfg.clip_length, "frames per clip");
    }
};

struct SynthFlags {
    SynthConfig cfg;
    std::string mask_policy = "all_ones";
    int scale_factor = 8;
    void attach(CLI::App* app) {
        app->add_option("--alpha-sigma", cfg.alpha_sigma, "distance scale of peak spread, m");
        app->add_option("--paf-half-width", cfg.paf_half_width, "limb support half width, grid px");
        app->add_option("--taf-half-width", cfg.taf_half_width, "motion support half width, grid px");
        app->add_option("--mask-policy", mask_policy, "all_ones | exclude_occluded_disks")
            ->check(CLI::IsMember({"all_ones", "exclude_occluded_disks"}));
        app->add_option("--scale-factor", scale_factor, "image-to-grid downscale factor");
    }
    SynthConfig resolve() const {
        SynthConfig out = cfg;
        out.mask_policy = mask_policy == "all_ones" ? SynthConfig::MaskPolicy::all_ones
                                                    : SynthConfig::MaskPolicy::exclude_occluded_disks;
        return out;
    }
};

struct AssocFlags {
    AssocConfig cfg;
    void attach(CLI::App* app) {
        app->add_option("--temporal-weight", cfg.temporal_weight, "weight of the temporal term");
        app->add_option("--integral-samples", cfg.integral_samples, "line integral samples");
        app->add_option("--nms-threshold", cfg.nms_threshold, "peak threshold");
        app->add_option("--nms-window", cfg.nms_window, "odd suppression window");
        app->add_option("--min-limb-score", cfg.min_limb_score, "connection acceptance floor");
        app->add_option("--search-radius-multiplier", cfg.search_radius_multiplier,
                        "times previous skeleton diagonal");
        app->add_option("--use-occluded-candidates", cfg.use_occluded_candidates,
                        "also extract candidates from occluded heatmaps");
    }
};

struct TrackerFlags {
    TrackerConfig cfg;
    void attach(CLI::App* app) {
        app->add_option("--max-age", cfg.max_age, "frames a track survives unmatched");
        app->add_option("--min-match-score", cfg.min_match_score, "affinity acceptance floor");
        app->add_option("--min-joints-for-birth", cfg.min_joints_for_birth,
                        "joints required to start a track");
    }
};

int run_gen(const SceneConfig& scene, const std::string& out) {
    AnnotationDocument doc{generate(scene), default_topology()};
    write_text_output(out, serialize_annotation(doc));
    return 0;
}

int run_synth(const std::string& in, const std::string& out, const SynthFlags& synth, int stride) {
    const AnnotationDocument doc = parse_annotation(read_text_input(in));
    const SynthConfig cfg = synth.resolve();
    const int step = stride > 0 ? stride : std::max(1, doc.sequence.clip_stride);

    std::ofstream file;
    std::ostream* sink = &std::cout;
    if (out != "-") {
        file.open(out, std::ios::binary);
        if (!file) throw IoError(IoError::Kind::schema, out, "cannot open for writing");
        sink = &file;
    }
    const FrameAnnotation* prev = nullptr;
    for (std::size_t pos = 0; pos < doc.sequence.frames.size(); pos += step) {
        const FrameAnnotation& frame = doc.sequence.frames[pos];
        const Grid grid =
            Grid::for_image(frame.image_width, frame.image_height, synth.scale_factor);
        write_field_stack(*sink, synth_stack(frame, prev, grid, doc.topology, cfg));
        prev = &frame;
    }
    sink->flush();
    if (!*sink) throw IoError(IoError::Kind::schema, out, "write failed");
    return 0;
}

// Shared by detect and track: runs assembly over a stack stream and emits an
// annotation document whose person ids come from `label`.
template <typename LabelFn>
int run_detection_stream(const std::string& fields, const std::string& out,
                         const AssocConfig& assoc, int stride, LabelFn label) {
    std::ifstream file;
    std::istream* source = &std::cin;
    if (fields != "-") {
        file.open(fields, std::ios::binary);
        if (!file) throw IoError(IoError::Kind::schema, fields, "cannot open for reading");
        source = &file;
    }

    Detector detector(default_topology(), assoc);
    AnnotationDocument doc;
    doc.topology = default_topology();
    doc.sequence.clip_stride = std::max(1, stride);

    int processed = 0;
    while (auto stack = read_field_stack(*source)) {
        const Grid grid = stack->grid;
        const int image_w = grid.padded_image_width();
        const int image_h = grid.padded_image_height();
        std::vector<AssembledPose> poses = detector.process(std::move(*stack));
        poses = label(std::move(poses), detector, processed);

        FrameAnnotation frame;
        frame.frame_index = processed * std::max(1, stride);
        frame.image_width = image_w;
        frame.image_height = image_h;
        for (const AssembledPose& pose : poses) {
            // label() assigns ids; poses left negative are dropped.
            if (pose.provisional_id < 0) continue;
            frame.poses.push_back(to_annotation_pose(pose, grid.scale_factor, image_w, image_h,
                                                     pose.provisional_id));
        }
        doc.sequence.frames.push_back(std::move(frame));
        ++processed;
    }
    write_text_output(out, serialize_annotation(doc));
    return 0;
}

int run_detect(const std::string& fields, const std::string& out, const AssocConfig& assoc,
               int stride) {
    return run_detection_stream(fields, out, assoc, stride,
                                [](std::vector<AssembledPose> poses, const Detector&, int) {
                                    int id = 0;
                                    for (AssembledPose& pose : poses) pose.provisional_id = id++;
                                    return poses;
                                });
}

int run_track(const std::string& fields, const std::string& out, const AssocConfig& assoc,
              const TrackerConfig& tracker_cfg, int stride) {
    auto tracker = std::make_shared<TrackerState>();
    return run_detection_stream(
        fields, out, assoc, stride,
        [tracker, tracker_cfg, stride](std::vector<AssembledPose> poses, const Detector& det,
                                       int processed) {
            return tracker_step(*tracker, processed * std::max(1, stride), std::move(poses),
                                *det.last_stack(), tracker_cfg);
        });
}

int run_eval(const std::string& pred_path, const std::string& gt_path, const EvalOptions& opt,
             const std::string& report_out) {
    const AnnotationDocument pred = parse_annotation(read_text_input(pred_path));
    const AnnotationDocument gt = parse_annotation(read_text_input(gt_path));
    if (!pred.sequence.frames.empty() && !gt.sequence.frames.empty()) {
        const FrameAnnotation& p = pred.sequence.frames.front();
        const FrameAnnotation& g = gt.sequence.frames.front();
        if (Grid::for_image(p.image_width, p.image_height) !=
            Grid::for_image(g.image_width, g.image_height))
            throw std::invalid_argument("eval: prediction and ground-truth image sizes differ");
    }
    const EvalReport report = evaluate(pred.sequence, gt.sequence, opt);
    std::cout << report_to_kv_text(report);
    if (!report_out.empty()) write_text_output(report_out, report_to_json(report));
    return 0;
}

int run_render(const std::string& poses_path, const std::string& out_prefix, int frame_filter,
               const std::string& background) {
    const AnnotationDocument doc = parse_annotation(read_text_input(poses_path));
    bool rendered = false;
    for (const FrameAnnotation& frame : doc.sequence.frames) {
        if (frame_filter >= 0 && frame.frame_index != frame_filter) continue;
        Image img;
        if (!background.empty())
            img = load_ppm(background);
        else
            img = Image(std::max(1, frame.image_width), std::max(1, frame.image_height));
        render_frame(img, frame, doc.topology);
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "%04d.ppm", frame.frame_index);
        save_ppm(out_prefix + suffix, img);
        rendered = true;
    }
    if (frame_filter >= 0 && !rendered)
        throw std::invalid_argument("render: frame " + std::to_string(frame_filter) +
                                    " not present in " + poses_path);
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Pose field synthesis, association, tracking and evaluation"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic annotated sequence");
    SceneFlags scene;
    scene.attach(gen);
    std::string gen_out = "-";
    gen->add_option("--out", gen_out, "annotation output path or -");

    // synth
    auto* synth = app.add_subcommand("synth", "annotations -> field stacks");
    SynthFlags synth_flags;
    synth_flags.attach(synth);
    std::string synth_in = "-", synth_out = "-";
    int synth_stride = 0;
    synth->add_option("--in", synth_in, "annotation input path or -");
    synth->add_option("--out", synth_out, "field stream output path or -");
    synth->add_option("--stride", synth_stride, "override the annotation clip stride");

    // detect
    auto* detect = app.add_subcommand("detect", "field stacks -> per-frame poses");
    AssocFlags detect_assoc;
    detect_assoc.attach(detect);
    std::string detect_fields = "-", detect_out = "-";
    int detect_stride = 1;
    detect->add_option("--fields", detect_fields, "field stream input path or -");
    detect->add_option("--out", detect_out, "predictions output path or -");
    detect->add_option("--stride", detect_stride, "frame index step of the stream");

    // track
    auto* track = app.add_subcommand("track", "field stacks -> tracklets");
    AssocFlags track_assoc;
    TrackerFlags track_tracker;
    track_assoc.attach(track);
    track_tracker.attach(track);
    std::string track_fields = "-", track_out = "-";
    int track_stride = 1;
    track->add_option("--fields", track_fields, "field stream input path or -");
    track->add_option("--out", track_out, "tracklets output path or -");
    track->add_option("--stride", track_stride, "frame index step of the stream");

    // eval
    auto* eval = app.add_subcommand("eval", "predictions + ground truth -> report");
    std::string eval_pred, eval_gt, eval_report_out;
    EvalOptions eval_opt;
    eval->add_option("--pred", eval_pred, "predictions path or -")->required();
    eval->add_option("--gt", eval_gt, "ground truth path")->required();
    eval->add_option("--pckh-ratio", eval_opt.pckh_ratio, "head-segment threshold ratio");
    eval->add_option("--iou-threshold", eval_opt.iou_threshold, "detection IoU threshold");
    eval->add_option("--stride", eval_opt.stride, "evaluate frames at this index stride");
    eval->add_option("--out", eval_report_out, "also write the report to this path");

    // render
    auto* render = app.add_subcommand("render", "poses -> overlay images");
    std::string render_poses, render_out = "frame_", render_background;
    int render_frame_filter = -1;
    render->add_option("--poses", render_poses, "poses path or -")->required();
    render->add_option("--out-prefix", render_out, "output path prefix");
    render->add_option("--frame", render_frame_filter, "render only this frame index");
    render->add_option("--background", render_background, "optional background PPM");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return run_gen(scene.cfg, gen_out);
        if (synth->parsed()) return run_synth(synth_in, synth_out, synth_flags, synth_stride);
        if (detect->parsed())
            return run_detect(detect_fields, detect_out, detect_assoc.cfg, detect_stride);
        if (track->parsed())
            return run_track(track_fields, track_out, track_assoc.cfg, track_tracker.cfg,
                             track_stride);
        if (eval->parsed()) return run_eval(eval_pred, eval_gt, eval_opt, eval_report_out);
        if (render->parsed())
            return run_render(render_poses, render_out, render_frame_filter, render_background);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace paftrack
