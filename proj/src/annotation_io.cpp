// SPDX-License-Identifier: Apache-2.0
#include "paftrack/annotation_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "paftrack/validate.hpp"

namespace paftrack {

using nlohmann::json;

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

void append_pose(std::string& out, const PoseAnnotation& pose) {
    out += "{\"person_id\": " + std::to_string(pose.person_id);
    if (pose.score) out += ", \"score\": " + format_g6(*pose.score);
    out += ", \"joints\": [";
    bool first = true;
    for (int j = 0; j < kJointCount; ++j) {
        const auto& kp = pose.keypoints[j];
        if (!kp) continue;
        if (!first) out += ", ";
        first = false;
        out += "[" + std::to_string(j) + ", " + format_g6(kp->position_px.x) + ", " +
               format_g6(kp->position_px.y) + ", " + format_g6(kp->camera_distance) + ", " +
               (kp->occluded ? "1" : "0") + ", " + (kp->self_occluded ? "1" : "0") + "]";
    }
    out += "]}";
}

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    throw IoError(IoError::Kind::schema, path, message);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing key \"") + key + "\"");
    return *it;
}

int require_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected an integer");
    return v.get<int>();
}

double require_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    return v.get<double>();
}

bool require_flag(const json& v, const std::string& path) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) {
        const int i = v.get<int>();
        if (i == 0 || i == 1) return i == 1;
    }
    schema_error(path, "expected 0 or 1");
}

}  // namespace

std::string serialize_annotation(const AnnotationDocument& doc) {
    const SequenceAnnotation& seq = doc.sequence;
    int image_w = 0, image_h = 0;
    if (!seq.frames.empty()) {
        image_w = seq.frames.front().image_width;
        image_h = seq.frames.front().image_height;
        for (const FrameAnnotation& frame : seq.frames)
            if (frame.image_width != image_w || frame.image_height != image_h)
                throw std::invalid_argument(
                    "serialize_annotation: frames must share one image size");
    }

    std::string out;
    out += "{\n";
    out += "  \"type\": \"annotation\",\n";
    out += "  \"version\": 1,\n";
    out += "  \"image_size\": [" + std::to_string(image_w) + ", " + std::to_string(image_h) +
           "],\n";
    out += "  \"fps\": " + format_g6(seq.fps) + ",\n";
    out += "  \"clip_stride\": " + std::to_string(seq.clip_stride) + ",\n";
    out += "  \"clip_length\": " + std::to_string(seq.clip_length) + ",\n";
    out += "  \"joint_names\": [";
    for (int j = 0; j < kJointCount; ++j) {
        if (j) out += ", ";
        out += "\"" + std::string(joint_name(static_cast<JointKind>(j))) + "\"";
    }
    out += "],\n";
    out += "  \"limbs\": [";
    for (int c = 0; c < doc.topology.limb_count(); ++c) {
        if (c) out += ", ";
        out += "[" + std::to_string(joint_index(doc.topology.limbs[c].a)) + ", " +
               std::to_string(joint_index(doc.topology.limbs[c].b)) + "]";
    }
    out += "],\n";
    out += "  \"frames\": [";
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        const FrameAnnotation& frame = seq.frames[f];
        out += f == 0 ? "\n" : ",\n";
        out += "    {\"frame_index\": " + std::to_string(frame.frame_index) + ", \"poses\": [";
        for (std::size_t p = 0; p < frame.poses.size(); ++p) {
            out += p == 0 ? "\n      " : ",\n      ";
            append_pose(out, frame.poses[p]);
        }
        out += frame.poses.empty() ? "]}" : "\n    ]}";
    }
    out += seq.frames.empty() ? "]\n" : "\n  ]\n";
    out += "}\n";
    return out;
}

AnnotationDocument parse_annotation(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(IoError::Kind::syntax, "byte " + std::to_string(e.byte), e.what());
    }
    if (!root.is_object()) schema_error("$", "top level must be an object");
    const json& type = require(root, "type", "$");
    if (!type.is_string() || type.get<std::string>() != "annotation")
        schema_error("$.type", "not an annotation document");
    const int version = require_int(require(root, "version", "$"), "$.version");
    if (version != 1)
        throw IoError(IoError::Kind::bad_version, "$.version",
                      "unsupported version " + std::to_string(version));

    const json& size = require(root, "image_size", "$");
    if (!size.is_array() || size.size() != 2) schema_error("$.image_size", "expected [w, h]");
    const int image_w = require_int(size[0], "$.image_size[0]");
    const int image_h = require_int(size[1], "$.image_size[1]");

    AnnotationDocument doc;
    doc.sequence.fps = require_number(require(root, "fps", "$"), "$.fps");
    doc.sequence.clip_stride = require_int(require(root, "clip_stride", "$"), "$.clip_stride");
    doc.sequence.clip_length = require_int(require(root, "clip_length", "$"), "$.clip_length");

    const json& names = require(root, "joint_names", "$");
    if (!names.is_array() || static_cast<int>(names.size()) != kJointCount)
        schema_error("$.joint_names",
                     "expected exactly " + std::to_string(kJointCount) + " joint names");
    for (int j = 0; j < kJointCount; ++j) {
        if (!names[j].is_string() ||
            names[j].get<std::string>() != joint_name(static_cast<JointKind>(j)))
            schema_error("$.joint_names[" + std::to_string(j) + "]",
                         "expected \"" + std::string(joint_name(static_cast<JointKind>(j))) + "\"");
    }

    const json& limbs = require(root, "limbs", "$");
    if (!limbs.is_array()) schema_error("$.limbs", "expected an array of [a, b] pairs");
    for (std::size_t c = 0; c < limbs.size(); ++c) {
        const std::string path = "$.limbs[" + std::to_string(c) + "]";
        if (!limbs[c].is_array() || limbs[c].size() != 2) schema_error(path, "expected [a, b]");
        const int a = require_int(limbs[c][0], path);
        const int b = require_int(limbs[c][1], path);
        if (a < 0 || a >= kJointCount || b < 0 || b >= kJointCount)
            schema_error(path, "joint index out of range");
        doc.topology.limbs.push_back({static_cast<JointKind>(a), static_cast<JointKind>(b)});
    }
    const auto topo_problems = topology_violations(doc.topology);
    if (!topo_problems.empty()) schema_error("$.limbs", topo_problems.front());

    const json& frames = require(root, "frames", "$");
    if (!frames.is_array()) schema_error("$.frames", "expected an array");
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const std::string fpath = "$.frames[" + std::to_string(f) + "]";
        if (!frames[f].is_object()) schema_error(fpath, "expected an object");
        FrameAnnotation frame;
        frame.frame_index = require_int(require(frames[f], "frame_index", fpath), fpath);
        frame.image_width = image_w;
        frame.image_height = image_h;

        const json& poses = require(frames[f], "poses", fpath);
        if (!poses.is_array()) schema_error(fpath + ".poses", "expected an array");
        for (std::size_t p = 0; p < poses.size(); ++p) {
            const std::string ppath = fpath + ".poses[" + std::to_string(p) + "]";
            if (!poses[p].is_object()) schema_error(ppath, "expected an object");
            PoseAnnotation pose;
            pose.person_id = require_int(require(poses[p], "person_id", ppath), ppath);
            if (poses[p].contains("score"))
                pose.score = require_number(poses[p]["score"], ppath + ".score");

            const json& joints = require(poses[p], "joints", ppath);
            if (!joints.is_array()) schema_error(ppath + ".joints", "expected an array");
            for (std::size_t k = 0; k < joints.size(); ++k) {
                const std::string jpath = ppath + ".joints[" + std::to_string(k) + "]";
                const json& entry = joints[k];
                if (!entry.is_array() || entry.size() != 6)
                    schema_error(jpath, "expected [kind, x, y, distance, occluded, self_occluded]");
                const int kind = require_int(entry[0], jpath);
                if (kind < 0 || kind >= kJointCount) schema_error(jpath, "joint kind out of range");
                if (pose.keypoints[kind])
                    schema_error(jpath, "duplicate joint kind " + std::to_string(kind));
                Keypoint kp;
                kp.position_px.x = static_cast<float>(require_number(entry[1], jpath));
                kp.position_px.y = static_cast<float>(require_number(entry[2], jpath));
                kp.camera_distance = static_cast<float>(require_number(entry[3], jpath));
                kp.occluded = require_flag(entry[4], jpath);
                kp.self_occluded = require_flag(entry[5], jpath);
                pose.keypoints[kind] = kp;
            }
            frame.poses.push_back(std::move(pose));
        }
        doc.sequence.frames.push_back(std::move(frame));
    }

    const auto violations = validate_sequence(doc.sequence);
    if (!violations.empty()) {
        const Violation& v = violations.front();
        const std::string where =
            v.frame_index >= 0 ? "frame " + std::to_string(v.frame_index) : "sequence";
        std::string msg = v.message;
        if (violations.size() > 1)
            msg += " (and " + std::to_string(violations.size() - 1) + " more)";
        throw IoError(IoError::Kind::validation, where, msg);
    }
    return doc;
}

void save_annotation_file(const std::string& path, const AnnotationDocument& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::schema, path, "cannot open for writing");
    const std::string text = serialize_annotation(doc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(IoError::Kind::schema, path, "write failed");
}

AnnotationDocument load_annotation_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::schema, path, "cannot open for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_annotation(buffer.str());
}

}  // namespace paftrack
