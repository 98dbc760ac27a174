// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Scene document: one JSON object
//   {format, version, width, height, render_params, envelope, trajectory[], spheres[]}
// Doubles are written with round-trip precision, so parse(serialize(s)) == s.

#include "motionrep/io.hpp"

#include <json.hpp>

#include <algorithm>

namespace motionrep {

using nlohmann::json;

namespace {

json rgb_json(Rgb c) { return json::array({c.r, c.g, c.b}); }

json vec_json(const Vec3d &v) { return json::array({v.x(), v.y(), v.z()}); }

[[noreturn]] void semantic(const std::string &path, const std::string &what) {
    fail(ErrorCode::SemanticError, path + ": " + what);
}

/// Thin cursor over the parsed document that remembers where it is, so type
/// and range errors name the offending field.
class Node {
public:
    Node(const json &value, std::string path) : value_(value), path_(std::move(path)) {}

    const std::string &path() const { return path_; }

    Node operator[](const char *key) const {
        if (!value_.is_object()) {
            semantic(path_, "expected an object");
        }
        const auto it = value_.find(key);
        if (it == value_.end()) {
            semantic(join(key), "missing field");
        }
        return Node(*it, join(key));
    }

    Node at(std::size_t index) const {
        return Node(value_.at(index), path_ + "[" + std::to_string(index) + "]");
    }

    std::size_t size(std::size_t expected = 0) const {
        if (!value_.is_array()) {
            semantic(path_, "expected an array");
        }
        if (expected != 0 && value_.size() != expected) {
            semantic(path_, "expected " + std::to_string(expected) + " elements, found " +
                                std::to_string(value_.size()));
        }
        return value_.size();
    }

    double number() const {
        if (!value_.is_number()) {
            semantic(path_, "expected a number");
        }
        return value_.get<double>();
    }

    int integer() const {
        if (!value_.is_number_integer()) {
            semantic(path_, "expected an integer");
        }
        return value_.get<int>();
    }

    std::uint8_t byte() const {
        const int v = integer();
        if (v < 0 || v > 255) {
            semantic(path_, "expected a value in [0, 255]");
        }
        return static_cast<std::uint8_t>(v);
    }

    std::string string() const {
        if (!value_.is_string()) {
            semantic(path_, "expected a string");
        }
        return value_.get<std::string>();
    }

    Rgb rgb() const {
        size(3);
        return {at(0).byte(), at(1).byte(), at(2).byte()};
    }

    Vec3d vec3() const {
        size(3);
        return {at(0).number(), at(1).number(), at(2).number()};
    }

private:
    std::string join(const char *key) const { return path_.empty() ? key : path_ + "." + key; }

    const json &value_;
    std::string path_;
};

std::pair<std::size_t, std::size_t> line_column(const std::string &text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

} // namespace

std::string serialize_scene(const MotionScene &scene) {
    json doc;
    doc["format"] = kSceneFormat;
    doc["version"] = kSceneVersion;
    doc["width"] = scene.width;
    doc["height"] = scene.height;
    doc["render_params"] = {{"r_min", scene.render_params.r_min},
                            {"r_max", scene.render_params.r_max}};

    const auto &env = scene.envelope;
    json tints = json::array();
    for (const auto &t : env.face_tints) {
        tints.push_back(json::array({t.r, t.g, t.b}));
    }
    doc["envelope"] = {{"side_length", env.side_length},
                       {"checker_cell", env.checker_cell},
                       {"color_a", rgb_json(env.color_a)},
                       {"color_b", rgb_json(env.color_b)},
                       {"face_tints", tints}};

    json frames = json::array();
    for (const auto &f : scene.trajectory.frames) {
        json rotation = json::array();
        for (int r = 0; r < 3; ++r) {
            rotation.push_back(json::array(
                {f.pose.rotation(r, 0), f.pose.rotation(r, 1), f.pose.rotation(r, 2)}));
        }
        frames.push_back({{"fx", f.intrinsics.fx},
                          {"fy", f.intrinsics.fy},
                          {"cx", f.intrinsics.cx},
                          {"cy", f.intrinsics.cy},
                          {"rotation", rotation},
                          {"translation", vec_json(f.pose.translation)}});
    }
    doc["trajectory"] = frames;

    json spheres = json::array();
    for (const auto &s : scene.spheres.spheres) {
        json track = json::array();
        for (const auto &p : s.track) {
            track.push_back(vec_json(p));
        }
        spheres.push_back({{"id", s.id},
                           {"color", rgb_json(s.color)},
                           {"track", track},
                           {"normalized_depths", s.normalized_depths}});
    }
    doc["spheres"] = spheres;
    return doc.dump(1) + "\n";
}

MotionScene parse_scene(const std::string &document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error &e) {
        const auto [line, column] = line_column(document, e.byte);
        fail(ErrorCode::ParseError, "scene document: syntax error at line " +
                                        std::to_string(line) + ", column " +
                                        std::to_string(column));
    }

    const Node root(doc, "");
    if (root["format"].string() != kSceneFormat) {
        semantic("format", "not a motionrep scene document");
    }
    const std::string version = root["version"].string();
    if (version != kSceneVersion) {
        fail(ErrorCode::VersionUnsupported,
             "scene document: version '" + version + "' is not supported");
    }

    MotionScene scene;
    scene.width = root["width"].integer();
    scene.height = root["height"].integer();
    const Node rp = root["render_params"];
    scene.render_params = {rp["r_min"].number(), rp["r_max"].number()};

    const Node env = root["envelope"];
    scene.envelope.side_length = env["side_length"].number();
    scene.envelope.checker_cell = env["checker_cell"].number();
    scene.envelope.color_a = env["color_a"].rgb();
    scene.envelope.color_b = env["color_b"].rgb();
    const Node tints = env["face_tints"];
    tints.size(6);
    for (std::size_t f = 0; f < 6; ++f) {
        const Vec3d t = tints.at(f).vec3();
        scene.envelope.face_tints.at(f) = {t.x(), t.y(), t.z()};
    }

    const Node frames = root["trajectory"];
    const std::size_t length = frames.size();
    for (std::size_t l = 0; l < length; ++l) {
        const Node f = frames.at(l);
        CameraFrame frame;
        frame.intrinsics = {f["fx"].number(), f["fy"].number(), f["cx"].number(),
                            f["cy"].number()};
        const Node rot = f["rotation"];
        rot.size(3);
        for (int r = 0; r < 3; ++r) {
            frame.pose.rotation.row(r) = rot.at(static_cast<std::size_t>(r)).vec3().transpose();
        }
        frame.pose.translation = f["translation"].vec3();
        scene.trajectory.frames.push_back(frame);
    }

    const Node spheres = root["spheres"];
    const std::size_t count = spheres.size();
    for (std::size_t n = 0; n < count; ++n) {
        const Node s = spheres.at(n);
        Sphere sphere;
        sphere.id = s["id"].integer();
        sphere.color = s["color"].rgb();
        const Node track = s["track"];
        for (std::size_t l = 0, m = track.size(); l < m; ++l) {
            sphere.track.push_back(track.at(l).vec3());
        }
        const Node depths = s["normalized_depths"];
        for (std::size_t l = 0, m = depths.size(); l < m; ++l) {
            sphere.normalized_depths.push_back(depths.at(l).number());
        }
        scene.spheres.spheres.push_back(std::move(sphere));
    }

    try {
        validate_scene(scene);
    } catch (const Error &e) {
        fail(ErrorCode::SemanticError, std::string("scene document: ") + e.what());
    }
    return scene;
}

} // namespace motionrep
