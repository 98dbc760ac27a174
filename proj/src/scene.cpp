// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace motionrep {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidPose: return "invalid-pose";
    case ErrorCode::CameraEscapedEnvelope: return "camera-escaped-envelope";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::BadMagic: return "bad-magic";
    case ErrorCode::Truncated: return "truncated";
    case ErrorCode::VersionUnsupported: return "version-unsupported";
    case ErrorCode::SemanticError: return "semantic-error";
    case ErrorCode::MissingDepth: return "missing-depth";
    case ErrorCode::OutOfFrame: return "out-of-frame";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::IoError: return "io-error";
    }
    return "unknown";
}

CameraTrajectory static_trajectory(const CameraIntrinsics &intrinsics, std::size_t length) {
    CameraTrajectory out;
    out.frames.assign(length, CameraFrame{intrinsics, CameraPose::identity()});
    return out;
}

WorldEnvelope WorldEnvelope::defaults() { return with_side(100.0); }

WorldEnvelope WorldEnvelope::with_side(double side_length) {
    WorldEnvelope env;
    env.side_length = side_length;
    env.checker_cell = side_length / 16.0;
    const FaceTint x_pair{1.0, 0.85, 0.85};
    const FaceTint y_pair{0.85, 1.0, 0.85};
    const FaceTint z_pair{0.85, 0.85, 1.0};
    env.face_tints = {x_pair, x_pair, y_pair, y_pair, z_pair, z_pair};
    return env;
}

RenderParams RenderParams::defaults_for(int width, int height) {
    const double scale = static_cast<double>(std::min(width, height)) / 512.0;
    return {2.0 * scale, 14.0 * scale};
}

std::vector<CameraPose> align_to_first_frame(std::span<const CameraPose> raw_poses) {
    if (raw_poses.empty()) {
        fail(ErrorCode::InvalidArgument, "align_to_first_frame: empty pose list");
    }
    for (std::size_t i = 0; i < raw_poses.size(); ++i) {
        require_valid_pose(raw_poses[i], "align_to_first_frame: pose " + std::to_string(i + 1));
    }
    const CameraPose base_inverse = raw_poses.front().inverse();
    std::vector<CameraPose> out;
    out.reserve(raw_poses.size());
    for (const auto &pose : raw_poses) {
        out.push_back(pose * base_inverse);
    }
    // Exact identity for the first frame rather than R R^T.
    out.front() = CameraPose::identity();
    return out;
}

std::vector<double> normalize_depths(std::span<const double> depths) {
    if (depths.empty()) {
        fail(ErrorCode::InvalidArgument, "normalize_depths: no values");
    }
    for (double z : depths) {
        if (!std::isfinite(z)) {
            fail(ErrorCode::InvalidArgument, "normalize_depths: non-finite depth");
        }
    }
    const auto [lo, hi] = std::minmax_element(depths.begin(), depths.end());
    const double z_min = *lo;
    const double z_max = *hi;
    std::vector<double> out(depths.size(), 0.5);
    if (z_max == z_min) {
        return out;
    }
    const double range = z_max - z_min;
    for (std::size_t i = 0; i < depths.size(); ++i) {
        out[i] = std::clamp((depths[i] - z_min) / range, 0.0, 1.0);
    }
    return out;
}

Rgb color_at(double u, double v, int width, int height) {
    const double uc = std::clamp(u, 0.0, static_cast<double>(width - 1));
    const double vc = std::clamp(v, 0.0, static_cast<double>(height - 1));
    const auto channel = [](double t, int extent) {
        return static_cast<std::uint8_t>(std::lround(255.0 * t / static_cast<double>(extent - 1)));
    };
    return {channel(uc, width), channel(vc, height), 128};
}

std::vector<Rgb> assign_colors(std::span<const Vec2d> first_frame_centers, int width, int height) {
    if (width < 2 || height < 2) {
        fail(ErrorCode::InvalidArgument, "assign_colors: image must be at least 2x2");
    }
    std::vector<Rgb> out;
    out.reserve(first_frame_centers.size());
    for (const auto &c : first_frame_centers) {
        out.push_back(color_at(c.x(), c.y(), width, height));
    }
    return out;
}

namespace {

void require(bool ok, const std::string &message) {
    if (!ok) {
        fail(ErrorCode::InvalidArgument, message);
    }
}

} // namespace

void validate_scene(const MotionScene &scene) {
    require(scene.width > 0 && scene.height > 0, "scene: width and height must be positive");
    const std::size_t length = scene.length();
    require(length >= 1, "trajectory: at least one frame required");
    for (std::size_t l = 0; l < length; ++l) {
        const auto &frame = scene.trajectory.frames[l];
        const std::string where = "trajectory.frames[" + std::to_string(l) + "]";
        require(frame.intrinsics.valid_for(scene.width, scene.height),
                where + ".intrinsics: need fx, fy > 0 and principal point inside the image");
        require_valid_pose(frame.pose, where + ".pose");
    }
    const auto &env = scene.envelope;
    require(env.side_length > 0 && std::isfinite(env.side_length),
            "envelope.side_length must be positive");
    require(env.checker_cell > 0 && env.checker_cell <= env.side_length,
            "envelope.checker_cell must be in (0, side_length]");
    for (const auto &tint : env.face_tints) {
        require(tint.r >= 0 && tint.g >= 0 && tint.b >= 0 && std::isfinite(tint.r) &&
                    std::isfinite(tint.g) && std::isfinite(tint.b),
                "envelope.face_tints must be finite and non-negative");
    }
    const auto &rp = scene.render_params;
    require(std::isfinite(rp.r_min) && std::isfinite(rp.r_max) && rp.r_min >= 0,
            "render_params: radii must be finite and non-negative");
    require(rp.r_min <= rp.r_max, "render_params: r_min must not exceed r_max");

    std::set<int> ids;
    for (std::size_t n = 0; n < scene.spheres.size(); ++n) {
        const auto &sphere = scene.spheres.spheres[n];
        const std::string where = "spheres[" + std::to_string(n) + "]";
        require(ids.insert(sphere.id).second, where + ".id: duplicate sphere id");
        require(sphere.track.size() == length, where + ".track: length differs from trajectory");
        require(sphere.normalized_depths.size() == length,
                where + ".normalized_depths: length differs from trajectory");
        for (const auto &p : sphere.track) {
            require(p.allFinite(), where + ".track: non-finite position");
        }
        for (double d : sphere.normalized_depths) {
            require(d >= 0.0 && d <= 1.0, where + ".normalized_depths: value outside [0, 1]");
        }
    }
}

MotionScene build_scene(int width, int height, CameraTrajectory trajectory,
                        std::vector<SphereTrack> tracks, WorldEnvelope envelope,
                        RenderParams render_params) {
    const std::size_t length = trajectory.length();
    require(width >= 2 && height >= 2, "build_scene: image must be at least 2x2");
    require(length >= 1, "build_scene: trajectory is empty");
    for (const auto &t : tracks) {
        require(t.track.size() == length,
                "build_scene: sphere " + std::to_string(t.id) + " has " +
                    std::to_string(t.track.size()) + " frames, trajectory has " +
                    std::to_string(length));
    }

    MotionScene scene;
    scene.width = width;
    scene.height = height;
    scene.trajectory = std::move(trajectory);
    scene.envelope = envelope;
    scene.render_params = render_params;

    std::vector<double> depths;
    depths.reserve(tracks.size() * length);
    for (const auto &t : tracks) {
        for (const auto &p : t.track) {
            depths.push_back(p.z());
        }
    }
    std::vector<double> normalized;
    if (!depths.empty()) {
        normalized = normalize_depths(depths);
    }

    const auto &first = scene.trajectory.frames.front();
    const Vec2d fallback(first.intrinsics.cx, first.intrinsics.cy);
    std::vector<Vec2d> centers;
    centers.reserve(tracks.size());
    for (const auto &t : tracks) {
        const auto proj = project_point(first.intrinsics, first.pose, t.track.front());
        centers.push_back(proj ? Vec2d(proj->u, proj->v) : fallback);
    }
    const auto colors = assign_colors(centers, width, height);

    scene.spheres.spheres.reserve(tracks.size());
    for (std::size_t n = 0; n < tracks.size(); ++n) {
        Sphere sphere;
        sphere.id = tracks[n].id;
        sphere.track = std::move(tracks[n].track);
        sphere.normalized_depths.assign(normalized.begin() + static_cast<std::ptrdiff_t>(n * length),
                                        normalized.begin() +
                                            static_cast<std::ptrdiff_t>((n + 1) * length));
        sphere.color = colors[n];
        scene.spheres.spheres.push_back(std::move(sphere));
    }

    validate_scene(scene);
    return scene;
}

MotionScene build_scene(int width, int height, CameraTrajectory trajectory,
                        const std::vector<std::vector<Vec3d>> &frame_major_tracks,
                        WorldEnvelope envelope, RenderParams render_params) {
    const std::size_t length = trajectory.length();
    require(frame_major_tracks.size() == length,
            "build_scene: tracks have " + std::to_string(frame_major_tracks.size()) +
                " frames, trajectory has " + std::to_string(length));
    const std::size_t count = length == 0 ? 0 : frame_major_tracks.front().size();
    std::vector<SphereTrack> tracks(count);
    for (std::size_t n = 0; n < count; ++n) {
        tracks[n].id = static_cast<int>(n);
        tracks[n].track.reserve(length);
    }
    for (std::size_t l = 0; l < length; ++l) {
        require(frame_major_tracks[l].size() == count,
                "build_scene: frame " + std::to_string(l + 1) + " has a different point count");
        for (std::size_t n = 0; n < count; ++n) {
            tracks[n].track.push_back(frame_major_tracks[l][n]);
        }
    }
    return build_scene(width, height, std::move(trajectory), std::move(tracks), envelope,
                       render_params);
}

std::vector<SphereTrack> sphere_tracks(const SphereSet &spheres) {
    std::vector<SphereTrack> out;
    out.reserve(spheres.size());
    for (const auto &s : spheres.spheres) {
        out.push_back({s.id, s.track});
    }
    return out;
}

} // namespace motionrep
