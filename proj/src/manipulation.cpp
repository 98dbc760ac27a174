// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/manipulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace motionrep {

namespace {

void require(bool ok, ErrorCode code, const std::string &message) {
    if (!ok) {
        fail(code, message);
    }
}

std::string pixel_string(const Vec2d &p) {
    return "(" + std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
}

bool pixel_inside(const Vec2d &p, int width, int height) {
    return p.allFinite() && p.x() >= 0.0 && p.y() >= 0.0 && p.x() < width && p.y() < height;
}

int pixel_floor(double v) { return static_cast<int>(std::floor(v)); }

std::optional<Vec2d> first_frame_center(const MotionScene &scene, const Vec3d &world) {
    const auto &f = scene.trajectory.frames.front();
    if (const auto p = project_point(f.intrinsics, f.pose, world)) {
        return Vec2d(p->u, p->v);
    }
    return std::nullopt;
}

bool in_mask(const Mask &mask, const std::optional<Vec2d> &center) {
    if (!center || !pixel_inside(*center, mask.width, mask.height)) {
        return false;
    }
    return mask(pixel_floor(center->x()), pixel_floor(center->y())) != 0;
}

MotionScene rebuild(const MotionScene &scene, CameraTrajectory trajectory,
                    std::vector<SphereTrack> tracks) {
    return build_scene(scene.width, scene.height, std::move(trajectory), std::move(tracks),
                       scene.envelope, scene.render_params);
}

} // namespace

template <typename Point>
std::vector<Point> resample_polyline(std::span<const Point> points, std::size_t count) {
    require(!points.empty(), ErrorCode::InvalidArgument, "resample: empty polyline");
    require(count >= 1, ErrorCode::InvalidArgument, "resample: need at least one output point");
    if (points.size() == count) {
        return {points.begin(), points.end()};
    }
    std::vector<double> cumulative(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        cumulative[i] = cumulative[i - 1] + (points[i] - points[i - 1]).norm();
    }
    const double total = cumulative.back();
    std::vector<Point> out;
    out.reserve(count);
    if (count == 1 || total == 0.0) {
        out.assign(count, points.front());
        return out;
    }
    std::size_t segment = 0;
    for (std::size_t k = 0; k < count; ++k) {
        if (k + 1 == count) {
            out.push_back(points.back());
            break;
        }
        const double s = total * static_cast<double>(k) / static_cast<double>(count - 1);
        while (segment + 2 < points.size() && cumulative[segment + 1] < s) {
            ++segment;
        }
        const double span = cumulative[segment + 1] - cumulative[segment];
        const double t = span > 0.0 ? std::clamp((s - cumulative[segment]) / span, 0.0, 1.0) : 0.0;
        out.push_back(points[segment] + t * (points[segment + 1] - points[segment]));
    }
    return out;
}

template std::vector<Vec2d> resample_polyline(std::span<const Vec2d>, std::size_t);
template std::vector<Vec3d> resample_polyline(std::span<const Vec3d>, std::size_t);

Track lift_trajectory(const UserTrajectory &trajectory, const DepthMap *depth_map,
                      const MotionScene &scene) {
    const std::size_t length = scene.length();
    require(length >= 1, ErrorCode::InvalidArgument, "lift_trajectory: scene has no frames");

    if (const auto *world = std::get_if<std::vector<Vec3d>>(&trajectory.points)) {
        require(!world->empty(), ErrorCode::InvalidArgument, "lift_trajectory: empty trajectory");
        for (const auto &p : *world) {
            require(p.allFinite(), ErrorCode::InvalidArgument,
                    "lift_trajectory: non-finite position");
        }
        return resample_polyline<Vec3d>(*world, length);
    }

    const auto &pixels = std::get<std::vector<Vec2d>>(trajectory.points);
    require(!pixels.empty(), ErrorCode::InvalidArgument, "lift_trajectory: empty trajectory");
    require(trajectory.depth_hint.has_value() || depth_map != nullptr, ErrorCode::MissingDepth,
            "lift_trajectory: 2D trajectory needs a depth map or a depth hint");
    const Vec2d start = pixels.front();
    require(pixel_inside(start, scene.width, scene.height), ErrorCode::InvalidArgument,
            "lift_trajectory: start pixel " + pixel_string(start) + " is outside the image");

    double depth = 0.0;
    if (trajectory.depth_hint) {
        depth = *trajectory.depth_hint;
    } else {
        require(depth_map->width == scene.width && depth_map->height == scene.height,
                ErrorCode::InvalidArgument, "lift_trajectory: depth map size differs from scene");
        depth = (*depth_map)(pixel_floor(start.x()), pixel_floor(start.y()));
    }
    require(depth > 0.0 && std::isfinite(depth), ErrorCode::InvalidArgument,
            "lift_trajectory: depth at the start pixel must be positive");

    const auto &first = scene.trajectory.frames.front();
    Track track;
    track.reserve(length);
    for (const auto &p : resample_polyline<Vec2d>(pixels, length)) {
        track.push_back(unproject_pixel(first.intrinsics, first.pose, p.x(), p.y(), depth));
    }
    return track;
}

std::pair<MotionScene, int> add_sphere(const MotionScene &scene, Track track) {
    int id = 0;
    for (const auto &s : scene.spheres.spheres) {
        id = std::max(id, s.id + 1);
    }
    auto tracks = sphere_tracks(scene.spheres);
    tracks.push_back({id, std::move(track)});
    return {rebuild(scene, scene.trajectory, std::move(tracks)), id};
}

MotionScene clone_motion(const MotionScene &source) { return source; }

Similarity2 fit_similarity(std::span<const CorrespondencePair> pairs) {
    require(!pairs.empty(), ErrorCode::InvalidArgument, "fit_similarity: no correspondence pairs");
    Vec2d src_mean = Vec2d::Zero();
    Vec2d dst_mean = Vec2d::Zero();
    for (const auto &p : pairs) {
        src_mean += p.source;
        dst_mean += p.target;
    }
    src_mean /= static_cast<double>(pairs.size());
    dst_mean /= static_cast<double>(pairs.size());

    double cross = 0.0;
    double spread = 0.0;
    for (const auto &p : pairs) {
        const Vec2d a = p.source - src_mean;
        const Vec2d b = p.target - dst_mean;
        cross += a.dot(b);
        spread += a.squaredNorm();
    }
    Similarity2 sim;
    sim.scale = spread > 0.0 ? cross / spread : 1.0;
    sim.offset = dst_mean - sim.scale * src_mean;
    return sim;
}

std::optional<int> nearest_sphere(const MotionScene &scene, const Vec2d &pixel, double radius) {
    std::optional<int> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto &s : scene.spheres.spheres) {
        const auto c = first_frame_center(scene, s.track.front());
        if (!c) {
            continue;
        }
        const double d = (*c - pixel).norm();
        if (d <= radius && d < best_dist) {
            best_dist = d;
            best = s.id;
        }
    }
    return best;
}

MotionScene transfer_motion(const MotionScene &source, std::span<const CorrespondencePair> pairs,
                            const DepthMap &target_depth, int target_width, int target_height) {
    require(!pairs.empty(), ErrorCode::InvalidArgument, "transfer_motion: no correspondence pairs");
    require(target_depth.width == target_width && target_depth.height == target_height,
            ErrorCode::InvalidArgument, "transfer_motion: depth map size differs from target");
    const Similarity2 sim = fit_similarity(pairs);
    const auto target_k = default_intrinsics(target_width, target_height);
    const std::size_t length = source.length();

    std::vector<int> selected;
    for (const auto &pair : pairs) {
        const auto id = nearest_sphere(source, pair.source);
        require(id.has_value(), ErrorCode::OutOfFrame,
                "transfer_motion: no source sphere within 10 px of " + pixel_string(pair.source));
        if (std::find(selected.begin(), selected.end(), *id) == selected.end()) {
            selected.push_back(*id);
        }
    }

    std::vector<SphereTrack> tracks;
    for (int id : selected) {
        const auto it = std::find_if(source.spheres.spheres.begin(), source.spheres.spheres.end(),
                                     [id](const Sphere &s) { return s.id == id; });
        std::vector<Vec2d> pixels;
        std::vector<double> depths;
        for (std::size_t l = 0; l < length; ++l) {
            const auto &f = source.trajectory.frames[l];
            const auto p = project_point(f.intrinsics, f.pose, it->track[l]);
            require(p.has_value(), ErrorCode::OutOfFrame,
                    "transfer_motion: sphere " + std::to_string(id) + " is behind the camera at frame " +
                        std::to_string(l + 1));
            pixels.push_back(sim.apply(Vec2d(p->u, p->v)));
            depths.push_back(p->z);
        }
        const Vec2d start = pixels.front();
        require(pixel_inside(start, target_width, target_height), ErrorCode::OutOfFrame,
                "transfer_motion: sphere " + std::to_string(id) + " maps to " +
                    pixel_string(start) + ", outside the target image");
        const double anchor = target_depth(pixel_floor(start.x()), pixel_floor(start.y()));
        require(anchor > 0.0 && std::isfinite(anchor), ErrorCode::InvalidArgument,
                "transfer_motion: target depth at " + pixel_string(start) + " must be positive");

        SphereTrack t{id, {}};
        t.track.reserve(length);
        for (std::size_t l = 0; l < length; ++l) {
            const double z = anchor * (depths[l] / depths.front());
            t.track.push_back(unproject_pixel(target_k, CameraPose::identity(), pixels[l].x(),
                                              pixels[l].y(), z));
        }
        tracks.push_back(std::move(t));
    }

    return build_scene(target_width, target_height, static_trajectory(target_k, length),
                       std::move(tracks), source.envelope,
                       RenderParams::defaults_for(target_width, target_height));
}

MotionScene edit_motion(const MotionScene &scene, std::span<const EditDirective> directives) {
    CameraTrajectory trajectory = scene.trajectory;
    std::vector<SphereTrack> tracks = sphere_tracks(scene.spheres);
    bool changed = false;

    for (std::size_t k = 0; k < directives.size(); ++k) {
        const auto &d = directives[k];
        const std::string where = "edit_motion: directive " + std::to_string(k + 1);
        require(d.mask.width == scene.width && d.mask.height == scene.height,
                ErrorCode::InvalidArgument, where + ": mask size differs from scene");
        require(d.replacement.has_value() == (d.mode == EditMode::ReplaceSpheres),
                ErrorCode::InvalidArgument,
                where + ": replacement tracks are required for, and only for, replace mode");

        if (d.mode == EditMode::FreezeCamera) {
            for (auto &f : trajectory.frames) {
                if (!(f.pose == CameraPose::identity())) {
                    f.pose = CameraPose::identity();
                    changed = true;
                }
            }
            continue;
        }

        // Centers come from the current (possibly already edited) state.
        MotionScene current = scene;
        current.trajectory = trajectory;
        std::vector<std::size_t> interior;
        for (std::size_t n = 0; n < tracks.size(); ++n) {
            if (in_mask(d.mask, first_frame_center(current, tracks[n].track.front()))) {
                interior.push_back(n);
            }
        }

        if (d.mode == EditMode::FreezeSpheres) {
            for (std::size_t n : interior) {
                auto &t = tracks[n].track;
                const Vec3d start = t.front();
                for (auto &p : t) {
                    if (p != start) {
                        p = start;
                        changed = true;
                    }
                }
            }
            continue;
        }

        const auto &replacements = *d.replacement;
        require(replacements.size() <= interior.size(), ErrorCode::InvalidArgument,
                where + ": " + std::to_string(replacements.size()) +
                    " replacement tracks but only " + std::to_string(interior.size()) +
                    " spheres inside the mask");
        std::set<std::size_t> taken;
        for (std::size_t r = 0; r < replacements.size(); ++r) {
            const auto &rep = replacements[r];
            require(rep.size() == scene.length(), ErrorCode::InvalidArgument,
                    where + ": replacement " + std::to_string(r + 1) + " has " +
                        std::to_string(rep.size()) + " frames, scene has " +
                        std::to_string(scene.length()));
            const auto anchor = first_frame_center(current, rep.front());
            require(anchor.has_value(), ErrorCode::InvalidArgument,
                    where + ": replacement " + std::to_string(r + 1) +
                        " starts behind the camera");
            std::optional<std::size_t> best;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t n : interior) {
                if (taken.count(n)) {
                    continue;
                }
                const auto c = first_frame_center(current, tracks[n].track.front());
                const double dist = (*c - *anchor).norm();
                if (dist < best_dist) {
                    best_dist = dist;
                    best = n;
                }
            }
            taken.insert(*best);
            tracks[*best].track = rep;
            changed = true;
        }
    }

    if (!changed) {
        return scene;
    }
    return rebuild(scene, std::move(trajectory), std::move(tracks));
}

} // namespace motionrep
