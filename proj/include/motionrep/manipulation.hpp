// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Representation-side edits behind the four application workflows: motion
// generation (lift user-drawn trajectories), clone, transfer and local
// editing. All functions return new scenes; depths and colors of the result
// are re-derived from its tracks.

#pragma once

#include "motionrep/image.hpp"
#include "motionrep/scene.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace motionrep {

struct UserTrajectory {
    /// Either pixel positions or world positions, never mixed.
    std::variant<std::vector<Vec2d>, std::vector<Vec3d>> points;
    /// Camera-frame depth used to lift 2D paths; overrides the depth map.
    std::optional<double> depth_hint;
};

struct CorrespondencePair {
    Vec2d source = Vec2d::Zero();
    Vec2d target = Vec2d::Zero();
};

enum class EditMode { FreezeSpheres, ReplaceSpheres, FreezeCamera };

struct EditDirective {
    Mask mask;
    EditMode mode = EditMode::FreezeSpheres;
    /// Present iff mode == ReplaceSpheres; each track has the scene's length.
    std::optional<std::vector<Track>> replacement;
};

/// Uniform scale plus translation (no rotation): target = scale * source + offset.
struct Similarity2 {
    double scale = 1.0;
    Vec2d offset = Vec2d::Zero();

    Vec2d apply(const Vec2d &p) const { return scale * p + offset; }
};

/// Resamples a polyline to `count` points equally spaced by arc length. A
/// polyline that already has `count` points is returned unchanged.
template <typename Point>
std::vector<Point> resample_polyline(std::span<const Point> points, std::size_t count);

/// Lifts a drawn trajectory to a world-space track of the scene's length.
/// 2D paths are resampled in pixel space, then unprojected through the
/// frame-1 camera at the constant depth of the start pixel.
Track lift_trajectory(const UserTrajectory &trajectory, const DepthMap *depth_map,
                      const MotionScene &scene);

/// Adds a sphere with the next free id; returns the new scene and that id.
std::pair<MotionScene, int> add_sphere(const MotionScene &scene, Track track);

MotionScene clone_motion(const MotionScene &source);

/// Least-squares uniform scale + translation; scale is 1 for a single pair or
/// coincident sources.
Similarity2 fit_similarity(std::span<const CorrespondencePair> pairs);

/// Sphere whose frame-1 projected center is nearest to `pixel`, within
/// `radius` pixels.
std::optional<int> nearest_sphere(const MotionScene &scene, const Vec2d &pixel,
                                  double radius = 10.0);

MotionScene transfer_motion(const MotionScene &source, std::span<const CorrespondencePair> pairs,
                            const DepthMap &target_depth, int target_width, int target_height);

MotionScene edit_motion(const MotionScene &scene, std::span<const EditDirective> directives);

} // namespace motionrep
