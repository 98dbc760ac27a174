// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Two-layer control-signal rendering. The sphere layer draws each visible
// sphere as a hard-edged disk whose radius shrinks linearly with normalized
// depth; the envelope layer ray-casts a checkerboard cube from the inside.
// Frame indices are 1-based throughout this header.

#pragma once

#include "motionrep/image.hpp"
#include "motionrep/scene.hpp"

#include <vector>

namespace motionrep {

struct ProjectedCircle {
    int sphere_id = 0;
    Vec2d center = Vec2d::Zero();
    double radius = 0.0;
    double depth = 0.0;
    Rgb color;
    bool visible = false;
};

struct ControlSignalFrame {
    int frame_index = 0;
    RgbImage sphere_layer;
    RgbImage envelope_layer;

    bool operator==(const ControlSignalFrame &) const = default;
};

enum class Layer { Spheres, Envelope };

/// r_min + (r_max - r_min) * (1 - depth).
double circle_radius(const RenderParams &params, double normalized_depth);

std::vector<ProjectedCircle> project_sphere_set(const MotionScene &scene, int frame_index);

/// Pixel (i, j) is covered iff (i + 0.5 - u)^2 + (j + 0.5 - v)^2 <= r^2;
/// far circles are painted first.
RgbImage render_sphere_layer(const MotionScene &scene, int frame_index);

/// Throws CameraEscapedEnvelope unless the camera center is strictly inside
/// the cube.
RgbImage render_envelope_layer(const MotionScene &scene, int frame_index);

/// Renders both layers of every frame, spreading frames over `threads`
/// workers (0 = hardware concurrency). Output does not depend on `threads`.
std::vector<ControlSignalFrame> render_scene(const MotionScene &scene, unsigned threads = 0);

/// Brute-force reference renderer used to check the fast paths: every pixel
/// scans every sphere, and every envelope ray is tested against all six faces.
RgbImage oracle_render(const MotionScene &scene, int frame_index, Layer layer);

/// Control layers alpha-blended over a reference image, for inspection only.
RgbImage composite(const RgbImage &reference, const ControlSignalFrame &frame, double opacity);

} // namespace motionrep
