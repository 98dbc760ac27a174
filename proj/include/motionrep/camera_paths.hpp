// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "motionrep/scene.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace motionrep {

enum class MoveKind {
    Static,
    PanLeft,
    PanRight,
    TiltUp,
    TiltDown,
    DollyIn,
    DollyOut,
    TruckLeft,
    TruckRight,
    PedestalUp,
    PedestalDown,
    OrbitLeft,
    OrbitRight,
    ZoomIn,
    ZoomOut,
};

std::string_view to_string(MoveKind kind);
/// Accepts snake_case names ("pan_left"); std::nullopt otherwise.
std::optional<MoveKind> parse_move_kind(std::string_view name);

/// `magnitude` is degrees for pans, tilts and orbits, world units for
/// dolly/truck/pedestal, and a focal multiplier for zooms.
struct CameraMoveSpec {
    MoveKind kind = MoveKind::Static;
    double magnitude = 0.0;
    int frames = 16;
    /// Distance from the camera to the orbit pivot along the principal ray.
    double pivot_distance = 10.0;
};

CameraTrajectory generate(const CameraMoveSpec &spec, const CameraIntrinsics &base);

/// Per frame pose_b ∘ pose_a; focal multipliers (relative to a's first frame)
/// multiply.
CameraTrajectory compose(const CameraTrajectory &a, const CameraTrajectory &b);

/// Mean geodesic rotation angle between matching frames, in degrees.
double rot_err(const CameraTrajectory &gt, const CameraTrajectory &pred);

/// Mean distance between camera centers after scaling each trajectory by its
/// largest center norm.
double trans_err(const CameraTrajectory &gt, const CameraTrajectory &pred);

} // namespace motionrep
