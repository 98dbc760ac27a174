// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/camera_paths.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace motionrep {

namespace {

constexpr std::array<std::pair<MoveKind, std::string_view>, 15> kKindNames{{
    {MoveKind::Static, "static"},
    {MoveKind::PanLeft, "pan_left"},
    {MoveKind::PanRight, "pan_right"},
    {MoveKind::TiltUp, "tilt_up"},
    {MoveKind::TiltDown, "tilt_down"},
    {MoveKind::DollyIn, "dolly_in"},
    {MoveKind::DollyOut, "dolly_out"},
    {MoveKind::TruckLeft, "truck_left"},
    {MoveKind::TruckRight, "truck_right"},
    {MoveKind::PedestalUp, "pedestal_up"},
    {MoveKind::PedestalDown, "pedestal_down"},
    {MoveKind::OrbitLeft, "orbit_left"},
    {MoveKind::OrbitRight, "orbit_right"},
    {MoveKind::ZoomIn, "zoom_in"},
    {MoveKind::ZoomOut, "zoom_out"},
}};

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

/// Pose of a camera whose camera->world rotation is `cam_to_world` and whose
/// center sits at `center`.
CameraPose pose_from(const Mat3d &cam_to_world, const Vec3d &center) {
    CameraPose pose;
    pose.rotation = cam_to_world.transpose();
    pose.translation = -(pose.rotation * center);
    return pose;
}

void require_same_length(const CameraTrajectory &a, const CameraTrajectory &b, const char *op) {
    if (a.length() != b.length()) {
        fail(ErrorCode::InvalidArgument, std::string(op) + ": trajectories have " +
                                             std::to_string(a.length()) + " and " +
                                             std::to_string(b.length()) + " frames");
    }
}

} // namespace

std::string_view to_string(MoveKind kind) {
    for (const auto &[k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "static";
}

std::optional<MoveKind> parse_move_kind(std::string_view name) {
    for (const auto &[k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

CameraTrajectory generate(const CameraMoveSpec &spec, const CameraIntrinsics &base) {
    if (spec.frames < 1) {
        fail(ErrorCode::InvalidArgument, "camera move: frames must be >= 1");
    }
    if (!std::isfinite(spec.magnitude)) {
        fail(ErrorCode::InvalidArgument, "camera move: magnitude must be finite");
    }
    const bool zoom = spec.kind == MoveKind::ZoomIn || spec.kind == MoveKind::ZoomOut;
    if (zoom && !(spec.magnitude > 0.0)) {
        fail(ErrorCode::InvalidArgument, "camera move: zoom multiplier must be positive");
    }
    const bool orbit = spec.kind == MoveKind::OrbitLeft || spec.kind == MoveKind::OrbitRight;
    if (orbit && !(spec.pivot_distance > 0.0 && std::isfinite(spec.pivot_distance))) {
        fail(ErrorCode::InvalidArgument, "camera move: orbit pivot distance must be positive");
    }
    if (!(base.fx > 0.0 && base.fy > 0.0)) {
        fail(ErrorCode::InvalidArgument, "camera move: base focal lengths must be positive");
    }

    CameraTrajectory out;
    out.frames.reserve(static_cast<std::size_t>(spec.frames));
    const double m = spec.magnitude;
    for (int l = 0; l < spec.frames; ++l) {
        // Motion parameter runs 0 -> 1 from the first frame to the last.
        const double s = spec.frames == 1 ? 0.0 : static_cast<double>(l) / (spec.frames - 1);
        CameraFrame frame{base, CameraPose::identity()};
        const double angle = radians(m * s);
        const double dist = m * s;
        // Camera axes: x right, y down, z forward.
        switch (spec.kind) {
        case MoveKind::Static: break;
        case MoveKind::PanLeft: frame.pose = pose_from(rotation_y(-angle), Vec3d::Zero()); break;
        case MoveKind::PanRight: frame.pose = pose_from(rotation_y(angle), Vec3d::Zero()); break;
        case MoveKind::TiltUp: frame.pose = pose_from(rotation_x(angle), Vec3d::Zero()); break;
        case MoveKind::TiltDown: frame.pose = pose_from(rotation_x(-angle), Vec3d::Zero()); break;
        case MoveKind::DollyIn: frame.pose = pose_from(Mat3d::Identity(), {0, 0, dist}); break;
        case MoveKind::DollyOut: frame.pose = pose_from(Mat3d::Identity(), {0, 0, -dist}); break;
        case MoveKind::TruckLeft: frame.pose = pose_from(Mat3d::Identity(), {-dist, 0, 0}); break;
        case MoveKind::TruckRight: frame.pose = pose_from(Mat3d::Identity(), {dist, 0, 0}); break;
        case MoveKind::PedestalUp: frame.pose = pose_from(Mat3d::Identity(), {0, -dist, 0}); break;
        case MoveKind::PedestalDown: frame.pose = pose_from(Mat3d::Identity(), {0, dist, 0}); break;
        case MoveKind::OrbitLeft:
        case MoveKind::OrbitRight: {
            const double a = spec.kind == MoveKind::OrbitLeft ? angle : -angle;
            const Vec3d pivot(0, 0, spec.pivot_distance);
            const Mat3d rot = rotation_y(a);
            // Orbit left moves the center toward -x while facing the pivot;
            // camera stays pivot_distance behind the pivot along its own forward axis.
            frame.pose = pose_from(rot, pivot - rot * Vec3d(0, 0, spec.pivot_distance));
            break;
        }
        case MoveKind::ZoomIn:
        case MoveKind::ZoomOut: {
            const double exponent = spec.kind == MoveKind::ZoomIn ? s : -s;
            const double scale = std::exp(std::log(m) * exponent);
            frame.intrinsics.fx = base.fx * scale;
            frame.intrinsics.fy = base.fy * scale;
            break;
        }
        }
        if (l == 0) {
            frame = CameraFrame{base, CameraPose::identity()};
        }
        out.frames.push_back(frame);
    }
    return out;
}

CameraTrajectory compose(const CameraTrajectory &a, const CameraTrajectory &b) {
    require_same_length(a, b, "compose");
    if (a.length() == 0) {
        return a;
    }
    const auto &base_b = b.frames.front().intrinsics;
    CameraTrajectory out;
    out.frames.reserve(a.length());
    for (std::size_t l = 0; l < a.length(); ++l) {
        const auto &fa = a.frames[l];
        const auto &fb = b.frames[l];
        CameraFrame frame;
        frame.pose = fb.pose * fa.pose;
        frame.intrinsics = fa.intrinsics;
        frame.intrinsics.fx = fa.intrinsics.fx * (fb.intrinsics.fx / base_b.fx);
        frame.intrinsics.fy = fa.intrinsics.fy * (fb.intrinsics.fy / base_b.fy);
        out.frames.push_back(frame);
    }
    return out;
}

double rot_err(const CameraTrajectory &gt, const CameraTrajectory &pred) {
    require_same_length(gt, pred, "rot_err");
    if (gt.length() == 0) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t l = 0; l < gt.length(); ++l) {
        const auto &ra = gt.frames[l].pose.rotation;
        const auto &rb = pred.frames[l].pose.rotation;
        if (ra == rb) {
            // The trace formula loses ~1e-6 degrees to rounding near zero.
            continue;
        }
        const Mat3d rel = ra.transpose() * rb;
        const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
        total += std::acos(c) * 180.0 / std::numbers::pi;
    }
    return total / static_cast<double>(gt.length());
}

namespace {

std::vector<Vec3d> normalized_centers(const CameraTrajectory &t) {
    std::vector<Vec3d> centers;
    centers.reserve(t.length());
    double max_norm = 0.0;
    for (const auto &f : t.frames) {
        centers.push_back(f.pose.center());
        max_norm = std::max(max_norm, centers.back().norm());
    }
    if (max_norm >= 1e-9) {
        for (auto &c : centers) {
            c /= max_norm;
        }
    }
    return centers;
}

} // namespace

double trans_err(const CameraTrajectory &gt, const CameraTrajectory &pred) {
    require_same_length(gt, pred, "trans_err");
    if (gt.length() == 0) {
        return 0.0;
    }
    const auto a = normalized_centers(gt);
    const auto b = normalized_centers(pred);
    double total = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        total += (a[l] - b[l]).norm();
    }
    return total / static_cast<double>(a.size());
}

} // namespace motionrep
