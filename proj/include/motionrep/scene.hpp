// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "motionrep/camera.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace motionrep {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb &) const = default;
};

struct CameraFrame {
    CameraIntrinsics intrinsics;
    CameraPose pose;

    bool operator==(const CameraFrame &) const = default;
};

struct CameraTrajectory {
    std::vector<CameraFrame> frames;

    std::size_t length() const { return frames.size(); }
    bool operator==(const CameraTrajectory &) const = default;
};

/// `length` frames sharing `intrinsics`, every pose identity.
CameraTrajectory static_trajectory(const CameraIntrinsics &intrinsics, std::size_t length);

/// One world-space track position per frame.
using Track = std::vector<Vec3d>;

struct Sphere {
    int id = 0;
    Track track;
    std::vector<double> normalized_depths;
    Rgb color;

    bool operator==(const Sphere &) const = default;
};

struct SphereSet {
    std::vector<Sphere> spheres;

    std::size_t size() const { return spheres.size(); }
    bool operator==(const SphereSet &) const = default;
};

enum class CubeFace { PosX = 0, NegX, PosY, NegY, PosZ, NegZ };

struct FaceTint {
    double r = 1.0;
    double g = 1.0;
    double b = 1.0;

    bool operator==(const FaceTint &) const = default;
};

struct WorldEnvelope {
    double side_length = 100.0;
    double checker_cell = 100.0 / 16.0;
    Rgb color_a{255, 255, 255};
    Rgb color_b{40, 40, 40};
    /// Indexed by CubeFace.
    std::array<FaceTint, 6> face_tints{};

    /// z_far = 100, cell = z_far / 16, pastel tint per axis pair.
    static WorldEnvelope defaults();
    static WorldEnvelope with_side(double side_length);

    bool operator==(const WorldEnvelope &) const = default;
};

struct RenderParams {
    double r_min = 2.0;
    double r_max = 14.0;

    /// 2 px / 14 px at a 512 px short side, scaled linearly with min(W, H).
    static RenderParams defaults_for(int width, int height);

    bool operator==(const RenderParams &) const = default;
};

struct MotionScene {
    int width = 0;
    int height = 0;
    CameraTrajectory trajectory;
    SphereSet spheres;
    WorldEnvelope envelope;
    RenderParams render_params;

    std::size_t length() const { return trajectory.length(); }
    bool operator==(const MotionScene &) const = default;
};

/// A sphere's identity and raw track before depths and colors are derived.
struct SphereTrack {
    int id = 0;
    Track track;
};

/// Re-expresses raw poses relative to the first one: out_l = raw_l ∘ raw_1⁻¹.
std::vector<CameraPose> align_to_first_frame(std::span<const CameraPose> raw_poses);

/// Joint min-max normalization over every value; a constant input maps to 0.5.
std::vector<double> normalize_depths(std::span<const double> depths);

/// Smooth two-axis ramp: (round(255 u/(W-1)), round(255 v/(H-1)), 128).
Rgb color_at(double u, double v, int width, int height);
std::vector<Rgb> assign_colors(std::span<const Vec2d> first_frame_centers, int width, int height);

/// Derives normalized depths (from track z, jointly over the clip) and
/// frame-1 colors, then validates the assembled scene.
MotionScene build_scene(int width, int height, CameraTrajectory trajectory,
                        std::vector<SphereTrack> tracks, WorldEnvelope envelope,
                        RenderParams render_params);

/// Convenience overload: `tracks[l][n]` frame-major, ids assigned 0..N-1.
MotionScene build_scene(int width, int height, CameraTrajectory trajectory,
                        const std::vector<std::vector<Vec3d>> &frame_major_tracks,
                        WorldEnvelope envelope, RenderParams render_params);

/// Strips derived data back to raw tracks.
std::vector<SphereTrack> sphere_tracks(const SphereSet &spheres);

/// Throws InvalidArgument / InvalidPose naming the offending field.
void validate_scene(const MotionScene &scene);

} // namespace motionrep
