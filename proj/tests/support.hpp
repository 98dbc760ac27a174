// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit and acceptance tests: seeded scene generators
// and scratch directories.

#pragma once

#include "motionrep/render.hpp"
#include "motionrep/scene.hpp"

#include <Eigen/Geometry>

#include <filesystem>
#include <random>
#include <string>

namespace motionrep::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }

    Vec3d unit_vector() {
        Vec3d v;
        do {
            v = Vec3d(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
        } while (v.norm() < 1e-3 || v.norm() > 1.0);
        return v.normalized();
    }

    Mat3d rotation(double max_angle) {
        return Eigen::AngleAxisd(uniform(-max_angle, max_angle), unit_vector()).toRotationMatrix();
    }

    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Pose whose camera center is `center` and whose camera->world rotation is
/// `cam_to_world`.
inline CameraPose pose_from_center(const Mat3d &cam_to_world, const Vec3d &center) {
    CameraPose p;
    p.rotation = cam_to_world.transpose();
    p.translation = -(p.rotation * center);
    return p;
}

struct RandomSceneLimits {
    int max_size = 64;
    int max_spheres = 10;
    int max_frames = 8;
};

/// Random valid scene: frame 1 is the identity, later cameras sit strictly
/// inside the envelope with arbitrary orientation, some spheres may fall
/// behind the camera or outside the image.
inline MotionScene random_scene(Rng &rng, const RandomSceneLimits &limits = {}) {
    const int width = rng.integer(2, limits.max_size);
    const int height = rng.integer(2, limits.max_size);
    const int frames = rng.integer(1, limits.max_frames);
    const int spheres = rng.integer(0, limits.max_spheres);

    const auto k = default_intrinsics(width, height);
    CameraTrajectory traj = static_trajectory(k, static_cast<std::size_t>(frames));
    const double half = 50.0;
    for (int l = 1; l < frames; ++l) {
        const Vec3d c(rng.uniform(-0.9, 0.9) * half, rng.uniform(-0.9, 0.9) * half,
                      rng.uniform(-0.9, 0.9) * half);
        traj.frames[static_cast<std::size_t>(l)].pose = pose_from_center(rng.rotation(M_PI), c);
    }

    std::vector<SphereTrack> tracks;
    for (int n = 0; n < spheres; ++n) {
        SphereTrack t;
        t.id = n * 3 + rng.integer(0, 2);
        Vec3d p(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 8));
        for (int l = 0; l < frames; ++l) {
            t.track.push_back(p);
            p += Vec3d(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
        }
        tracks.push_back(std::move(t));
    }
    return build_scene(width, height, std::move(traj), std::move(tracks), WorldEnvelope::defaults(),
                       RenderParams::defaults_for(width, height));
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string &tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("motionrep-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace motionrep::testing
