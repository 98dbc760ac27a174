// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Deliberately naive renderers. They share only the camera model with the
// fast paths in render.cpp; compositing and envelope intersection are
// re-derived per pixel.

#include "motionrep/render.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace motionrep {

namespace {

struct OracleDisk {
    double u;
    double v;
    double radius;
    double depth;
    Rgb color;
};

RgbImage oracle_spheres(const MotionScene &scene, const CameraFrame &frame, std::size_t l) {
    std::vector<OracleDisk> disks;
    for (const auto &s : scene.spheres.spheres) {
        const auto p = project_point(frame.intrinsics, frame.pose, s.track[l]);
        if (!p) {
            continue;
        }
        const double d = s.normalized_depths[l];
        const double r =
            scene.render_params.r_min + (scene.render_params.r_max - scene.render_params.r_min) * (1.0 - d);
        disks.push_back({p->u, p->v, r, d, s.color});
    }

    RgbImage image(scene.width, scene.height);
    for (int j = 0; j < scene.height; ++j) {
        for (int i = 0; i < scene.width; ++i) {
            std::optional<std::size_t> best;
            for (std::size_t n = 0; n < disks.size(); ++n) {
                const auto &d = disks[n];
                const double dx = (i + 0.5) - d.u;
                const double dy = (j + 0.5) - d.v;
                if (!(dx * dx + dy * dy <= d.radius * d.radius)) {
                    continue;
                }
                // Nearest wins; among equal depths the later sphere wins.
                if (!best || d.depth <= disks[*best].depth) {
                    best = n;
                }
            }
            if (best) {
                image.set(i, j, disks[*best].color);
            }
        }
    }
    return image;
}

RgbImage oracle_envelope(const MotionScene &scene, const CameraFrame &frame, int frame_index) {
    const auto &env = scene.envelope;
    const double half = env.side_length / 2.0;
    const Vec3d c = -(frame.pose.rotation.transpose() * frame.pose.translation);
    for (int a = 0; a < 3; ++a) {
        if (!(std::abs(c[a]) < half)) {
            fail(ErrorCode::CameraEscapedEnvelope,
                 "frame " + std::to_string(frame_index) + ": camera outside the world envelope");
        }
    }

    struct Face {
        int axis;
        double plane;
    };
    const Face faces[6] = {{0, half}, {0, -half}, {1, half}, {1, -half}, {2, half}, {2, -half}};
    const double slack = 1e-9 * half;

    const Mat3d to_world = frame.pose.rotation.transpose();
    RgbImage image(scene.width, scene.height);
    const auto &k = frame.intrinsics;
    for (int j = 0; j < scene.height; ++j) {
        for (int i = 0; i < scene.width; ++i) {
            const double x = ((i + 0.5) - k.cx) / k.fx;
            const double y = ((j + 0.5) - k.cy) / k.fy;
            const Vec3d dir = to_world * Vec3d(x, y, 1.0);

            int hit_face = -1;
            double hit_t = std::numeric_limits<double>::infinity();
            double hit_p = 0.0;
            double hit_q = 0.0;
            for (int f = 0; f < 6; ++f) {
                const int a = faces[f].axis;
                if (dir[a] == 0.0) {
                    continue;
                }
                const double t = (faces[f].plane - c[a]) / dir[a];
                if (!(t > 0.0)) {
                    continue;
                }
                // In-plane axes in ascending order.
                const int pa = (a + 1) % 3 < (a + 2) % 3 ? (a + 1) % 3 : (a + 2) % 3;
                const int qa = 3 - a - pa;
                const double p = c[pa] + t * dir[pa];
                const double q = c[qa] + t * dir[qa];
                if (std::abs(p) > half + slack || std::abs(q) > half + slack) {
                    continue;
                }
                if (t < hit_t) {
                    hit_t = t;
                    hit_face = f;
                    hit_p = p;
                    hit_q = q;
                }
            }
            if (hit_face < 0) {
                fail(ErrorCode::CameraEscapedEnvelope, "oracle: ray escaped the envelope");
            }
            const long long cells = static_cast<long long>(std::floor(hit_p / env.checker_cell)) +
                                    static_cast<long long>(std::floor(hit_q / env.checker_cell));
            const Rgb base = (cells % 2 == 0) ? env.color_a : env.color_b;
            const FaceTint &tint = env.face_tints[static_cast<std::size_t>(hit_face)];
            const auto ch = [](std::uint8_t v, double m) {
                const long s = std::lround(v * m);
                return static_cast<std::uint8_t>(s < 0 ? 0 : (s > 255 ? 255 : s));
            };
            image.set(i, j, {ch(base.r, tint.r), ch(base.g, tint.g), ch(base.b, tint.b)});
        }
    }
    return image;
}

} // namespace

RgbImage oracle_render(const MotionScene &scene, int frame_index, Layer layer) {
    if (frame_index < 1 || static_cast<std::size_t>(frame_index) > scene.length()) {
        fail(ErrorCode::InvalidArgument,
             "oracle_render: frame " + std::to_string(frame_index) + " out of range");
    }
    const auto l = static_cast<std::size_t>(frame_index - 1);
    const auto &frame = scene.trajectory.frames[l];
    return layer == Layer::Spheres ? oracle_spheres(scene, frame, l)
                                   : oracle_envelope(scene, frame, frame_index);
}

} // namespace motionrep
