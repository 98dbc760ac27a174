// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

namespace motionrep {

namespace {

const CameraFrame &frame_at(const MotionScene &scene, int frame_index, const char *op) {
    if (frame_index < 1 || static_cast<std::size_t>(frame_index) > scene.length()) {
        fail(ErrorCode::InvalidArgument, std::string(op) + ": frame " +
                                             std::to_string(frame_index) + " outside [1, " +
                                             std::to_string(scene.length()) + "]");
    }
    return scene.trajectory.frames[static_cast<std::size_t>(frame_index - 1)];
}

std::uint8_t tint_channel(std::uint8_t c, double tint) {
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround(c * tint), 0, 255));
}

Rgb tinted(Rgb c, const FaceTint &t) {
    return {tint_channel(c.r, t.r), tint_channel(c.g, t.g), tint_channel(c.b, t.b)};
}

long long floor_cell(double coordinate, double cell) {
    return static_cast<long long>(std::floor(coordinate / cell));
}

} // namespace

double circle_radius(const RenderParams &params, double normalized_depth) {
    return params.r_min + (params.r_max - params.r_min) * (1.0 - normalized_depth);
}

std::vector<ProjectedCircle> project_sphere_set(const MotionScene &scene, int frame_index) {
    const auto &frame = frame_at(scene, frame_index, "project_sphere_set");
    const auto l = static_cast<std::size_t>(frame_index - 1);
    std::vector<ProjectedCircle> out;
    out.reserve(scene.spheres.size());
    for (const auto &sphere : scene.spheres.spheres) {
        ProjectedCircle circle;
        circle.sphere_id = sphere.id;
        circle.depth = sphere.normalized_depths[l];
        circle.color = sphere.color;
        circle.radius = circle_radius(scene.render_params, circle.depth);
        if (const auto p = project_point(frame.intrinsics, frame.pose, sphere.track[l])) {
            circle.center = Vec2d(p->u, p->v);
            circle.visible = true;
        }
        out.push_back(circle);
    }
    return out;
}

RgbImage render_sphere_layer(const MotionScene &scene, int frame_index) {
    const auto circles = project_sphere_set(scene, frame_index);
    RgbImage image(scene.width, scene.height);

    std::vector<std::size_t> order;
    order.reserve(circles.size());
    for (std::size_t n = 0; n < circles.size(); ++n) {
        if (circles[n].visible && std::isfinite(circles[n].center.x()) &&
            std::isfinite(circles[n].center.y())) {
            order.push_back(n);
        }
    }
    // Farthest first; equal depths keep set order so later spheres land on top.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return circles[a].depth > circles[b].depth;
    });

    const double max_x = scene.width - 1;
    const double max_y = scene.height - 1;
    for (std::size_t n : order) {
        const auto &c = circles[n];
        const double u = c.center.x();
        const double v = c.center.y();
        const double r = c.radius;
        const double r2 = r * r;
        // Candidate range padded by one pixel; the exact test below decides.
        const double x_lo = std::ceil(u - r - 0.5) - 1.0;
        const double x_hi = std::floor(u + r - 0.5) + 1.0;
        const double y_lo = std::ceil(v - r - 0.5) - 1.0;
        const double y_hi = std::floor(v + r - 0.5) + 1.0;
        if (x_hi < 0.0 || y_hi < 0.0 || x_lo > max_x || y_lo > max_y) {
            continue;
        }
        const int i0 = static_cast<int>(std::max(x_lo, 0.0));
        const int i1 = static_cast<int>(std::min(x_hi, max_x));
        const int j0 = static_cast<int>(std::max(y_lo, 0.0));
        const int j1 = static_cast<int>(std::min(y_hi, max_y));
        for (int j = j0; j <= j1; ++j) {
            const double dy = (j + 0.5) - v;
            const double dy2 = dy * dy;
            for (int i = i0; i <= i1; ++i) {
                const double dx = (i + 0.5) - u;
                if (dx * dx + dy2 <= r2) {
                    image.set(i, j, c.color);
                }
            }
        }
    }
    return image;
}

RgbImage render_envelope_layer(const MotionScene &scene, int frame_index) {
    const auto &frame = frame_at(scene, frame_index, "render_envelope_layer");
    const auto &env = scene.envelope;
    const double half = env.side_length / 2.0;
    const Vec3d center = frame.pose.center();
    if (!(center.cwiseAbs().maxCoeff() < half)) {
        fail(ErrorCode::CameraEscapedEnvelope,
             "frame " + std::to_string(frame_index) +
                 ": camera center is not strictly inside the world envelope");
    }

    std::array<Rgb, 6> even{};
    std::array<Rgb, 6> odd{};
    for (std::size_t f = 0; f < 6; ++f) {
        even[f] = tinted(env.color_a, env.face_tints[f]);
        odd[f] = tinted(env.color_b, env.face_tints[f]);
    }

    const Mat3d to_world = frame.pose.rotation.transpose();
    const auto &k = frame.intrinsics;
    RgbImage image(scene.width, scene.height);
    std::vector<double> ray_x(static_cast<std::size_t>(scene.width));
    for (int i = 0; i < scene.width; ++i) {
        ray_x[static_cast<std::size_t>(i)] = ((i + 0.5) - k.cx) / k.fx;
    }

    for (int j = 0; j < scene.height; ++j) {
        const double ray_y = ((j + 0.5) - k.cy) / k.fy;
        for (int i = 0; i < scene.width; ++i) {
            const Vec3d dir = to_world * Vec3d(ray_x[static_cast<std::size_t>(i)], ray_y, 1.0);
            // Exit through the nearest of the three forward-facing slabs.
            int axis = -1;
            double t_exit = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 3; ++a) {
                if (dir[a] == 0.0) {
                    continue;
                }
                const double plane = dir[a] > 0.0 ? half : -half;
                const double t = (plane - center[a]) / dir[a];
                if (t < t_exit) {
                    t_exit = t;
                    axis = a;
                }
            }
            const int p_axis = axis == 0 ? 1 : 0;
            const int q_axis = axis == 2 ? 1 : 2;
            const double p = center[p_axis] + t_exit * dir[p_axis];
            const double q = center[q_axis] + t_exit * dir[q_axis];
            const std::size_t face = static_cast<std::size_t>(2 * axis + (dir[axis] > 0.0 ? 0 : 1));
            const bool is_even =
                ((floor_cell(p, env.checker_cell) + floor_cell(q, env.checker_cell)) & 1LL) == 0;
            image.set(i, j, is_even ? even[face] : odd[face]);
        }
    }
    return image;
}

std::vector<ControlSignalFrame> render_scene(const MotionScene &scene, unsigned threads) {
    const std::size_t length = scene.length();
    std::vector<ControlSignalFrame> frames(length);
    std::vector<std::exception_ptr> errors(length);

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, length));

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t l = next++; l < length; l = next++) {
            const int index = static_cast<int>(l + 1);
            try {
                frames[l].frame_index = index;
                frames[l].sphere_layer = render_sphere_layer(scene, index);
                frames[l].envelope_layer = render_envelope_layer(scene, index);
            } catch (...) {
                errors[l] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return frames;
}

RgbImage composite(const RgbImage &reference, const ControlSignalFrame &frame, double opacity) {
    const auto &spheres = frame.sphere_layer;
    const auto &envelope = frame.envelope_layer;
    if (reference.width != spheres.width || reference.height != spheres.height) {
        fail(ErrorCode::InvalidArgument, "composite: reference image is " +
                                             std::to_string(reference.width) + "x" +
                                             std::to_string(reference.height) + ", layers are " +
                                             std::to_string(spheres.width) + "x" +
                                             std::to_string(spheres.height));
    }
    const double a = std::clamp(opacity, 0.0, 1.0);
    const auto blend = [a](std::uint8_t under, std::uint8_t over) {
        return static_cast<std::uint8_t>(std::lround((1.0 - a) * under + a * over));
    };
    RgbImage out = reference;
    for (std::size_t o = 0; o < out.data.size(); o += 3) {
        for (std::size_t c = 0; c < 3; ++c) {
            out.data[o + c] = blend(out.data[o + c], envelope.data[o + c]);
        }
        // Sphere colors always carry blue = 128, so black means uncovered.
        const bool covered = spheres.data[o] | spheres.data[o + 1] | spheres.data[o + 2];
        if (covered) {
            for (std::size_t c = 0; c < 3; ++c) {
                out.data[o + c] = blend(out.data[o + c], spheres.data[o + c]);
            }
        }
    }
    return out;
}

} // namespace motionrep
