// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Expected values are written out by hand here rather than taken from the
// library.

#include "motionrep/camera_paths.hpp"
#include "motionrep/curation.hpp"
#include "motionrep/io.hpp"
#include "motionrep/manipulation.hpp"
#include "motionrep/render.hpp"

#include "support.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <set>
#include <thread>

using namespace motionrep;
using motionrep::testing::Rng;

namespace {

int failures = 0;

void report(bool ok, const std::string &name, const std::string &detail) {
    fmt::print("{} {}: {}\n", ok ? "PASS" : "FAIL", name, detail);
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
bool throws_code(F &&f, ErrorCode code) {
    try {
        f();
    } catch (const Error &e) {
        return e.code() == code;
    }
    return false;
}

void oracle_equivalence() {
    Rng rng(1001);
    int mismatches = 0;
    const auto start = Clock::now();
    for (int i = 0; i < 200; ++i) {
        const auto scene = motionrep::testing::random_scene(rng, {64, 10, 8});
        for (int f = 1; f <= static_cast<int>(scene.length()); ++f) {
            if (render_sphere_layer(scene, f) != oracle_render(scene, f, Layer::Spheres) ||
                render_envelope_layer(scene, f) != oracle_render(scene, f, Layer::Envelope)) {
                ++mismatches;
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(mismatches == 0 && elapsed < 60.0, "oracle_equivalence",
           fmt::format("200 scenes, {} mismatched frames, {:.2f} s (limit 60 s)", mismatches, elapsed));
}

void projection_suite() {
    constexpr double tol = 1e-9;
    bool ok = true;
    const auto k22 = default_intrinsics(2, 2);
    ok &= k22.fx == 2 && k22.fy == 2 && k22.cx == 1 && k22.cy == 1;
    ok &= throws_code([] { default_intrinsics(0, 512); }, ErrorCode::InvalidArgument);

    const auto k = default_intrinsics(768, 512);
    const auto id = CameraPose::identity();
    const auto a = project_point(k, id, Vec3d(0, 0, 5));
    ok &= a && std::abs(a->u - 384) < tol && std::abs(a->v - 256) < tol && std::abs(a->z - 5) < tol;
    const auto b = project_point(k, id, Vec3d(1, 0, 768));
    ok &= b && std::abs(b->u - 385) < tol && std::abs(b->v - 256) < tol && std::abs(b->z - 768) < tol;
    ok &= !project_point(k, id, Vec3d(0, 0, -1));
    ok &= (unproject_pixel(k, id, 384.0, 256.0, 4.0) - Vec3d(0, 0, 4)).norm() < tol;
    ok &= throws_code([&] { unproject_pixel(k, id, 10.0, 10.0, 0.0); }, ErrorCode::InvalidArgument);

    Rng rng(1002);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        CameraPose pose;
        pose.rotation = rng.rotation(M_PI);
        pose.translation = Vec3d(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20));
        const double u = rng.uniform(0, 768);
        const double v = rng.uniform(0, 512);
        const double d = rng.uniform(0.01, 100);
        const auto p = project_point(k, pose, unproject_pixel(k, pose, u, v, d));
        if (!p) {
            worst = INFINITY;
            continue;
        }
        worst = std::max({worst, std::abs(p->u - u), std::abs(p->v - v), std::abs(p->z - d)});
    }
    ok &= worst <= 1e-6;
    report(ok, "projection_suite",
           fmt::format("analytic examples at 1e-9, 10000 round trips max error {:.3g} (limit 1e-6)", worst));
}

void radius_rule() {
    const auto params = RenderParams::defaults_for(768, 512);
    const double d[] = {0, 0.25, 0.5, 0.75, 1};
    const double expected[] = {14, 11, 8, 5, 2};
    bool ok = true;
    std::string got;
    for (int i = 0; i < 5; ++i) {
        const double r = circle_radius(params, d[i]);
        ok &= r == expected[i];
        got += fmt::format("{}{}", i ? "," : "", r);
    }
    report(ok, "radius_rule", "radii {" + got + "} expected {14,11,8,5,2}, exact");
}

void static_envelope() {
    const auto scene = build_scene(768, 512, static_trajectory(default_intrinsics(768, 512), 16),
                                   std::vector<SphereTrack>{}, WorldEnvelope::defaults(),
                                   RenderParams::defaults_for(768, 512));
    const auto first = render_envelope_layer(scene, 1);
    int equal = 0;
    for (int f = 1; f <= 16; ++f) {
        equal += render_envelope_layer(scene, f) == first;
    }
    report(equal == 16, "static_envelope_constancy", fmt::format("{}/16 frames byte-equal to frame 1", equal));
}

void curation_counts() {
    // Filter: 100 distinct scores, p = 30. The threshold is the 30th smallest
    // value; the 29 scores strictly below it go.
    Rng rng(1003);
    std::vector<ClipRecord> clips;
    std::set<double> used;
    while (clips.size() < 100) {
        const double s = rng.uniform(0, 50);
        if (used.insert(s).second) {
            clips.push_back({"clip" + std::to_string(clips.size()), s, 16});
        }
    }
    const auto kept = filter_corpus(clips, 30.0);

    // Set2: 100 spheres with lengths 1..100 in shuffled order.
    std::vector<int> order(100);
    for (int i = 0; i < 100; ++i) {
        order[static_cast<std::size_t>(i)] = i + 1;
    }
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<SphereTrack> tracks;
    for (int n = 0; n < 100; ++n) {
        const Vec3d start(0.01 * n, 0.0, 5.0);
        tracks.push_back({n, {start, start + Vec3d(order[static_cast<std::size_t>(n)], 0, 0)}});
    }
    const auto scene = build_scene(64, 64, static_trajectory(default_intrinsics(64, 64), 2), tracks,
                                   WorldEnvelope::defaults(), RenderParams::defaults_for(64, 64));
    const auto set2 = sparsify(scene, Mask(64, 64), 0).set2_ids;
    bool set2_ok = set2.size() == 20;
    for (int id : set2) {
        set2_ok &= order[static_cast<std::size_t>(id)] > 80;
    }

    // Sparsify over 1000 seeds with a mask covering part of the image.
    Mask mask(64, 64);
    for (int y = 16; y < 48; ++y) {
        for (int x = 16; x < 48; ++x) {
            mask(x, y) = 1;
        }
    }
    bool sparse_ok = true;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto a = sparsify(scene, mask, seed);
        const auto b = sparsify(scene, mask, seed);
        std::set<int> pool(a.set1_ids.begin(), a.set1_ids.end());
        pool.insert(a.set2_ids.begin(), a.set2_ids.end());
        sparse_ok &= a.sampled_ids == b.sampled_ids;
        sparse_ok &= a.sampled_ids.size() >= 1 && a.sampled_ids.size() <= 16;
        for (int id : a.sampled_ids) {
            sparse_ok &= pool.count(id) == 1;
        }
    }
    report(kept.size() == 71 && set2_ok && sparse_ok, "curation_counts",
           fmt::format("filter kept {} (expected 71), Set2 size {} (expected 20), sparsify 1000 seeds {}",
                       kept.size(), set2.size(), sparse_ok ? "ok" : "violated"));
}

void metrics() {
    const auto k = default_intrinsics(512, 512);
    const auto pan = generate({MoveKind::PanLeft, 30, 16}, k);
    const double rot_same = rot_err(pan, pan);
    const double trans_same = trans_err(pan, pan);
    CameraTrajectory yaw = static_trajectory(k, 4);
    for (auto &f : yaw.frames) {
        f.pose.rotation = Eigen::AngleAxisd(M_PI / 2, Vec3d::UnitY()).toRotationMatrix();
    }
    const double ninety = rot_err(static_trajectory(k, 4), yaw);
    report(rot_same == 0.0 && trans_same == 0.0 && std::abs(ninety - 90.0) <= 1e-6, "metrics",
           fmt::format("identical: RotErr {} TransErr {}; 90 deg yaw: RotErr {:.9f} (tol 1e-6)", rot_same,
                       trans_same, ninety));
}

void round_trip() {
    Rng rng(1004);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        const auto scene = motionrep::testing::random_scene(rng);
        const auto parsed = parse_scene(serialize_scene(scene));
        bad += render_scene(parsed, 1) != render_scene(scene, 1);
    }
    report(bad == 0, "round_trip", fmt::format("100 scenes, {} with differing frames", bad));
}

void transfer_and_lift() {
    Rng rng(1005);
    double transfer_worst = 0.0;
    double lift_worst = 0.0;
    const int w = 256;
    const int h = 192;
    const auto k = default_intrinsics(w, h);
    for (int trial = 0; trial < 50; ++trial) {
        const int frames = rng.integer(1, 16);
        const auto traj = generate({MoveKind::OrbitLeft, rng.uniform(0, 20), frames, 10.0}, k);
        std::vector<SphereTrack> tracks;
        for (int n = 0; n < 3; ++n) {
            Track t;
            Vec3d p(-0.6 + 0.6 * n, rng.uniform(-0.3, 0.3), rng.uniform(3, 6));
            for (int l = 0; l < frames; ++l) {
                t.push_back(p);
                p += Vec3d(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.1, 0.1));
            }
            tracks.push_back({n, t});
        }
        const auto source = build_scene(w, h, traj, tracks, WorldEnvelope::defaults(), RenderParams::defaults_for(w, h));
        DepthMap depth(w, h, 1.0);
        std::vector<CorrespondencePair> pairs;
        for (const auto &s : source.spheres.spheres) {
            const auto p = project_point(k, traj.frames[0].pose, s.track[0]);
            depth(static_cast<int>(std::floor(p->u)), static_cast<int>(std::floor(p->v))) = p->z;
            pairs.push_back({Vec2d(p->u, p->v), Vec2d(p->u, p->v)});
        }
        const auto out = transfer_motion(source, pairs, depth, w, h);
        if (out.spheres.size() != source.spheres.size()) {
            transfer_worst = INFINITY;
            continue;
        }
        for (std::size_t n = 0; n < out.spheres.size(); ++n) {
            for (int l = 0; l < frames; ++l) {
                const auto &fs = source.trajectory.frames[static_cast<std::size_t>(l)];
                const auto &ft = out.trajectory.frames[static_cast<std::size_t>(l)];
                const auto a = project_point(fs.intrinsics, fs.pose, source.spheres.spheres[n].track[static_cast<std::size_t>(l)]);
                const auto b = project_point(ft.intrinsics, ft.pose, out.spheres.spheres[n].track[static_cast<std::size_t>(l)]);
                transfer_worst = std::max({transfer_worst, std::abs(a->u - b->u), std::abs(a->v - b->v)});
            }
        }

        std::vector<Vec2d> drawn;
        for (int l = 0; l < frames; ++l) {
            drawn.emplace_back(rng.uniform(0, w - 0.01), rng.uniform(0, h - 0.01));
        }
        const auto lifted = lift_trajectory({drawn, rng.uniform(0.5, 40)}, nullptr, source);
        for (int l = 0; l < frames; ++l) {
            const auto p = project_point(traj.frames[0].intrinsics, traj.frames[0].pose, lifted[static_cast<std::size_t>(l)]);
            lift_worst = std::max({lift_worst, std::abs(p->u - drawn[static_cast<std::size_t>(l)].x()),
                                   std::abs(p->v - drawn[static_cast<std::size_t>(l)].y())});
        }
    }
    report(transfer_worst <= 1e-6 && lift_worst <= 1e-6, "transfer_lift_exactness",
           fmt::format("identity transfer max {:.3g} px, lift-then-project max {:.3g} px (limit 1e-6)",
                       transfer_worst, lift_worst));
}

void performance() {
    const int w = 768;
    const int h = 512;
    const auto k = default_intrinsics(w, h);
    const auto traj = generate({MoveKind::PanLeft, 20, 16}, k);
    Rng rng(1006);
    std::vector<SphereTrack> tracks;
    int n = 0;
    for (const auto &seed : seed_grid(w, h)) {
        const double z = rng.uniform(2, 30);
        Vec3d p = unproject_pixel(k, CameraPose::identity(), seed.x(), seed.y(), z);
        Track t;
        for (int l = 0; l < 16; ++l) {
            t.push_back(p);
            p += Vec3d(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.2, 0.2));
        }
        tracks.push_back({n++, t});
    }
    const auto scene = build_scene(w, h, traj, tracks, WorldEnvelope::defaults(), RenderParams::defaults_for(w, h));
    render_scene(scene); // warm-up
    const auto start = Clock::now();
    const auto frames = render_scene(scene);
    const double elapsed = seconds_since(start);
    report(frames.size() == 16 && scene.spheres.size() == 625 && elapsed < 2.0, "performance_budget",
           fmt::format("16 frames {}x{}, 625 spheres, both layers: {:.3f} s (limit 2 s) on {} hardware thread(s)",
                       w, h, elapsed, std::thread::hardware_concurrency()));
}

} // namespace

int main() {
    oracle_equivalence();
    projection_suite();
    radius_rule();
    static_envelope();
    curation_counts();
    metrics();
    round_trip();
    transfer_and_lift();
    performance();
    fmt::print("{} failed\n", failures);
    return failures == 0 ? 0 : 1;
}
