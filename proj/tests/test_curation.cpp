// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/curation.hpp"
#include "motionrep/io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace motionrep;
using motionrep::testing::Rng;
using motionrep::testing::TempDir;

namespace {

FlowField uniform_flow(int w, int h, float u, float v) {
    return {w, h, std::vector<Vec2<float>>(static_cast<std::size_t>(w * h), Vec2<float>(u, v))};
}

/// Two-frame scene whose sphere n moves `lengths[n]` units along x at depth 5.
MotionScene moving_spheres(const std::vector<double> &lengths, int w = 64, int h = 64) {
    std::vector<SphereTrack> tracks;
    for (std::size_t n = 0; n < lengths.size(); ++n) {
        const Vec3d start(0.01 * static_cast<double>(n), 0.0, 5.0);
        tracks.push_back({static_cast<int>(n), {start, start + Vec3d(lengths[n], 0, 0)}});
    }
    return build_scene(w, h, static_trajectory(default_intrinsics(w, h), 2), tracks,
                       WorldEnvelope::defaults(), RenderParams::defaults_for(w, h));
}

std::vector<ClipRecord> corpus(const std::vector<double> &scores) {
    std::vector<ClipRecord> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.push_back({"clip" + std::to_string(i), scores[i], 16});
    }
    return out;
}

} // namespace

TEST(MotionScore, Examples) {
    const std::vector<FlowField> one{uniform_flow(7, 5, 3, 4)};
    EXPECT_EQ(motion_score(one), 5.0);
    const std::vector<FlowField> zero{uniform_flow(7, 5, 0, 0)};
    EXPECT_EQ(motion_score(zero), 0.0);
    const std::vector<FlowField> both{uniform_flow(7, 5, 3, 4), uniform_flow(7, 5, 0, 0)};
    EXPECT_EQ(motion_score(both), 2.5);
}

TEST(MotionScore, ResolutionInvariantForUniformFlow) {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const float u = static_cast<float>(rng.uniform(-5, 5));
        const float v = static_cast<float>(rng.uniform(-5, 5));
        const std::vector<FlowField> a{uniform_flow(rng.integer(1, 50), rng.integer(1, 50), u, v)};
        const std::vector<FlowField> b{uniform_flow(rng.integer(1, 50), rng.integer(1, 50), u, v)};
        EXPECT_NEAR(motion_score(a), motion_score(b), 1e-9);
    }
}

TEST(MotionScore, Errors) {
    EXPECT_THROW(motion_score({}), Error);
    const std::vector<FlowField> mixed{uniform_flow(4, 4, 1, 1), uniform_flow(4, 5, 1, 1)};
    EXPECT_THROW(motion_score(mixed), Error);
}

TEST(NearestRank, Definition) {
    std::vector<double> v{5, 1, 4, 2, 3, 10, 9, 8, 7, 6};
    EXPECT_EQ(nearest_rank_percentile(v, 30), 3.0);
    EXPECT_EQ(nearest_rank_percentile(v, 0), 1.0);
    EXPECT_EQ(nearest_rank_percentile(v, 100), 10.0);
    EXPECT_EQ(nearest_rank_percentile(v, 31), 4.0);
    EXPECT_THROW(nearest_rank_percentile(v, 101), Error);
}

TEST(FilterCorpus, Examples) {
    const auto kept = filter_corpus(corpus({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 30);
    ASSERT_EQ(kept.size(), 8u);
    EXPECT_EQ(kept.front().motion_score, 3.0);
    EXPECT_EQ(filter_corpus(corpus({2, 2, 2, 2}), 30).size(), 4u);
    EXPECT_EQ(filter_corpus(corpus({0.1}), 30).size(), 1u);
    EXPECT_THROW(filter_corpus({}, 30), Error);
}

TEST(FilterCorpus, PreservesOrderAndRemovalBound) {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = rng.integer(1, 200);
        std::vector<double> scores;
        for (int i = 0; i < m; ++i) {
            scores.push_back(rng.integer(0, 3) == 0 ? 1.0 : rng.uniform(0, 10));
        }
        const auto records = corpus(scores);
        const auto kept = filter_corpus(records, 30);
        const auto removed = records.size() - kept.size();
        EXPECT_LE(removed, static_cast<std::size_t>(std::ceil(0.3 * m)));
        std::size_t j = 0;
        for (const auto &r : records) {
            if (j < kept.size() && kept[j].clip_id == r.clip_id) {
                ++j;
            }
        }
        EXPECT_EQ(j, kept.size());
    }
}

TEST(FilterCorpus, DistinctScoresRemoveCeilMinusOne) {
    Rng rng(33);
    for (int m = 1; m <= 300; ++m) {
        std::vector<double> scores;
        for (int i = 0; i < m; ++i) {
            scores.push_back(i * 1.5 + rng.uniform(0, 1));
        }
        std::shuffle(scores.begin(), scores.end(), rng.engine());
        const auto kept = filter_corpus(corpus(scores), 30);
        const int ceil_rank = (30 * m + 99) / 100;
        EXPECT_EQ(static_cast<int>(kept.size()), m - std::max(ceil_rank, 1) + 1) << m;
    }
}

TEST(SeedGrid, Examples) {
    const auto g = seed_grid(768, 512);
    ASSERT_EQ(g.size(), 625u);
    EXPECT_NEAR(g[0].x(), 15.36, 1e-12);
    EXPECT_NEAR(g[0].y(), 10.24, 1e-12);
    EXPECT_EQ(seed_grid(100, 100, 1, 1), (std::vector<Vec2d>{{50, 50}}));
    EXPECT_EQ(seed_grid(100, 100, 2, 2),
              (std::vector<Vec2d>{{25, 25}, {75, 25}, {25, 75}, {75, 75}}));
    EXPECT_THROW(seed_grid(10, 10, 0, 3), Error);
}

TEST(SeedGrid, StrictlyInside) {
    Rng rng(34);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = rng.integer(1, 1000);
        const int h = rng.integer(1, 1000);
        for (const auto &p : seed_grid(w, h, rng.integer(1, 40), rng.integer(1, 40))) {
            EXPECT_GT(p.x(), 0.0);
            EXPECT_GT(p.y(), 0.0);
            EXPECT_LT(p.x(), w);
            EXPECT_LT(p.y(), h);
        }
    }
}

TEST(TrajectoryLength, Examples) {
    EXPECT_EQ(trajectory_length({Vec3d(1, 2, 3), Vec3d(1, 2, 3), Vec3d(1, 2, 3)}), 0.0);
    EXPECT_EQ(trajectory_length({Vec3d(0, 0, 1), Vec3d(3, 4, 1)}), 5.0);
    EXPECT_EQ(trajectory_length({Vec3d(0, 0, 1)}), 0.0);
}

TEST(TrajectoryLength, TranslationAndScale) {
    Rng rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        Track t;
        for (int l = 0; l < rng.integer(1, 20); ++l) {
            t.emplace_back(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        }
        const Vec3d shift(rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100));
        const double s = rng.uniform(0.1, 10);
        Track moved;
        Track scaled;
        for (const auto &p : t) {
            moved.push_back(p + shift);
            scaled.push_back(s * p);
        }
        EXPECT_NEAR(trajectory_length(moved), trajectory_length(t), 1e-9);
        EXPECT_NEAR(trajectory_length(scaled), s * trajectory_length(t), 1e-9);
    }
}

TEST(Sparsify, Set2TopTwentyPercent) {
    std::vector<double> lengths;
    for (int i = 1; i <= 100; ++i) {
        lengths.push_back(i);
    }
    const auto scene = moving_spheres(lengths);
    const auto sel = sparsify(scene, Mask(64, 64), 1);
    EXPECT_TRUE(sel.set1_ids.empty());
    ASSERT_EQ(sel.set2_ids.size(), 20u);
    for (int id : sel.set2_ids) {
        EXPECT_GE(lengths[static_cast<std::size_t>(id)], 81.0);
    }
}

TEST(Sparsify, SmallUnionCapsN) {
    const auto scene = moving_spheres({0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    Mask mask(64, 64);
    // Spheres 0 and 1 project near the image center.
    mask(32, 32) = 1;
    const auto probe = sparsify(scene, mask, 0);
    ASSERT_FALSE(probe.set1_ids.empty());
    std::set<std::size_t> sizes;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto sel = sparsify(scene, mask, seed);
        sizes.insert(sel.sampled_ids.size());
        for (int id : sel.sampled_ids) {
            EXPECT_TRUE(std::count(sel.set1_ids.begin(), sel.set1_ids.end(), id));
        }
    }
    EXPECT_EQ(*sizes.begin(), 1u);
    EXPECT_EQ(*sizes.rbegin(), probe.set1_ids.size());
}

TEST(Sparsify, EmptySelection) {
    const auto scene = moving_spheres({0, 0, 0});
    const auto sel = sparsify(scene, Mask(64, 64), 5);
    EXPECT_TRUE(sel.empty());
    EXPECT_TRUE(sel.set1_ids.empty());
    EXPECT_TRUE(sel.set2_ids.empty());
    EXPECT_EQ(select_spheres(scene, sel.sampled_ids).spheres.size(), 0u);
}

TEST(Sparsify, MaskSizeMismatch) {
    const auto scene = moving_spheres({1, 2});
    EXPECT_THROW(sparsify(scene, Mask(63, 64), 0), Error);
}

TEST(Sparsify, DeterministicSubsetsWithBoundedSize) {
    std::vector<double> lengths;
    for (int i = 0; i < 300; ++i) {
        lengths.push_back(i * 0.37);
    }
    const auto scene = moving_spheres(lengths);
    Mask mask(64, 64);
    for (int y = 20; y < 44; ++y) {
        for (int x = 20; x < 44; ++x) {
            mask(x, y) = 1;
        }
    }
    std::map<std::size_t, int> histogram;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        const auto a = sparsify(scene, mask, seed);
        const auto b = sparsify(scene, mask, seed);
        ASSERT_EQ(a.sampled_ids, b.sampled_ids);
        std::set<int> pool(a.set1_ids.begin(), a.set1_ids.end());
        pool.insert(a.set2_ids.begin(), a.set2_ids.end());
        ASSERT_GE(a.sampled_ids.size(), 1u);
        ASSERT_LE(a.sampled_ids.size(), 16u);
        EXPECT_TRUE(std::is_sorted(a.sampled_ids.begin(), a.sampled_ids.end()));
        EXPECT_EQ(std::set<int>(a.sampled_ids.begin(), a.sampled_ids.end()).size(),
                  a.sampled_ids.size());
        for (int id : a.sampled_ids) {
            EXPECT_TRUE(pool.count(id));
        }
        ++histogram[a.sampled_ids.size()];
    }
    // N is uniform over 1..16: every value shows up in 400 draws.
    EXPECT_EQ(histogram.size(), 16u);
}

TEST(SelectSpheres, KeepsListedIds) {
    const auto scene = moving_spheres({1, 2, 3, 4});
    const std::vector<int> ids{3, 1};
    const auto sub = select_spheres(scene, ids);
    ASSERT_EQ(sub.spheres.size(), 2u);
    EXPECT_EQ(sub.spheres.spheres[0].id, 1);
    EXPECT_EQ(sub.spheres.spheres[1].id, 3);
    EXPECT_EQ(sub.spheres.spheres[0].track, scene.spheres.spheres[1].track);
}

TEST(IngestClip, MovesTracksIntoFirstCameraFrame) {
    const CameraPose raw1{rotation_y(0.4), Vec3d(1, -2, 3)};
    const CameraPose raw2{rotation_y(0.5), Vec3d(1, -2, 2)};
    const Vec3d world(0.5, 0.2, 4.0);
    const std::vector<std::vector<Vec3d>> tracks{{world}, {world}};
    const std::vector<CameraPose> poses{raw1, raw2};
    const auto scene = ingest_clip(tracks, poses, {64, 48});
    EXPECT_EQ(scene.trajectory.frames[0].pose, CameraPose::identity());
    // The aligned camera sees the point where the raw camera did.
    for (std::size_t l = 0; l < 2; ++l) {
        const Vec3d raw_cam = poses[l].apply(world);
        const Vec3d aligned_cam = scene.trajectory.frames[l].pose.apply(scene.spheres.spheres[0].track[l]);
        EXPECT_NEAR((raw_cam - aligned_cam).norm(), 0.0, 1e-12);
    }
}

TEST(IngestClip, FilesAndErrors) {
    TempDir dir("ingest");
    TrackArray tracks(16);
    for (auto &frame : tracks) {
        for (const auto &p : seed_grid(768, 512)) {
            frame.emplace_back((p.x() - 384) / 768 * 4, (p.y() - 256) / 512 * 4, 4.0);
        }
    }
    const auto bytes = encode_tracks(tracks);
    write_file(dir / "clip.trk", bytes);
    std::vector<CameraPose> poses(16, CameraPose::identity());
    const auto text = format_poses(poses);
    write_file(dir / "clip.pose", std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));

    const auto scene = ingest_clip(dir / "clip.trk", dir / "clip.pose", {768, 512});
    EXPECT_EQ(scene.length(), 16u);
    EXPECT_EQ(scene.spheres.size(), 625u);

    write_file(dir / "short.trk", std::span(bytes.data(), bytes.size() - 5));
    try {
        ingest_clip(dir / "short.trk", dir / "clip.pose", {768, 512});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::Truncated);
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    }

    TrackArray eight(tracks.begin(), tracks.begin() + 8);
    write_file(dir / "eight.trk", encode_tracks(eight));
    try {
        ingest_clip(dir / "eight.trk", dir / "clip.pose", {768, 512});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}
