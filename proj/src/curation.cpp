// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/curation.hpp"

#include "motionrep/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace motionrep {

namespace {

/// Unbiased draw from [0, n) on top of mt19937_64, so sequences do not depend
/// on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64 &rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

constexpr std::size_t kMaxSampled = 16;

} // namespace

double motion_score(std::span<const FlowField> flows) {
    if (flows.empty()) {
        fail(ErrorCode::InvalidArgument, "motion_score: no flow fields");
    }
    const int w = flows.front().width;
    const int h = flows.front().height;
    double total = 0.0;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const auto &f = flows[i];
        if (f.width != w || f.height != h || w <= 0 || h <= 0 ||
            f.vectors.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
            fail(ErrorCode::InvalidArgument,
                 "motion_score: flow " + std::to_string(i) + " has inconsistent dimensions");
        }
        double sum_sq = 0.0;
        for (const auto &v : f.vectors) {
            sum_sq += static_cast<double>(v.x()) * v.x() + static_cast<double>(v.y()) * v.y();
        }
        total += std::sqrt(sum_sq / (static_cast<double>(w) * h));
    }
    return total / static_cast<double>(flows.size());
}

double nearest_rank_percentile(std::span<const double> values, double percentile) {
    if (values.empty()) {
        fail(ErrorCode::InvalidArgument, "percentile of an empty sample");
    }
    if (!(percentile >= 0.0 && percentile <= 100.0)) {
        fail(ErrorCode::InvalidArgument, "percentile must be within [0, 100]");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    // p * M / 100 rather than p / 100 * M: exact for integral p.
    const double rank = std::ceil(percentile * static_cast<double>(sorted.size()) / 100.0);
    const auto index = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
    return sorted[std::min(index, sorted.size() - 1)];
}

std::vector<ClipRecord> filter_corpus(std::span<const ClipRecord> records, double percentile) {
    if (records.empty()) {
        fail(ErrorCode::InvalidArgument, "filter_corpus: empty corpus");
    }
    std::vector<double> scores;
    scores.reserve(records.size());
    for (const auto &r : records) {
        if (!(r.motion_score >= 0.0)) {
            fail(ErrorCode::InvalidArgument, "filter_corpus: clip '" + r.clip_id +
                                                 "' has a negative or NaN score");
        }
        scores.push_back(r.motion_score);
    }
    const double threshold = nearest_rank_percentile(scores, percentile);
    std::vector<ClipRecord> kept;
    for (const auto &r : records) {
        if (!(r.motion_score < threshold)) {
            kept.push_back(r);
        }
    }
    return kept;
}

std::vector<Vec2d> seed_grid(int width, int height, int rows, int cols) {
    if (rows < 1 || cols < 1) {
        fail(ErrorCode::InvalidArgument, "seed_grid: rows and cols must be >= 1");
    }
    std::vector<Vec2d> points;
    points.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            points.emplace_back((c + 0.5) * width / cols, (r + 0.5) * height / rows);
        }
    }
    return points;
}

double trajectory_length(const Track &track) {
    double total = 0.0;
    for (std::size_t l = 1; l < track.size(); ++l) {
        total += (track[l] - track[l - 1]).norm();
    }
    return total;
}

SparsifySelection sparsify(const MotionScene &scene, const Mask &salient_mask, std::uint64_t seed) {
    if (salient_mask.width != scene.width || salient_mask.height != scene.height) {
        fail(ErrorCode::InvalidArgument, "sparsify: mask is " +
                                             std::to_string(salient_mask.width) + "x" +
                                             std::to_string(salient_mask.height) + ", scene is " +
                                             std::to_string(scene.width) + "x" +
                                             std::to_string(scene.height));
    }
    SparsifySelection out;
    const auto &spheres = scene.spheres.spheres;
    if (spheres.empty()) {
        return out;
    }

    const auto &first = scene.trajectory.frames.front();
    std::vector<double> lengths;
    lengths.reserve(spheres.size());
    for (const auto &s : spheres) {
        lengths.push_back(trajectory_length(s.track));
        const auto p = project_point(first.intrinsics, first.pose, s.track.front());
        if (!p) {
            continue;
        }
        const double x = std::floor(p->u);
        const double y = std::floor(p->v);
        if (x >= 0 && y >= 0 && x < scene.width && y < scene.height &&
            salient_mask(static_cast<int>(x), static_cast<int>(y)) != 0) {
            out.set1_ids.push_back(s.id);
        }
    }
    const double threshold = nearest_rank_percentile(lengths, 80.0);
    for (std::size_t n = 0; n < spheres.size(); ++n) {
        if (lengths[n] > threshold) {
            out.set2_ids.push_back(spheres[n].id);
        }
    }

    const std::set<int> in1(out.set1_ids.begin(), out.set1_ids.end());
    const std::set<int> in2(out.set2_ids.begin(), out.set2_ids.end());
    std::vector<int> pool;
    for (const auto &s : spheres) {
        if (in1.count(s.id) || in2.count(s.id)) {
            pool.push_back(s.id);
        }
    }
    if (pool.empty()) {
        return out;
    }

    std::mt19937_64 rng(seed);
    const std::size_t cap = std::min(kMaxSampled, pool.size());
    const std::size_t count = 1 + static_cast<std::size_t>(bounded(rng, cap));
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    out.sampled_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(out.sampled_ids.begin(), out.sampled_ids.end());
    return out;
}

MotionScene select_spheres(const MotionScene &scene, std::span<const int> ids) {
    const std::set<int> keep(ids.begin(), ids.end());
    std::vector<SphereTrack> tracks;
    for (const auto &s : scene.spheres.spheres) {
        if (keep.count(s.id)) {
            tracks.push_back({s.id, s.track});
        }
    }
    return build_scene(scene.width, scene.height, scene.trajectory, std::move(tracks),
                       scene.envelope, scene.render_params);
}

MotionScene ingest_clip(const std::vector<std::vector<Vec3d>> &frame_major_tracks,
                        std::span<const CameraPose> raw_poses, const IngestParams &params) {
    if (raw_poses.empty()) {
        fail(ErrorCode::InvalidArgument, "ingest_clip: no camera poses");
    }
    if (frame_major_tracks.size() != raw_poses.size()) {
        fail(ErrorCode::InvalidArgument,
             "ingest_clip: " + std::to_string(raw_poses.size()) + " poses but " +
                 std::to_string(frame_major_tracks.size()) + " track frames");
    }
    const auto intrinsics = default_intrinsics(params.width, params.height);
    const auto aligned = align_to_first_frame(raw_poses);
    // World frame becomes the first camera's frame.
    const CameraPose &to_first = raw_poses.front();
    std::vector<std::vector<Vec3d>> tracks = frame_major_tracks;
    for (auto &frame : tracks) {
        for (auto &p : frame) {
            p = to_first.apply(p);
        }
    }
    return build_scene(params.width, params.height, trajectory_from_poses(aligned, intrinsics),
                       tracks, params.envelope,
                       params.render_params.value_or(
                           RenderParams::defaults_for(params.width, params.height)));
}

MotionScene ingest_clip(const std::filesystem::path &tracks_file,
                        const std::filesystem::path &poses_file, const IngestParams &params) {
    const auto tracks = read_tracks(tracks_file);
    const auto poses = read_poses(poses_file);
    return ingest_clip(tracks, poses, params);
}

} // namespace motionrep
