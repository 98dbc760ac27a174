// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "motionrep/image.hpp"
#include "motionrep/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace motionrep {

struct FlowField {
    int width = 0;
    int height = 0;
    /// Row-major (du, dv) per pixel.
    std::vector<Vec2<float>> vectors;
};

struct ClipRecord {
    std::string clip_id;
    double motion_score = 0.0;
    int frame_count = 0;
};

struct SparsifySelection {
    std::vector<int> set1_ids;
    std::vector<int> set2_ids;
    std::vector<int> sampled_ids;

    /// Set1 ∪ Set2 was empty; nothing could be sampled.
    bool empty() const { return sampled_ids.empty(); }
};

/// Per field: Frobenius norm of the flow divided by sqrt(W * H); the clip
/// score is the mean over fields.
double motion_score(std::span<const FlowField> flows);

/// ⌈p/100 · M⌉-th smallest value (1-based, at least the first).
double nearest_rank_percentile(std::span<const double> values, double percentile);

/// Drops clips scoring strictly below the nearest-rank percentile. Order kept.
std::vector<ClipRecord> filter_corpus(std::span<const ClipRecord> records,
                                      double percentile = 30.0);

/// Cell centers of a rows x cols grid over the image, row by row.
std::vector<Vec2d> seed_grid(int width, int height, int rows = 25, int cols = 25);

/// Sum of Euclidean steps along the 3D track.
double trajectory_length(const Track &track);

/// Set1: spheres whose frame-1 center lands on a mask pixel. Set2: spheres
/// whose trajectory length is strictly above the nearest-rank 80th
/// percentile. From the union, N ~ U{1..min(16, |union|)} ids are drawn
/// without replacement. Deterministic in `seed`.
SparsifySelection sparsify(const MotionScene &scene, const Mask &salient_mask, std::uint64_t seed);

/// Keeps only the listed spheres; depths and colors are re-derived.
MotionScene select_spheres(const MotionScene &scene, std::span<const int> ids);

struct IngestParams {
    int width = 0;
    int height = 0;
    WorldEnvelope envelope = WorldEnvelope::defaults();
    /// Defaults derived from the image size when unset.
    std::optional<RenderParams> render_params;
};

/// Builds a scene from tracked points and estimated poses. The first pose
/// becomes the world frame; tracks are moved into it along with the poses.
MotionScene ingest_clip(const std::vector<std::vector<Vec3d>> &frame_major_tracks,
                        std::span<const CameraPose> raw_poses, const IngestParams &params);
MotionScene ingest_clip(const std::filesystem::path &tracks_file,
                        const std::filesystem::path &poses_file, const IngestParams &params);

} // namespace motionrep
