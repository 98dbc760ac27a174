// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// In-memory authoring sessions behind the HTTP rendering service.
//
// Each session owns an immutable scene snapshot plus a version counter. Edits
// are serialized per session and bump the version; renders read a snapshot
// and are cached per (frame, layer) against the version they were made from,
// so a served image always belongs to exactly one scene version.

#pragma once

#include "motionrep/camera_paths.hpp"
#include "motionrep/manipulation.hpp"
#include "motionrep/render.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace motionrep {

enum class ServedLayer { Spheres, Envelope, Composite };

std::optional<ServedLayer> parse_served_layer(std::string_view name);
std::string_view to_string(ServedLayer layer);

enum class JobStatus { Pending, Running, Done, Failed };
std::string_view to_string(JobStatus status);

struct RenderJob {
    int id = 0;
    std::string scene_id;
    int first_frame = 1;
    int last_frame = 1;
    std::uint64_t version = 0;
    JobStatus status = JobStatus::Pending;
    /// One flag per frame in [first_frame, last_frame].
    std::vector<bool> frame_ready;
    std::string error;
};

struct SessionInit {
    int width = 0;
    int height = 0;
    int frames = 16;
    std::optional<RgbImage> reference;
    std::optional<DepthMap> depth;
};

struct SphereInfo {
    int id = 0;
    Rgb color;
    std::uint64_t version = 0;
};

struct FetchedFrame {
    std::vector<std::uint8_t> png;
    std::uint64_t version = 0;
    bool from_cache = false;
};

struct CameraUpdate {
    /// Either a preset (optionally composed with a second) or explicit poses.
    std::optional<CameraMoveSpec> preset;
    std::optional<CameraMoveSpec> compose_with;
    std::optional<std::vector<CameraPose>> poses;
};

class RenderService {
public:
    RenderService();
    ~RenderService();
    RenderService(const RenderService &) = delete;
    RenderService &operator=(const RenderService &) = delete;

    std::string create_session(SessionInit init);
    void delete_session(const std::string &id);

    std::shared_ptr<const MotionScene> scene(const std::string &id) const;
    std::uint64_t version(const std::string &id) const;

    /// Rejects trajectories that leave the envelope, naming the frame.
    std::uint64_t set_camera(const std::string &id, const CameraUpdate &update);

    SphereInfo add_sphere(const std::string &id, const UserTrajectory &trajectory);
    SphereInfo modify_sphere(const std::string &id, int sphere_id, const UserTrajectory &trajectory);
    std::uint64_t delete_sphere(const std::string &id, int sphere_id);

    RenderJob request_render(const std::string &id, int first_frame, int last_frame);
    RenderJob job(const std::string &id, int job_id) const;

    /// `opacity` only affects the composite layer.
    FetchedFrame fetch_frame(const std::string &id, int frame_index, ServedLayer layer,
                             double opacity = 0.5);

    std::string export_scene(const std::string &id) const;

    /// Number of frame renders actually computed (cache misses), for tests.
    std::uint64_t renders_computed() const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string &id) const;

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_session_ = 1;
    std::atomic<std::uint64_t> renders_computed_{0};
};

} // namespace motionrep
