// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/service.hpp"

#include "motionrep/io.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

namespace motionrep {

namespace {

struct CacheEntry {
    std::uint64_t version = 0;
    std::vector<std::uint8_t> png;
};

void require_inside_envelope(const MotionScene &scene) {
    const double half = scene.envelope.side_length / 2.0;
    for (std::size_t l = 0; l < scene.length(); ++l) {
        const Vec3d c = scene.trajectory.frames[l].pose.center();
        if (!(c.cwiseAbs().maxCoeff() < half)) {
            fail(ErrorCode::CameraEscapedEnvelope,
                 "frame " + std::to_string(l + 1) +
                     ": camera center is not strictly inside the world envelope");
        }
    }
}

MotionScene with_tracks(const MotionScene &scene, CameraTrajectory trajectory,
                        std::vector<SphereTrack> tracks) {
    return build_scene(scene.width, scene.height, std::move(trajectory), std::move(tracks),
                       scene.envelope, scene.render_params);
}

} // namespace

struct RenderService::Session {
    std::string id;
    mutable std::mutex mutex;
    std::shared_ptr<const MotionScene> scene;
    std::uint64_t version = 1;
    std::optional<RgbImage> reference;
    std::optional<DepthMap> depth;
    std::map<std::tuple<int, ServedLayer, long>, CacheEntry> cache;
    std::map<int, RenderJob> jobs;
    int next_job = 1;

    void replace(MotionScene next) {
        scene = std::make_shared<const MotionScene>(std::move(next));
        ++version;
    }
};

std::optional<ServedLayer> parse_served_layer(std::string_view name) {
    if (name == "spheres") return ServedLayer::Spheres;
    if (name == "envelope") return ServedLayer::Envelope;
    if (name == "composite") return ServedLayer::Composite;
    return std::nullopt;
}

std::string_view to_string(ServedLayer layer) {
    switch (layer) {
    case ServedLayer::Spheres: return "spheres";
    case ServedLayer::Envelope: return "envelope";
    case ServedLayer::Composite: return "composite";
    }
    return "spheres";
}

std::string_view to_string(JobStatus status) {
    switch (status) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
    }
    return "pending";
}

RenderService::RenderService() = default;
RenderService::~RenderService() = default;

std::shared_ptr<RenderService::Session> RenderService::find(const std::string &id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        fail(ErrorCode::NotFound, "unknown session '" + id + "'");
    }
    return it->second;
}

std::string RenderService::create_session(SessionInit init) {
    if (init.reference) {
        if (init.width == 0 && init.height == 0) {
            init.width = init.reference->width;
            init.height = init.reference->height;
        } else if (init.width != init.reference->width || init.height != init.reference->height) {
            fail(ErrorCode::InvalidArgument, "create_session: size differs from reference image");
        }
    }
    if (init.frames < 1) {
        fail(ErrorCode::InvalidArgument, "create_session: frames must be >= 1");
    }
    if (init.depth && (init.depth->width != init.width || init.depth->height != init.height)) {
        fail(ErrorCode::InvalidArgument, "create_session: depth map size differs from image");
    }
    const auto k = default_intrinsics(init.width, init.height);
    auto session = std::make_shared<Session>();
    session->scene = std::make_shared<const MotionScene>(
        build_scene(init.width, init.height,
                    static_trajectory(k, static_cast<std::size_t>(init.frames)),
                    std::vector<SphereTrack>{}, WorldEnvelope::defaults(),
                    RenderParams::defaults_for(init.width, init.height)));
    session->reference = std::move(init.reference);
    session->depth = std::move(init.depth);

    std::lock_guard lock(mutex_);
    session->id = "s" + std::to_string(next_session_++);
    sessions_[session->id] = session;
    return session->id;
}

void RenderService::delete_session(const std::string &id) {
    std::lock_guard lock(mutex_);
    if (sessions_.erase(id) == 0) {
        fail(ErrorCode::NotFound, "unknown session '" + id + "'");
    }
}

std::shared_ptr<const MotionScene> RenderService::scene(const std::string &id) const {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    return s->scene;
}

std::uint64_t RenderService::version(const std::string &id) const {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    return s->version;
}

std::uint64_t RenderService::set_camera(const std::string &id, const CameraUpdate &update) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    const auto &current = *s->scene;
    const CameraIntrinsics base = default_intrinsics(current.width, current.height);
    const int frames = static_cast<int>(current.length());

    CameraTrajectory trajectory;
    if (update.poses) {
        if (update.poses->size() != current.length()) {
            fail(ErrorCode::InvalidArgument, "set_camera: " + std::to_string(update.poses->size()) +
                                                 " poses for a " + std::to_string(frames) +
                                                 "-frame scene");
        }
        trajectory = trajectory_from_poses(*update.poses, base);
    } else if (update.preset) {
        auto spec = *update.preset;
        spec.frames = frames;
        trajectory = generate(spec, base);
        if (update.compose_with) {
            auto second = *update.compose_with;
            second.frames = frames;
            trajectory = compose(trajectory, generate(second, base));
        }
    } else {
        fail(ErrorCode::InvalidArgument, "set_camera: need a preset or a pose list");
    }

    MotionScene next = with_tracks(current, std::move(trajectory), sphere_tracks(current.spheres));
    require_inside_envelope(next);
    s->replace(std::move(next));
    return s->version;
}

SphereInfo RenderService::add_sphere(const std::string &id, const UserTrajectory &trajectory) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    const Track track = lift_trajectory(trajectory, s->depth ? &*s->depth : nullptr, *s->scene);
    auto [next, sphere_id] = motionrep::add_sphere(*s->scene, track);
    s->replace(std::move(next));
    for (const auto &sphere : s->scene->spheres.spheres) {
        if (sphere.id == sphere_id) {
            return {sphere_id, sphere.color, s->version};
        }
    }
    return {sphere_id, {}, s->version};
}

SphereInfo RenderService::modify_sphere(const std::string &id, int sphere_id,
                                        const UserTrajectory &trajectory) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    const auto &current = *s->scene;
    auto tracks = sphere_tracks(current.spheres);
    const auto it = std::find_if(tracks.begin(), tracks.end(),
                                 [&](const SphereTrack &t) { return t.id == sphere_id; });
    if (it == tracks.end()) {
        fail(ErrorCode::NotFound, "unknown sphere " + std::to_string(sphere_id));
    }
    it->track = lift_trajectory(trajectory, s->depth ? &*s->depth : nullptr, current);
    s->replace(with_tracks(current, current.trajectory, std::move(tracks)));
    for (const auto &sphere : s->scene->spheres.spheres) {
        if (sphere.id == sphere_id) {
            return {sphere_id, sphere.color, s->version};
        }
    }
    return {sphere_id, {}, s->version};
}

std::uint64_t RenderService::delete_sphere(const std::string &id, int sphere_id) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    const auto &current = *s->scene;
    auto tracks = sphere_tracks(current.spheres);
    const auto before = tracks.size();
    std::erase_if(tracks, [&](const SphereTrack &t) { return t.id == sphere_id; });
    if (tracks.size() == before) {
        fail(ErrorCode::NotFound, "unknown sphere " + std::to_string(sphere_id));
    }
    s->replace(with_tracks(current, current.trajectory, std::move(tracks)));
    return s->version;
}

FetchedFrame RenderService::fetch_frame(const std::string &id, int frame_index, ServedLayer layer,
                                       double opacity) {
    const auto s = find(id);
    if (!(opacity >= 0.0 && opacity <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "opacity must be in [0, 1]");
    }
    // Opacity is keyed at 1e-6 resolution; other layers ignore it.
    const long opacity_key =
        layer == ServedLayer::Composite ? std::lround(opacity * 1e6) : 0L;
    const auto key = std::make_tuple(frame_index, layer, opacity_key);
    std::shared_ptr<const MotionScene> snapshot;
    std::uint64_t version = 0;
    {
        std::lock_guard lock(s->mutex);
        if (frame_index < 1 || static_cast<std::size_t>(frame_index) > s->scene->length()) {
            fail(ErrorCode::InvalidArgument, "frame " + std::to_string(frame_index) +
                                                 " outside [1, " +
                                                 std::to_string(s->scene->length()) + "]");
        }
        if (layer == ServedLayer::Composite && !s->reference) {
            fail(ErrorCode::InvalidArgument, "composite requested but the session has no reference image");
        }
        const auto it = s->cache.find(key);
        if (it != s->cache.end() && it->second.version == s->version) {
            return {it->second.png, s->version, true};
        }
        snapshot = s->scene;
        version = s->version;
    }

    // Rendering happens outside the session lock against the snapshot.
    RgbImage image;
    switch (layer) {
    case ServedLayer::Spheres: image = render_sphere_layer(*snapshot, frame_index); break;
    case ServedLayer::Envelope: image = render_envelope_layer(*snapshot, frame_index); break;
    case ServedLayer::Composite: {
        ControlSignalFrame frame;
        frame.frame_index = frame_index;
        frame.sphere_layer = render_sphere_layer(*snapshot, frame_index);
        frame.envelope_layer = render_envelope_layer(*snapshot, frame_index);
        image = composite(*s->reference, frame, opacity_key / 1e6);
        break;
    }
    }
    ++renders_computed_;
    auto png = encode_png(image);

    std::lock_guard lock(s->mutex);
    auto &entry = s->cache[key];
    if (entry.png.empty() || entry.version < version) {
        entry = {version, png};
    }
    return {std::move(png), version, false};
}

RenderJob RenderService::request_render(const std::string &id, int first_frame, int last_frame) {
    const auto s = find(id);
    RenderJob job;
    bool composite_too = false;
    {
        std::lock_guard lock(s->mutex);
        const int length = static_cast<int>(s->scene->length());
        if (first_frame < 1 || last_frame > length || first_frame > last_frame) {
            fail(ErrorCode::InvalidArgument, "render: frame range [" + std::to_string(first_frame) +
                                                 ", " + std::to_string(last_frame) +
                                                 "] outside [1, " + std::to_string(length) + "]");
        }
        job.id = s->next_job++;
        job.scene_id = id;
        job.first_frame = first_frame;
        job.last_frame = last_frame;
        job.version = s->version;
        job.status = JobStatus::Running;
        job.frame_ready.assign(static_cast<std::size_t>(last_frame - first_frame + 1), false);
        composite_too = s->reference.has_value();
        s->jobs[job.id] = job;
    }

    const auto record = [&] {
        std::lock_guard lock(s->mutex);
        s->jobs[job.id] = job;
    };
    try {
        for (int f = first_frame; f <= last_frame; ++f) {
            fetch_frame(id, f, ServedLayer::Spheres);
            fetch_frame(id, f, ServedLayer::Envelope);
            if (composite_too) {
                fetch_frame(id, f, ServedLayer::Composite);
            }
            job.frame_ready[static_cast<std::size_t>(f - first_frame)] = true;
            record();
        }
        job.status = JobStatus::Done;
        record();
    } catch (const Error &e) {
        job.status = JobStatus::Failed;
        job.error = e.what();
        record();
        throw;
    }
    return job;
}

RenderJob RenderService::job(const std::string &id, int job_id) const {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    const auto it = s->jobs.find(job_id);
    if (it == s->jobs.end()) {
        fail(ErrorCode::NotFound, "unknown render job " + std::to_string(job_id));
    }
    return it->second;
}

std::string RenderService::export_scene(const std::string &id) const {
    return serialize_scene(*scene(id));
}

std::uint64_t RenderService::renders_computed() const { return renders_computed_; }

} // namespace motionrep
