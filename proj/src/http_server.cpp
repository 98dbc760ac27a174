// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/http.hpp"

#include "motionrep/io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <regex>

namespace motionrep {

using nlohmann::json;

namespace {

json parse_body(const httplib::Request &req) {
    try {
        return json::parse(req.body.empty() ? std::string("{}") : req.body);
    } catch (const json::parse_error &e) {
        fail(ErrorCode::ParseError, std::string("request body: ") + e.what());
    }
}

const json &field(const json &body, const char *key) {
    const auto it = body.find(key);
    if (it == body.end()) {
        fail(ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
    }
    return *it;
}

double number(const json &v, const std::string &what) {
    if (!v.is_number()) {
        fail(ErrorCode::InvalidArgument, what + ": expected a number");
    }
    return v.get<double>();
}

int integer(const json &v, const std::string &what) {
    if (!v.is_number_integer()) {
        fail(ErrorCode::InvalidArgument, what + ": expected an integer");
    }
    return v.get<int>();
}

int path_int(const std::string &text, const char *what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception &) {
    }
    fail(ErrorCode::InvalidArgument, std::string("bad ") + what + " '" + text + "'");
}

CameraMoveSpec move_spec(const json &j) {
    if (!j.is_object()) {
        fail(ErrorCode::InvalidArgument, "camera preset must be an object");
    }
    const json &kind = field(j, "kind");
    const auto parsed = kind.is_string() ? parse_move_kind(kind.get<std::string>()) : std::nullopt;
    if (!parsed) {
        fail(ErrorCode::InvalidArgument, "unknown camera move kind " + kind.dump());
    }
    CameraMoveSpec spec;
    spec.kind = *parsed;
    spec.magnitude = j.contains("magnitude") ? number(j["magnitude"], "magnitude") : 0.0;
    if (j.contains("pivot_distance")) {
        spec.pivot_distance = number(j["pivot_distance"], "pivot_distance");
    }
    return spec;
}

std::vector<CameraPose> poses_from_json(const json &list) {
    if (!list.is_array()) {
        fail(ErrorCode::InvalidArgument, "poses must be an array");
    }
    // Reuse the pose-file importer so both entry points validate identically.
    std::string text;
    for (const auto &row : list) {
        if (!row.is_array()) {
            fail(ErrorCode::InvalidArgument, "each pose must be an array of numbers");
        }
        for (const auto &v : row) {
            text += json(number(v, "pose")).dump() + " ";
        }
        text += "\n";
    }
    return parse_poses(text, "poses");
}

UserTrajectory trajectory_from_json(const json &body) {
    UserTrajectory traj;
    if (body.contains("points3d")) {
        std::vector<Vec3d> points;
        for (const auto &p : body["points3d"]) {
            if (!p.is_array() || p.size() != 3) {
                fail(ErrorCode::InvalidArgument, "points3d entries must be [x, y, z]");
            }
            points.emplace_back(number(p[0], "x"), number(p[1], "y"), number(p[2], "z"));
        }
        traj.points = std::move(points);
    } else {
        std::vector<Vec2d> points;
        for (const auto &p : field(body, "points")) {
            if (!p.is_array() || p.size() != 2) {
                fail(ErrorCode::InvalidArgument, "points entries must be [u, v]");
            }
            points.emplace_back(number(p[0], "u"), number(p[1], "v"));
        }
        traj.points = std::move(points);
    }
    if (body.contains("depth_hint")) {
        traj.depth_hint = number(body["depth_hint"], "depth_hint");
    }
    return traj;
}

json job_json(const RenderJob &job) {
    return {{"id", job.id},
            {"scene_id", job.scene_id},
            {"first", job.first_frame},
            {"last", job.last_frame},
            {"version", job.version},
            {"status", to_string(job.status)},
            {"frame_ready", job.frame_ready},
            {"error", job.error}};
}

json rgb_json(Rgb c) { return json::array({c.r, c.g, c.b}); }

void send_json(httplib::Response &res, const json &body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, const Error &e) {
    json body = {{"error", to_string(e.code())}, {"message", e.what()}};
    if (e.code() == ErrorCode::CameraEscapedEnvelope) {
        std::cmatch m;
        const std::regex frame_re(R"(frame (\d+))");
        if (std::regex_search(e.what(), m, frame_re)) {
            body["frame"] = std::stoi(m[1].str());
        }
    }
    send_json(res, body, e.code() == ErrorCode::NotFound ? 404
                         : e.code() == ErrorCode::IoError ? 500
                                                          : 400);
}

std::string etag(const std::string &session, std::uint64_t version, int frame, ServedLayer layer,
                 const std::string &opacity) {
    return "\"" + session + "-v" + std::to_string(version) + "-" + std::to_string(frame) + "-" +
           std::string(to_string(layer)) + (opacity.empty() ? "" : "-" + opacity) + "\"";
}

} // namespace

int port_from_env(int fallback) {
    const char *value = std::getenv(kPortEnvVar);
    if (value == nullptr || *value == '\0') {
        return fallback;
    }
    const int port = path_int(value, kPortEnvVar);
    if (port < 0 || port > 65535) {
        fail(ErrorCode::InvalidArgument, std::string(kPortEnvVar) + " out of range");
    }
    return port;
}

struct HttpServer::Impl {
    RenderService &service;
    httplib::Server server;
    bool bound = false;

    explicit Impl(RenderService &s) : service(s) { routes(); }

    template <typename F>
    httplib::Server::Handler guarded(F f) {
        return [f](const httplib::Request &req, httplib::Response &res) {
            try {
                f(req, res);
            } catch (const Error &e) {
                send_error(res, e);
            } catch (const std::exception &e) {
                send_json(res, {{"error", "internal"}, {"message", e.what()}}, 500);
            }
        };
    }

    void routes();
};

void HttpServer::Impl::routes() {
    auto &svc = service;

    server.Post("/sessions", guarded([&svc](const httplib::Request &req, httplib::Response &res) {
        SessionInit init;
        if (req.is_multipart_form_data()) {
            if (!req.has_file("image")) {
                fail(ErrorCode::InvalidArgument, "multipart session needs an 'image' part");
            }
            const auto &image = req.get_file_value("image").content;
            init.reference = decode_png_rgb(
                std::span(reinterpret_cast<const std::uint8_t *>(image.data()), image.size()));
            if (req.has_file("frames")) {
                init.frames = path_int(req.get_file_value("frames").content, "frames");
            }
            if (req.has_file("depth")) {
                const auto &depth = req.get_file_value("depth").content;
                const auto bytes =
                    std::span(reinterpret_cast<const std::uint8_t *>(depth.data()), depth.size());
                if (depth.size() >= 8 && depth.compare(0, 4, "\x89PNG") == 0) {
                    if (!req.has_file("millimeters_per_unit")) {
                        fail(ErrorCode::InvalidArgument,
                             "PNG depth needs a 'millimeters_per_unit' part");
                    }
                    init.depth = decode_depth_png(
                        bytes, std::stod(req.get_file_value("millimeters_per_unit").content));
                } else {
                    init.depth = parse_depth_text(depth);
                }
            }
        } else {
            const json body = parse_body(req);
            init.width = integer(field(body, "width"), "width");
            init.height = integer(field(body, "height"), "height");
            if (body.contains("frames")) {
                init.frames = integer(body["frames"], "frames");
            }
        }
        const std::string id = svc.create_session(std::move(init));
        const auto scene = svc.scene(id);
        send_json(res,
                  {{"id", id},
                   {"version", svc.version(id)},
                   {"width", scene->width},
                   {"height", scene->height},
                   {"frames", scene->length()}},
                  201);
    }));

    server.Delete(R"(/sessions/([^/]+))",
                  guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                      svc.delete_session(req.matches[1]);
                      res.status = 204;
                  }));

    server.Get(R"(/sessions/([^/]+)/camera)",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   const std::string id = req.matches[1];
                   const auto scene = svc.scene(id);
                   json poses = json::array();
                   json intrinsics = json::array();
                   for (const auto &f : scene->trajectory.frames) {
                       json row = json::array();
                       for (int r = 0; r < 3; ++r) {
                           for (int c = 0; c < 3; ++c) {
                               row.push_back(f.pose.rotation(r, c));
                           }
                           row.push_back(f.pose.translation(r));
                       }
                       poses.push_back(row);
                       intrinsics.push_back({f.intrinsics.fx, f.intrinsics.fy, f.intrinsics.cx,
                                             f.intrinsics.cy});
                   }
                   send_json(res, {{"version", svc.version(id)},
                                   {"poses", poses},
                                   {"intrinsics", intrinsics}});
               }));

    server.Put(R"(/sessions/([^/]+)/camera)",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   const json body = parse_body(req);
                   CameraUpdate update;
                   if (body.contains("poses")) {
                       update.poses = poses_from_json(body["poses"]);
                   } else {
                       update.preset = move_spec(field(body, "preset"));
                       if (body.contains("compose")) {
                           update.compose_with = move_spec(body["compose"]);
                       }
                   }
                   send_json(res, {{"version", svc.set_camera(req.matches[1], update)}});
               }));

    server.Get(R"(/sessions/([^/]+)/spheres)",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   const std::string id = req.matches[1];
                   const auto scene = svc.scene(id);
                   json spheres = json::array();
                   for (const auto &s : scene->spheres.spheres) {
                       spheres.push_back({{"id", s.id}, {"color", rgb_json(s.color)}});
                   }
                   send_json(res, {{"version", svc.version(id)}, {"spheres", spheres}});
               }));

    server.Post(R"(/sessions/([^/]+)/spheres)",
                guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                    const auto info =
                        svc.add_sphere(req.matches[1], trajectory_from_json(parse_body(req)));
                    send_json(res,
                              {{"id", info.id}, {"color", rgb_json(info.color)},
                               {"version", info.version}},
                              201);
                }));

    server.Put(R"(/sessions/([^/]+)/spheres/([^/]+))",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   const auto info =
                       svc.modify_sphere(req.matches[1], path_int(req.matches[2], "sphere id"),
                                         trajectory_from_json(parse_body(req)));
                   send_json(res, {{"id", info.id}, {"color", rgb_json(info.color)},
                                   {"version", info.version}});
               }));

    server.Delete(R"(/sessions/([^/]+)/spheres/([^/]+))",
                  guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                      const auto version =
                          svc.delete_sphere(req.matches[1], path_int(req.matches[2], "sphere id"));
                      send_json(res, {{"version", version}});
                  }));

    server.Post(R"(/sessions/([^/]+)/render)",
                guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                    const std::string id = req.matches[1];
                    const json body = parse_body(req);
                    const int length = static_cast<int>(svc.scene(id)->length());
                    const int first = body.contains("first") ? integer(body["first"], "first") : 1;
                    const int last =
                        body.contains("last") ? integer(body["last"], "last") : length;
                    send_json(res, job_json(svc.request_render(id, first, last)), 201);
                }));

    server.Get(R"(/sessions/([^/]+)/jobs/([^/]+))",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   send_json(res, job_json(svc.job(req.matches[1],
                                                    path_int(req.matches[2], "job id"))));
               }));

    server.Get(R"(/sessions/([^/]+)/frames/([^/]+)/([^/]+))",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   const std::string id = req.matches[1];
                   const int frame = path_int(req.matches[2], "frame index");
                   const auto layer = parse_served_layer(req.matches[3].str());
                   if (!layer) {
                       fail(ErrorCode::InvalidArgument, "unknown layer '" + req.matches[3].str() + "'");
                   }
                   std::string opacity_text;
                   double opacity = 0.5;
                   if (*layer == ServedLayer::Composite && req.has_param("opacity")) {
                       opacity_text = req.get_param_value("opacity");
                       try {
                           opacity = std::stod(opacity_text);
                       } catch (const std::exception &) {
                           fail(ErrorCode::InvalidArgument, "bad opacity '" + opacity_text + "'");
                       }
                   }
                   const std::uint64_t current = svc.version(id);
                   const std::string tag = etag(id, current, frame, *layer, opacity_text);
                   if (req.has_header("If-None-Match") &&
                       req.get_header_value("If-None-Match") == tag) {
                       // Still validates the frame index before answering.
                       if (frame < 1 || frame > static_cast<int>(svc.scene(id)->length())) {
                           fail(ErrorCode::InvalidArgument, "frame out of range");
                       }
                       res.status = 304;
                       res.set_header("ETag", tag);
                       res.set_header("X-Scene-Version", std::to_string(current));
                       return;
                   }
                   const auto fetched = svc.fetch_frame(id, frame, *layer, opacity);
                   res.set_header("ETag",
                                  etag(id, fetched.version, frame, *layer, opacity_text));
                   res.set_header("X-Scene-Version", std::to_string(fetched.version));
                   res.set_header("X-Cache", fetched.from_cache ? "hit" : "miss");
                   res.set_header("Cache-Control", "no-cache");
                   res.set_content(std::string(fetched.png.begin(), fetched.png.end()), "image/png");
               }));

    server.Get(R"(/sessions/([^/]+)/export)",
               guarded([&svc](const httplib::Request &req, httplib::Response &res) {
                   const std::string id = req.matches[1];
                   res.set_header("X-Scene-Version", std::to_string(svc.version(id)));
                   res.set_content(svc.export_scene(id), "application/json");
               }));
}

HttpServer::HttpServer(RenderService &service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string &host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) {
            fail(ErrorCode::IoError, "cannot bind " + host);
        }
    } else if (!impl_->server.bind_to_port(host, port)) {
        fail(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->bound = true;
    return bound;
}

void HttpServer::listen() {
    if (!impl_->bound) {
        fail(ErrorCode::InvalidArgument, "HttpServer::listen before bind");
    }
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_) {
        impl_->server.stop();
    }
}

bool HttpServer::is_running() const { return impl_->server.is_running(); }

} // namespace motionrep
