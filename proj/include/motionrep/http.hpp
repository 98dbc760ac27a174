// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// HTTP front end over RenderService.
//
//   POST   /sessions                         JSON {width,height,frames} or multipart
//                                            image (PNG) [+ depth, millimeters_per_unit, frames]
//   DELETE /sessions/{id}
//   GET    /sessions/{id}/camera
//   PUT    /sessions/{id}/camera             {preset:{kind,magnitude[,pivot_distance]}[,compose:{..}]}
//                                            or {poses:[[12 numbers], ...]}
//   GET    /sessions/{id}/spheres
//   POST   /sessions/{id}/spheres            {points:[[u,v],..]|points3d:[[x,y,z],..][,depth_hint]}
//   PUT    /sessions/{id}/spheres/{sid}      same body
//   DELETE /sessions/{id}/spheres/{sid}
//   POST   /sessions/{id}/render             {first,last}
//   GET    /sessions/{id}/jobs/{jid}
//   GET    /sessions/{id}/frames/{n}/{spheres|envelope|composite}[?opacity=a]
//   GET    /sessions/{id}/export
//
// Frames carry X-Scene-Version, X-Cache (hit|miss) and an ETag; a matching
// If-None-Match yields 304. Errors are {"error": code, "message": text}
// with 404 for not-found, 400 for other library errors, 500 otherwise.

#pragma once

#include "motionrep/service.hpp"

#include <memory>
#include <string>

namespace motionrep {

inline constexpr const char *kPortEnvVar = "MOTIONREP_PORT";

/// Port from MOTIONREP_PORT, or `fallback` when unset. Invalid values throw.
int port_from_env(int fallback = 8080);

class HttpServer {
public:
    explicit HttpServer(RenderService &service);
    ~HttpServer();
    HttpServer(const HttpServer &) = delete;
    HttpServer &operator=(const HttpServer &) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port.
    int bind(const std::string &host, int port);
    /// Serves until stop(). Requires a prior bind().
    void listen();
    void stop();
    bool is_running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace motionrep
