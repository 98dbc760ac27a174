// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// motionrep command line. On failure prints one line
//   error <code> <message>
// to stderr and exits 1 (usage errors exit 2).

#include "motionrep/camera_paths.hpp"
#include "motionrep/curation.hpp"
#include "motionrep/http.hpp"
#include "motionrep/io.hpp"
#include "motionrep/manipulation.hpp"
#include "motionrep/render.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace motionrep;

namespace {

std::string read_text(const fs::path &path) {
    const auto bytes = read_file(path);
    return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path &path, const std::string &text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

/// Whitespace-separated numbers per line; '#' starts a comment line.
std::vector<std::vector<double>> read_rows(const fs::path &path) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(read_text(path));
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(token, &used));
                if (used != token.size()) {
                    throw std::invalid_argument(token);
                }
            } catch (const std::exception &) {
                fail(ErrorCode::ParseError,
                     path.string() + ":" + std::to_string(number) + ": bad number '" + token + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

UserTrajectory read_user_trajectory(const fs::path &path) {
    const auto rows = read_rows(path);
    if (rows.empty()) {
        fail(ErrorCode::ParseError, path.string() + ": no points");
    }
    const std::size_t dim = rows.front().size();
    if (dim != 2 && dim != 3) {
        fail(ErrorCode::ParseError, path.string() + ": points need 2 or 3 coordinates");
    }
    UserTrajectory traj;
    std::vector<Vec2d> p2;
    std::vector<Vec3d> p3;
    for (const auto &r : rows) {
        if (r.size() != dim) {
            fail(ErrorCode::ParseError, path.string() + ": mixed 2D and 3D points");
        }
        if (dim == 2) {
            p2.emplace_back(r[0], r[1]);
        } else {
            p3.emplace_back(r[0], r[1], r[2]);
        }
    }
    if (dim == 2) {
        traj.points = std::move(p2);
    } else {
        traj.points = std::move(p3);
    }
    return traj;
}

CameraMoveSpec move_spec(const std::string &kind, double magnitude, int frames, double pivot) {
    const auto parsed = parse_move_kind(kind);
    if (!parsed) {
        fail(ErrorCode::InvalidArgument, "unknown camera move '" + kind + "'");
    }
    return {*parsed, magnitude, frames, pivot};
}

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04d.png", index);
    return buf;
}

struct Options {
    // Shared positional/file arguments, filled per subcommand.
    std::string scene, out, tracks, poses, mask, depth, flow_dir, manifest, trajectory, pairs,
        reference, target_depth, pose_a, pose_b, host = "127.0.0.1";
    int width = 0, height = 0, frames = 16, threads = 0, port = -1;
    double percentile = 30.0, opacity = 0.5, magnitude = 0.0, pivot = 10.0,
           compose_magnitude = 0.0;
    std::optional<double> depth_hint;
    std::string kind = "static", compose_kind;
    std::uint64_t seed = 0;
    std::vector<std::string> directives;
};

int run_curate(const Options &o) {
    IngestParams params;
    params.width = o.width;
    params.height = o.height;
    const MotionScene scene = ingest_clip(fs::path(o.tracks), fs::path(o.poses), params);
    write_scene(o.out, scene);
    std::cout << "spheres " << scene.spheres.spheres.size() << "\nframes " << scene.length()
              << "\n";
    return 0;
}

int run_score(const Options &o) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(o.flow_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".flo") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        fail(ErrorCode::InvalidArgument, o.flow_dir + ": no .flo files");
    }
    std::vector<FlowField> flows;
    for (const auto &f : files) {
        flows.push_back(read_flow(f));
    }
    std::printf("%.9g\n", motion_score(flows));
    return 0;
}

int run_filter(const Options &o) {
    // Manifest lines: clip_id score
    std::vector<ClipRecord> records;
    std::istringstream in(read_text(o.manifest));
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::istringstream fields(line);
        ClipRecord r;
        if (!(fields >> r.clip_id) || r.clip_id[0] == '#') {
            continue;
        }
        std::string extra;
        if (!(fields >> r.motion_score) || (fields >> extra)) {
            fail(ErrorCode::ParseError,
                 o.manifest + ":" + std::to_string(number) + ": expected '<clip_id> <score>'");
        }
        records.push_back(r);
    }
    std::string keep;
    for (const auto &r : filter_corpus(records, o.percentile)) {
        keep += r.clip_id + "\n";
    }
    if (o.out.empty()) {
        std::cout << keep;
    } else {
        write_text(o.out, keep);
    }
    return 0;
}

int run_render(const Options &o) {
    const MotionScene scene = read_scene(o.scene);
    std::optional<RgbImage> reference;
    if (!o.reference.empty()) {
        reference = read_png_rgb(o.reference);
    }
    const auto frames = render_scene(scene, static_cast<unsigned>(o.threads));
    const fs::path root(o.out);
    fs::create_directories(root / "spheres");
    fs::create_directories(root / "envelope");
    if (reference) {
        fs::create_directories(root / "composite");
    }
    nlohmann::json manifest;
    manifest["width"] = scene.width;
    manifest["height"] = scene.height;
    manifest["frames"] = scene.length();
    manifest["files"] = nlohmann::json::array();
    for (const auto &f : frames) {
        const std::string name = frame_name(f.frame_index);
        write_png(root / "spheres" / name, f.sphere_layer);
        write_png(root / "envelope" / name, f.envelope_layer);
        manifest["files"].push_back("spheres/" + name);
        manifest["files"].push_back("envelope/" + name);
        if (reference) {
            write_png(root / "composite" / name, composite(*reference, f, o.opacity));
            manifest["files"].push_back("composite/" + name);
        }
    }
    if (reference) {
        manifest["opacity"] = o.opacity;
    }
    write_text(root / "manifest.json", manifest.dump(1) + "\n");
    std::cout << "wrote " << manifest["files"].size() << " images\n";
    return 0;
}

int run_camgen(const Options &o) {
    const auto base = default_intrinsics(o.width, o.height);
    CameraTrajectory traj = generate(move_spec(o.kind, o.magnitude, o.frames, o.pivot), base);
    if (!o.compose_kind.empty()) {
        traj = compose(traj, generate(move_spec(o.compose_kind, o.compose_magnitude, o.frames,
                                                o.pivot),
                                      base));
    }
    std::vector<CameraPose> poses;
    for (const auto &f : traj.frames) {
        poses.push_back(f.pose);
    }
    const std::string text = format_poses(poses);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_text(o.out, text);
    }
    return 0;
}

int run_sparsify(const Options &o) {
    const MotionScene scene = read_scene(o.scene);
    const SparsifySelection sel = sparsify(scene, read_mask(o.mask), o.seed);
    write_scene(o.out, select_spheres(scene, sel.sampled_ids));
    if (sel.empty()) {
        std::cout << "status empty-selection\n";
        return 0;
    }
    std::cout << "status ok\nsampled";
    for (int id : sel.sampled_ids) {
        std::cout << " " << id;
    }
    std::cout << "\n";
    return 0;
}

int run_lift(const Options &o) {
    const MotionScene scene = read_scene(o.scene);
    UserTrajectory traj = read_user_trajectory(o.trajectory);
    traj.depth_hint = o.depth_hint;
    std::optional<DepthMap> depth;
    if (!o.depth.empty()) {
        depth = read_depth(o.depth);
    }
    const Track track = lift_trajectory(traj, depth ? &*depth : nullptr, scene);
    const auto [next, id] = add_sphere(scene, track);
    write_scene(o.out, next);
    std::cout << "sphere " << id << "\n";
    return 0;
}

int run_transfer(const Options &o) {
    const MotionScene source = read_scene(o.scene);
    std::vector<CorrespondencePair> pairs;
    for (const auto &r : read_rows(o.pairs)) {
        if (r.size() != 4) {
            fail(ErrorCode::ParseError, o.pairs + ": pair lines need 'su sv tu tv'");
        }
        pairs.push_back({Vec2d(r[0], r[1]), Vec2d(r[2], r[3])});
    }
    const DepthMap depth = read_depth(o.target_depth);
    write_scene(o.out, transfer_motion(source, pairs, depth, depth.width, depth.height));
    return 0;
}

int run_edit(const Options &o) {
    const MotionScene scene = read_scene(o.scene);
    std::vector<EditDirective> directives;
    for (const auto &d : o.directives) {
        // KIND:MASK[:TRACKS]
        const auto c1 = d.find(':');
        if (c1 == std::string::npos) {
            fail(ErrorCode::InvalidArgument, "directive '" + d + "' needs KIND:MASK");
        }
        const std::string kind = d.substr(0, c1);
        std::string rest = d.substr(c1 + 1);
        EditDirective directive;
        if (kind == "freeze_spheres") {
            directive.mode = EditMode::FreezeSpheres;
        } else if (kind == "freeze_camera") {
            directive.mode = EditMode::FreezeCamera;
        } else if (kind == "replace") {
            directive.mode = EditMode::ReplaceSpheres;
            const auto c2 = rest.find(':');
            if (c2 == std::string::npos) {
                fail(ErrorCode::InvalidArgument, "replace directive needs replace:MASK:TRACKS");
            }
            const TrackArray frame_major = read_tracks(rest.substr(c2 + 1));
            rest = rest.substr(0, c2);
            std::vector<Track> replacement;
            if (!frame_major.empty()) {
                replacement.resize(frame_major.front().size());
                for (const auto &frame : frame_major) {
                    for (std::size_t n = 0; n < frame.size(); ++n) {
                        replacement[n].push_back(frame[n]);
                    }
                }
            }
            directive.replacement = std::move(replacement);
        } else {
            fail(ErrorCode::InvalidArgument, "unknown directive kind '" + kind + "'");
        }
        directive.mask = read_mask(rest);
        directives.push_back(std::move(directive));
    }
    write_scene(o.out, edit_motion(scene, directives));
    return 0;
}

int run_eval_cam(const Options &o) {
    const auto k = default_intrinsics(2, 2);
    const auto a = trajectory_from_poses(read_poses(o.pose_a), k);
    const auto b = trajectory_from_poses(read_poses(o.pose_b), k);
    std::printf("RotErr %.6f\nTransErr %.6f\n", rot_err(a, b), trans_err(a, b));
    return 0;
}

int run_serve(const Options &o) {
    RenderService service;
    HttpServer server(service);
    const int port = server.bind(o.host, o.port >= 0 ? o.port : port_from_env(8080));
    std::cout << "listening " << o.host << ":" << port << std::endl;
    server.listen();
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"motionrep: 3D-aware motion control signals"};
    app.require_subcommand(1);
    Options o;
    int (*handler)(const Options &) = nullptr;

    auto *curate = app.add_subcommand("curate", "tracks + poses -> scene document");
    curate->add_option("tracks", o.tracks, "TRK1 track file")->required()->check(CLI::ExistingFile);
    curate->add_option("poses", o.poses, "pose text file")->required()->check(CLI::ExistingFile);
    curate->add_option("--width", o.width)->required();
    curate->add_option("--height", o.height)->required();
    curate->add_option("-o,--out", o.out)->required();
    curate->callback([&] { handler = run_curate; });

    auto *score = app.add_subcommand("score", "directory of .flo files -> motion score");
    score->add_option("flow_dir", o.flow_dir)->required()->check(CLI::ExistingDirectory);
    score->callback([&] { handler = run_score; });

    auto *filter = app.add_subcommand("filter", "score manifest -> keep list");
    filter->add_option("manifest", o.manifest)->required()->check(CLI::ExistingFile);
    filter->add_option("-p,--percentile", o.percentile)->check(CLI::Range(0.0, 100.0));
    filter->add_option("-o,--out", o.out);
    filter->callback([&] { handler = run_filter; });

    auto *render = app.add_subcommand("render", "scene document -> layer images");
    render->add_option("scene", o.scene)->required()->check(CLI::ExistingFile);
    render->add_option("-o,--out", o.out)->required();
    render->add_option("--reference", o.reference, "PNG for the composite")->check(CLI::ExistingFile);
    render->add_option("--opacity", o.opacity)->check(CLI::Range(0.0, 1.0));
    render->add_option("--threads", o.threads);
    render->callback([&] { handler = run_render; });

    auto *camgen = app.add_subcommand("camgen", "camera move -> pose file");
    camgen->add_option("--kind", o.kind)->required();
    camgen->add_option("--magnitude", o.magnitude);
    camgen->add_option("--frames", o.frames);
    camgen->add_option("--pivot-distance", o.pivot);
    camgen->add_option("--compose-kind", o.compose_kind);
    camgen->add_option("--compose-magnitude", o.compose_magnitude);
    camgen->add_option("--width", o.width)->default_val(512);
    camgen->add_option("--height", o.height)->default_val(512);
    camgen->add_option("-o,--out", o.out);
    camgen->callback([&] { handler = run_camgen; });

    auto *sparse = app.add_subcommand("sparsify", "scene + mask -> reduced scene");
    sparse->add_option("scene", o.scene)->required()->check(CLI::ExistingFile);
    sparse->add_option("mask", o.mask)->required()->check(CLI::ExistingFile);
    sparse->add_option("--seed", o.seed)->required();
    sparse->add_option("-o,--out", o.out)->required();
    sparse->callback([&] { handler = run_sparsify; });

    auto *lift = app.add_subcommand("lift", "drawn trajectory -> scene with an added sphere");
    lift->add_option("scene", o.scene)->required()->check(CLI::ExistingFile);
    lift->add_option("trajectory", o.trajectory, "lines of 'u v' or 'x y z'")
        ->required()
        ->check(CLI::ExistingFile);
    lift->add_option("--depth", o.depth)->check(CLI::ExistingFile);
    lift->add_option("--depth-hint", o.depth_hint);
    lift->add_option("-o,--out", o.out)->required();
    lift->callback([&] { handler = run_lift; });

    auto *transfer = app.add_subcommand("transfer", "source scene + pairs -> target scene");
    transfer->add_option("scene", o.scene)->required()->check(CLI::ExistingFile);
    transfer->add_option("pairs", o.pairs, "lines of 'su sv tu tv'")
        ->required()
        ->check(CLI::ExistingFile);
    transfer->add_option("target_depth", o.target_depth)->required()->check(CLI::ExistingFile);
    transfer->add_option("-o,--out", o.out)->required();
    transfer->callback([&] { handler = run_transfer; });

    auto *edit = app.add_subcommand("edit", "apply masked edit directives in order");
    edit->add_option("scene", o.scene)->required()->check(CLI::ExistingFile);
    edit->add_option("-d,--directive", o.directives,
                     "freeze_spheres:MASK | freeze_camera:MASK | replace:MASK:TRACKS")
        ->required();
    edit->add_option("-o,--out", o.out)->required();
    edit->callback([&] { handler = run_edit; });

    auto *eval = app.add_subcommand("eval-cam", "two pose files -> RotErr / TransErr");
    eval->add_option("a", o.pose_a)->required()->check(CLI::ExistingFile);
    eval->add_option("b", o.pose_b)->required()->check(CLI::ExistingFile);
    eval->callback([&] { handler = run_eval_cam; });

    auto *serve = app.add_subcommand("serve", "start the HTTP rendering service");
    serve->add_option("--host", o.host);
    serve->add_option("--port", o.port, std::string("defaults to $") + kPortEnvVar + " or 8080");
    serve->callback([&] { handler = run_serve; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error usage " << e.what() << "\n";
        return 2;
    }

    try {
        return handler(o);
    } catch (const Error &e) {
        std::cerr << "error " << to_string(e.code()) << " " << e.what() << "\n";
    } catch (const std::exception &e) {
        std::cerr << "error internal " << e.what() << "\n";
    }
    return 1;
}
