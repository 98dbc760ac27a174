// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/io.hpp"

#include <Eigen/SVD>
#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace motionrep {

namespace {

constexpr float kFlowMagic = 202021.25f;
constexpr char kTrackMagic[4] = {'T', 'R', 'K', '1'};

/// Little-endian cursor over a byte buffer; every read is bounds-checked and
/// failures name the byte offset.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string what)
        : bytes_(bytes), what_(std::move(what)) {}

    std::size_t offset() const { return offset_; }
    std::size_t remaining() const { return bytes_.size() - offset_; }

    void need(std::size_t count, const char *field) const {
        if (remaining() < count) {
            fail(ErrorCode::Truncated, what_ + ": truncated at byte offset " +
                                           std::to_string(offset_) + " reading " + field +
                                           " (need " + std::to_string(count) + " bytes, have " +
                                           std::to_string(remaining()) + ")");
        }
    }

    std::uint32_t u32(const char *field) {
        need(4, field);
        const std::uint32_t v = static_cast<std::uint32_t>(bytes_[offset_]) |
                                static_cast<std::uint32_t>(bytes_[offset_ + 1]) << 8 |
                                static_cast<std::uint32_t>(bytes_[offset_ + 2]) << 16 |
                                static_cast<std::uint32_t>(bytes_[offset_ + 3]) << 24;
        offset_ += 4;
        return v;
    }

    std::int32_t i32(const char *field) { return static_cast<std::int32_t>(u32(field)); }

    float f32(const char *field) { return std::bit_cast<float>(u32(field)); }

    float finite_f32(const char *field) {
        const std::size_t at = offset_;
        const float v = f32(field);
        if (!std::isfinite(v)) {
            fail(ErrorCode::ParseError,
                 what_ + ": non-finite " + field + " at byte offset " + std::to_string(at));
        }
        return v;
    }

    void finish(ReaderOptions options) const {
        if (remaining() == 0) {
            return;
        }
        const std::string msg = what_ + ": " + std::to_string(remaining()) +
                                " trailing bytes after byte offset " + std::to_string(offset_);
        if (options.trailing == TrailingData::Reject) {
            fail(ErrorCode::ParseError, msg);
        }
        std::cerr << "warning: " << msg << "\n";
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::string what_;
    std::size_t offset_ = 0;
};

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put_f32(std::vector<std::uint8_t> &out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

constexpr double kImportTolerance = 1e-3;

Mat3d nearest_rotation(const Mat3d &m) {
    const Eigen::JacobiSVD<Mat3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

std::string read_text(const std::filesystem::path &path) {
    const auto bytes = read_file(path);
    return std::string(bytes.begin(), bytes.end());
}

} // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoError, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        fail(ErrorCode::IoError, "short write to " + path.string());
    }
}

FlowField parse_flow(std::span<const std::uint8_t> bytes, ReaderOptions options) {
    ByteReader r(bytes, "flow");
    const float magic = r.f32("magic");
    if (magic != kFlowMagic) {
        fail(ErrorCode::BadMagic, "flow: bad magic at byte offset 0");
    }
    const std::int32_t width = r.i32("width");
    const std::int32_t height = r.i32("height");
    if (width <= 0 || height <= 0) {
        fail(ErrorCode::ParseError, "flow: non-positive dimensions at byte offset 4");
    }
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    r.need(count * 8, "flow vectors");
    FlowField flow;
    flow.width = width;
    flow.height = height;
    flow.vectors.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const float u = r.finite_f32("u");
        const float v = r.finite_f32("v");
        flow.vectors.emplace_back(u, v);
    }
    r.finish(options);
    return flow;
}

FlowField read_flow(const std::filesystem::path &path, ReaderOptions options) {
    return parse_flow(read_file(path), options);
}

std::vector<std::uint8_t> encode_flow(const FlowField &flow) {
    std::vector<std::uint8_t> out;
    out.reserve(12 + flow.vectors.size() * 8);
    put_f32(out, kFlowMagic);
    put_u32(out, static_cast<std::uint32_t>(flow.width));
    put_u32(out, static_cast<std::uint32_t>(flow.height));
    for (const auto &v : flow.vectors) {
        put_f32(out, v.x());
        put_f32(out, v.y());
    }
    return out;
}

TrackArray parse_tracks(std::span<const std::uint8_t> bytes, ReaderOptions options) {
    ByteReader r(bytes, "tracks");
    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kTrackMagic, 4) != 0) {
        fail(ErrorCode::BadMagic, "tracks: expected TRK1 magic at byte offset 0");
    }
    r.u32("magic");
    const std::uint32_t frames = r.u32("frame count");
    const std::uint32_t points = r.u32("point count");
    const std::uint64_t floats = std::uint64_t{frames} * points * 3;
    r.need(static_cast<std::size_t>(floats * 4), "track positions");
    TrackArray tracks(frames, std::vector<Vec3d>(points));
    for (auto &frame : tracks) {
        for (auto &p : frame) {
            const double x = r.finite_f32("x");
            const double y = r.finite_f32("y");
            const double z = r.finite_f32("z");
            p = Vec3d(x, y, z);
        }
    }
    r.finish(options);
    return tracks;
}

TrackArray read_tracks(const std::filesystem::path &path, ReaderOptions options) {
    return parse_tracks(read_file(path), options);
}

std::vector<std::uint8_t> encode_tracks(const TrackArray &tracks) {
    std::vector<std::uint8_t> out(kTrackMagic, kTrackMagic + 4);
    const std::size_t points = tracks.empty() ? 0 : tracks.front().size();
    put_u32(out, static_cast<std::uint32_t>(tracks.size()));
    put_u32(out, static_cast<std::uint32_t>(points));
    for (const auto &frame : tracks) {
        if (frame.size() != points) {
            fail(ErrorCode::InvalidArgument, "encode_tracks: ragged track array");
        }
        for (const auto &p : frame) {
            put_f32(out, static_cast<float>(p.x()));
            put_f32(out, static_cast<float>(p.y()));
            put_f32(out, static_cast<float>(p.z()));
        }
    }
    return out;
}

std::vector<CameraPose> parse_poses(const std::string &text, const std::string &source) {
    std::vector<CameraPose> poses;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        std::istringstream fields(line);
        std::vector<double> values;
        std::string token;
        while (fields >> token) {
            char *end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
                fail(ErrorCode::ParseError, where + ": invalid number '" + token + "'");
            }
            values.push_back(v);
        }
        CameraPose pose;
        if (values.size() == 12) {
            pose.rotation << values[0], values[1], values[2], values[4], values[5], values[6],
                values[8], values[9], values[10];
            pose.translation << values[3], values[7], values[11];
            // Exporters print limited digits; accept small drift and snap to
            // the nearest rotation.
            if (!is_rotation(pose.rotation, kImportTolerance)) {
                fail(ErrorCode::InvalidPose, where + ": rotation is not orthonormal with det +1");
            }
            if (!is_rotation(pose.rotation, 1e-12)) {
                pose.rotation = nearest_rotation(pose.rotation);
            }
        } else if (values.size() == 7) {
            const Vec3d center(values[0], values[1], values[2]);
            Eigen::Quaterniond q(values[6], values[3], values[4], values[5]);
            if (std::abs(q.norm() - 1.0) > kImportTolerance) {
                fail(ErrorCode::InvalidPose, where + ": quaternion is not unit length");
            }
            q.normalize();
            pose.rotation = q.toRotationMatrix().transpose();
            pose.translation = -(pose.rotation * center);
        } else {
            fail(ErrorCode::ParseError, where + ": expected 12 or 7 numbers, found " +
                                            std::to_string(values.size()));
        }
        poses.push_back(pose);
    }
    return poses;
}

std::vector<CameraPose> read_poses(const std::filesystem::path &path) {
    return parse_poses(read_text(path), path.string());
}

std::string format_poses(std::span<const CameraPose> poses) {
    std::string out;
    char buf[32];
    for (const auto &p : poses) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                const double v = c < 3 ? p.rotation(r, c) : p.translation(r);
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out += buf;
                out += (r == 2 && c == 3) ? '\n' : ' ';
            }
        }
    }
    return out;
}

CameraTrajectory trajectory_from_poses(std::span<const CameraPose> poses,
                                       const CameraIntrinsics &intrinsics) {
    CameraTrajectory t;
    t.frames.reserve(poses.size());
    for (const auto &p : poses) {
        t.frames.push_back({intrinsics, p});
    }
    return t;
}

DepthMap parse_depth_text(const std::string &text) {
    std::istringstream in(text);
    int width = 0;
    int height = 0;
    if (!(in >> width >> height) || width <= 0 || height <= 0) {
        fail(ErrorCode::ParseError, "depth grid: first line must be 'W H' with positive values");
    }
    DepthMap depth(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            std::string token;
            if (!(in >> token)) {
                fail(ErrorCode::Truncated, "depth grid: missing value at row " +
                                               std::to_string(y + 1) + ", column " +
                                               std::to_string(x + 1));
            }
            char *end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
                fail(ErrorCode::ParseError, "depth grid: invalid value '" + token + "' at row " +
                                                std::to_string(y + 1) + ", column " +
                                                std::to_string(x + 1));
            }
            depth(x, y) = v;
        }
    }
    std::string extra;
    if (in >> extra) {
        fail(ErrorCode::ParseError, "depth grid: trailing data after " + std::to_string(height) +
                                        " rows");
    }
    return depth;
}

DepthMap read_depth(const std::filesystem::path &path) {
    if (path.extension() == ".png") {
        auto sidecar = path;
        sidecar += ".json";
        double mm_per_unit = 1.0;
        if (std::filesystem::exists(sidecar)) {
            try {
                const auto meta = nlohmann::json::parse(read_text(sidecar));
                mm_per_unit = meta.at("millimeters_per_unit").get<double>();
            } catch (const nlohmann::json::exception &e) {
                fail(ErrorCode::ParseError, sidecar.string() + ": " + e.what());
            }
        } else {
            fail(ErrorCode::IoError, "depth PNG requires sidecar " + sidecar.string());
        }
        return decode_depth_png(read_file(path), mm_per_unit);
    }
    return parse_depth_text(read_text(path));
}

Mask read_mask(const std::filesystem::path &path) { return decode_mask(read_file(path)); }

void write_png(const std::filesystem::path &path, const RgbImage &image) {
    write_file(path, encode_png(image));
}

RgbImage read_png_rgb(const std::filesystem::path &path) { return decode_png_rgb(read_file(path)); }

MotionScene read_scene(const std::filesystem::path &path) { return parse_scene(read_text(path)); }

void write_scene(const std::filesystem::path &path, const MotionScene &scene) {
    const std::string doc = serialize_scene(scene);
    write_file(path, std::span(reinterpret_cast<const std::uint8_t *>(doc.data()), doc.size()));
}

} // namespace motionrep
