// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// File formats:
//   flow   - little-endian: float32 magic 202021.25, int32 width, int32
//            height, then height*width interleaved float32 (u, v), row-major.
//   TRK1   - "TRK1", uint32 L, uint32 N, then L*N*3 float32, frame-major.
//   poses  - text, one frame per line: 12 numbers (row-major world->camera
//            [R|t]) or 7 numbers (tx ty tz qx qy qz qw, camera->world).
//            Blank lines and lines starting with '#' are skipped.
//   masks  - 8-bit grayscale PNG, value > 127 is interior.
//   depth  - 16-bit grayscale PNG with a "<file>.json" sidecar holding
//            {"millimeters_per_unit": k} (depth = raw * k / 1000), or a text
//            grid: "W H" then H rows of W numbers.
//   scene  - JSON scene document, see scene_document.cpp.

#pragma once

#include "motionrep/curation.hpp"
#include "motionrep/image.hpp"
#include "motionrep/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace motionrep {

enum class TrailingData { Reject, Warn };

struct ReaderOptions {
    TrailingData trailing = TrailingData::Reject;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);

FlowField parse_flow(std::span<const std::uint8_t> bytes, ReaderOptions options = {});
FlowField read_flow(const std::filesystem::path &path, ReaderOptions options = {});
std::vector<std::uint8_t> encode_flow(const FlowField &flow);

/// Frame-major: result[l][n].
using TrackArray = std::vector<std::vector<Vec3d>>;

TrackArray parse_tracks(std::span<const std::uint8_t> bytes, ReaderOptions options = {});
TrackArray read_tracks(const std::filesystem::path &path, ReaderOptions options = {});
std::vector<std::uint8_t> encode_tracks(const TrackArray &tracks);

std::vector<CameraPose> parse_poses(const std::string &text, const std::string &source = "poses");
std::vector<CameraPose> read_poses(const std::filesystem::path &path);
/// 12-number lines, round-trip precision.
std::string format_poses(std::span<const CameraPose> poses);

/// Intrinsics are not part of pose files; they are attached here.
CameraTrajectory trajectory_from_poses(std::span<const CameraPose> poses,
                                       const CameraIntrinsics &intrinsics);

// PNG helpers.
std::vector<std::uint8_t> encode_png(const RgbImage &image);
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path &path, const RgbImage &image);
RgbImage read_png_rgb(const std::filesystem::path &path);
std::vector<std::uint8_t> encode_png_gray8(const Grid<std::uint8_t> &image);
std::vector<std::uint8_t> encode_png_gray16(const Grid<std::uint16_t> &image);

/// Interior pixels hold 1, the rest 0.
Mask decode_mask(std::span<const std::uint8_t> png_bytes);
Mask read_mask(const std::filesystem::path &path);

DepthMap decode_depth_png(std::span<const std::uint8_t> png_bytes, double millimeters_per_unit);
DepthMap parse_depth_text(const std::string &text);
/// Dispatches on extension: .png (with sidecar) or text grid.
DepthMap read_depth(const std::filesystem::path &path);

inline constexpr std::string_view kSceneFormat = "motionrep-scene";
inline constexpr std::string_view kSceneVersion = "1";

std::string serialize_scene(const MotionScene &scene);
/// Syntax errors report line/column; invariant violations report the field.
MotionScene parse_scene(const std::string &document);
MotionScene read_scene(const std::filesystem::path &path);
void write_scene(const std::filesystem::path &path, const MotionScene &scene);

} // namespace motionrep
