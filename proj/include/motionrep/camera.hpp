// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

// Pinhole camera model: intrinsics, world->camera rigid poses and the
// projection / unprojection pair. Everything here is templated on the scalar
// type; the rest of the library works in double through the aliases at the
// bottom.

#pragma once

#include "motionrep/error.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <string>

namespace motionrep {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
struct CameraIntrinsicsT {
    Scalar fx = Scalar(1);
    Scalar fy = Scalar(1);
    Scalar cx = Scalar(0);
    Scalar cy = Scalar(0);

    Mat3<Scalar> matrix() const {
        Mat3<Scalar> k;
        k << fx, Scalar(0), cx, Scalar(0), fy, cy, Scalar(0), Scalar(0), Scalar(1);
        return k;
    }

    bool valid_for(int width, int height) const {
        return fx > Scalar(0) && fy > Scalar(0) && cx >= Scalar(0) && cx < Scalar(width) &&
               cy >= Scalar(0) && cy < Scalar(height);
    }

    bool operator==(const CameraIntrinsicsT &) const = default;
};

/// fx = W, fy = H, principal point at (W // 2, H // 2).
template <typename Scalar = double>
CameraIntrinsicsT<Scalar> default_intrinsics(int width, int height) {
    if (width < 2 || height < 2) {
        fail(ErrorCode::InvalidArgument,
             "default_intrinsics: image must be at least 2x2, got " + std::to_string(width) +
                 "x" + std::to_string(height));
    }
    return {Scalar(width), Scalar(height), Scalar(width / 2), Scalar(height / 2)};
}

/// Rigid world->camera transform, x_cam = rotation * x_world + translation.
template <typename Scalar>
struct CameraPoseT {
    Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
    Vec3<Scalar> translation = Vec3<Scalar>::Zero();

    static CameraPoseT identity() { return {}; }

    Vec3<Scalar> apply(const Vec3<Scalar> &world) const { return rotation * world + translation; }

    CameraPoseT inverse() const {
        CameraPoseT out;
        out.rotation = rotation.transpose();
        out.translation = -(out.rotation * translation);
        return out;
    }

    /// Camera center in world coordinates, -R^T t.
    Vec3<Scalar> center() const { return -(rotation.transpose() * translation); }

    bool operator==(const CameraPoseT &other) const {
        return rotation == other.rotation && translation == other.translation;
    }
};

/// Composition a ∘ b: apply b first, then a.
template <typename Scalar>
CameraPoseT<Scalar> operator*(const CameraPoseT<Scalar> &a, const CameraPoseT<Scalar> &b) {
    CameraPoseT<Scalar> out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

template <typename Scalar>
Scalar orthonormality_error(const Mat3<Scalar> &rotation) {
    return (rotation.transpose() * rotation - Mat3<Scalar>::Identity()).cwiseAbs().maxCoeff();
}

/// Orthonormal with determinant +1, both to `tolerance`.
template <typename Scalar>
bool is_rotation(const Mat3<Scalar> &rotation, Scalar tolerance = Scalar(1e-6)) {
    if (!rotation.allFinite()) {
        return false;
    }
    return orthonormality_error(rotation) < tolerance &&
           std::abs(rotation.determinant() - Scalar(1)) < tolerance;
}

template <typename Scalar>
void require_valid_pose(const CameraPoseT<Scalar> &pose, const std::string &where) {
    if (!is_rotation(pose.rotation) || !pose.translation.allFinite()) {
        fail(ErrorCode::InvalidPose, where + ": rotation is not orthonormal with det +1");
    }
}

/// Camera-frame depths at or below this are treated as behind the camera.
inline constexpr double kBehindCameraEpsilon = 1e-6;

template <typename Scalar>
struct PixelProjection {
    Scalar u;
    Scalar v;
    Scalar z;
};

/// Perspective projection; std::nullopt when the point is behind the camera.
template <typename Scalar>
std::optional<PixelProjection<Scalar>> project_point(const CameraIntrinsicsT<Scalar> &intrinsics,
                                                     const CameraPoseT<Scalar> &pose,
                                                     const Vec3<Scalar> &world) {
    const Vec3<Scalar> cam = pose.apply(world);
    if (!(cam.z() > Scalar(kBehindCameraEpsilon))) {
        return std::nullopt;
    }
    return PixelProjection<Scalar>{intrinsics.fx * cam.x() / cam.z() + intrinsics.cx,
                                   intrinsics.fy * cam.y() / cam.z() + intrinsics.cy, cam.z()};
}

template <typename Scalar>
Vec3<Scalar> unproject_pixel(const CameraIntrinsicsT<Scalar> &intrinsics,
                             const CameraPoseT<Scalar> &pose, Scalar u, Scalar v, Scalar depth) {
    if (!(depth > Scalar(0))) {
        fail(ErrorCode::InvalidArgument, "unproject_pixel: depth must be positive");
    }
    const Vec3<Scalar> cam((u - intrinsics.cx) * depth / intrinsics.fx,
                           (v - intrinsics.cy) * depth / intrinsics.fy, depth);
    return pose.rotation.transpose() * (cam - pose.translation);
}

/// Rotation about the camera y axis (yaw) by `radians`.
template <typename Scalar>
Mat3<Scalar> rotation_y(Scalar radians) {
    return Eigen::AngleAxis<Scalar>(radians, Vec3<Scalar>::UnitY()).toRotationMatrix();
}

template <typename Scalar>
Mat3<Scalar> rotation_x(Scalar radians) {
    return Eigen::AngleAxis<Scalar>(radians, Vec3<Scalar>::UnitX()).toRotationMatrix();
}

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;
using CameraIntrinsics = CameraIntrinsicsT<double>;
using CameraPose = CameraPoseT<double>;

} // namespace motionrep
