// Copyright Contributors to the motionrep Project
// SPDX-License-Identifier: Apache-2.0

#include "motionrep/camera.hpp"
#include "motionrep/error.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace motionrep;
using motionrep::testing::Rng;

TEST(DefaultIntrinsics, Resolution768x512) {
    const auto k = default_intrinsics(768, 512);
    EXPECT_EQ(k.fx, 768.0);
    EXPECT_EQ(k.fy, 512.0);
    EXPECT_EQ(k.cx, 384.0);
    EXPECT_EQ(k.cy, 256.0);
}

TEST(DefaultIntrinsics, FloorDivision) {
    const auto k = default_intrinsics(2, 2);
    EXPECT_EQ(k.fx, 2.0);
    EXPECT_EQ(k.cx, 1.0);
    EXPECT_EQ(default_intrinsics(5, 3).cx, 2.0);
    EXPECT_EQ(default_intrinsics(5, 3).cy, 1.0);
}

TEST(DefaultIntrinsics, RejectsEmptyImage) {
    try {
        default_intrinsics(0, 512);
        FAIL() << "expected an error";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(ProjectPoint, PrincipalRay) {
    const auto k = default_intrinsics(768, 512);
    const auto p = project_point(k, CameraPose::identity(), Vec3d(0, 0, 5));
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->u, 384.0, 1e-9);
    EXPECT_NEAR(p->v, 256.0, 1e-9);
    EXPECT_NEAR(p->z, 5.0, 1e-9);
}

TEST(ProjectPoint, OffAxis) {
    const auto k = default_intrinsics(768, 512);
    const auto p = project_point(k, CameraPose::identity(), Vec3d(1, 0, 768));
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->u, 385.0, 1e-9);
    EXPECT_NEAR(p->v, 256.0, 1e-9);
    EXPECT_NEAR(p->z, 768.0, 1e-9);
}

TEST(ProjectPoint, BehindCamera) {
    const auto k = default_intrinsics(768, 512);
    EXPECT_FALSE(project_point(k, CameraPose::identity(), Vec3d(0, 0, -1)));
    EXPECT_FALSE(project_point(k, CameraPose::identity(), Vec3d(0, 0, 1e-6)));
    EXPECT_TRUE(project_point(k, CameraPose::identity(), Vec3d(0, 0, 2e-6)));
}

TEST(UnprojectPixel, PrincipalRayInverse) {
    const auto k = default_intrinsics(768, 512);
    const Vec3d x = unproject_pixel(k, CameraPose::identity(), 384.0, 256.0, 4.0);
    EXPECT_NEAR((x - Vec3d(0, 0, 4)).norm(), 0.0, 1e-9);
}

TEST(UnprojectPixel, NonPositiveDepth) {
    const auto k = default_intrinsics(768, 512);
    for (double d : {0.0, -1.0}) {
        try {
            unproject_pixel(k, CameraPose::identity(), 10.0, 10.0, d);
            FAIL() << "expected an error";
        } catch (const Error &e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        }
    }
}

TEST(UnprojectPixel, RoundTripUnderRandomPoses) {
    Rng rng(11);
    const auto k = default_intrinsics(768, 512);
    for (int i = 0; i < 2000; ++i) {
        const auto pose = motionrep::testing::pose_from_center(
            rng.rotation(M_PI), Vec3d(rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40)));
        const double u = rng.uniform(-100, 900);
        const double v = rng.uniform(-100, 600);
        const double d = rng.uniform(0.01, 200);
        const auto p = project_point(k, pose, unproject_pixel(k, pose, u, v, d));
        ASSERT_TRUE(p);
        EXPECT_NEAR(p->u, u, 1e-6);
        EXPECT_NEAR(p->v, v, 1e-6);
        EXPECT_NEAR(p->z, d, 1e-6);
    }
}

TEST(ProjectPoint, FocalScalingAboutPrincipalPoint) {
    Rng rng(12);
    auto k = default_intrinsics(768, 512);
    auto k2 = k;
    k2.fx *= 2;
    k2.fy *= 2;
    for (int i = 0; i < 500; ++i) {
        const Vec3d x(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.5, 10));
        const auto a = project_point(k, CameraPose::identity(), x);
        const auto b = project_point(k2, CameraPose::identity(), x);
        ASSERT_TRUE(a && b);
        EXPECT_NEAR(b->u, 2 * (a->u - k.cx) + k.cx, 1e-6);
        EXPECT_NEAR(b->v, 2 * (a->v - k.cy) + k.cy, 1e-6);
    }
}

TEST(CameraPose, CompositionAppliesRightOperandFirst) {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        CameraPose a{rng.rotation(M_PI), Vec3d(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.3)};
        CameraPose b{rng.rotation(M_PI), Vec3d(0.1, rng.uniform(-1, 1), rng.uniform(-1, 1))};
        const Vec3d x(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        EXPECT_NEAR(((a * b).apply(x) - a.apply(b.apply(x))).norm(), 0.0, 1e-12);
        EXPECT_NEAR(((a * a.inverse()).rotation - Mat3d::Identity()).norm(), 0.0, 1e-12);
        EXPECT_NEAR((a * a.inverse()).translation.norm(), 0.0, 1e-12);
    }
}

TEST(CameraPose, CenterMatchesMinusRTransposeT) {
    const CameraPose p{rotation_y(0.3), Vec3d(1, 2, 3)};
    EXPECT_NEAR((p.center() + p.rotation.transpose() * p.translation).norm(), 0.0, 1e-15);
    EXPECT_NEAR(p.apply(p.center()).norm(), 0.0, 1e-12);
}

TEST(Rotation, OrthonormalityCheck) {
    EXPECT_TRUE(is_rotation(Mat3d(Mat3d::Identity())));
    EXPECT_TRUE(is_rotation(rotation_x(1.0)));
    Mat3d scaled = Mat3d::Identity() * 1.01;
    EXPECT_FALSE(is_rotation(scaled));
    Mat3d reflection = Mat3d::Identity();
    reflection(0, 0) = -1;
    EXPECT_FALSE(is_rotation(reflection));
    try {
        require_valid_pose(CameraPose{scaled, Vec3d::Zero()}, "frame 3");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidPose);
        EXPECT_NE(std::string(e.what()).find("frame 3"), std::string::npos);
    }
}

TEST(Camera, FloatInstantiation) {
    const auto k = default_intrinsics<float>(64, 32);
    const auto p = project_point(k, CameraPoseT<float>::identity(), Vec3<float>(0, 0, 2));
    ASSERT_TRUE(p);
    EXPECT_FLOAT_EQ(p->u, 32.0f);
    EXPECT_FLOAT_EQ(p->v, 16.0f);
}
