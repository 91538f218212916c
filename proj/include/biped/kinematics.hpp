// Copyright 2026 The biped-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Six-joint leg: hip yaw (z), hip roll (x), hip pitch (y), knee pitch (y),
// ankle pitch (y), ankle roll (x). Hip frame: x forward, y left, z up.
// Positive pitch swings a segment backwards, so a forward-pointing knee has
// knee_pitch >= 0.

#ifndef BIPED_KINEMATICS_HPP
#define BIPED_KINEMATICS_HPP

#include <biped/model.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace biped {

struct LegJoints {
    double hip_yaw = 0.0;
    double hip_roll = 0.0;
    double hip_pitch = 0.0;
    double knee_pitch = 0.0;
    double ankle_pitch = 0.0;
    double ankle_roll = 0.0;

    std::array<double, 6> as_array() const {
        return {hip_yaw, hip_roll, hip_pitch, knee_pitch, ankle_pitch, ankle_roll};
    }
    static LegJoints from_array(const std::array<double, 6> &a) { return {a[0], a[1], a[2], a[3], a[4], a[5]}; }
};

inline constexpr std::array<const char *, 6> kJointNames = {"hip_yaw",   "hip_roll",    "hip_pitch",
                                                            "knee_pitch", "ankle_pitch", "ankle_roll"};

struct JointLimits {
    std::array<double, 6> lower;
    std::array<double, 6> upper;
};

/// NAO-like ranges. Yaw and roll ranges are mirrored for the right leg.
inline JointLimits default_joint_limits(Side side) {
    JointLimits left{{-1.0, -0.38, -1.77, 0.0, -1.19, -0.40}, {1.0, 0.79, 0.48, 2.11, 0.92, 0.77}};
    if (side == Side::Left) return left;
    JointLimits right = left;
    for (int i : {0, 1, 5}) {
        right.lower[i] = -left.upper[i];
        right.upper[i] = -left.lower[i];
    }
    return right;
}

inline void check_joint_limits(const LegJoints &j, Side side, const JointLimits &lim) {
    const auto v = j.as_array();
    for (std::size_t i = 0; i < 6; ++i) {
        if (!(v[i] >= lim.lower[i] - 1e-12 && v[i] <= lim.upper[i] + 1e-12))
            throw ValidationError(std::string(side_name(side)) + " " + kJointNames[i] + " = " +
                                  std::to_string(v[i]) + " outside [" + std::to_string(lim.lower[i]) + ", " +
                                  std::to_string(lim.upper[i]) + "]");
    }
}

namespace detail {

inline Eigen::Matrix3d rot_x(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix(); }
inline Eigen::Matrix3d rot_y(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitY()).toRotationMatrix(); }
inline Eigen::Matrix3d rot_z(double a) { return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix(); }

} // namespace detail

/// Sole frame in the hip frame.
inline FrameTransform leg_fk(const LegJoints &j, Side side, const RobotParams &p,
                             const JointLimits &lim) {
    check_joint_limits(j, side, lim);
    using namespace detail;
    const Eigen::Vector3d down(0.0, 0.0, -1.0);
    const Eigen::Matrix3d hip = rot_z(j.hip_yaw) * rot_x(j.hip_roll) * rot_y(j.hip_pitch);
    const Eigen::Matrix3d shank = hip * rot_y(j.knee_pitch);
    const Eigen::Matrix3d foot = shank * rot_y(j.ankle_pitch) * rot_x(j.ankle_roll);
    const Eigen::Vector3d sole = hip * (p.thigh_len * down) + shank * (p.shank_len * down) + foot * (p.ankle_height * down);
    return FrameTransform::from_matrix(sole, foot);
}

inline FrameTransform leg_fk(const LegJoints &j, Side side, const RobotParams &p) {
    return leg_fk(j, side, p, default_joint_limits(side));
}

/// Closed-form IK, knee-forward branch. The knee comes from the hip-ankle
/// distance, the ankle angles from the hip position seen from the foot, and
/// the hip angles from the residual rotation.
inline LegJoints leg_ik(const FrameTransform &target, Side side, const RobotParams &p, const JointLimits &lim) {
    using namespace detail;
    const double t = p.thigh_len, s = p.shank_len;
    const Eigen::Matrix3d R = target.rotation();
    const Eigen::Vector3d ankle = target.translation + R * Eigen::Vector3d(0.0, 0.0, p.ankle_height);
    const Eigen::Vector3d r = R.transpose() * (-ankle); // hip seen from the ankle, foot axes
    const double d = r.norm();
    constexpr double tol = 1e-9;
    if (d > t + s + tol || d < std::abs(t - s) - tol)
        throw ValidationError(std::string(side_name(side)) + " leg target unreachable: hip-ankle distance " +
                              std::to_string(d) + " m, reach [" + std::to_string(std::abs(t - s)) + ", " +
                              std::to_string(t + s) + "] m");
    LegJoints j;
    const double cos_knee = std::clamp((d * d - t * t - s * s) / (2.0 * t * s), -1.0, 1.0);
    j.knee_pitch = std::acos(cos_knee);
    j.ankle_roll = std::atan2(r.y(), r.z());
    const double vz = std::hypot(r.y(), r.z());
    j.ankle_pitch = std::atan2(-r.x(), vz) - std::atan2(t * std::sin(j.knee_pitch), s + t * std::cos(j.knee_pitch));
    const Eigen::Matrix3d Q = R * rot_x(-j.ankle_roll) * rot_y(-(j.knee_pitch + j.ankle_pitch));
    j.hip_roll = std::atan2(Q(2, 1), std::hypot(Q(0, 1), Q(1, 1)));
    j.hip_yaw = std::atan2(-Q(0, 1), Q(1, 1));
    j.hip_pitch = std::atan2(-Q(2, 0), Q(2, 2));
    check_joint_limits(j, side, lim);
    return j;
}

inline LegJoints leg_ik(const FrameTransform &target, Side side, const RobotParams &p) {
    return leg_ik(target, side, p, default_joint_limits(side));
}

/// Hip joint centre in the CoM frame.
inline Eigen::Vector3d hip_in_com(Side side, const RobotParams &p) {
    return {0.0, side_sign(side) * p.hip_offset_y, 0.0};
}

/// Solves both legs from feet-in-CoM frames. Failures on either side are
/// collected and reported together.
inline std::pair<LegJoints, LegJoints> lower_body_ik(const FrameTransform &left, const FrameTransform &right,
                                                     const RobotParams &p) {
    std::string errors;
    LegJoints out[2];
    const std::pair<Side, const FrameTransform *> legs[2] = {{Side::Left, &left}, {Side::Right, &right}};
    for (int i = 0; i < 2; ++i) {
        FrameTransform target = *legs[i].second;
        target.translation -= hip_in_com(legs[i].first, p);
        try {
            out[i] = leg_ik(target, legs[i].first, p);
        } catch (const ValidationError &e) {
            if (!errors.empty()) errors += "; ";
            errors += e.what();
        }
    }
    if (!errors.empty()) throw ValidationError(errors);
    return {out[0], out[1]};
}

} // namespace biped

#endif
