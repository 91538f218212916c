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

#ifndef BIPED_SWING_BALANCE_HPP
#define BIPED_SWING_BALANCE_HPP

#include <biped/model.hpp>
#include <biped/zmp_planner.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace biped {

struct SwingSpec {
    FrameTransform from;
    FrameTransform to;
    double step_height_H = 0.04;
    double duration = 0.4;
};

/// Cycloid swing. With th = 2 pi t the horizontal progress is
/// (th - sin th) / 2 pi of the from->to displacement (x, y and yaw) and the
/// lift is H (1 - cos th) / 2. Both velocities vanish at t = 0 and t = 1.
inline FrameTransform swing_pose(const SwingSpec &spec, double phase) {
    if (!(phase >= 0.0 && phase <= 1.0))
        throw ValidationError("swing phase must lie in [0, 1], got " + std::to_string(phase));
    if (!(spec.duration > 0.0) || spec.step_height_H < 0.0)
        throw ValidationError("swing needs positive duration and non-negative height");
    if (phase == 0.0) return spec.from;
    if (phase == 1.0) return spec.to;
    const double th = 2.0 * std::numbers::pi * phase;
    const double f = (th - std::sin(th)) / (2.0 * std::numbers::pi);
    const double lift = spec.step_height_H * (1.0 - std::cos(th)) / 2.0;
    const Eigen::Vector3d d = spec.to.translation - spec.from.translation;
    Eigen::Vector3d t = spec.from.translation + f * d;
    t.z() = spec.from.translation.z() + lift;
    return {t, spec.from.roll + f * normalize_angle(spec.to.roll - spec.from.roll),
            spec.from.pitch + f * normalize_angle(spec.to.pitch - spec.from.pitch),
            spec.from.yaw + f * normalize_angle(spec.to.yaw - spec.from.yaw)};
}

struct FeetFrames {
    FrameTransform left;
    FrameTransform right;
};

/// World pose of the non-support foot at time t: the cycloid pose in single
/// support, its planned ground frame otherwise.
inline FrameTransform swing_world_pose(const FootstepPlan &plan, const RobotParams &p, double t,
                                       double step_height) {
    const ContactState c = contact_at(plan, p, t);
    if (c.phase == ContactPhase::Double) return c.other_planned;
    const double T = plan.step_duration();
    return swing_pose({swing_origin(plan, c.step), swing_target(plan, c.step, p), step_height,
                       T * (1.0 - p.double_support_ratio)},
                      c.swing_phase);
}

/// Both feet in the CoM frame (origin at the CoM, heading com_yaw, z up).
/// The support foot uses its planned frame, the swing foot the supplied
/// swing pose; in double support both use planned frames.
inline FeetFrames compute_feet_frames(const ComSample &com, double com_yaw, const FootstepPlan &plan,
                                      const FrameTransform &swing_world, const RobotParams &p, double t) {
    const double t0 = plan.steps.front().t_start;
    if (t < t0 - 1e-9 || t > t0 + plan.duration() + 1e-9)
        throw ValidationError("time " + std::to_string(t) + " s outside the plan");
    const ContactState c = contact_at(plan, p, t);
    const FrameTransform other = c.phase == ContactPhase::Double ? c.other_planned : swing_world;
    const FrameTransform to_com = FrameTransform({com.x, com.y, com.z}, 0.0, 0.0, com_yaw).inverse();
    const FrameTransform support = to_com * c.support;
    const FrameTransform moving = to_com * other;
    if (plan.steps[c.step].side == Side::Left) return {support, moving};
    return {moving, support};
}

/// Convenience overload that derives the swing pose from the plan.
inline FeetFrames compute_feet_frames(const ComSample &com, const FootstepPlan &plan, const RobotParams &p,
                                      double t, double step_height) {
    return compute_feet_frames(com, plan_yaw_at(plan, t), plan, swing_world_pose(plan, p, t, step_height), p, t);
}

struct BalanceOutput {
    FeetFrames feet;
    BalanceState state;
    double pitch_correction = 0.0;
    double roll_correction = 0.0;
};

/// Trunk-angle PD. Each correction angle is kp*err + kd*d(err)/dt, clamped
/// to +-max_correction; the foot positions are then re-expressed in the CoM
/// frame rotated by pitch (about y) then roll (about x). Foot orientations
/// keep their planned, ground-parallel values.
inline BalanceOutput active_balance(const FeetFrames &feet, BalanceState state, double dt) {
    if (!(dt > 0.0)) throw ValidationError("balance dt must be positive");
    const double pitch_err = state.trunk_pitch_meas - state.trunk_pitch_des;
    const double roll_err = state.trunk_roll_meas - state.trunk_roll_des;
    auto pd = [&](double err, double prev) {
        const double u = state.kp * err + state.kd * (err - prev) / dt;
        return std::clamp(u, -state.max_correction, state.max_correction);
    };
    BalanceOutput out;
    out.pitch_correction = pd(pitch_err, state.prev_pitch_err);
    out.roll_correction = pd(roll_err, state.prev_roll_err);
    state.prev_pitch_err = pitch_err;
    state.prev_roll_err = roll_err;
    out.state = state;

    if (out.pitch_correction == 0.0 && out.roll_correction == 0.0) {
        out.feet = feet;
        return out;
    }
    const Eigen::Matrix3d frame = (Eigen::AngleAxisd(out.pitch_correction, Eigen::Vector3d::UnitY()) *
                                   Eigen::AngleAxisd(out.roll_correction, Eigen::Vector3d::UnitX()))
                                      .toRotationMatrix();
    auto correct = [&](const FrameTransform &f) {
        FrameTransform g = f;
        g.translation = frame.transpose() * f.translation;
        return g;
    };
    out.feet = {correct(feet.left), correct(feet.right)};
    return out;
}

} // namespace biped

#endif
