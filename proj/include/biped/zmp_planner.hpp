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

// Velocity command -> footstep plan -> sampled ZMP reference, plus the
// leg-length driven CoM height profile.

#ifndef BIPED_ZMP_PLANNER_HPP
#define BIPED_ZMP_PLANNER_HPP

#include <biped/model.hpp>
#include <biped/support_polygon.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace biped {

struct InitialStance {
    FrameTransform left;
    FrameTransform right;
};

/// Both feet on the ground, hip-width apart, under a body at the origin.
inline InitialStance default_stance(const RobotParams &p) {
    return {FrameTransform({0.0, p.hip_offset_y, 0.0}, 0.0, 0.0, 0.0),
            FrameTransform({0.0, -p.hip_offset_y, 0.0}, 0.0, 0.0, 0.0)};
}

struct PlannerConfig {
    /// Clamp per-step displacements to the limits instead of rejecting.
    bool clamp_steps = true;
    /// Relative slack allowed before a command is rejected in reject mode.
    double limit_tolerance = 1e-9;
    /// Foot that carries the body during the first step.
    Side first_support = Side::Right;
};

/// Footsteps are support placements: steps[i] carries the body during
/// [t_start, t_end] while the other foot swings.
struct FootstepPlan {
    std::vector<Footstep> steps;
    InitialStance initial_stance;

    double duration() const { return steps.empty() ? 0.0 : steps.back().t_end - steps.front().t_start; }
    double step_duration() const { return steps.empty() ? 0.0 : steps.front().t_end - steps.front().t_start; }

    /// Index of the step whose interval contains t (the last one at the very end).
    std::size_t step_at(double t) const {
        const double T = step_duration();
        const double rel = (t - steps.front().t_start) / T;
        const auto i = static_cast<long>(std::floor(rel + 1e-9));
        return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(steps.size()) - 1));
    }
};

/// Largest command the step limits admit for a step duration T.
inline GaitCommand command_limits(const RobotParams &p) {
    return {p.max_step_len / p.step_duration_T, p.max_step_width / p.step_duration_T,
            p.max_step_yaw / p.step_duration_T};
}

namespace detail {

inline double limit_axis(double value, double limit, const PlannerConfig &cfg, const char *axis) {
    if (std::abs(value) <= limit) return value;
    if (!cfg.clamp_steps && std::abs(value) > limit * (1.0 + cfg.limit_tolerance))
        throw ValidationError(std::string("command exceeds step limit on axis ") + axis + ": " +
                              std::to_string(value) + " > " + std::to_string(limit));
    return std::copysign(limit, value);
}

inline FrameTransform foot_frame(const Footstep &s) {
    return FrameTransform({s.pos_x, s.pos_y, 0.0}, 0.0, 0.0, s.yaw);
}

} // namespace detail

/// Places n_steps alternating support footsteps. Each new placement advances
/// the body path by (vx*T, vy*T) in the accumulated heading, turns it by
/// omega*T and puts the foot hip_offset_y to its side of the path.
inline FootstepPlan plan_footsteps(const GaitCommand &cmd, const RobotParams &p, std::size_t n_steps,
                                   const InitialStance &stance, const PlannerConfig &cfg = {}) {
    if (n_steps < 2) throw ValidationError("n_steps must be at least 2");
    if (!std::isfinite(cmd.vx) || !std::isfinite(cmd.vy) || !std::isfinite(cmd.omega))
        throw ValidationError("gait command must be finite");
    const double T = p.step_duration_T;
    const double sx = detail::limit_axis(cmd.vx * T, p.max_step_len, cfg, "vx");
    const double sy = detail::limit_axis(cmd.vy * T, p.max_step_width, cfg, "vy");
    const double syaw = detail::limit_axis(cmd.omega * T, p.max_step_yaw, cfg, "omega");

    FootstepPlan plan;
    plan.initial_stance = stance;
    double bx = 0.5 * (stance.left.translation.x() + stance.right.translation.x());
    double by = 0.5 * (stance.left.translation.y() + stance.right.translation.y());
    double byaw = 0.5 * (stance.left.yaw + stance.right.yaw);

    Side side = cfg.first_support;
    const FrameTransform &first = side == Side::Left ? stance.left : stance.right;
    plan.steps.push_back({first.translation.x(), first.translation.y(), first.yaw, side, 0.0, T});
    for (std::size_t i = 1; i < n_steps; ++i) {
        const double c = std::cos(byaw), s = std::sin(byaw);
        bx += c * sx - s * sy;
        by += s * sx + c * sy;
        byaw += syaw;
        side = opposite(side);
        const double off = side_sign(side) * p.hip_offset_y;
        const double c2 = std::cos(byaw), s2 = std::sin(byaw);
        const double t0 = static_cast<double>(i) * T;
        plan.steps.push_back({bx - s2 * off, by + c2 * off, byaw, side, t0, t0 + T});
    }
    return plan;
}

/// Where the swing foot of step i lifts off.
inline FrameTransform swing_origin(const FootstepPlan &plan, std::size_t i) {
    if (i > 0) return detail::foot_frame(plan.steps[i - 1]);
    return plan.steps[0].side == Side::Left ? plan.initial_stance.right : plan.initial_stance.left;
}

/// Where the swing foot of step i lands. After the final step the swing
/// foot closes next to the support foot.
inline FrameTransform swing_target(const FootstepPlan &plan, std::size_t i, const RobotParams &p) {
    if (i + 1 < plan.steps.size()) return detail::foot_frame(plan.steps[i + 1]);
    const Footstep &s = plan.steps[i];
    const double off = -side_sign(s.side) * 2.0 * p.hip_offset_y;
    return FrameTransform({s.pos_x - std::sin(s.yaw) * off, s.pos_y + std::cos(s.yaw) * off, 0.0}, 0.0,
                          0.0, s.yaw);
}

/// Body heading at time t, linearly blended between consecutive placements.
inline double plan_yaw_at(const FootstepPlan &plan, double t) {
    const std::size_t i = plan.step_at(t);
    const Footstep &s = plan.steps[i];
    if (i + 1 >= plan.steps.size()) return s.yaw;
    const double a = std::clamp((t - s.t_start) / (s.t_end - s.t_start), 0.0, 1.0);
    return normalize_angle(s.yaw + a * normalize_angle(plan.steps[i + 1].yaw - s.yaw));
}

enum class ContactPhase { Double, Single };

struct ContactState {
    ContactPhase phase = ContactPhase::Double;
    std::size_t step = 0;
    /// Swing progress in [0,1] during single support.
    double swing_phase = 0.0;
    FrameTransform support;
    /// Non-support foot: on the ground in double support, in the air otherwise.
    FrameTransform other_planned;
};

/// Contact bookkeeping: the swing happens in the middle (1 - ratio) of every
/// step, leaving a double-support window of ratio*T centred on each exchange.
inline ContactState contact_at(const FootstepPlan &plan, const RobotParams &p, double t) {
    ContactState c;
    c.step = plan.step_at(t);
    const Footstep &s = plan.steps[c.step];
    c.support = detail::foot_frame(s);
    const double T = s.t_end - s.t_start;
    const double half = 0.5 * p.double_support_ratio * T;
    const double lift = s.t_start + half, touch = s.t_end - half;
    if (t < lift) {
        c.other_planned = swing_origin(plan, c.step);
    } else if (t > touch) {
        c.other_planned = swing_target(plan, c.step, p);
        c.swing_phase = 1.0;
    } else {
        c.phase = ContactPhase::Single;
        c.swing_phase = touch > lift ? (t - lift) / (touch - lift) : 1.0;
    }
    return c;
}

/// Support polygon for a contact state: the support sole alone in single
/// support, the hull of both soles otherwise.
inline SupportPolygon support_polygon(const ContactState &c, const RobotParams &p) {
    const auto sole = [&](const FrameTransform &f) {
        return foot_polygon(f.translation.x(), f.translation.y(), f.yaw, p.foot_length, p.foot_width);
    };
    if (c.phase == ContactPhase::Single) return sole(c.support);
    return merge_polygons(sole(c.support), sole(c.other_planned));
}

inline std::size_t sample_count(double duration, double dt) {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

/// ZMP at the support-foot centre in single support, linear ramps between
/// consecutive foot centres over each double-support window.
inline ZmpReference generate_zmp_reference(const FootstepPlan &plan, const RobotParams &p) {
    if (plan.steps.empty()) throw ValidationError("empty footstep plan");
    for (std::size_t i = 1; i < plan.steps.size(); ++i) {
        if (plan.steps[i].side == plan.steps[i - 1].side)
            throw ValidationError("footstep plan does not alternate sides at step " + std::to_string(i));
        if (std::abs(plan.steps[i].t_start - plan.steps[i - 1].t_end) > 1e-9)
            throw ValidationError("footstep plan is not contiguous at step " + std::to_string(i));
    }
    ZmpReference ref;
    ref.dt = p.dt;
    const std::size_t n = sample_count(plan.duration(), p.dt);
    ref.samples.reserve(n);
    const double half = 0.5 * p.double_support_ratio * plan.step_duration();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = plan.steps.front().t_start + static_cast<double>(k) * p.dt;
        const std::size_t i = plan.step_at(t);
        const Footstep &s = plan.steps[i];
        PlanarPoint z{s.pos_x, s.pos_y};
        auto blend = [&](const Footstep &a, const Footstep &b, double t0) {
            const double alpha = std::clamp((t - t0) / (2.0 * half), 0.0, 1.0);
            z = {a.pos_x + alpha * (b.pos_x - a.pos_x), a.pos_y + alpha * (b.pos_y - a.pos_y)};
        };
        if (half > 0.0 && i > 0 && t - s.t_start < half)
            blend(plan.steps[i - 1], s, s.t_start - half);
        else if (half > 0.0 && i + 1 < plan.steps.size() && s.t_end - t < half)
            blend(s, plan.steps[i + 1], s.t_end - half);
        ref.samples.push_back(z);
    }
    return ref;
}

struct HeightProfile {
    double dt = 0.0;
    std::vector<double> z_samples;
    std::vector<double> az_samples;
};

/// Second difference of z: central inside, one-sided at both ends.
inline std::vector<double> second_difference(const std::vector<double> &z, double dt) {
    const std::size_t n = z.size();
    std::vector<double> a(n, 0.0);
    if (n < 3) return a;
    const double inv = 1.0 / (dt * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) a[i] = (z[i - 1] - 2.0 * z[i] + z[i + 1]) * inv;
    a[0] = (z[0] - 2.0 * z[1] + z[2]) * inv;
    a[n - 1] = (z[n - 3] - 2.0 * z[n - 2] + z[n - 1]) * inv;
    return a;
}

/// CoM height limited by leg reach: z = min(h, sqrt(L^2 - d^2) - margin),
/// with d the horizontal distance from the support foot to the ground
/// projection of the support-side hip.
inline HeightProfile compute_height_profile(const FootstepPlan &plan, const std::vector<PlanarPoint> &com_xy,
                                            const RobotParams &p, double margin = 0.01) {
    const double L = p.leg_length();
    HeightProfile hp;
    hp.dt = p.dt;
    hp.z_samples.reserve(com_xy.size());
    for (std::size_t k = 0; k < com_xy.size(); ++k) {
        const double t = plan.steps.front().t_start + static_cast<double>(k) * p.dt;
        const Footstep &s = plan.steps[plan.step_at(t)];
        const double yaw = plan_yaw_at(plan, t);
        const double off = side_sign(s.side) * p.hip_offset_y;
        const double hx = com_xy[k].x - std::sin(yaw) * off;
        const double hy = com_xy[k].y + std::cos(yaw) * off;
        const double d = std::hypot(s.pos_x - hx, s.pos_y - hy);
        if (d >= L)
            throw ValidationError("leg cannot reach support foot at sample " + std::to_string(k) +
                                  " (d = " + std::to_string(d) + " m, reach " + std::to_string(L) + " m)");
        const double z = std::min(p.nominal_com_height_h, std::sqrt(L * L - d * d) - margin);
        if (!(z > 0.0))
            throw ValidationError("non-positive com height at sample " + std::to_string(k));
        hp.z_samples.push_back(z);
    }
    hp.az_samples = second_difference(hp.z_samples, p.dt);
    return hp;
}

/// Flat profile at the nominal height.
inline HeightProfile constant_height(std::size_t n, const RobotParams &p) {
    return {p.dt, std::vector<double>(n, p.nominal_com_height_h), std::vector<double>(n, 0.0)};
}

} // namespace biped

#endif
