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

// Shared domain types for the gait toolkit. Everything is SI: metres,
// seconds, kilograms, radians.

#ifndef BIPED_MODEL_HPP
#define BIPED_MODEL_HPP

#include <biped/errors.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace biped {

/// Lower bound on g + z'' before the ZMP formula is considered singular.
inline constexpr double kSingularityEps = 1e-3;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    constexpr double pi = std::numbers::pi;
    if (a > -pi && a <= pi) return a;
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

struct RobotParams {
    double mass_M = 5.2;
    double gravity_g = 9.81;
    double thigh_len = 0.14;
    double shank_len = 0.14;
    double hip_offset_y = 0.05;
    double ankle_height = 0.05;
    double nominal_com_height_h = 0.30;
    double foot_length = 0.16;
    double foot_width = 0.08;
    double max_step_len = 0.10;
    double max_step_width = 0.05;
    double max_step_yaw = 0.35;
    double step_duration_T = 0.5;
    double double_support_ratio = 0.2;
    double dt = 0.01;

    /// Hip joint to sole with the leg straight.
    double leg_length() const { return thigh_len + shank_len + ankle_height; }
};

/// Checks every RobotParams invariant and returns the input unchanged.
/// Throws ValidationError naming the first violated field.
inline RobotParams validate_params(const RobotParams &p) {
    auto positive = [](double v, const char *name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(std::string(name) + " must be positive");
    };
    positive(p.mass_M, "mass_M");
    positive(p.gravity_g, "gravity_g");
    positive(p.thigh_len, "thigh_len");
    positive(p.shank_len, "shank_len");
    positive(p.hip_offset_y, "hip_offset_y");
    positive(p.ankle_height, "ankle_height");
    positive(p.nominal_com_height_h, "nominal_com_height_h");
    positive(p.foot_length, "foot_length");
    positive(p.foot_width, "foot_width");
    positive(p.max_step_len, "max_step_len");
    positive(p.max_step_width, "max_step_width");
    positive(p.max_step_yaw, "max_step_yaw");
    positive(p.step_duration_T, "step_duration_T");
    positive(p.dt, "dt");
    if (!(p.nominal_com_height_h < p.leg_length()))
        throw ValidationError("com height unreachable: nominal_com_height_h must be below "
                              "thigh_len + shank_len + ankle_height");
    if (!(p.double_support_ratio >= 0.0 && p.double_support_ratio <= 0.5))
        throw ValidationError("double_support_ratio must lie in [0, 0.5]");
    return p;
}

struct GaitCommand {
    double vx = 0.0;    // m/s
    double vy = 0.0;    // m/s
    double omega = 0.0; // rad/s
};

enum class Side { Left, Right };

inline Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
inline double side_sign(Side s) { return s == Side::Left ? 1.0 : -1.0; }
inline const char *side_name(Side s) { return s == Side::Left ? "left" : "right"; }

struct Footstep {
    double pos_x = 0.0;
    double pos_y = 0.0;
    double yaw = 0.0;
    Side side = Side::Left;
    double t_start = 0.0;
    double t_end = 0.0;
};

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

struct ZmpReference {
    double dt = 0.0;
    std::vector<PlanarPoint> samples;
};

struct ComSample {
    double x = 0.0, y = 0.0, z = 0.0;
    double ax = 0.0, ay = 0.0, az = 0.0;
};

struct ComTrajectory {
    double dt = 0.0;
    std::vector<ComSample> samples;
};

/// Rigid transform. Rotation is fixed-axis X-Y-Z roll/pitch/yaw, i.e.
/// R = Rz(yaw) * Ry(pitch) * Rx(roll).
class FrameTransform {
public:
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;

    FrameTransform() = default;
    FrameTransform(const Eigen::Vector3d &t, double r, double p, double y)
        : translation(t), roll(normalize_angle(r)), pitch(normalize_angle(p)),
          yaw(normalize_angle(y)) {}

    static FrameTransform identity() { return {}; }

    static FrameTransform from_matrix(const Eigen::Vector3d &t, const Eigen::Matrix3d &R) {
        const double pitch = std::atan2(-R(2, 0), std::hypot(R(0, 0), R(1, 0)));
        const double roll = std::atan2(R(2, 1), R(2, 2));
        const double yaw = std::atan2(R(1, 0), R(0, 0));
        return {t, roll, pitch, yaw};
    }

    Eigen::Matrix3d rotation() const {
        return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
            .toRotationMatrix();
    }

    Eigen::Vector3d apply(const Eigen::Vector3d &point) const {
        return rotation() * point + translation;
    }

    FrameTransform inverse() const {
        const Eigen::Matrix3d Rt = rotation().transpose();
        return from_matrix(-Rt * translation, Rt);
    }

    /// this * other: `other` expressed in the frame this transform maps from.
    FrameTransform operator*(const FrameTransform &other) const {
        const Eigen::Matrix3d R = rotation();
        return from_matrix(R * other.translation + translation, R * other.rotation());
    }
};

struct BalanceState {
    double trunk_pitch_meas = 0.0;
    double trunk_roll_meas = 0.0;
    double trunk_pitch_des = 0.0;
    double trunk_roll_des = 0.0;
    double kp = 0.3;
    double kd = 0.005;
    // Reserved integral gain; the controller is PD and ignores it while zero.
    double ki = 0.0;
    double max_correction = 0.35;
    double prev_pitch_err = 0.0;
    double prev_roll_err = 0.0;
};

// --- JSON config --------------------------------------------------------

inline void to_json(nlohmann::json &j, const RobotParams &p) {
    j = nlohmann::json{{"mass_M", p.mass_M},
                       {"gravity_g", p.gravity_g},
                       {"thigh_len", p.thigh_len},
                       {"shank_len", p.shank_len},
                       {"hip_offset_y", p.hip_offset_y},
                       {"ankle_height", p.ankle_height},
                       {"nominal_com_height_h", p.nominal_com_height_h},
                       {"foot_length", p.foot_length},
                       {"foot_width", p.foot_width},
                       {"max_step_len", p.max_step_len},
                       {"max_step_width", p.max_step_width},
                       {"max_step_yaw", p.max_step_yaw},
                       {"step_duration_T", p.step_duration_T},
                       {"double_support_ratio", p.double_support_ratio},
                       {"dt", p.dt}};
}

/// Missing keys keep their defaults; unknown keys are rejected so that a
/// misspelt field never silently falls back to a default.
inline void from_json(const nlohmann::json &j, RobotParams &p) {
    static const char *known[] = {"mass_M",       "gravity_g",          "thigh_len",
                                  "shank_len",    "hip_offset_y",       "ankle_height",
                                  "nominal_com_height_h", "foot_length", "foot_width",
                                  "max_step_len", "max_step_width",     "max_step_yaw",
                                  "step_duration_T", "double_support_ratio", "dt",
                                  "balance"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char *k : known) ok = ok || it.key() == k;
        if (!ok) throw ValidationError("unknown robot parameter '" + it.key() + "'");
    }
    auto get = [&](const char *key, double &field) {
        if (j.contains(key)) {
            if (!j.at(key).is_number())
                throw ValidationError(std::string(key) + " must be a number");
            field = j.at(key).get<double>();
        }
    };
    get("mass_M", p.mass_M);
    get("gravity_g", p.gravity_g);
    get("thigh_len", p.thigh_len);
    get("shank_len", p.shank_len);
    get("hip_offset_y", p.hip_offset_y);
    get("ankle_height", p.ankle_height);
    get("nominal_com_height_h", p.nominal_com_height_h);
    get("foot_length", p.foot_length);
    get("foot_width", p.foot_width);
    get("max_step_len", p.max_step_len);
    get("max_step_width", p.max_step_width);
    get("max_step_yaw", p.max_step_yaw);
    get("step_duration_T", p.step_duration_T);
    get("double_support_ratio", p.double_support_ratio);
    get("dt", p.dt);
}

/// Reads the optional "balance" block of a robot config into a controller state.
inline BalanceState balance_from_json(const nlohmann::json &j) {
    BalanceState b;
    if (!j.contains("balance")) return b;
    const auto &bj = j.at("balance");
    b.kp = bj.value("kp", b.kp);
    b.kd = bj.value("kd", b.kd);
    b.ki = bj.value("ki", b.ki);
    b.max_correction = bj.value("max_correction", b.max_correction);
    b.trunk_pitch_des = bj.value("trunk_pitch_des", b.trunk_pitch_des);
    b.trunk_roll_des = bj.value("trunk_roll_des", b.trunk_roll_des);
    if (b.kp < 0.0 || b.kd < 0.0) throw ValidationError("balance gains must be non-negative");
    return b;
}

inline nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError("'" + path + "': " + e.what());
    }
}

inline RobotParams load_params(const std::string &path) {
    return validate_params(read_json_file(path).get<RobotParams>());
}

} // namespace biped

#endif
