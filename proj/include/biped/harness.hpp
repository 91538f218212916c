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

// Desk-scale walking simulator. The gait pipeline (plan, ZMP reference,
// CoM solve, swing and feet frames, balance, IK) drives a point-mass plant
// that tracks the commanded CoM; the plant's ZMP is checked against the
// current support polygon every sample.

#ifndef BIPED_HARNESS_HPP
#define BIPED_HARNESS_HPP

#include <biped/com_solver.hpp>
#include <biped/io.hpp>
#include <biped/kinematics.hpp>
#include <biped/support_polygon.hpp>
#include <biped/swing_balance.hpp>
#include <biped/zmp_planner.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace biped {

enum class SolverKind { CartTable, Pendulum };

inline SolverKind parse_solver(std::string_view s) {
    if (s == "cart-table") return SolverKind::CartTable;
    if (s == "pendulum") return SolverKind::Pendulum;
    throw ValidationError("unknown solver '" + std::string(s) + "' (expected cart-table or pendulum)");
}

inline const char *solver_name(SolverKind s) { return s == SolverKind::CartTable ? "cart-table" : "pendulum"; }

struct Disturbance {
    double t = 0.0;
    double dvx = 0.0; // m/s, world frame
    double dvy = 0.0;
};

struct SimOptions {
    SolverKind solver = SolverKind::Pendulum;
    std::vector<Disturbance> disturbances;
    bool balance_on = false;
    double duration = 10.0;
    std::uint64_t seed = 0;
    double kp = 100.0;            // plant position gain, 1/s^2
    double kd = 20.0;             // plant velocity gain, 1/s
    double tilt_gain = 5.0;       // trunk proxy, rad per metre of tracking error
    double tilt_noise = 0.001;    // rad, standard deviation
    double fall_tolerance = 0.0;  // m beyond the polygon edge
    int fall_samples = 3;
    double step_height = 0.04;
    bool run_ik = true;
    BalanceState balance;         // gains and limits; measurements are overwritten
};

/// Polygon identifiers used in the log.
enum class SupportId { Double = 0, Left = 1, Right = 2 };

struct SimRecord {
    double t = 0.0;
    double com_x = 0.0, com_y = 0.0, com_z = 0.0;
    double zmp_x = 0.0, zmp_y = 0.0;
    SupportId support = SupportId::Double;
    double margin = 0.0;
    double pitch_correction = 0.0, roll_correction = 0.0;
    double trunk_pitch = 0.0, trunk_roll = 0.0;
    bool fallen = false;
};

struct SimLog {
    double dt = 0.0;
    std::vector<SimRecord> records;
    /// Left then right leg joints per sample (empty when IK is disabled).
    std::vector<std::array<double, 12>> joints;

    bool fallen() const { return !records.empty() && records.back().fallen; }

    double min_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto &r : records) m = std::min(m, r.margin);
        return m;
    }

    /// Mean |trunk pitch| + |trunk roll| over samples with t in [t0, t1].
    double mean_tilt(double t0, double t1 = std::numeric_limits<double>::infinity()) const {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto &r : records)
            if (r.t >= t0 - 1e-12 && r.t <= t1 + 1e-12) {
                sum += std::abs(r.trunk_pitch) + std::abs(r.trunk_roll);
                ++n;
            }
        return n ? sum / static_cast<double>(n) : 0.0;
    }
};

/// Plans enough steps to cover `duration` and returns the CoM trajectory
/// from the selected solver. The pendulum path uses a leg-reach height
/// profile computed from a first constant-height solve.
struct GaitSolution {
    FootstepPlan plan;
    ZmpReference zmp;
    ComTrajectory com;
};

inline GaitSolution solve_gait(const GaitCommand &cmd, const RobotParams &p, SolverKind solver, double duration) {
    validate_params(p);
    if (!(duration > 0.0)) throw ValidationError("duration must be positive");
    const double T = p.step_duration_T;
    const auto n_steps = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(duration / T - 1e-9)));
    GaitSolution g;
    g.plan = plan_footsteps(cmd, p, n_steps, default_stance(p), {});
    g.zmp = generate_zmp_reference(g.plan, p);
    try {
        if (solver == SolverKind::CartTable) {
            g.com = solve_com_cart_table_fourier(g.zmp, p, max_harmonics(g.zmp.samples.size()), {true});
        } else {
            const ComBoundary bc = boundary_from_zmp(g.zmp);
            const ComTrajectory flat = solve_com_pendulum_numeric(g.zmp, constant_height(g.zmp.samples.size(), p), bc, p);
            std::vector<PlanarPoint> xy;
            xy.reserve(flat.samples.size());
            for (const auto &s : flat.samples) xy.push_back({s.x, s.y});
            g.com = solve_com_pendulum_numeric(g.zmp, compute_height_profile(g.plan, xy, p), bc, p);
        }
    } catch (const ValidationError &e) {
        throw PipelineError("com", e.what());
    } catch (const PipelineError &) {
        throw;
    } catch (const NumericError &e) {
        throw PipelineError("com", e.what());
    }
    return g;
}

inline SimLog simulate_walk(const GaitCommand &cmd, const RobotParams &p, const SimOptions &opt) {
    if (opt.fall_samples < 1) throw ValidationError("fall_samples must be at least 1");
    if (opt.kp < 0.0 || opt.kd < 0.0) throw ValidationError("plant gains must be non-negative");
    const GaitSolution g = solve_gait(cmd, p, opt.solver, opt.duration);
    const double dt = p.dt;
    const std::size_t n = std::min(sample_count(opt.duration, dt), g.com.samples.size());
    const auto &ref = g.com.samples;
    const double t0 = g.plan.steps.front().t_start;

    std::vector<std::size_t> kicks;
    for (const auto &d : opt.disturbances) {
        if (!(d.t >= 0.0)) throw ValidationError("disturbance time must be non-negative");
        kicks.push_back(static_cast<std::size_t>(std::llround(d.t / dt)));
    }

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> noise(0.0, opt.tilt_noise > 0.0 ? opt.tilt_noise : 1.0);
    auto draw_noise = [&] { return opt.tilt_noise > 0.0 ? noise(rng) : 0.0; };

    // Verlet state: current and previous positions. The previous position is
    // extrapolated so the first step lands on the reference.
    auto prev_of = [&](double x0, double x1, double a0) { return 2.0 * x0 - x1 + a0 * dt * dt; };
    const std::size_t i1 = n > 1 ? 1 : 0;
    double x = ref[0].x, y = ref[0].y;
    double xp = prev_of(ref[0].x, ref[i1].x, ref[0].ax), yp = prev_of(ref[0].y, ref[i1].y, ref[0].ay);
    const double xr_prev0 = xp, yr_prev0 = yp;

    SimLog log;
    log.dt = dt;
    log.records.reserve(n);
    BalanceState bal = opt.balance;
    int outside = 0;
    bool fallen = false;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        const ComSample &r = ref[k];
        for (const auto &d : opt.disturbances)
            if (kicks[static_cast<std::size_t>(&d - opt.disturbances.data())] == k) {
                xp -= d.dvx * dt;
                yp -= d.dvy * dt;
            }

        // Trunk proxy from the heading-frame tracking error.
        const double yaw = plan_yaw_at(g.plan, t);
        const double ex = x - r.x, ey = y - r.y;
        const double e_fwd = std::cos(yaw) * ex + std::sin(yaw) * ey;
        const double e_lat = -std::sin(yaw) * ex + std::cos(yaw) * ey;
        const double tilt_pitch = opt.tilt_gain * e_fwd + draw_noise();
        const double tilt_roll = -opt.tilt_gain * e_lat + draw_noise();

        // Kinematic pipeline on the reference CoM.
        FeetFrames feet;
        try {
            feet = compute_feet_frames(r, g.plan, p, t, opt.step_height);
        } catch (const ValidationError &e) {
            throw PipelineError("feet", "t = " + std::to_string(t) + " s: " + e.what());
        }
        double sx = 0.0, sy = 0.0;
        SimRecord rec;
        if (opt.balance_on) {
            bal.trunk_pitch_meas = tilt_pitch;
            bal.trunk_roll_meas = tilt_roll;
            const BalanceOutput out = active_balance(feet, bal, dt);
            bal = out.state;
            rec.pitch_correction = out.pitch_correction;
            rec.roll_correction = out.roll_correction;
            const Side support_side = g.plan.steps[contact_at(g.plan, p, t).step].side;
            const FrameTransform &before = support_side == Side::Left ? feet.left : feet.right;
            const FrameTransform &after = support_side == Side::Left ? out.feet.left : out.feet.right;
            const Eigen::Vector3d shift = after.translation - before.translation;
            // The body moves opposite to the support foot in the CoM frame.
            sx = -(std::cos(yaw) * shift.x() - std::sin(yaw) * shift.y());
            sy = -(std::sin(yaw) * shift.x() + std::cos(yaw) * shift.y());
            feet = out.feet;
        }
        if (opt.run_ik && !fallen) {
            try {
                const auto [left, right] = lower_body_ik(feet.left, feet.right, p);
                std::array<double, 12> q{};
                const auto a = left.as_array(), b = right.as_array();
                std::copy(a.begin(), a.end(), q.begin());
                std::copy(b.begin(), b.end(), q.begin() + 6);
                log.joints.push_back(q);
            } catch (const ValidationError &e) {
                throw PipelineError("ik", "t = " + std::to_string(t) + " s: " + e.what());
            }
        } else if (opt.run_ik) {
            log.joints.push_back(log.joints.empty() ? std::array<double, 12>{} : log.joints.back());
        }

        // Plant: PD tracking of the commanded CoM around the reference acceleration.
        const double xr_prev = k ? ref[k - 1].x : xr_prev0, yr_prev = k ? ref[k - 1].y : yr_prev0;
        const double vx = (x - xp) / dt, vy = (y - yp) / dt;
        const double vrx = (r.x - xr_prev) / dt, vry = (r.y - yr_prev) / dt;
        const double ax = r.ax + opt.kp * (r.x + sx - x) + opt.kd * (vrx - vx);
        const double ay = r.ay + opt.kp * (r.y + sy - y) + opt.kd * (vry - vy);

        ComSample state{x, y, r.z, ax, ay, r.az};
        PlanarPoint zmp;
        try {
            zmp = zmp_of(state, p.gravity_g, k);
        } catch (const SingularityError &e) {
            throw PipelineError("zmp", e.what());
        }
        const ContactState contact = contact_at(g.plan, p, t);
        rec.t = t;
        rec.com_x = x;
        rec.com_y = y;
        rec.com_z = r.z;
        rec.zmp_x = zmp.x;
        rec.zmp_y = zmp.y;
        rec.support = contact.phase == ContactPhase::Double ? SupportId::Double
                      : g.plan.steps[contact.step].side == Side::Left ? SupportId::Left
                                                                      : SupportId::Right;
        rec.margin = zmp_margin(zmp, support_polygon(contact, p));
        rec.trunk_pitch = tilt_pitch;
        rec.trunk_roll = tilt_roll;
        outside = rec.margin < -opt.fall_tolerance ? outside + 1 : 0;
        fallen = fallen || outside >= opt.fall_samples;
        rec.fallen = fallen;
        log.records.push_back(rec);

        const double xn = 2.0 * x - xp + ax * dt * dt, yn = 2.0 * y - yp + ay * dt * dt;
        xp = x;
        yp = y;
        x = xn;
        y = yn;
    }
    return log;
}

// --- Export -------------------------------------------------------------

inline const std::vector<std::string> &sim_log_columns() {
    static const std::vector<std::string> c = {"t",      "com_x",  "com_y",           "com_z",
                                               "zmp_x",  "zmp_y",  "support_polygon", "margin",
                                               "pitch_correction", "roll_correction", "trunk_pitch",
                                               "trunk_roll", "fallen"};
    return c;
}

inline io::Table sim_log_table(const SimLog &log) {
    io::Table t;
    t.columns = sim_log_columns();
    for (const auto &r : log.records)
        t.rows.push_back({r.t, r.com_x, r.com_y, r.com_z, r.zmp_x, r.zmp_y, static_cast<double>(r.support), r.margin,
                          r.pitch_correction, r.roll_correction, r.trunk_pitch, r.trunk_roll, r.fallen ? 1.0 : 0.0});
    return t;
}

inline nlohmann::json sim_log_json(const SimLog &log) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto &r : log.records)
        recs.push_back({{"t", r.t},
                        {"com", {r.com_x, r.com_y, r.com_z}},
                        {"zmp", {r.zmp_x, r.zmp_y}},
                        {"support_polygon", static_cast<int>(r.support)},
                        {"margin", r.margin},
                        {"pitch_correction", r.pitch_correction},
                        {"roll_correction", r.roll_correction},
                        {"trunk_pitch", r.trunk_pitch},
                        {"trunk_roll", r.trunk_roll},
                        {"fallen", r.fallen}});
    return {{"dt", log.dt}, {"records", recs}, {"fallen", log.fallen()}};
}

inline const std::vector<std::string> &com_columns() {
    static const std::vector<std::string> c = {"t", "x", "y", "z", "ax", "ay", "az"};
    return c;
}

inline io::Table com_table(const ComTrajectory &traj) {
    io::Table t;
    t.columns = com_columns();
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const auto &s = traj.samples[k];
        t.rows.push_back({static_cast<double>(k) * traj.dt, s.x, s.y, s.z, s.ax, s.ay, s.az});
    }
    return t;
}

/// Inverse of com_table. dt is taken from the first two time stamps, or
/// passed explicitly for tables with fewer than two rows.
inline ComTrajectory com_from_table(const io::Table &t, double dt_hint = 0.0) {
    ComTrajectory traj;
    const std::size_t ix = t.column("x"), iy = t.column("y"), iz = t.column("z");
    const std::size_t iax = t.column("ax"), iay = t.column("ay"), iaz = t.column("az"), it = t.column("t");
    traj.dt = t.rows.size() >= 2 ? t.rows[1][it] - t.rows[0][it] : dt_hint;
    for (const auto &r : t.rows) traj.samples.push_back({r[ix], r[iy], r[iz], r[iax], r[iay], r[iaz]});
    return traj;
}

inline nlohmann::json com_json(const ComTrajectory &traj) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto &s : traj.samples)
        samples.push_back({{"x", s.x}, {"y", s.y}, {"z", s.z}, {"ax", s.ax}, {"ay", s.ay}, {"az", s.az}});
    return {{"dt", traj.dt}, {"samples", samples}};
}

inline ComTrajectory com_from_json(const nlohmann::json &j) {
    try {
        ComTrajectory traj;
        traj.dt = j.at("dt").get<double>();
        for (const auto &s : j.at("samples"))
            traj.samples.push_back({s.at("x").get<double>(), s.at("y").get<double>(), s.at("z").get<double>(),
                                    s.at("ax").get<double>(), s.at("ay").get<double>(), s.at("az").get<double>()});
        return traj;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed trajectory: ") + e.what());
    }
}

enum class Format { Csv, Json };

inline Format parse_format(std::string_view s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ValidationError("unknown format '" + std::string(s) + "' (expected csv or json)");
}

/// JSON is written with full double precision (the library emits the
/// shortest round-tripping representation).
inline void export_table_or_json(const std::string &path, Format f, const io::Table &table,
                                 const nlohmann::json &json) {
    if (f == Format::Csv) io::write_csv(path, table);
    else io::write_text(path, json.dump(2) + "\n");
}

inline void export_log(const SimLog &log, const std::string &path, Format f) {
    export_table_or_json(path, f, sim_log_table(log), sim_log_json(log));
}

inline void export_trajectory(const ComTrajectory &traj, const std::string &path, Format f) {
    export_table_or_json(path, f, com_table(traj), com_json(traj));
}

inline ComTrajectory import_trajectory(const std::string &path, Format f) {
    if (f == Format::Csv) return com_from_table(io::read_csv(path));
    return com_from_json(read_json_file(path));
}

} // namespace biped

#endif
