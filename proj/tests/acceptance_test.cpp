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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <biped/contextual_kick.hpp>
#include <biped/harness.hpp>
#include <biped/optimizers.hpp>
#include <biped/run_features.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

namespace {

using namespace biped;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

char buf[512];

template <class... A> std::string fmt(const char *f, A... a) {
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

// 1. Numeric solver ZMP round trip on a 4-step forward walk.
Outcome zmp_round_trip() {
    Outcome o;
    RobotParams p;
    p.step_duration_T = 1.0; // 4 steps x 1 s at dt 0.01 gives 400 samples
    const auto t0 = Clock::now();
    const FootstepPlan plan = plan_footsteps({0.1, 0.0, 0.0}, p, 4, default_stance(p), {});
    const ZmpReference zmp = generate_zmp_reference(plan, p);
    const ComBoundary bc = boundary_from_zmp(zmp);
    const std::size_t n = zmp.samples.size();
    const ComTrajectory flat = solve_com_pendulum_numeric(zmp, constant_height(n, p), bc, p);
    std::vector<PlanarPoint> xy;
    for (const auto &s : flat.samples) xy.push_back({s.x, s.y});
    const ComTrajectory com = solve_com_pendulum_numeric(zmp, compute_height_profile(plan, xy, p), bc, p);
    const ZmpReference back = compute_zmp(com, p);
    const double elapsed = seconds_since(t0);
    double ss = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        ss += std::pow(back.samples[i].x - zmp.samples[i].x, 2) + std::pow(back.samples[i].y - zmp.samples[i].y, 2);
    const double rms = std::sqrt(ss / static_cast<double>(2 * (n - 2)));
    o.require(n >= 400, fmt("N = %zu", n));
    o.require(rms <= 1e-6, fmt("rms %.3g", rms));
    o.require(elapsed < 1.0, fmt("%.3f s", elapsed));
    o.detail += fmt("%sN = %zu, interior rms %.3g m, %.4f s", o.detail.empty() ? "" : " | ", n, rms, elapsed);
    return o;
}

// Periodic steady state of x'' = w0^2 (x - cos(w t)) by RK4 shooting.
double shooting_gain(double w0sq, double w) {
    const double period = 2.0 * kPi / w;
    const int steps = 200000;
    const double h = period / steps;
    auto flow = [&](std::array<double, 2> s, bool forced) {
        auto f = [&](double t, const std::array<double, 2> &y) {
            return std::array<double, 2>{y[1], w0sq * (y[0] - (forced ? std::cos(w * t) : 0.0))};
        };
        double t = 0.0;
        for (int i = 0; i < steps; ++i) {
            const auto k1 = f(t, s);
            const auto k2 = f(t + h / 2, {s[0] + h / 2 * k1[0], s[1] + h / 2 * k1[1]});
            const auto k3 = f(t + h / 2, {s[0] + h / 2 * k2[0], s[1] + h / 2 * k2[1]});
            const auto k4 = f(t + h, {s[0] + h * k3[0], s[1] + h * k3[1]});
            s[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            s[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            t += h;
        }
        return s;
    };
    const auto c0 = flow({1.0, 0.0}, false), c1 = flow({0.0, 1.0}, false), r = flow({0.0, 0.0}, true);
    Eigen::Matrix2d A;
    A << 1.0 - c0[0], -c1[0], -c0[1], 1.0 - c1[1];
    return A.lu().solve(Eigen::Vector2d(r[0], r[1]))[0];
}

// 2. Analytic and numeric solvers agree on a periodic reference.
Outcome solver_agreement() {
    Outcome o;
    const RobotParams p;
    const std::size_t n = 100;
    const double dt = 0.01;
    ZmpReference z{dt, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fmod(i * dt + 0.05, n * dt);
        const double y = t < 0.1 ? -0.05 + t : t < 0.5 ? 0.05 : t < 0.6 ? 0.05 - (t - 0.5) : -0.05;
        z.samples.push_back({0.01 * std::sin(2 * kPi * i / n), y});
    }
    const ComTrajectory ana = solve_com_cart_table_fourier(z, p);
    const ComTrajectory num = solve_com_pendulum_numeric(z, constant_height(n, p), {}, p, BoundaryMode::Periodic);
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        dev = std::max({dev, std::abs(ana.samples[i].x - num.samples[i].x), std::abs(ana.samples[i].y - num.samples[i].y)});
    o.require(dev <= 1e-3, fmt("max deviation %.3g", dev));

    const double w0sq = p.gravity_g / p.nominal_com_height_h;
    double gain_err = 0.0;
    for (int k = 1; k <= 3; ++k) {
        const double w = 2.0 * kPi * k;
        gain_err = std::max(gain_err, std::abs(cart_table_gain(w, p) - shooting_gain(w0sq, w)));
    }
    // the solver itself applies the gain: single harmonic in, scaled harmonic out
    ZmpReference h{dt, {}};
    for (std::size_t i = 0; i < n; ++i) h.samples.push_back({0.03 * std::cos(2 * kPi * i / n), 0.0});
    const double solved = solve_com_cart_table_fourier(h, p, 5).samples[0].x / 0.03;
    gain_err = std::max(gain_err, std::abs(solved - shooting_gain(w0sq, 2 * kPi)));
    o.require(gain_err <= 1e-9, fmt("gain error %.3g", gain_err));
    o.detail += fmt("%smax deviation %.3g m, gain error %.3g", o.detail.empty() ? "" : " | ", dev, gain_err);
    return o;
}

// 3. Constant-height reduction and zero moment at the computed ZMP.
Outcome zmp_reduction() {
    Outcome o;
    const RobotParams p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double red = 0.0, moment = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const ComSample s{u(rng), u(rng), 0.3 + 0.05 * u(rng), 3 * u(rng), 3 * u(rng), 0.0};
        const ComTrajectory tr{0.01, {s}};
        const PlanarPoint z = compute_zmp(tr, p).samples[0];
        red = std::max({red, std::abs(z.x - (s.x - s.z / p.gravity_g * s.ax)),
                        std::abs(z.y - (s.y - s.z / p.gravity_g * s.ay))});
        moment = std::max(moment, std::abs(compute_moment(s, z.x, p)));
    }
    o.require(red <= 4 * std::numeric_limits<double>::epsilon(), fmt("reduction error %.3g", red));
    o.require(moment <= 1e-12, fmt("moment %.3g", moment));
    o.detail += fmt("%sreduction error %.3g m, max |T_p| %.3g N m", o.detail.empty() ? "" : " | ", red, moment);
    return o;
}

std::vector<SimLog> sweep_logs;

// 4. Undisturbed stability over the command grid.
Outcome stability_sweep() {
    Outcome o;
    const RobotParams p;
    const auto t0 = Clock::now();
    double worst = std::numeric_limits<double>::infinity();
    for (double vx : {0.0, 0.05, 0.1, 0.15})
        for (double w : {0.0, 0.2}) {
            const SimLog log = simulate_walk({vx, 0.0, w}, p, SimOptions{});
            const double m = log.min_margin();
            worst = std::min(worst, m);
            o.require(log.records.size() == 1000, fmt("vx %.2f w %.1f: %zu samples", vx, w, log.records.size()));
            o.require(m >= 0.005, fmt("vx %.2f w %.1f: margin %.4f", vx, w, m));
            o.require(!log.fallen(), fmt("vx %.2f w %.1f: fell", vx, w));
            sweep_logs.push_back(log);
        }
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 30.0, fmt("%.1f s", elapsed));
    o.detail += fmt("%s8 cells x 10 s, worst margin %.4f m, %.2f s", o.detail.empty() ? "" : " | ", worst, elapsed);
    return o;
}

// 5. Balance reduces post-impulse tilt; zero gain is the identity.
Outcome balance_efficacy() {
    Outcome o;
    const RobotParams p;
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        double tilt[2];
        for (int on = 0; on < 2; ++on) {
            SimOptions opt;
            opt.seed = seed;
            opt.balance_on = on;
            opt.disturbances = {{3.05, 0.1, 0.0}};
            tilt[on] = simulate_walk({0.1, 0.0, 0.0}, p, opt).mean_tilt(3.05, 4.05);
        }
        wins += tilt[1] < tilt[0];
    }
    o.require(wins >= 4, fmt("%d/5 seeds", wins));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool identity = true;
    for (int i = 0; i < 1000; ++i) {
        BalanceState st;
        st.kp = st.kd = 0.0;
        st.trunk_pitch_meas = u(rng);
        st.trunk_roll_meas = u(rng);
        st.prev_pitch_err = u(rng);
        st.prev_roll_err = u(rng);
        const FeetFrames f{FrameTransform({0.1 * u(rng), 0.05 + 0.02 * u(rng), -0.3}, 0, 0, u(rng)),
                           FrameTransform({0.1 * u(rng), -0.05 + 0.02 * u(rng), -0.3}, 0, 0, u(rng))};
        const BalanceOutput b = active_balance(f, st, 0.01);
        identity = identity && b.feet.left.translation == f.left.translation &&
                   b.feet.right.translation == f.right.translation && b.feet.left.yaw == f.left.yaw &&
                   b.feet.right.yaw == f.right.yaw;
    }
    o.require(identity, "zero gain moved a foot");
    o.detail += fmt("%sbalance wins %d/5 seeds, zero-gain identity over 1000 states", o.detail.empty() ? "" : " | ", wins);
    return o;
}

// 6. FK/IK round trip and joint limits along the sweep.
Outcome kinematics() {
    Outcome o;
    const RobotParams p;
    std::mt19937_64 rng(2024);
    double pos = 0.0, rot = 0.0;
    int n = 0;
    for (Side side : {Side::Left, Side::Right}) {
        const JointLimits lim = default_joint_limits(side);
        while (n < (side == Side::Left ? 500 : 1000)) {
            std::array<double, 6> a{};
            for (std::size_t i = 0; i < 6; ++i)
                a[i] = std::uniform_real_distribution<double>(i == 3 ? 0.05 : 0.9 * lim.lower[i], 0.9 * lim.upper[i])(rng);
            if (p.thigh_len * std::cos(a[3] + a[4]) + p.shank_len * std::cos(a[4]) <= 0.05) continue;
            const FrameTransform target = leg_fk(LegJoints::from_array(a), side, p);
            const FrameTransform back = leg_fk(leg_ik(target, side, p), side, p);
            pos = std::max(pos, (back.translation - target.translation).norm());
            rot = std::max(rot, Eigen::AngleAxisd(back.rotation().transpose() * target.rotation()).angle());
            ++n;
        }
    }
    o.require(pos <= 1e-6 && rot <= 1e-6, fmt("pos %.3g rot %.3g", pos, rot));

    const JointLimits ll = default_joint_limits(Side::Left), rl = default_joint_limits(Side::Right);
    std::size_t violations = 0, samples = 0;
    for (const SimLog &log : sweep_logs)
        for (const auto &q : log.joints) {
            ++samples;
            for (int j = 0; j < 6; ++j)
                violations += q[j] < ll.lower[j] || q[j] > ll.upper[j] || q[6 + j] < rl.lower[j] || q[6 + j] > rl.upper[j];
        }
    o.require(samples == 8000, fmt("%zu joint samples", samples));
    o.require(violations == 0, fmt("%zu limit violations", violations));
    o.detail += fmt("%s%d targets, max %.3g m / %.3g rad; %zu pipeline samples within limits",
                    o.detail.empty() ? "" : " | ", n, pos, rot, samples);
    return o;
}

// 7. Optimizer benchmarks.
Outcome optimizers() {
    using namespace optim;
    Outcome o;
    const OptResult c = optimize(Algorithm::CMAES, box_objective(10, -5.0, 5.0, sphere), 20000, 7);
    o.require(c.best_cost < 1e-10 && c.evals_used <= 20000, fmt("cmaes 10-D %.3g", c.best_cost));
    const double min_eig = *std::min_element(c.min_cov_eigenvalue.begin(), c.min_cov_eigenvalue.end());
    o.require(min_eig > 0.0, fmt("covariance eigenvalue %.3g", min_eig));
    std::string costs;
    for (Algorithm a : {Algorithm::HC, Algorithm::TS, Algorithm::GA, Algorithm::PSO, Algorithm::CMAES}) {
        const Objective obj = box_objective(5, -5.0, 5.0, sphere);
        const OptResult r = optimize(a, obj, 50000, 11);
        const OptResult again = optimize(a, obj, 50000, 11);
        o.require(r.best_cost < 1e-2 && r.evals_used <= 50000, fmt("%s 5-D %.3g", algorithm_name(a), r.best_cost));
        o.require(r.best_theta == again.best_theta && r.history == again.history,
                  fmt("%s rerun differs", algorithm_name(a)));
        costs += fmt(" %s %.2g", algorithm_name(a), r.best_cost);
    }
    o.detail += fmt("%scmaes 10-D %.3g (%zu generations SPD, min eig %.3g); 5-D:%s; reruns identical",
                    o.detail.empty() ? "" : " | ", c.best_cost, c.min_cov_eigenvalue.size(), min_eig, costs.c_str());
    return o;
}

// 8. Contextual kick policy on the surrogate.
Outcome contextual_kick() {
    Outcome o;
    const auto t0 = Clock::now();
    std::vector<double> ctx;
    for (int i = 0; i < 100; ++i)
        ctx.push_back(kick::kMinDistance + (kick::kMaxDistance - kick::kMinDistance) * (i + 0.5) / 100.0);
    const kick::KickTask task = kick::surrogate_task();
    int ok = 0;
    std::string errs;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const kick::PolicyModel m = kick::train_contextual(task, kick::make_model(15, 0.5), kick::TrainOptions{}, seed);
        const double e = kick::eval_policy(m, task, ctx).mean_abs_error;
        ok += e <= 0.5;
        errs += fmt(" %.3f", e);
    }
    const double elapsed = seconds_since(t0);
    o.require(ok >= 4, fmt("%d/5 seeds", ok));
    o.require(elapsed < 120.0, fmt("%.1f s", elapsed));
    const kick::PolicyModel m = kick::make_model();
    double pu = 0.0;
    for (int i = 0; i <= 10000; ++i)
        pu = std::max(pu, std::abs(kick::rbf_features(kick::kMinDistance + 10.0 * i / 10000.0, m).sum() - 1.0));
    o.require(pu <= 1e-12, fmt("partition error %.3g", pu));
    o.detail += fmt("%serrors [m]:%s, %.1f s, partition error %.3g", o.detail.empty() ? "" : " | ", errs.c_str(),
                    elapsed, pu);
    return o;
}

// 9. Running-policy state vector and orientation predictor.
Outcome run_features() {
    using namespace features;
    Outcome o;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    SensorFrame prev;
    prev.timestamp = 1.0;
    prev.z_coord = g(rng);
    prev.orientation = g(rng);
    for (auto &x : prev.gyro) x = g(rng);
    for (auto &x : prev.joints) x = g(rng);
    SensorFrame curr = prev;
    curr.timestamp = 1.02;
    const StateVector80 s = assemble_state(curr, prev, 0);
    o.require(s.size() == 80 && state_labels().size() == 80, "size");
    bool zero = true;
    for (std::size_t i = kCurrentSize; i < kStateSize; ++i) zero = zero && s[i] == 0.0;
    o.require(zero, "constant-trace derivative not zero");

    std::uint64_t c = 0;
    bool counter_ok = true;
    for (std::uint64_t i = 1; i <= 1000; ++i) {
        c = update_counter(c, false, i);
        counter_ok = counter_ok && c == i / 3;
    }
    o.require(counter_ok, "counter");

    io::Table t;
    t.columns = {"gyro_x", "gyro_y", "gyro_z", "accel_x", "accel_y", "accel_z", "orientation_gt"};
    for (int r = 0; r < 500; ++r) {
        std::vector<double> row(7);
        for (int i = 0; i < 6; ++i) row[i] = g(rng);
        row[6] = 0.3 + 0.5 * row[0] - 0.25 * row[4] + 0.1 * row[1] * row[3];
        t.rows.push_back(row);
    }
    const LinearPredictor m = fit_orientation_predictor(t);
    const auto names = m.spec.names();
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
    expect[0] = 0.5;
    expect[4] = -0.25;
    expect[std::find(names.begin(), names.end(), "gyro_y*accel_x") - names.begin()] = 0.1;
    const double werr = std::max((m.weights - expect).cwiseAbs().maxCoeff(), std::abs(m.bias - 0.3));
    o.require(werr <= 1e-8, fmt("weight error %.3g", werr));
    o.detail += fmt("%slength 80, counter %llu after 1000 steps, weight error %.3g", o.detail.empty() ? "" : " | ",
                    static_cast<unsigned long long>(c), werr);
    return o;
}

// 10. Cycloid swing endpoints, endpoint velocities and midpoint.
Outcome swing() {
    Outcome o;
    const double dx = 0.2, H = 0.04;
    const SwingSpec s{FrameTransform({0.02, -0.05, 0.0}, 0, 0, 0.1), FrameTransform({0.02 + dx, 0.0, 0.0}, 0, 0, 0.3), H,
                      0.4};
    const FrameTransform a = swing_pose(s, 0.0), b = swing_pose(s, 1.0), m = swing_pose(s, 0.5);
    o.require(a.translation == s.from.translation && a.yaw == s.from.yaw, "start pose");
    o.require(b.translation == s.to.translation && b.yaw == s.to.yaw, "end pose");
    const Eigen::Vector3d d = s.to.translation - s.from.translation;
    const bool mid = m.translation.x() - s.from.translation.x() == d.x() / 2 &&
                     m.translation.y() - s.from.translation.y() == d.y() / 2 && m.translation.z() == H;
    o.require(mid, "midpoint");
    const double h = 1e-6;
    const Eigen::Vector3d peak(2 * std::abs(d.x()), 2 * std::abs(d.y()), kPi * H);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        auto at = [&](double ph) { return swing_pose(s, ph).translation[k]; };
        const double v0 = (-3 * at(0) + 4 * at(h) - at(2 * h)) / (2 * h);
        const double v1 = (3 * at(1) - 4 * at(1 - h) + at(1 - 2 * h)) / (2 * h);
        worst = std::max(worst, std::max(std::abs(v0), std::abs(v1)) / peak[k]);
    }
    o.require(worst <= 1e-6, fmt("endpoint velocity %.3g of peak", worst));
    o.detail += fmt("%sendpoints exact, midpoint exact, endpoint velocity %.3g of peak", o.detail.empty() ? "" : " | ",
                    worst);
    return o;
}

} // namespace

int main() {
    const std::function<Outcome()> criteria[] = {zmp_round_trip,   solver_agreement, zmp_reduction, stability_sweep,
                                                 balance_efficacy, kinematics,       optimizers,    contextual_kick,
                                                 run_features,     swing};
    int failed = 0;
    for (int i = 0; i < 10; ++i) {
        Outcome r;
        try {
            r = criteria[i]();
        } catch (const std::exception &e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        failed += !r.pass;
        std::printf("%s criterion %d: %s\n", r.pass ? "PASS" : "FAIL", i + 1, r.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
