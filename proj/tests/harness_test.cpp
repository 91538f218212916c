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

#include <biped/harness.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace biped {
namespace {

// Independent margin oracle: distance to a boundary densified into 20000
// points per edge, refined by exact projection onto the nearest sub-segment,
// with inside/outside from the crossing-number test.
double oracle_margin(const PlanarPoint &p, const SupportPolygon &poly, int per_edge = 20000) {
    const auto &v = poly.vertices;
    double best = std::numeric_limits<double>::infinity();
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const PlanarPoint &a = v[j], &b = v[i];
        if ((b.y > p.y) != (a.y > p.y) && p.x < (a.x - b.x) * (p.y - b.y) / (a.y - b.y) + b.x) inside = !inside;
        int nearest = 0;
        double nd = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= per_edge; ++k) {
            const double u = static_cast<double>(k) / per_edge;
            const double d = std::hypot(a.x + u * (b.x - a.x) - p.x, a.y + u * (b.y - a.y) - p.y);
            if (d < nd) {
                nd = d;
                nearest = k;
            }
        }
        const double u0 = std::max(0, nearest - 1) / static_cast<double>(per_edge);
        const double u1 = std::min(per_edge, nearest + 1) / static_cast<double>(per_edge);
        const PlanarPoint s{a.x + u0 * (b.x - a.x), a.y + u0 * (b.y - a.y)};
        const PlanarPoint e{a.x + u1 * (b.x - a.x), a.y + u1 * (b.y - a.y)};
        const double ex = e.x - s.x, ey = e.y - s.y;
        const double t = std::clamp(((p.x - s.x) * ex + (p.y - s.y) * ey) / (ex * ex + ey * ey), 0.0, 1.0);
        best = std::min(best, std::hypot(s.x + t * ex - p.x, s.y + t * ey - p.y));
    }
    return inside ? best : -best;
}

SupportPolygon unit_square() { return convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

TEST(Margin, SquareExamples) {
    EXPECT_DOUBLE_EQ(zmp_margin({0.5, 0.5}, unit_square()), 0.5);
    EXPECT_NEAR(zmp_margin({1.0, 1.0}, unit_square()), 0.0, 1e-15);
    EXPECT_NEAR(zmp_margin({1.1, 0.4}, unit_square()), -0.1, 1e-12);
    EXPECT_NEAR(oracle_margin({1.1, 0.4}, unit_square()), -0.1, 1e-12);
    EXPECT_THROW(zmp_margin({0, 0}, SupportPolygon{{{0, 0}, {1, 1}}}), ValidationError);
}

TEST(Margin, MatchesOracleOnRandomPoints) {
    const SupportPolygon poly = merge_polygons(foot_polygon(0.0, 0.05, 0.2, 0.16, 0.08),
                                               foot_polygon(0.08, -0.05, -0.1, 0.16, 0.08));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.2, 0.25);
    for (int i = 0; i < 200; ++i) {
        const PlanarPoint p{u(rng), u(rng)};
        ASSERT_NEAR(zmp_margin(p, poly), oracle_margin(p, poly), 1e-9);
    }
}

TEST(Simulate, UndisturbedWalkKeepsMargin) {
    for (SolverKind s : {SolverKind::Pendulum, SolverKind::CartTable}) {
        SimOptions o;
        o.solver = s;
        const SimLog log = simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, o);
        EXPECT_GE(log.min_margin(), 0.005) << solver_name(s);
        EXPECT_FALSE(log.fallen());
        ASSERT_EQ(log.records.size(), 1000u);
        EXPECT_EQ(log.joints.size(), 1000u);
    }
}

TEST(Simulate, TimeStrictlyIncreasingAtDt) {
    const SimLog log = simulate_walk({0.05, 0.0, 0.2}, RobotParams{}, SimOptions{});
    for (std::size_t i = 1; i < log.records.size(); ++i)
        ASSERT_NEAR(log.records[i].t - log.records[i - 1].t, 0.01, 1e-12);
}

TEST(Simulate, MarginMatchesOracle) {
    const RobotParams p;
    SimOptions o;
    o.disturbances = {{2.0, 0.12, 0.03}};
    const SimLog log = simulate_walk({0.1, 0.0, 0.2}, p, o);
    const FootstepPlan plan = plan_footsteps({0.1, 0.0, 0.2}, p, 20, default_stance(p), {});
    for (std::size_t i = 0; i < log.records.size(); i += 7) {
        const SimRecord &r = log.records[i];
        const SupportPolygon poly = support_polygon(contact_at(plan, p, r.t), p);
        ASSERT_NEAR(r.margin, oracle_margin({r.zmp_x, r.zmp_y}, poly), 1e-9) << "t = " << r.t;
    }
}

TEST(Simulate, LargeImpulseFalls) {
    SimOptions o;
    o.disturbances = {{3.05, 0.5, 0.0}};
    const SimLog log = simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, o);
    EXPECT_TRUE(log.fallen());
    std::size_t first = 0;
    while (!log.records[first].fallen) ++first;
    for (std::size_t i = first - 3 + 1; i <= first; ++i) EXPECT_LT(log.records[i].margin, 0.0);
    for (std::size_t i = first; i < log.records.size(); ++i) ASSERT_TRUE(log.records[i].fallen);
}

TEST(Simulate, FallIsMonotoneInImpulse) {
    bool fell = false;
    for (double dv = 0.0; dv <= 0.4; dv += 0.01) {
        SimOptions o;
        o.disturbances = {{3.05, dv, 0.0}};
        o.run_ik = false;
        const bool f = simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, o).fallen();
        EXPECT_TRUE(f || !fell) << "no fall at " << dv << " after a smaller impulse fell";
        fell = fell || f;
    }
    EXPECT_TRUE(fell);
}

TEST(Simulate, BalanceReducesTiltAfterImpulse) {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        double tilt[2];
        for (int on = 0; on < 2; ++on) {
            SimOptions o;
            o.seed = seed;
            o.balance_on = on;
            o.disturbances = {{3.05, 0.1, 0.0}};
            const SimLog log = simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, o);
            EXPECT_FALSE(log.fallen());
            tilt[on] = log.mean_tilt(3.05, 4.05);
        }
        wins += tilt[1] < tilt[0];
    }
    EXPECT_GE(wins, 4);
}

TEST(Simulate, ZeroGainBalanceMatchesBalanceOff) {
    SimOptions off, zero;
    off.disturbances = zero.disturbances = {{2.0, 0.1, 0.02}};
    zero.balance_on = true;
    zero.balance.kp = zero.balance.kd = 0.0;
    const SimLog a = simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, off);
    const SimLog b = simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, zero);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        ASSERT_EQ(a.records[i].com_x, b.records[i].com_x);
        ASSERT_EQ(a.records[i].zmp_y, b.records[i].zmp_y);
    }
    EXPECT_EQ(a.joints, b.joints);
}

TEST(Simulate, Deterministic) {
    SimOptions o;
    o.balance_on = true;
    o.seed = 9;
    o.disturbances = {{1.0, 0.05, 0.0}};
    const SimLog a = simulate_walk({0.15, 0.0, 0.2}, RobotParams{}, o);
    const SimLog b = simulate_walk({0.15, 0.0, 0.2}, RobotParams{}, o);
    EXPECT_EQ(sim_log_table(a).rows, sim_log_table(b).rows);
    o.seed = 10;
    const SimLog c = simulate_walk({0.15, 0.0, 0.2}, RobotParams{}, o);
    EXPECT_NE(sim_log_table(a).rows, sim_log_table(c).rows);
}

TEST(Simulate, JointsWithinLimits) {
    const RobotParams p;
    const JointLimits ll = default_joint_limits(Side::Left), rl = default_joint_limits(Side::Right);
    for (double vx : {0.0, 0.15})
        for (double w : {0.0, 0.2}) {
            const SimLog log = simulate_walk({vx, 0.0, w}, p, SimOptions{});
            for (const auto &q : log.joints)
                for (int j = 0; j < 6; ++j) {
                    ASSERT_GE(q[j], ll.lower[j]);
                    ASSERT_LE(q[j], ll.upper[j]);
                    ASSERT_GE(q[6 + j], rl.lower[j]);
                    ASSERT_LE(q[6 + j], rl.upper[j]);
                }
        }
}

TEST(Simulate, PipelineErrorNamesStage) {
    SimOptions o;
    o.step_height = 0.5;
    try {
        simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, o);
        FAIL() << "expected PipelineError";
    } catch (const PipelineError &e) {
        EXPECT_EQ(e.stage(), "ik");
    }
    EXPECT_THROW(simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, [] {
                     SimOptions bad;
                     bad.duration = 0.0;
                     return bad;
                 }()),
                 ValidationError);
}

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("biped_harness_" + name)).string();
}

TEST(Export, TrajectoryRoundTripIsBitEqual) {
    const GaitSolution g = solve_gait({0.1, 0.02, 0.1}, RobotParams{}, SolverKind::CartTable, 2.0);
    for (Format f : {Format::Csv, Format::Json}) {
        const std::string path = temp_path(f == Format::Csv ? "traj.csv" : "traj.json");
        export_trajectory(g.com, path, f);
        const ComTrajectory back = import_trajectory(path, f);
        ASSERT_EQ(back.samples.size(), g.com.samples.size());
        for (std::size_t i = 0; i < back.samples.size(); ++i) {
            const ComSample &a = g.com.samples[i], &b = back.samples[i];
            ASSERT_TRUE(a.x == b.x && a.y == b.y && a.z == b.z && a.ax == b.ax && a.ay == b.ay && a.az == b.az);
        }
        EXPECT_EQ(back.dt, g.com.dt);
        std::filesystem::remove(path);
    }
}

TEST(Export, EmptyLogIsHeaderOnly) {
    const std::string path = temp_path("empty.csv");
    export_log(SimLog{}, path, Format::Csv);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 1);
    std::filesystem::remove(path);
}

TEST(Export, TenSecondWalkHasThousandRows) {
    const std::string path = temp_path("walk.csv");
    export_log(simulate_walk({0.1, 0.0, 0.0}, RobotParams{}, SimOptions{}), path, Format::Csv);
    const io::Table t = io::read_csv(path);
    EXPECT_EQ(t.rows.size(), 1000u);
    EXPECT_EQ(t.columns, sim_log_columns());
    std::filesystem::remove(path);
}

TEST(Export, UnwritablePathNamesPath) {
    try {
        export_log(SimLog{}, "/nonexistent-dir/x.csv", Format::Csv);
        FAIL();
    } catch (const PipelineError &e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
    }
}

} // namespace
} // namespace biped
