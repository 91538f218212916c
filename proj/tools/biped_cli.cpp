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

// biped: command-line front end for the gait toolkit.

#include <biped/contextual_kick.hpp>
#include <biped/harness.hpp>
#include <biped/optimizers.hpp>
#include <biped/run_features.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace biped;
using nlohmann::json;

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

struct Context {
    RobotParams params;
    BalanceState balance;
    Format format = Format::Csv;
};

Context load_context(const Globals &g) {
    Context c;
    c.format = parse_format(g.format);
    if (!g.config.empty()) {
        const json j = read_json_file(g.config);
        try {
            c.params = validate_params(j.get<RobotParams>());
        } catch (const json::exception &e) {
            throw ValidationError("'" + g.config + "': " + e.what());
        }
        c.balance = balance_from_json(j);
    }
    return c;
}

/// Writes to --out, or stdout when no path was given.
void emit(const Globals &g, const std::string &text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    io::write_text(g.out, text);
}

std::string csv_text(const io::Table &t) {
    std::ostringstream os;
    io::write_csv(os, t);
    return os.str();
}

std::string render(const Context &c, const io::Table &t, const json &j) {
    return c.format == Format::Csv ? csv_text(t) : j.dump(2) + "\n";
}

struct GaitArgs {
    double vx = 0.1, vy = 0.0, omega = 0.0;
    std::size_t steps = 4;
    std::string solver = "pendulum";
    double step_height = 0.04;
};

void add_gait_options(CLI::App *cmd, GaitArgs &a) {
    cmd->add_option("--vx", a.vx, "forward speed, m/s");
    cmd->add_option("--vy", a.vy, "lateral speed, m/s");
    cmd->add_option("--omega", a.omega, "turn rate, rad/s");
    cmd->add_option("--steps", a.steps, "number of footsteps");
}

FootstepPlan make_plan(const GaitArgs &a, const RobotParams &p) {
    return plan_footsteps({a.vx, a.vy, a.omega}, p, a.steps, default_stance(p), {});
}

ComTrajectory solve_plan(const GaitArgs &a, const RobotParams &p, const ZmpReference &zmp, const FootstepPlan &plan) {
    if (parse_solver(a.solver) == SolverKind::CartTable)
        return solve_com_cart_table_fourier(zmp, p, max_harmonics(zmp.samples.size()), {true});
    const ComBoundary bc = boundary_from_zmp(zmp);
    const ComTrajectory flat = solve_com_pendulum_numeric(zmp, constant_height(zmp.samples.size(), p), bc, p);
    std::vector<PlanarPoint> xy;
    for (const auto &s : flat.samples) xy.push_back({s.x, s.y});
    return solve_com_pendulum_numeric(zmp, compute_height_profile(plan, xy, p), bc, p);
}

void gait_plan(const Globals &g, const GaitArgs &a) {
    const Context c = load_context(g);
    const FootstepPlan plan = make_plan(a, c.params);
    const ZmpReference zmp = generate_zmp_reference(plan, c.params);
    std::ostringstream os;
    json rows = json::array();
    if (c.format == Format::Csv) os << "t,px,py,support_side,step_index\n";
    for (std::size_t k = 0; k < zmp.samples.size(); ++k) {
        const double t = static_cast<double>(k) * zmp.dt;
        const std::size_t i = plan.step_at(t);
        const char *side = side_name(plan.steps[i].side);
        if (c.format == Format::Csv)
            os << io::format_number(t) << ',' << io::format_number(zmp.samples[k].x) << ','
               << io::format_number(zmp.samples[k].y) << ',' << side << ',' << i << '\n';
        else
            rows.push_back({{"t", t}, {"px", zmp.samples[k].x}, {"py", zmp.samples[k].y}, {"support_side", side},
                            {"step_index", i}});
    }
    if (c.format == Format::Json) {
        json steps = json::array();
        for (const auto &s : plan.steps)
            steps.push_back({{"pos_x", s.pos_x}, {"pos_y", s.pos_y}, {"yaw", s.yaw}, {"side", side_name(s.side)},
                             {"t_start", s.t_start}, {"t_end", s.t_end}});
        os << json{{"footsteps", steps}, {"zmp", rows}}.dump(2) << '\n';
    }
    emit(g, os.str());
}

void gait_solve(const Globals &g, const GaitArgs &a) {
    const Context c = load_context(g);
    const FootstepPlan plan = make_plan(a, c.params);
    const ZmpReference zmp = generate_zmp_reference(plan, c.params);
    const ComTrajectory com = solve_plan(a, c.params, zmp, plan);
    const ZmpReference check = compute_zmp(com, c.params);
    io::Table t;
    t.columns = {"t", "x", "y", "z", "ax", "ay", "az", "px_check", "py_check"};
    json rows = json::array();
    for (std::size_t k = 0; k < com.samples.size(); ++k) {
        const auto &s = com.samples[k];
        const double tk = static_cast<double>(k) * com.dt;
        t.rows.push_back({tk, s.x, s.y, s.z, s.ax, s.ay, s.az, check.samples[k].x, check.samples[k].y});
        rows.push_back({{"t", tk}, {"x", s.x}, {"y", s.y}, {"z", s.z}, {"ax", s.ax}, {"ay", s.ay}, {"az", s.az},
                        {"px_check", check.samples[k].x}, {"py_check", check.samples[k].y}});
    }
    emit(g, render(c, t, json{{"dt", com.dt}, {"solver", a.solver}, {"samples", rows}}));
}

void gait_joints(const Globals &g, const GaitArgs &a) {
    const Context c = load_context(g);
    const FootstepPlan plan = make_plan(a, c.params);
    const ZmpReference zmp = generate_zmp_reference(plan, c.params);
    const ComTrajectory com = solve_plan(a, c.params, zmp, plan);
    io::Table t;
    t.columns = {"t"};
    for (const char *leg : {"left", "right"})
        for (const char *j : kJointNames) t.columns.push_back(std::string(leg) + "_" + j);
    for (std::size_t k = 0; k < com.samples.size(); ++k) {
        const double tk = static_cast<double>(k) * com.dt;
        const FeetFrames feet = compute_feet_frames(com.samples[k], plan, c.params, tk, a.step_height);
        std::pair<LegJoints, LegJoints> q;
        try {
            q = lower_body_ik(feet.left, feet.right, c.params);
        } catch (const ValidationError &e) {
            throw PipelineError("ik", "t = " + std::to_string(tk) + " s: " + e.what());
        }
        std::vector<double> row{tk};
        for (double v : q.first.as_array()) row.push_back(v);
        for (double v : q.second.as_array()) row.push_back(v);
        t.rows.push_back(std::move(row));
    }
    json j = {{"columns", t.columns}, {"rows", t.rows}};
    emit(g, render(c, t, j));
}

struct WalkArgs {
    double vx = 0.1, vy = 0.0, omega = 0.0, duration = 10.0;
    std::string solver = "pendulum";
    bool balance = false;
    std::vector<std::string> impulses;
};

Disturbance parse_impulse(const std::string &s) {
    Disturbance d;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> d.t >> c1 >> d.dvx) || c1 != ':') throw ValidationError("impulse must be t:dvx[:dvy], got '" + s + "'");
    if (in >> c2) {
        if (c2 != ':' || !(in >> d.dvy)) throw ValidationError("impulse must be t:dvx[:dvy], got '" + s + "'");
    }
    return d;
}

void walk_simulate(const Globals &g, const WalkArgs &a) {
    const Context c = load_context(g);
    SimOptions o;
    o.solver = parse_solver(a.solver);
    o.balance_on = a.balance;
    o.duration = a.duration;
    o.seed = g.seed;
    o.balance = c.balance;
    for (const auto &s : a.impulses) o.disturbances.push_back(parse_impulse(s));
    const SimLog log = simulate_walk({a.vx, a.vy, a.omega}, c.params, o);
    json j = sim_log_json(log);
    j["min_margin"] = log.min_margin();
    emit(g, render(c, sim_log_table(log), j));
    std::fprintf(stderr, "samples %zu, min margin %.4f m, fallen %s\n", log.records.size(), log.min_margin(),
                 log.fallen() ? "yes" : "no");
}

struct OptimizeArgs {
    std::string algo = "cmaes";
    std::string problem = "sphere";
    std::size_t dim = 0;
    std::size_t budget = 10000;
    double distance = 7.5;
};

optim::Objective make_problem(const OptimizeArgs &a, const Context &c) {
    using optim::Vector;
    if (a.problem == "sphere" || a.problem == "rosenbrock") {
        const std::size_t dim = a.dim ? a.dim : 10;
        return optim::box_objective(dim, -5.0, 5.0, a.problem == "sphere" ? optim::sphere : optim::rosenbrock);
    }
    if (a.problem == "gait-stability") {
        // Balance gains (kp, kd) against a forward push while walking.
        if (a.dim && a.dim != 2) throw ValidationError("gait-stability has dimension 2 (kp, kd)");
        const RobotParams p = c.params;
        optim::Objective obj;
        obj.dim = 2;
        obj.lower = Vector::Zero(2);
        obj.upper = (Vector(2) << 1.0, 0.05).finished();
        obj.evaluate = [p](const Vector &th) {
            SimOptions o;
            o.duration = 5.0;
            o.balance_on = true;
            o.balance.kp = th[0];
            o.balance.kd = th[1];
            o.run_ik = false;
            o.disturbances = {{2.05, 0.1, 0.0}};
            const SimLog log = simulate_walk({0.1, 0.0, 0.0}, p, o);
            return log.mean_tilt(2.05, 3.05) + (log.fallen() ? 1.0 : 0.0);
        };
        return obj;
    }
    if (a.problem == "kick-surrogate") {
        if (a.dim && a.dim != static_cast<std::size_t>(kick::kParamDim))
            throw ValidationError("kick-surrogate has dimension 25");
        const double s = a.distance;
        if (!(s >= kick::kMinDistance && s <= kick::kMaxDistance))
            throw ValidationError("kick distance must lie in [2.5, 12.5] m");
        return optim::box_objective(kick::kParamDim, -3.0, 3.0, [s](const Vector &th) {
            return std::abs(kick::SurrogateKick{}(th, s).achieved - s);
        });
    }
    throw ValidationError("unknown problem '" + a.problem + "'");
}

void run_optimize(const Globals &g, const OptimizeArgs &a) {
    const Context c = load_context(g);
    const optim::Algorithm algo = optim::parse_algorithm(a.algo);
    const optim::Objective obj = make_problem(a, c);
    const optim::OptResult r = optim::optimize(algo, obj, a.budget, g.seed);
    json j = {{"algorithm", a.algo},
              {"problem", a.problem},
              {"best_theta", std::vector<double>(r.best_theta.data(), r.best_theta.data() + r.best_theta.size())},
              {"best_cost", r.best_cost},
              {"history", r.history},
              {"evals_used", r.evals_used},
              {"seed", r.seed}};
    emit(g, j.dump(2) + "\n");
    std::fprintf(stderr, "%s on %s: best cost %.6g after %zu evaluations\n", a.algo.c_str(), a.problem.c_str(),
                 r.best_cost, r.evals_used);
}

struct KickArgs {
    int iters = 300;
    int samples = 64;
    std::string model;
    std::vector<double> distances;
};

void kick_train(const Globals &g, const KickArgs &a) {
    kick::TrainOptions opt;
    opt.iterations = a.iters;
    opt.samples_per_iter = a.samples;
    const kick::PolicyModel m = kick::train_contextual(kick::surrogate_task(), kick::make_model(), opt, g.seed);
    std::vector<double> held;
    for (int i = 0; i < 100; ++i) held.push_back(kick::kMinDistance + (kick::kMaxDistance - kick::kMinDistance) * (i + 0.5) / 100.0);
    const auto e = kick::eval_policy(m, kick::surrogate_task(), held);
    emit(g, kick::model_to_json(m).dump(2) + "\n");
    std::fprintf(stderr, "held-out mean |achieved - desired| = %.4f m\n", e.mean_abs_error);
}

void kick_eval(const Globals &g, const KickArgs &a) {
    const Context c = load_context(g);
    if (a.model.empty()) throw ValidationError("--model is required");
    const kick::PolicyModel m = kick::model_from_json(read_json_file(a.model));
    std::vector<double> ds = a.distances;
    if (ds.empty())
        for (int i = 0; i < 100; ++i) ds.push_back(m.context_lo + (m.context_hi - m.context_lo) * (i + 0.5) / 100.0);
    const kick::KickTask task = kick::surrogate_task();
    io::Table t;
    t.columns = {"desired", "achieved", "abs_error"};
    json rows = json::array();
    double sum = 0.0;
    for (double s : ds) {
        const kick::KickOutcome o = task(kick::policy_mean(m, s), s, 0);
        t.rows.push_back({s, o.achieved, std::abs(o.achieved - s)});
        rows.push_back({{"desired", s}, {"achieved", o.achieved}, {"abs_error", std::abs(o.achieved - s)}});
        sum += std::abs(o.achieved - s);
    }
    emit(g, render(c, t, json{{"mean_abs_error", sum / static_cast<double>(ds.size())}, {"contexts", rows}}));
}

struct FeatureArgs {
    std::string input;
    std::string target = "orientation_gt";
    std::vector<std::string> raw;
    std::vector<std::string> crosses;
    double fixed_dt = 0.0;
};

features::SensorFrame frame_from_row(const io::Table &t, std::size_t r) {
    features::SensorFrame f;
    const auto &row = t.rows[r];
    f.timestamp = row[t.column("timestamp")];
    f.z_coord = row[t.column("z")];
    f.orientation = row[t.column("orientation")];
    const auto &labels = features::state_labels();
    for (int i = 0; i < 3; ++i) f.gyro[i] = row[t.column(labels[3 + i])];
    for (int i = 0; i < 3; ++i) f.accel[i] = row[t.column(labels[6 + i])];
    for (int i = 0; i < 12; ++i) f.feet_force[i] = row[t.column(labels[9 + i])];
    for (int i = 0; i < 20; ++i) f.joints[i] = row[t.column(labels[21 + i])];
    return f;
}

void features_assemble(const Globals &g, const FeatureArgs &a) {
    const Context c = load_context(g);
    if (a.input.empty()) throw ValidationError("--input is required");
    const io::Table in = io::read_csv(a.input);
    const bool has_stop = std::find(in.columns.begin(), in.columns.end(), "stopped") != in.columns.end();
    io::Table out;
    out.columns = features::state_labels();
    std::uint64_t counter = 0;
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
        const bool stopped = has_stop && in.rows[r][in.column("stopped")] != 0.0;
        counter = features::update_counter(counter, stopped, r);
        if (r == 0) continue;
        const auto v = features::assemble_state(frame_from_row(in, r), frame_from_row(in, r - 1), counter,
                                                a.fixed_dt > 0.0 ? std::optional<double>(a.fixed_dt) : std::nullopt);
        out.rows.emplace_back(v.begin(), v.end());
    }
    emit(g, render(c, out, json{{"columns", out.columns}, {"rows", out.rows}}));
}

void features_fit(const Globals &g, const FeatureArgs &a) {
    if (a.input.empty()) throw ValidationError("--input is required");
    const io::Table t = io::read_csv(a.input);
    features::FeatureSpec spec = features::default_feature_spec();
    if (!a.raw.empty() || !a.crosses.empty()) {
        spec.raw = a.raw;
        spec.crosses.clear();
        for (const auto &c : a.crosses) {
            const auto star = c.find('*');
            if (star == std::string::npos) throw ValidationError("cross must be name*name, got '" + c + "'");
            spec.crosses.emplace_back(c.substr(0, star), c.substr(star + 1));
        }
    }
    const features::LinearPredictor m = features::fit_orientation_predictor(t, spec, a.target);
    json j = {{"features", m.spec.names()},
              {"weights", std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size())},
              {"bias", m.bias},
              {"training_rmse", m.training_rmse},
              {"rank_deficient", m.rank_deficient},
              {"rows", t.rows.size()}};
    emit(g, j.dump(2) + "\n");
    if (m.rank_deficient) std::fprintf(stderr, "warning: design matrix is rank deficient\n");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Biped gait toolkit: planning, CoM solvers, simulation, optimisation and learning utilities"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "robot parameter JSON file");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "output file (stdout when omitted)");
    app.add_option("--format", g.format, "output format: csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::function<void()> action;

    auto *gait = app.add_subcommand("gait", "footstep plan, CoM trajectory and joint trajectories");
    gait->require_subcommand(1);
    GaitArgs ga;
    auto *plan = gait->add_subcommand("plan", "footsteps and ZMP reference");
    add_gait_options(plan, ga);
    plan->callback([&] { action = [&] { gait_plan(g, ga); }; });
    auto *solve = gait->add_subcommand("solve", "CoM trajectory with the ZMP it produces");
    add_gait_options(solve, ga);
    solve->add_option("--solver", ga.solver, "cart-table or pendulum");
    solve->callback([&] { action = [&] { gait_solve(g, ga); }; });
    auto *joints = gait->add_subcommand("joints", "leg joint trajectories");
    add_gait_options(joints, ga);
    joints->add_option("--solver", ga.solver, "cart-table or pendulum");
    joints->add_option("--step-height", ga.step_height, "swing height, m");
    joints->callback([&] { action = [&] { gait_joints(g, ga); }; });

    auto *walk = app.add_subcommand("walk", "closed-loop walking simulation");
    walk->require_subcommand(1);
    WalkArgs wa;
    auto *sim = walk->add_subcommand("simulate", "simulate a walk and log ZMP margins");
    sim->add_option("--vx", wa.vx, "forward speed, m/s");
    sim->add_option("--vy", wa.vy, "lateral speed, m/s");
    sim->add_option("--omega", wa.omega, "turn rate, rad/s");
    sim->add_option("--duration", wa.duration, "seconds");
    sim->add_option("--solver", wa.solver, "cart-table or pendulum");
    sim->add_flag("--balance", wa.balance, "enable active balance");
    sim->add_option("--impulse", wa.impulses, "CoM push t:dvx[:dvy] (repeatable)");
    sim->callback([&] { action = [&] { walk_simulate(g, wa); }; });

    OptimizeArgs oa;
    auto *opt = app.add_subcommand("optimize", "black-box optimisation benchmark");
    opt->add_option("--algo", oa.algo, "hc, ts, ga, pso or cmaes");
    opt->add_option("--problem", oa.problem, "sphere, rosenbrock, gait-stability or kick-surrogate");
    opt->add_option("--dim", oa.dim, "problem dimension");
    opt->add_option("--budget", oa.budget, "objective evaluations");
    opt->add_option("--distance", oa.distance, "kick-surrogate target distance, m");
    opt->callback([&] { action = [&] { run_optimize(g, oa); }; });

    auto *kickc = app.add_subcommand("kick", "contextual kick policy");
    kickc->require_subcommand(1);
    KickArgs ka;
    auto *train = kickc->add_subcommand("train", "train the policy on the surrogate kick");
    train->add_option("--iters", ka.iters, "training iterations");
    train->add_option("--samples", ka.samples, "samples per iteration");
    train->callback([&] { action = [&] { kick_train(g, ka); }; });
    auto *eval = kickc->add_subcommand("eval", "evaluate a trained policy");
    eval->add_option("--model", ka.model, "policy JSON")->required();
    eval->add_option("--distance", ka.distances, "desired distance(s), m");
    eval->callback([&] { action = [&] { kick_eval(g, ka); }; });

    auto *feat = app.add_subcommand("features", "running-policy observation tools");
    feat->require_subcommand(1);
    FeatureArgs fa;
    auto *assemble = feat->add_subcommand("assemble", "sensor CSV to 80-entry state rows");
    assemble->add_option("--input", fa.input, "sensor frames CSV")->required();
    assemble->add_option("--fixed-dt", fa.fixed_dt, "differentiate over a fixed step instead of timestamps");
    assemble->callback([&] { action = [&] { features_assemble(g, fa); }; });
    auto *fit = feat->add_subcommand("fit-orientation", "fit the linear orientation predictor");
    fit->add_option("--input", fa.input, "dataset CSV")->required();
    fit->add_option("--target", fa.target, "target column");
    fit->add_option("--feature", fa.raw, "raw feature column (repeatable)");
    fit->add_option("--cross", fa.crosses, "feature cross a*b (repeatable)");
    fit->callback([&] { action = [&] { features_fit(g, fa); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 1;
    }
    try {
        if (action) action();
        return 0;
    } catch (const ValidationError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const PipelineError &e) {
        std::fprintf(stderr, "error in stage %s: %s\n", e.stage().c_str(), e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
