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

#ifndef BIPED_OPTIM_LOCAL_SEARCH_HPP
#define BIPED_OPTIM_LOCAL_SEARCH_HPP

#include <biped/optim/objective.hpp>

#include <deque>

namespace biped::optim {

struct HillClimbOptions {
    double initial_step = 0.1; // fraction of the bound range
    double grow = 1.2;
    double shrink = 0.5;
    /// Consecutive rejections before one shrink; 1 shrinks on every rejection.
    int shrink_after = 8;
    int stall_restart = 200;
    /// Optional start point; a random point in the box otherwise.
    Vector start;
};

/// Gaussian-perturbation hill climbing with a per-run step size. A stall is
/// a rejected candidate; the step grows on every acceptance and shrinks once
/// per shrink_after consecutive stalls. After stall_restart consecutive
/// stalls the search restarts from a fresh random point.
inline OptResult hill_climb(const Objective &obj, std::size_t budget, std::uint64_t seed,
                            const HillClimbOptions &opt = {}) {
    obj.validate();
    if (budget < 1) throw ValidationError("hill climbing needs a budget of at least 1");
    Rng rng(seed);
    Evaluator eval(obj, budget, seed);
    const Vector range = obj.range();
    const auto n = static_cast<Eigen::Index>(obj.dim);

    Vector x = opt.start.size() == n ? project(opt.start, obj.lower, obj.upper) : uniform_point(rng, obj.lower, obj.upper);
    double fx = eval(x);
    eval.end_iteration();
    double step = opt.initial_step;
    int stalls = 0;
    while (!eval.exhausted()) {
        if (stalls >= opt.stall_restart) {
            x = uniform_point(rng, obj.lower, obj.upper);
            fx = eval(x);
            step = opt.initial_step;
            stalls = 0;
            eval.end_iteration();
            continue;
        }
        const Vector cand = sample_in_box(
            [&] { return Vector(x + step * range.cwiseProduct(standard_normal(rng, n))); }, obj.lower, obj.upper);
        const double fc = eval(cand);
        if (fc < fx) {
            x = cand;
            fx = fc;
            step *= opt.grow;
            stalls = 0;
        } else {
            ++stalls;
            if (stalls % std::max(opt.shrink_after, 1) == 0) step *= opt.shrink;
        }
        eval.end_iteration();
    }
    return eval.finish();
}

struct TabuOptions {
    int neighbours = 20;
    std::size_t archive_size = 50;
    double exclusion_radius = 0.05; // fraction of the range, per dimension
    double initial_step = 0.1;      // fraction of the range
    double grow = 1.05;
    double shrink = 0.95;
};

/// Continuous tabu search. Distances are measured in range-normalised
/// coordinates, so the exclusion ball is r = 0.05 of every side of the box.
/// A tabu candidate is still admissible when it beats the best cost seen
/// (aspiration). The neighbourhood width grows after an improving iteration
/// and shrinks otherwise. When every neighbour is tabu the search jumps back
/// to the incumbent.
inline OptResult tabu_search(const Objective &obj, std::size_t budget, std::uint64_t seed,
                             const TabuOptions &opt = {}) {
    obj.validate();
    if (budget < 1) throw ValidationError("tabu search needs a budget of at least 1");
    if (opt.neighbours < 1) throw ValidationError("tabu search needs at least one neighbour");
    Rng rng(seed);
    Evaluator eval(obj, budget, seed);
    const Vector range = obj.range();
    const auto n = static_cast<Eigen::Index>(obj.dim);

    std::deque<Vector> archive;
    auto is_tabu = [&](const Vector &c) {
        for (const Vector &a : archive)
            if ((c - a).cwiseQuotient(range).norm() < opt.exclusion_radius) return true;
        return false;
    };
    auto remember = [&](const Vector &x) {
        archive.push_back(x);
        if (archive.size() > opt.archive_size) archive.pop_front();
    };

    Vector x = uniform_point(rng, obj.lower, obj.upper);
    eval(x);
    remember(x);
    eval.end_iteration();
    double step = opt.initial_step;
    while (!eval.exhausted()) {
        const double best_before = eval.best();
        Vector chosen;
        double chosen_cost = std::numeric_limits<double>::infinity();
        for (int k = 0; k < opt.neighbours && !eval.exhausted(); ++k) {
            Vector c = sample_in_box(
                [&] { return Vector(x + step * range.cwiseProduct(standard_normal(rng, n))); }, obj.lower, obj.upper);
            const double fc = eval(c);
            const bool admissible = !is_tabu(c) || fc < best_before;
            if (admissible && fc < chosen_cost) {
                chosen = std::move(c);
                chosen_cost = fc;
            }
        }
        if (chosen.size() == n) {
            x = chosen;
            remember(x);
        } else {
            x = eval.best_theta();
        }
        step *= eval.best() < best_before ? opt.grow : opt.shrink;
        eval.end_iteration();
    }
    return eval.finish();
}

} // namespace biped::optim

#endif
