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

#ifndef BIPED_OPTIM_POPULATION_HPP
#define BIPED_OPTIM_POPULATION_HPP

#include <biped/optim/objective.hpp>

#include <numeric>

namespace biped::optim {

struct GeneticOptions {
    std::size_t population = 50;
    int tournament = 3;
    double blend_alpha = 0.5;
    double mutation_rate = -1.0;   // per gene; negative means 1/dim
    double mutation_scale = 0.1;   // fraction of the range at generation 0
    double mutation_decay = 0.97;  // per generation
    double mutation_floor = 1e-8;
    std::size_t elitism = 1;
};

/// Real-coded generational GA: tournament selection, BLX-alpha crossover,
/// Gaussian mutation with a geometrically decaying width, elitism.
inline OptResult genetic_algorithm(const Objective &obj, std::size_t budget, std::uint64_t seed,
                                   const GeneticOptions &opt = {}) {
    obj.validate();
    if (opt.population < 2 || opt.tournament < 1 || opt.elitism >= opt.population)
        throw ValidationError("invalid genetic algorithm settings");
    if (budget < opt.population)
        throw ValidationError("genetic algorithm needs a budget of at least the population size (" +
                              std::to_string(opt.population) + ")");
    Rng rng(seed);
    Evaluator eval(obj, budget, seed);
    const Vector range = obj.range();
    const auto n = static_cast<Eigen::Index>(obj.dim);
    const double rate = opt.mutation_rate < 0.0 ? 1.0 / static_cast<double>(obj.dim) : opt.mutation_rate;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, opt.population - 1);

    std::vector<Vector> pop(opt.population);
    std::vector<double> cost(opt.population);
    for (std::size_t i = 0; i < opt.population; ++i) {
        pop[i] = uniform_point(rng, obj.lower, obj.upper);
        cost[i] = eval(pop[i]);
    }
    eval.end_iteration();

    auto tournament = [&]() -> const Vector & {
        std::size_t best = pick(rng);
        for (int k = 1; k < opt.tournament; ++k) {
            const std::size_t c = pick(rng);
            if (cost[c] < cost[best]) best = c;
        }
        return pop[best];
    };

    double sigma = opt.mutation_scale;
    std::vector<std::size_t> order(opt.population);
    while (!eval.exhausted()) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
        std::vector<Vector> next;
        std::vector<double> next_cost;
        for (std::size_t e = 0; e < opt.elitism; ++e) {
            next.push_back(pop[order[e]]);
            next_cost.push_back(cost[order[e]]);
        }
        while (next.size() < opt.population && !eval.exhausted()) {
            const Vector &a = tournament();
            const Vector &b = tournament();
            auto draw = [&] {
                Vector child(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
                    const double span = hi - lo;
                    child[i] = lo - opt.blend_alpha * span + u01(rng) * (1.0 + 2.0 * opt.blend_alpha) * span;
                    if (u01(rng) < rate) child[i] += sigma * range[i] * gauss(rng);
                }
                return child;
            };
            Vector child = sample_in_box(draw, obj.lower, obj.upper);
            next_cost.push_back(eval(child));
            next.push_back(std::move(child));
        }
        // A truncated final generation keeps the best of the old survivors.
        for (std::size_t i = next.size(); i < opt.population; ++i) {
            next.push_back(pop[order[i]]);
            next_cost.push_back(cost[order[i]]);
        }
        pop = std::move(next);
        cost = std::move(next_cost);
        sigma = std::max(sigma * opt.mutation_decay, opt.mutation_floor);
        eval.end_iteration();
    }
    return eval.finish();
}

struct SwarmOptions {
    std::size_t particles = 40;
    double inertia = 0.72;
    double cognitive = 1.49;
    double social = 1.49;
    double velocity_clamp = 0.5; // fraction of the range
};

/// Global-best particle swarm. Positions leaving the box are projected and
/// the offending velocity component is zeroed.
inline OptResult particle_swarm(const Objective &obj, std::size_t budget, std::uint64_t seed,
                                const SwarmOptions &opt = {}) {
    obj.validate();
    if (opt.particles < 1) throw ValidationError("particle swarm needs at least one particle");
    if (budget < opt.particles)
        throw ValidationError("particle swarm needs a budget of at least the swarm size (" +
                              std::to_string(opt.particles) + ")");
    Rng rng(seed);
    Evaluator eval(obj, budget, seed);
    const Vector range = obj.range();
    const Vector vmax = opt.velocity_clamp * range;
    const auto n = static_cast<Eigen::Index>(obj.dim);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    std::vector<Vector> x(opt.particles), v(opt.particles), pbest(opt.particles);
    std::vector<double> pcost(opt.particles);
    Vector gbest;
    double gcost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < opt.particles; ++i) {
        x[i] = uniform_point(rng, obj.lower, obj.upper);
        v[i] = uniform_point(rng, -vmax, vmax);
        pbest[i] = x[i];
        pcost[i] = eval(x[i]);
        if (pcost[i] < gcost) {
            gcost = pcost[i];
            gbest = x[i];
        }
    }
    eval.end_iteration();

    while (!eval.exhausted()) {
        for (std::size_t i = 0; i < opt.particles && !eval.exhausted(); ++i) {
            for (Eigen::Index d = 0; d < n; ++d) {
                double vd = opt.inertia * v[i][d] + opt.cognitive * u01(rng) * (pbest[i][d] - x[i][d]) +
                            opt.social * u01(rng) * (gbest[d] - x[i][d]);
                vd = std::clamp(vd, -vmax[d], vmax[d]);
                double xd = x[i][d] + vd;
                if (xd < obj.lower[d] || xd > obj.upper[d]) {
                    xd = std::clamp(xd, obj.lower[d], obj.upper[d]);
                    vd = 0.0;
                }
                v[i][d] = vd;
                x[i][d] = xd;
            }
            const double f = eval(x[i]);
            if (f < pcost[i]) {
                pcost[i] = f;
                pbest[i] = x[i];
            }
            if (f < gcost) {
                gcost = f;
                gbest = x[i];
            }
        }
        eval.end_iteration();
    }
    return eval.finish();
}

} // namespace biped::optim

#endif
