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

#ifndef BIPED_OPTIMIZERS_HPP
#define BIPED_OPTIMIZERS_HPP

#include <biped/optim/cmaes.hpp>
#include <biped/optim/episodic.hpp>
#include <biped/optim/local_search.hpp>
#include <biped/optim/objective.hpp>
#include <biped/optim/population.hpp>

#include <string_view>

namespace biped::optim {

enum class Algorithm { HC, TS, GA, PSO, CMAES };

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "hc") return Algorithm::HC;
    if (s == "ts") return Algorithm::TS;
    if (s == "ga") return Algorithm::GA;
    if (s == "pso") return Algorithm::PSO;
    if (s == "cmaes") return Algorithm::CMAES;
    throw ValidationError("unknown algorithm '" + std::string(s) + "' (expected hc, ts, ga, pso or cmaes)");
}

inline const char *algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::HC: return "hc";
    case Algorithm::TS: return "ts";
    case Algorithm::GA: return "ga";
    case Algorithm::PSO: return "pso";
    case Algorithm::CMAES: return "cmaes";
    }
    return "?";
}

struct OptimizerOptions {
    HillClimbOptions hc;
    TabuOptions ts;
    GeneticOptions ga;
    SwarmOptions pso;
    CmaesOptions cmaes;
};

inline std::size_t minimum_budget(Algorithm a, std::size_t dim, const OptimizerOptions &opt = {}) {
    switch (a) {
    case Algorithm::GA: return opt.ga.population;
    case Algorithm::PSO: return opt.pso.particles;
    case Algorithm::CMAES: return opt.cmaes.lambda ? opt.cmaes.lambda : cmaes_default_lambda(dim);
    default: return 1;
    }
}

inline OptResult optimize(Algorithm a, const Objective &obj, std::size_t budget, std::uint64_t seed,
                          const OptimizerOptions &opt = {}) {
    switch (a) {
    case Algorithm::HC: return hill_climb(obj, budget, seed, opt.hc);
    case Algorithm::TS: return tabu_search(obj, budget, seed, opt.ts);
    case Algorithm::GA: return genetic_algorithm(obj, budget, seed, opt.ga);
    case Algorithm::PSO: return particle_swarm(obj, budget, seed, opt.pso);
    case Algorithm::CMAES: return cmaes(obj, budget, seed, opt.cmaes);
    }
    throw ValidationError("unknown algorithm");
}

inline double sphere(const Vector &x) { return x.squaredNorm(); }

inline double rosenbrock(const Vector &x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i], b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
    }
    return f;
}

} // namespace biped::optim

#endif
