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

// Plans a short forward walk, solves the CoM with both solvers and reports
// how far the resulting ZMP strays from the reference.

#include <biped/harness.hpp>

#include <cmath>
#include <cstdio>

int main() {
    const biped::RobotParams p;
    const biped::GaitCommand cmd{0.1, 0.0, 0.0};
    for (auto solver : {biped::SolverKind::CartTable, biped::SolverKind::Pendulum}) {
        const biped::GaitSolution g = biped::solve_gait(cmd, p, solver, 4.0);
        const biped::ZmpReference back = biped::compute_zmp(g.com, p);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < back.samples.size(); ++i)
            worst = std::max(worst, std::hypot(back.samples[i].x - g.zmp.samples[i].x,
                                               back.samples[i].y - g.zmp.samples[i].y));
        std::printf("%-10s %zu steps, %zu samples, max ZMP tracking error %.2e m\n", biped::solver_name(solver),
                    g.plan.steps.size(), g.com.samples.size(), worst);
    }

    biped::SimOptions opt;
    opt.balance_on = true;
    opt.disturbances = {{3.05, 0.1, 0.0}};
    const biped::SimLog log = biped::simulate_walk(cmd, p, opt);
    std::printf("pushed walk: min margin %.4f m, fallen %s\n", log.min_margin(), log.fallen() ? "yes" : "no");
}
