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

// Trains the contextual kick policy on the surrogate and prints the error
// at a few distances.

#include <biped/contextual_kick.hpp>

#include <cmath>
#include <cstdio>

int main() {
    using namespace biped::kick;
    const KickTask task = surrogate_task();
    const PolicyModel m = train_contextual(task, make_model(), TrainOptions{}, 0);
    for (double s : {3.0, 5.0, 7.5, 10.0, 12.0}) {
        const KickOutcome o = task(policy_mean(m, s), s, 0);
        std::printf("desired %5.2f m  achieved %6.3f m  error %.3f m\n", s, o.achieved, std::abs(o.achieved - s));
    }
}
