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

// Minimal episodic environment interface: the task owns its state and only
// advances when the agent sends an action.

#ifndef BIPED_OPTIM_EPISODIC_HPP
#define BIPED_OPTIM_EPISODIC_HPP

#include <biped/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace biped::optim {

/// Raised when a caller breaks the reset/step protocol.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StepResult {
    Eigen::VectorXd observation;
    double reward = 0.0;
    bool done = false;
};

class EpisodicTask {
public:
    virtual ~EpisodicTask() = default;

    Eigen::VectorXd reset() {
        score_ = 0.0;
        done_ = false;
        started_ = true;
        return do_reset();
    }

    StepResult step(const Eigen::VectorXd &action) {
        if (!started_) throw ContractViolation("step called before reset");
        if (done_) throw ContractViolation("step called after the episode finished; reset first");
        StepResult r = do_step(action);
        if (!std::isfinite(r.reward)) throw NumericError("task returned a non-finite reward");
        score_ += r.reward;
        done_ = r.done;
        return r;
    }

    double episode_score() const { return score_; }
    bool done() const { return done_; }

protected:
    virtual Eigen::VectorXd do_reset() = 0;
    virtual StepResult do_step(const Eigen::VectorXd &action) = 0;

private:
    double score_ = 0.0;
    bool done_ = false;
    bool started_ = false;
};

using Policy = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

/// Resets the task and steps it with the policy until done.
inline double run_episode(EpisodicTask &task, const Policy &policy, std::size_t max_steps = 10'000'000) {
    Eigen::VectorXd obs = task.reset();
    for (std::size_t i = 0; i < max_steps; ++i) {
        StepResult r = task.step(policy(obs));
        if (r.done) return task.episode_score();
        obs = std::move(r.observation);
    }
    throw ContractViolation("episode did not finish within " + std::to_string(max_steps) + " steps");
}

} // namespace biped::optim

#endif
