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

// Common pieces of the black-box optimizers: the objective contract, the
// result record, box handling and a budget-aware evaluator.

#ifndef BIPED_OPTIM_OBJECTIVE_HPP
#define BIPED_OPTIM_OBJECTIVE_HPP

#include <biped/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace biped::optim {

using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Minimisation problem over a box. `evaluate` must be deterministic and
/// safe to call concurrently on distinct points.
struct Objective {
    std::size_t dim = 0;
    Vector lower;
    Vector upper;
    std::function<double(const Vector &)> evaluate;

    Vector range() const { return upper - lower; }

    void validate() const {
        if (dim == 0) throw ValidationError("objective dimension must be positive");
        if (static_cast<std::size_t>(lower.size()) != dim || static_cast<std::size_t>(upper.size()) != dim)
            throw ValidationError("bounds do not match the objective dimension");
        for (std::size_t i = 0; i < dim; ++i)
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
                throw ValidationError("bounds must be finite with lower < upper in dimension " + std::to_string(i));
        if (!evaluate) throw ValidationError("objective has no evaluation function");
    }
};

inline Objective box_objective(std::size_t dim, double lo, double hi, std::function<double(const Vector &)> f) {
    return {dim, Vector::Constant(static_cast<Eigen::Index>(dim), lo), Vector::Constant(static_cast<Eigen::Index>(dim), hi),
            std::move(f)};
}

struct OptResult {
    Vector best_theta;
    double best_cost = std::numeric_limits<double>::infinity();
    /// Best-so-far cost after every iteration (generation).
    std::vector<double> history;
    std::size_t evals_used = 0;
    std::uint64_t seed = 0;
    /// CMA-ES only: smallest covariance eigenvalue after repair, per generation.
    std::vector<double> min_cov_eigenvalue;
};

inline bool in_box(const Vector &x, const Vector &lo, const Vector &hi) {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

inline Vector project(const Vector &x, const Vector &lo, const Vector &hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

/// Shared box policy: redraw up to max_tries times, then project.
template <typename Draw>
Vector sample_in_box(Draw &&draw, const Vector &lo, const Vector &hi, int max_tries = 100) {
    Vector x = draw();
    for (int i = 1; i < max_tries && !in_box(x, lo, hi); ++i) x = draw();
    return in_box(x, lo, hi) ? x : project(x, lo, hi);
}

inline Vector uniform_point(Rng &rng, const Vector &lo, const Vector &hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
    return x;
}

inline Vector standard_normal(Rng &rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = g(rng);
    return z;
}

/// Counts evaluations against the budget and keeps the incumbent.
class Evaluator {
public:
    Evaluator(const Objective &obj, std::size_t budget, std::uint64_t seed) : obj_(obj), budget_(budget) {
        result_.seed = seed;
    }

    bool exhausted() const { return result_.evals_used >= budget_; }
    std::size_t remaining() const { return budget_ - result_.evals_used; }
    std::size_t used() const { return result_.evals_used; }
    double best() const { return result_.best_cost; }
    const Vector &best_theta() const { return result_.best_theta; }

    double operator()(const Vector &x) {
        if (exhausted()) throw NumericError("evaluation budget exceeded");
        const double f = obj_.evaluate(x);
        ++result_.evals_used;
        if (!std::isfinite(f)) {
            std::ostringstream os;
            os << "objective returned " << f << " at theta = [" << x.transpose() << "]";
            throw NumericError(os.str());
        }
        if (f < result_.best_cost) {
            result_.best_cost = f;
            result_.best_theta = x;
        }
        return f;
    }

    void end_iteration() { result_.history.push_back(result_.best_cost); }
    OptResult &result() { return result_; }

    OptResult finish() {
        if (result_.history.empty() || result_.history.back() != result_.best_cost) end_iteration();
        return std::move(result_);
    }

private:
    const Objective &obj_;
    std::size_t budget_;
    OptResult result_;
};

} // namespace biped::optim

#endif
