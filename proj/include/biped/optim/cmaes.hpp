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

#ifndef BIPED_OPTIM_CMAES_HPP
#define BIPED_OPTIM_CMAES_HPP

#include <biped/optim/objective.hpp>

#include <numeric>

namespace biped::optim {

struct CmaesOptions {
    std::size_t lambda = 0;     // 0 selects 4 + floor(3 ln n)
    double initial_sigma = 0.3; // in range-normalised coordinates
    double min_eigenvalue = 1e-14;
    int max_resample = 100;
};

inline std::size_t cmaes_default_lambda(std::size_t dim) {
    return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates
/// and cumulative step-size adaptation. The search runs in coordinates
/// scaled to the unit box, so sigma is relative to every bound range.
inline OptResult cmaes(const Objective &obj, std::size_t budget, std::uint64_t seed, const CmaesOptions &opt = {}) {
    obj.validate();
    const std::size_t dim = obj.dim;
    const std::size_t lambda = opt.lambda ? opt.lambda : cmaes_default_lambda(dim);
    if (lambda < 2) throw ValidationError("CMA-ES needs lambda >= 2");
    if (budget < lambda)
        throw ValidationError("CMA-ES needs a budget of at least lambda (" + std::to_string(lambda) + ")");
    if (!(opt.initial_sigma > 0.0)) throw ValidationError("CMA-ES initial sigma must be positive");

    Rng rng(seed);
    Evaluator eval(obj, budget, seed);
    const auto n = static_cast<Eigen::Index>(dim);
    const double nd = static_cast<double>(dim);
    const Vector range = obj.range();
    const Vector zero = Vector::Zero(n), one = Vector::Ones(n);
    auto to_world = [&](const Vector &u) -> Vector { return obj.lower + u.cwiseProduct(range); };

    const std::size_t mu = lambda / 2;
    Vector w(static_cast<Eigen::Index>(mu));
    for (std::size_t i = 0; i < mu; ++i)
        w[static_cast<Eigen::Index>(i)] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
    w /= w.sum();
    const double mueff = 1.0 / w.squaredNorm();

    const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
    const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
    const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

    Vector mean = uniform_point(rng, zero, one);
    double sigma = opt.initial_sigma;
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd B = C;
    Vector D = Vector::Ones(n);
    Vector pc = Vector::Zero(n), ps = Vector::Zero(n);

    std::vector<Vector> xs(lambda), ys(lambda);
    std::vector<double> fs(lambda);
    std::vector<std::size_t> order(lambda);
    for (std::size_t gen = 0; !eval.exhausted(); ++gen) {
        if (eval.remaining() < lambda) {
            // Too few evaluations for a full generation: spend them on samples only.
            while (!eval.exhausted()) {
                const Vector u = sample_in_box(
                    [&] { return Vector(mean + sigma * (B * D.cwiseProduct(standard_normal(rng, n)))); }, zero, one,
                    opt.max_resample);
                eval(to_world(u));
            }
            eval.end_iteration();
            break;
        }
        for (std::size_t k = 0; k < lambda; ++k) {
            xs[k] = sample_in_box(
                [&] { return Vector(mean + sigma * (B * D.cwiseProduct(standard_normal(rng, n)))); }, zero, one,
                opt.max_resample);
            ys[k] = (xs[k] - mean) / sigma;
            fs[k] = eval(to_world(xs[k]));
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });

        Vector yw = Vector::Zero(n);
        for (std::size_t i = 0; i < mu; ++i) yw += w[static_cast<Eigen::Index>(i)] * ys[order[i]];
        mean += sigma * yw;

        const Eigen::MatrixXd C_inv_sqrt = B * D.cwiseInverse().asDiagonal() * B.transpose();
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (C_inv_sqrt * yw);
        const double ps_norm = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(gen + 1)));
        const bool hsig = ps_norm / chi_n < 1.4 + 2.0 / (nd + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < mu; ++i)
            rank_mu += w[static_cast<Eigen::Index>(i)] * ys[order[i]] * ys[order[i]].transpose();
        C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
        sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));

        // Repair: symmetrise and clamp the spectrum from below.
        C = 0.5 * (C + C.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        if (es.info() != Eigen::Success) throw NumericError("CMA-ES covariance eigendecomposition failed");
        Vector ev = es.eigenvalues().cwiseMax(opt.min_eigenvalue);
        B = es.eigenvectors();
        C = B * ev.asDiagonal() * B.transpose();
        D = ev.cwiseSqrt();
        eval.result().min_cov_eigenvalue.push_back(ev.minCoeff());
        if (!std::isfinite(sigma) || !mean.allFinite()) throw NumericError("CMA-ES state diverged");
        eval.end_iteration();
    }
    return eval.finish();
}

} // namespace biped::optim

#endif
