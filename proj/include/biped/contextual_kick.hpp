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

// Contextual kick policy: normalised RBF features over the desired kick
// distance, a linear policy onto 25 controller parameters, a reward-weighted
// regression trainer and a closed-form surrogate kick for testing.

#ifndef BIPED_CONTEXTUAL_KICK_HPP
#define BIPED_CONTEXTUAL_KICK_HPP

#include <biped/errors.hpp>
#include <biped/optim/episodic.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace biped::kick {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kParamDim = 25;
inline constexpr double kMinDistance = 2.5;
inline constexpr double kMaxDistance = 12.5;

struct PolicyModel {
    Vector centers;              // normalised context units
    double bandwidth_sq = 0.5;   // normalised context units
    Matrix W;                    // kParamDim x K
    Matrix Sigma;                // kParamDim x kParamDim
    double context_lo = kMinDistance;
    double context_hi = kMaxDistance;

    Eigen::Index k() const { return centers.size(); }
};

inline void validate_model(const PolicyModel &m) {
    if (m.k() < 2) throw ValidationError("policy needs at least 2 RBF centres");
    for (Eigen::Index j = 1; j < m.k(); ++j)
        if (!(m.centers[j] > m.centers[j - 1])) throw ValidationError("RBF centres must be strictly increasing");
    if (!(m.bandwidth_sq > 0.0)) throw ValidationError("RBF bandwidth must be positive");
    if (m.W.rows() != kParamDim || m.W.cols() != m.k())
        throw ValidationError("W must be " + std::to_string(kParamDim) + " x " + std::to_string(m.k()));
    if (!m.W.allFinite()) throw ValidationError("W must be finite");
    if (m.Sigma.rows() != kParamDim || m.Sigma.cols() != kParamDim)
        throw ValidationError("Sigma must be " + std::to_string(kParamDim) + " x " + std::to_string(kParamDim));
    if (!(m.context_lo <= m.context_hi)) throw ValidationError("context range is inverted");
}

/// K centres evenly spaced over [0, 1] including both ends, W = 0.
inline PolicyModel make_model(int K = 15, double bandwidth_sq = 0.5, double sigma0 = 0.4,
                              double lo = kMinDistance, double hi = kMaxDistance) {
    if (K < 2) throw ValidationError("policy needs at least 2 RBF centres");
    PolicyModel m;
    m.centers = Vector::LinSpaced(K, 0.0, 1.0);
    m.bandwidth_sq = bandwidth_sq;
    m.W = Matrix::Zero(kParamDim, K);
    m.Sigma = sigma0 * sigma0 * Matrix::Identity(kParamDim, kParamDim);
    m.context_lo = lo;
    m.context_hi = hi;
    validate_model(m);
    return m;
}

inline double normalize_context(double s, const PolicyModel &m) {
    constexpr double tol = 1e-12;
    if (!(s >= m.context_lo - tol && s <= m.context_hi + tol))
        throw ValidationError("kick distance " + std::to_string(s) + " m outside [" + std::to_string(m.context_lo) +
                              ", " + std::to_string(m.context_hi) + "]");
    if (m.context_hi == m.context_lo) return 0.0;
    return std::clamp((s - m.context_lo) / (m.context_hi - m.context_lo), 0.0, 1.0);
}

inline Vector rbf_features(double s, const PolicyModel &m) {
    const double sn = normalize_context(s, m);
    Vector e(m.k());
    for (Eigen::Index j = 0; j < m.k(); ++j) {
        const double d = sn - m.centers[j];
        e[j] = -d * d / (2.0 * m.bandwidth_sq);
    }
    // Shift by the max exponent so narrow bandwidths do not underflow to 0/0.
    Vector raw = (e.array() - e.maxCoeff()).exp();
    return raw / raw.sum();
}

inline Vector policy_mean(const PolicyModel &m, double s) { return m.W * rbf_features(s, m); }

/// Upper bound on |d theta_i / ds| over the context range, per component.
/// d phi_j / ds_n = phi_j (r_j - sum_k phi_k r_k) with r_j = (c_j - s_n) / sigma^2,
/// and the spread of r is at most (c_max - c_min) / sigma^2.
inline double lipschitz_bound(const PolicyModel &m) {
    if (m.context_hi == m.context_lo) return 0.0;
    const double spread = (m.centers.maxCoeff() - m.centers.minCoeff()) / m.bandwidth_sq;
    return m.W.cwiseAbs().maxCoeff() * spread / (m.context_hi - m.context_lo);
}

// --- Surrogate kick -----------------------------------------------------

struct KickOutcome {
    double achieved = 0.0;
    double reward = 0.0;
};

/// Closed-form stand-in for a simulated kick. Parameters are five blocks of
/// five. The optimum is
///   block 0:  theta*_i(s) = -1.5 + 0.1 i + (0.2 + 0.02 i) s
///   others:   theta*_j(s) = 0.3 cos j + 0.5 sin(0.7 j) u + 0.1 sin(pi u + 0.5 j),
///             u = (s - 2.5) / 10
/// The kick reaches s_lin, the mean of the block-0 affine inverses, minus
/// gamma (0.25) times the squared distance of the other blocks from their optimum
/// at s_lin. Reward is -|achieved - s|.
struct SurrogateKick {
    double gamma = 0.25;
    double noise_std = 0.0;

    static double slope(int i) { return 0.2 + 0.02 * i; }
    static double offset(int i) { return -1.5 + 0.1 * i; }

    static Vector optimum(double s) {
        Vector t(kParamDim);
        const double u = (s - kMinDistance) / (kMaxDistance - kMinDistance);
        for (int j = 0; j < kParamDim; ++j) {
            if (j < 5) {
                t[j] = offset(j) + slope(j) * s;
            } else {
                t[j] = 0.3 * std::cos(j) + 0.5 * std::sin(0.7 * j) * u + 0.1 * std::sin(std::numbers::pi * u + 0.5 * j);
            }
        }
        return t;
    }

    static double linear_distance(const Vector &theta) {
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += (theta[i] - offset(i)) / slope(i);
        return s / 5.0;
    }

    KickOutcome operator()(const Vector &theta, double s, std::uint64_t seed = 0) const {
        if (theta.size() != kParamDim) throw ValidationError("kick parameters must have 25 entries");
        const double s_lin = linear_distance(theta);
        const Vector target = optimum(s_lin);
        const double penalty = (theta.tail(kParamDim - 5) - target.tail(kParamDim - 5)).squaredNorm();
        double achieved = s_lin - gamma * penalty;
        if (noise_std > 0.0) {
            std::mt19937_64 rng(seed);
            achieved += std::normal_distribution<double>(0.0, noise_std)(rng);
        }
        return {achieved, -std::abs(achieved - s)};
    }
};

/// Maps (theta, desired distance, seed) to the kick outcome.
using KickTask = std::function<KickOutcome(const Vector &, double, std::uint64_t)>;

inline KickTask surrogate_task(const SurrogateKick &k = {}) {
    return [k](const Vector &theta, double s, std::uint64_t seed) { return k(theta, s, seed); };
}

/// One-shot episode: the action is the parameter vector, the episode ends
/// after the single kick.
class KickEpisode : public optim::EpisodicTask {
public:
    KickEpisode(KickTask task, double desired, std::uint64_t seed = 0)
        : task_(std::move(task)), desired_(desired), seed_(seed) {}

protected:
    Vector do_reset() override { return Vector::Constant(1, desired_); }
    optim::StepResult do_step(const Vector &theta) override {
        const KickOutcome o = task_(theta, desired_, seed_);
        return {Vector::Constant(1, o.achieved), o.reward, true};
    }

private:
    KickTask task_;
    double desired_;
    std::uint64_t seed_;
};

// --- Training -----------------------------------------------------------

/// Symmetrises and lifts eigenvalues to at least min_eig.
inline Matrix repair_spd(const Matrix &S, double min_eig = 1e-12) {
    const Matrix sym = 0.5 * (S + S.transpose());
    if (!sym.allFinite()) throw NumericError("search covariance is not finite");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) throw NumericError("search covariance repair failed");
    const Vector ev = es.eigenvalues().cwiseMax(min_eig);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline double effective_sample_size(const Vector &w) { return w.sum() * w.sum() / w.squaredNorm(); }

/// Softmax weights exp(r / eta) of standardised rewards, with eta found by
/// bisection so that the effective sample size lies in [lo, hi] * n.
/// Constant rewards give uniform weights.
inline Vector reward_weights(const Vector &rewards, double lo = 0.4, double hi = 0.6) {
    const auto n = static_cast<double>(rewards.size());
    if (!rewards.allFinite()) throw NumericError("non-finite reward");
    const double mean = rewards.mean();
    const double sd = std::sqrt((rewards.array() - mean).square().sum() / n);
    if (!(sd > 0.0)) return Vector::Constant(rewards.size(), 1.0 / n);
    const Vector z = (rewards.array() - mean) / sd;
    const double zmax = z.maxCoeff();
    auto weights = [&](double eta) -> Vector { return ((z.array() - zmax) / eta).exp(); };
    double log_lo = std::log(1e-4), log_hi = std::log(1e4);
    const double target = 0.5 * (lo + hi) * n;
    Vector w = weights(1.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (log_lo + log_hi);
        w = weights(std::exp(mid));
        const double ess = effective_sample_size(w);
        if (ess >= lo * n && ess <= hi * n) break;
        (ess < target ? log_lo : log_hi) = mid; // larger eta flattens the weights
    }
    return w / w.sum();
}

/// Weighted ridge regression of theta on phi, shrunk towards the current W:
/// minimises sum w_i |theta_i - W' phi_i|^2 + ridge |W' - W|^2.
inline Matrix weighted_policy_update(const Matrix &W, const Matrix &Phi, const Matrix &Theta, const Vector &w,
                                     double ridge = 1e-6) {
    const Eigen::Index K = Phi.cols();
    const Matrix A = Phi.transpose() * w.asDiagonal() * Phi + ridge * Matrix::Identity(K, K);
    const Matrix B = Theta.transpose() * w.asDiagonal() * Phi + ridge * W; // 25 x K
    return A.ldlt().solve(B.transpose()).transpose();
}

struct TrainOptions {
    int iterations = 300;
    int samples_per_iter = 64;
    double ridge = 1e-6;
    double forgetting = 0.2;    // weight of the new scatter in the Sigma blend
    double min_sigma_eig = 1e-12;
};

struct TrainTrace {
    std::vector<double> mean_abs_error; // of the policy mean on the iteration's contexts
    std::vector<double> min_sigma_eig;
};

inline PolicyModel train_contextual(const KickTask &task, PolicyModel model, const TrainOptions &opt,
                                    std::uint64_t seed, TrainTrace *trace = nullptr) {
    validate_model(model);
    const int n = opt.samples_per_iter;
    if (n < 2 * (model.k() + 1))
        throw ValidationError("samples per iteration must be at least 2 (K + 1) = " +
                              std::to_string(2 * (model.k() + 1)));
    if (opt.iterations < 0) throw ValidationError("iterations must be non-negative");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ctx(model.context_lo, model.context_hi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    model.Sigma = repair_spd(model.Sigma, opt.min_sigma_eig);

    Matrix Phi(n, model.k()), Theta(n, kParamDim);
    Vector R(n), s(n);
    for (int it = 0; it < opt.iterations; ++it) {
        const Eigen::LLT<Matrix> chol(model.Sigma);
        if (chol.info() != Eigen::Success) throw NumericError("search covariance is not positive definite");
        const Matrix L = chol.matrixL();
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            s[i] = model.context_lo == model.context_hi ? model.context_lo : ctx(rng);
            const Vector phi = rbf_features(s[i], model);
            const Vector mean = model.W * phi;
            Vector z(kParamDim);
            for (int d = 0; d < kParamDim; ++d) z[d] = gauss(rng);
            const Vector theta = mean + L * z;
            const KickOutcome o = task(theta, s[i], rng());
            if (!std::isfinite(o.reward)) throw NumericError("task returned a non-finite reward at s = " + std::to_string(s[i]));
            Phi.row(i) = phi.transpose();
            Theta.row(i) = theta.transpose();
            R[i] = o.reward;
            if (trace) err += std::abs(task(mean, s[i], 0).achieved - s[i]);
        }
        const Vector w = reward_weights(R);
        model.W = weighted_policy_update(model.W, Phi, Theta, w, opt.ridge);
        const Matrix resid = Theta - Phi * model.W.transpose();
        const Matrix scatter = resid.transpose() * w.asDiagonal() * resid;
        model.Sigma = repair_spd((1.0 - opt.forgetting) * model.Sigma + opt.forgetting * scatter, opt.min_sigma_eig);
        if (trace) {
            trace->mean_abs_error.push_back(err / n);
            trace->min_sigma_eig.push_back(Eigen::SelfAdjointEigenSolver<Matrix>(model.Sigma).eigenvalues().minCoeff());
        }
    }
    return model;
}

struct PolicyEvaluation {
    double mean_abs_error = 0.0;
    std::vector<double> errors;
};

/// Runs the policy mean for every context through the task, noise seed
/// fixed, and reports |achieved - desired|.
inline PolicyEvaluation eval_policy(const PolicyModel &model, const KickTask &task, const std::vector<double> &contexts,
                                    std::uint64_t seed = 0) {
    PolicyEvaluation out;
    for (double s : contexts) {
        const KickOutcome o = task(policy_mean(model, s), s, seed);
        out.errors.push_back(std::abs(o.achieved - s));
    }
    if (!out.errors.empty()) {
        double sum = 0.0;
        for (double e : out.errors) sum += e;
        out.mean_abs_error = sum / static_cast<double>(out.errors.size());
    }
    return out;
}

// --- Serialisation ------------------------------------------------------

inline nlohmann::json model_to_json(const PolicyModel &m) {
    auto row_major = [](const Matrix &M) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(M.size()));
        for (Eigen::Index r = 0; r < M.rows(); ++r)
            for (Eigen::Index c = 0; c < M.cols(); ++c) v.push_back(M(r, c));
        return v;
    };
    return {{"centers", std::vector<double>(m.centers.data(), m.centers.data() + m.centers.size())},
            {"bandwidth_sq", m.bandwidth_sq},
            {"W", row_major(m.W)},
            {"W_shape", {m.W.rows(), m.W.cols()}},
            {"Sigma", row_major(m.Sigma)},
            {"context_range", {m.context_lo, m.context_hi}}};
}

inline PolicyModel model_from_json(const nlohmann::json &j) {
    try {
        PolicyModel m;
        const auto c = j.at("centers").get<std::vector<double>>();
        m.centers = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
        m.bandwidth_sq = j.at("bandwidth_sq").get<double>();
        const auto K = m.centers.size();
        auto load = [](const std::vector<double> &v, Eigen::Index rows, Eigen::Index cols, const char *name) {
            if (static_cast<Eigen::Index>(v.size()) != rows * cols)
                throw ValidationError(std::string(name) + " has " + std::to_string(v.size()) + " entries, expected " +
                                      std::to_string(rows * cols));
            Matrix M(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index col = 0; col < cols; ++col) M(r, col) = v[static_cast<std::size_t>(r * cols + col)];
            return M;
        };
        m.W = load(j.at("W").get<std::vector<double>>(), kParamDim, K, "W");
        m.Sigma = load(j.at("Sigma").get<std::vector<double>>(), kParamDim, kParamDim, "Sigma");
        if (j.contains("context_range")) {
            m.context_lo = j.at("context_range").at(0).get<double>();
            m.context_hi = j.at("context_range").at(1).get<double>();
        }
        validate_model(m);
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed policy model: ") + e.what());
    }
}

} // namespace biped::kick

#endif
