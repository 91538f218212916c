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

// Observation vector for the running policy and the linear orientation
// predictor that feeds one of its entries.
//
// Layout (80 entries):
//   0       counter
//   1       z
//   2       orientation
//   3..5    gyro x, y, z
//   6..8    accel x, y, z
//   9..20   feet force: left fx fy fz tx ty tz, then right
//   21..40  joints 0..19
//   41..79  time derivatives of entries 2..40, same order

#ifndef BIPED_RUN_FEATURES_HPP
#define BIPED_RUN_FEATURES_HPP

#include <biped/errors.hpp>
#include <biped/io.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace biped::features {

struct SensorFrame {
    double z_coord = 0.0;
    double orientation = 0.0;
    std::array<double, 3> gyro{};
    std::array<double, 3> accel{};
    std::array<double, 12> feet_force{};
    std::array<double, 20> joints{};
    double timestamp = 0.0;
};

inline constexpr std::size_t kCurrentSize = 41;
inline constexpr std::size_t kDerivativeSize = 39;
inline constexpr std::size_t kStateSize = kCurrentSize + kDerivativeSize;

using StateVector80 = std::array<double, kStateSize>;

inline const std::vector<std::string> &state_labels() {
    static const std::vector<std::string> labels = [] {
        std::vector<std::string> l{"counter", "z", "orientation", "gyro_x", "gyro_y", "gyro_z",
                                   "accel_x", "accel_y", "accel_z"};
        for (const char *foot : {"left", "right"})
            for (const char *c : {"fx", "fy", "fz", "tx", "ty", "tz"}) l.push_back(std::string(foot) + "_" + c);
        for (int j = 0; j < 20; ++j) l.push_back("joint_" + std::string(j < 10 ? "0" : "") + std::to_string(j));
        for (std::size_t i = 2; i < kCurrentSize; ++i) l.push_back("d_" + l[i]);
        return l;
    }();
    return labels;
}

/// FNV-1a over the comma-joined labels; changes whenever the layout does.
inline std::uint64_t layout_hash() {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    bool first = true;
    for (const auto &label : state_labels()) {
        if (!first) h = (h ^ static_cast<unsigned char>(',')) * 0x100000001b3ULL;
        first = false;
        for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
    }
    return h;
}

/// Counter that restarts at zero whenever the robot stops and otherwise
/// ticks once every third time step (the vision frame rate).
inline std::uint64_t update_counter(std::uint64_t counter, bool robot_stopped, std::uint64_t time_step_index) {
    if (robot_stopped) return 0;
    return time_step_index > 0 && time_step_index % 3 == 0 ? counter + 1 : counter;
}

namespace detail {

inline std::array<double, kCurrentSize> current_block(const SensorFrame &f, std::uint64_t counter) {
    std::array<double, kCurrentSize> v{};
    std::size_t k = 0;
    v[k++] = static_cast<double>(counter);
    v[k++] = f.z_coord;
    v[k++] = f.orientation;
    for (double x : f.gyro) v[k++] = x;
    for (double x : f.accel) v[k++] = x;
    for (double x : f.feet_force) v[k++] = x;
    for (double x : f.joints) v[k++] = x;
    return v;
}

} // namespace detail

/// Current readings followed by first differences over the frame interval,
/// or over fixed_dt when given.
inline StateVector80 assemble_state(const SensorFrame &curr, const SensorFrame &prev, std::uint64_t counter,
                                    std::optional<double> fixed_dt = std::nullopt) {
    double dt = curr.timestamp - prev.timestamp;
    if (!(dt > 0.0)) throw ValidationError("sensor timestamps must increase");
    if (fixed_dt) {
        if (!(*fixed_dt > 0.0)) throw ValidationError("fixed dt must be positive");
        dt = *fixed_dt;
    }
    const auto c = detail::current_block(curr, counter);
    const auto p = detail::current_block(prev, 0);
    StateVector80 out{};
    for (std::size_t i = 0; i < kCurrentSize; ++i) out[i] = c[i];
    for (std::size_t i = 0; i < kDerivativeSize; ++i) out[kCurrentSize + i] = (c[i + 2] - p[i + 2]) / dt;
    return out;
}

// --- Orientation predictor ---------------------------------------------

/// Raw columns and pairwise products ("crosses") used as regressors.
struct FeatureSpec {
    std::vector<std::string> raw;
    std::vector<std::pair<std::string, std::string>> crosses;

    std::vector<std::string> names() const {
        std::vector<std::string> n = raw;
        for (const auto &[a, b] : crosses) n.push_back(a + "*" + b);
        return n;
    }
};

/// Gyro and accelerometer axes plus every pairwise product among them.
inline FeatureSpec default_feature_spec() {
    FeatureSpec s;
    s.raw = {"gyro_x", "gyro_y", "gyro_z", "accel_x", "accel_y", "accel_z"};
    for (std::size_t i = 0; i < s.raw.size(); ++i)
        for (std::size_t j = i + 1; j < s.raw.size(); ++j) s.crosses.emplace_back(s.raw[i], s.raw[j]);
    return s;
}

struct LinearPredictor {
    FeatureSpec spec;
    Eigen::VectorXd weights;
    double bias = 0.0;
    double training_rmse = 0.0;
    bool rank_deficient = false;

    double predict(const Eigen::VectorXd &features) const { return weights.dot(features) + bias; }
};

/// Builds the regressor matrix for `spec` from a table.
inline Eigen::MatrixXd design_matrix(const io::Table &t, const FeatureSpec &spec) {
    std::vector<std::size_t> raw_idx;
    for (const auto &c : spec.raw) raw_idx.push_back(t.column(c));
    std::vector<std::pair<std::size_t, std::size_t>> cross_idx;
    for (const auto &[a, b] : spec.crosses) cross_idx.emplace_back(t.column(a), t.column(b));
    const auto nf = static_cast<Eigen::Index>(raw_idx.size() + cross_idx.size());
    Eigen::MatrixXd X(static_cast<Eigen::Index>(t.rows.size()), nf);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Eigen::Index k = 0;
        for (std::size_t i : raw_idx) X(static_cast<Eigen::Index>(r), k++) = t.rows[r][i];
        for (const auto &[i, j] : cross_idx) X(static_cast<Eigen::Index>(r), k++) = t.rows[r][i] * t.rows[r][j];
    }
    return X;
}

/// Least squares with an unpenalised intercept and ridge on the weights.
inline LinearPredictor fit_linear(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, double ridge = 1e-8) {
    const Eigen::Index n = X.rows(), d = X.cols();
    if (n < 2) throw ValidationError("orientation predictor needs at least 2 rows");
    if (y.size() != n) throw ValidationError("target length does not match the design matrix");
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("dataset contains non-finite values");
    Eigen::MatrixXd A(n, d + 1);
    A << X, Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd normal = A.transpose() * A;
    normal.diagonal().head(d).array() += ridge;
    const Eigen::VectorXd beta = normal.ldlt().solve(A.transpose() * y);
    LinearPredictor m;
    m.weights = beta.head(d);
    m.bias = beta[d];
    m.training_rmse = std::sqrt((A * beta - y).squaredNorm() / static_cast<double>(n));
    m.rank_deficient = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(A).rank() < d + 1;
    return m;
}

inline LinearPredictor fit_orientation_predictor(const io::Table &t, const FeatureSpec &spec = default_feature_spec(),
                                                 const std::string &target = "orientation_gt") {
    const std::size_t ti = t.column(target);
    Eigen::VectorXd y(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) y[static_cast<Eigen::Index>(r)] = t.rows[r][ti];
    LinearPredictor m = fit_linear(design_matrix(t, spec), y);
    m.spec = spec;
    return m;
}

} // namespace biped::features

#endif
