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

// Pendulum relations between CoM and ZMP.
//
// Forward:  T_p = M (g + z'') (x - p) - M x'' z        (moment about p)
//           p   = x - z x'' / (g + z'')                 (T_p = 0)
//
// Inverse, two routes:
//   * constant height (cart-table): periodic steady state of
//     x'' = (g/h)(x - p) computed harmonic by harmonic;
//   * variable height: the ZMP relation discretised with central
//     differences gives a tridiagonal system per axis.

#ifndef BIPED_COM_SOLVER_HPP
#define BIPED_COM_SOLVER_HPP

#include <biped/model.hpp>
#include <biped/tridiagonal.hpp>
#include <biped/zmp_planner.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace biped {

namespace detail {

inline double guarded_denominator(double g, double az, std::size_t index) {
    const double denom = g + az;
    if (!(denom > kSingularityEps)) throw SingularityError(index, denom);
    return denom;
}

} // namespace detail

/// Moment about the point p_x on the x axis.
inline double compute_moment(const ComSample &s, double p_x, const RobotParams &params) {
    const double denom = detail::guarded_denominator(params.gravity_g, s.az, 0);
    return params.mass_M * denom * (s.x - p_x) - params.mass_M * s.ax * s.z;
}

inline PlanarPoint zmp_of(const ComSample &s, double g, std::size_t index = 0) {
    const double c = s.z / detail::guarded_denominator(g, s.az, index);
    return {s.x - c * s.ax, s.y - c * s.ay};
}

inline ZmpReference compute_zmp(const ComTrajectory &traj, const RobotParams &params) {
    ZmpReference out;
    out.dt = traj.dt;
    out.samples.reserve(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        out.samples.push_back(zmp_of(traj.samples[i], params.gravity_g, i));
    return out;
}

// --- analytic constant-height route ----------------------------------------

/// Truncated Fourier series of one period of a uniformly sampled signal.
struct FourierZmp {
    double fundamental_omega = 0.0;
    double a0 = 0.0;
    std::vector<double> cos_coeffs; // a_k, k = 1..K
    std::vector<double> sin_coeffs; // b_k

    std::size_t harmonics() const { return cos_coeffs.size(); }

    double evaluate(double t) const {
        double v = a0;
        for (std::size_t k = 1; k <= harmonics(); ++k) {
            const double w = static_cast<double>(k) * fundamental_omega * t;
            v += cos_coeffs[k - 1] * std::cos(w) + sin_coeffs[k - 1] * std::sin(w);
        }
        return v;
    }
};

namespace detail {

/// cos/sin of 2*pi*m/N for m in [0, N).
struct UnitRoots {
    std::vector<double> c, s;
    explicit UnitRoots(std::size_t n) : c(n), s(n) {
        for (std::size_t m = 0; m < n; ++m) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
            c[m] = std::cos(a);
            s[m] = std::sin(a);
        }
    }
};

inline FourierZmp fit_fourier(const std::vector<double> &v, double dt, std::size_t K, const UnitRoots &roots) {
    const std::size_t n = v.size();
    FourierZmp f;
    f.fundamental_omega = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    double sum = 0.0;
    for (double x : v) sum += x;
    f.a0 = sum / static_cast<double>(n);
    f.cos_coeffs.assign(K, 0.0);
    f.sin_coeffs.assign(K, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        double ac = 0.0, as = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const std::size_t idx = (k * m) % n;
            ac += v[m] * roots.c[idx];
            as += v[m] * roots.s[idx];
        }
        f.cos_coeffs[k - 1] = 2.0 * ac / static_cast<double>(n);
        f.sin_coeffs[k - 1] = 2.0 * as / static_cast<double>(n);
    }
    return f;
}

} // namespace detail

/// Least-squares Fourier fit on uniform samples (one period of length N dt).
inline FourierZmp fit_fourier(const std::vector<double> &v, double dt, std::size_t K) {
    if (K < 1) throw ValidationError("at least one harmonic is required");
    if (v.size() < 2 * K + 1)
        throw ValidationError("need at least 2*K+1 = " + std::to_string(2 * K + 1) + " samples, got " +
                              std::to_string(v.size()));
    return detail::fit_fourier(v, dt, K, detail::UnitRoots(v.size()));
}

/// Steady-state gain of harmonic frequency w through x'' = w0^2 (x - p).
inline double cart_table_gain(double w, const RobotParams &p) {
    const double w02 = p.gravity_g / p.nominal_com_height_h;
    return w02 / (w02 + w * w);
}

struct CartTableOptions {
    /// Subtract the line through the first and last samples before the fit
    /// and add it back to the CoM (a line is its own constant-height CoM).
    /// Lets non-periodic walking references use the periodic solver.
    bool detrend = false;
};

/// Largest harmonic count a signal of n samples supports.
inline std::size_t max_harmonics(std::size_t n) { return n >= 3 ? (n - 1) / 2 : 0; }

/// Periodic steady-state CoM of the cart-table model at height h: DC passes
/// through, harmonic k is scaled by w0^2 / (w0^2 + (k w)^2).
inline ComTrajectory solve_com_cart_table_fourier(const ZmpReference &zmp, const RobotParams &params,
                                                  std::size_t K_h, const CartTableOptions &opt = {}) {
    const std::size_t n = zmp.samples.size();
    if (K_h < 1) throw ValidationError("at least one harmonic is required");
    if (n < 2 * K_h + 1)
        throw ValidationError("need at least 2*K_h+1 = " + std::to_string(2 * K_h + 1) + " ZMP samples, got " +
                              std::to_string(n));
    const double dt = zmp.dt;
    const double h = params.nominal_com_height_h;
    const detail::UnitRoots roots(n);

    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = zmp.samples[i].x;
        py[i] = zmp.samples[i].y;
    }
    auto trend_of = [&](const std::vector<double> &v) -> std::pair<double, double> {
        if (!opt.detrend || n < 2) return {0.0, 0.0};
        return {v.front(), (v.back() - v.front()) / static_cast<double>(n - 1)};
    };
    const auto [x0, xs] = trend_of(px);
    const auto [y0, ys] = trend_of(py);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] -= x0 + xs * static_cast<double>(i);
        py[i] -= y0 + ys * static_cast<double>(i);
    }
    const FourierZmp fx = detail::fit_fourier(px, dt, K_h, roots);
    const FourierZmp fy = detail::fit_fourier(py, dt, K_h, roots);

    ComTrajectory out;
    out.dt = dt;
    out.samples.assign(n, ComSample{});
    for (std::size_t i = 0; i < n; ++i) {
        out.samples[i].x = fx.a0 + x0 + xs * static_cast<double>(i);
        out.samples[i].y = fy.a0 + y0 + ys * static_cast<double>(i);
        out.samples[i].z = h;
    }
    for (std::size_t k = 1; k <= K_h; ++k) {
        const double w = static_cast<double>(k) * fx.fundamental_omega;
        const double G = cart_table_gain(w, params);
        const double w2 = w * w;
        const double xa = G * fx.cos_coeffs[k - 1], xb = G * fx.sin_coeffs[k - 1];
        const double ya = G * fy.cos_coeffs[k - 1], yb = G * fy.sin_coeffs[k - 1];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = (k * i) % n;
            const double c = roots.c[idx], s = roots.s[idx];
            const double vx = xa * c + xb * s, vy = ya * c + yb * s;
            ComSample &cs = out.samples[i];
            cs.x += vx;
            cs.y += vy;
            cs.ax -= w2 * vx;
            cs.ay -= w2 * vy;
        }
    }
    return out;
}

/// Default harmonic count: full resolution of the sample grid.
inline ComTrajectory solve_com_cart_table_fourier(const ZmpReference &zmp, const RobotParams &params) {
    return solve_com_cart_table_fourier(zmp, params, max_harmonics(zmp.samples.size()));
}

// --- numeric variable-height route ----------------------------------------

enum class BoundaryMode { Dirichlet, Periodic };

/// First and last CoM positions per axis; ignored in periodic mode.
struct ComBoundary {
    double x_first = 0.0, x_last = 0.0;
    double y_first = 0.0, y_last = 0.0;
};

/// Dirichlet ends pinned to the first and last ZMP samples.
inline ComBoundary boundary_from_zmp(const ZmpReference &zmp) {
    return {zmp.samples.front().x, zmp.samples.back().x, zmp.samples.front().y, zmp.samples.back().y};
}

namespace detail {

inline std::vector<double> solve_axis(const std::vector<double> &p, const std::vector<double> &c, double dt,
                                      double first, double last, BoundaryMode mode) {
    const std::size_t n = p.size();
    const double inv = 1.0 / (dt * dt);
    if (mode == BoundaryMode::Periodic) {
        std::vector<double> lo(n), di(n), up(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = up[i] = -c[i] * inv;
            di[i] = 1.0 + 2.0 * c[i] * inv;
        }
        return solve_cyclic_tridiagonal(lo, di, up, p);
    }
    const std::size_t m = n - 2;
    std::vector<double> lo(m), di(m), up(m), rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j + 1;
        lo[j] = up[j] = -c[i] * inv;
        di[j] = 1.0 + 2.0 * c[i] * inv;
        rhs[j] = p[i];
    }
    rhs.front() += c[1] * inv * first;
    rhs.back() += c[n - 2] * inv * last;
    std::vector<double> inner = solve_tridiagonal(lo, di, up, rhs);
    std::vector<double> x(n);
    x.front() = first;
    x.back() = last;
    std::copy(inner.begin(), inner.end(), x.begin() + 1);
    return x;
}

inline std::vector<double> stencil_acceleration(const std::vector<double> &x, double dt, BoundaryMode mode) {
    if (mode == BoundaryMode::Dirichlet) return second_difference(x, dt);
    const std::size_t n = x.size();
    std::vector<double> a(n);
    const double inv = 1.0 / (dt * dt);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = (x[(i + n - 1) % n] - 2.0 * x[i] + x[(i + 1) % n]) * inv;
    return a;
}

} // namespace detail

/// Variable-height inverted pendulum: solves
///   p[i] = x[i] - c[i] (x[i-1] - 2 x[i] + x[i+1]) / dt^2,  c[i] = z[i] / (g + az[i])
/// for x (and likewise y). Accelerations in the result use the same stencil,
/// so compute_zmp on interior samples reproduces the input to solver precision.
inline ComTrajectory solve_com_pendulum_numeric(const ZmpReference &zmp, const HeightProfile &height,
                                                const ComBoundary &bc, const RobotParams &params,
                                                BoundaryMode mode = BoundaryMode::Dirichlet) {
    const std::size_t n = zmp.samples.size();
    if (n < 3) throw ValidationError("pendulum solver needs at least 3 samples");
    if (height.z_samples.size() != n || height.az_samples.size() != n)
        throw ValidationError("height profile has " + std::to_string(height.z_samples.size()) +
                              " samples, ZMP reference has " + std::to_string(n));
    if (!(zmp.dt > 0.0)) throw ValidationError("ZMP reference dt must be positive");
    std::vector<double> c(n), px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(height.z_samples[i] > 0.0))
            throw ValidationError("com height must be positive at sample " + std::to_string(i));
        c[i] = height.z_samples[i] / detail::guarded_denominator(params.gravity_g, height.az_samples[i], i);
        px[i] = zmp.samples[i].x;
        py[i] = zmp.samples[i].y;
    }
    const std::vector<double> x = detail::solve_axis(px, c, zmp.dt, bc.x_first, bc.x_last, mode);
    const std::vector<double> y = detail::solve_axis(py, c, zmp.dt, bc.y_first, bc.y_last, mode);
    const std::vector<double> ax = detail::stencil_acceleration(x, zmp.dt, mode);
    const std::vector<double> ay = detail::stencil_acceleration(y, zmp.dt, mode);
    ComTrajectory out;
    out.dt = zmp.dt;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = {x[i], y[i], height.z_samples[i], ax[i], ay[i], height.az_samples[i]};
    return out;
}

} // namespace biped

#endif
