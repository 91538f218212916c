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

#ifndef BIPED_TRIDIAGONAL_HPP
#define BIPED_TRIDIAGONAL_HPP

#include <biped/errors.hpp>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace biped {

/// Thomas elimination for
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored. Runs in O(n); throws NumericError
/// with the offending row when a pivot vanishes.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw NumericError("tridiagonal system has inconsistent band sizes");
    std::vector<double> c(n), d(n), x(n);
    auto pivot_ok = [](double piv, double scale) { return std::abs(piv) > 1e-13 * scale && std::isfinite(piv); };
    double piv = diag[0];
    if (!pivot_ok(piv, std::abs(diag[0]) + std::abs(upper[0])))
        throw NumericError("singular tridiagonal system: pivot breakdown at row 0");
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        const double scale = std::abs(diag[i]) + std::abs(lower[i]) + std::abs(upper[i]);
        if (!pivot_ok(piv, scale))
            throw NumericError("singular tridiagonal system: pivot breakdown at row " + std::to_string(i));
        c[i] = i + 1 < n ? upper[i] / piv : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

/// Cyclic variant: lower[0] couples row 0 to x[n-1] and upper[n-1] couples
/// row n-1 to x[0]. Sherman-Morrison on top of two Thomas sweeps.
inline std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                                    std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (n < 3) throw NumericError("cyclic tridiagonal system needs at least 3 rows");
    const double alpha = upper[n - 1]; // A(n-1, 0)
    const double beta = lower[0];      // A(0, n-1)
    const double gamma = -diag[0];
    std::vector<double> b(diag.begin(), diag.end());
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    std::vector<double> lo(lower.begin(), lower.end()), up(upper.begin(), upper.end());
    lo[0] = 0.0;
    up[n - 1] = 0.0;
    const std::vector<double> x = solve_tridiagonal(lo, b, up, rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> z = solve_tridiagonal(lo, b, up, u);
    const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    if (!(std::abs(denom) > 1e-14))
        throw NumericError("singular cyclic tridiagonal system");
    const double fact = (x[0] + beta * x[n - 1] / gamma) / denom;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
    return out;
}

} // namespace biped

#endif
