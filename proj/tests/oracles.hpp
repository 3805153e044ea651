// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations, kept independent of the library
// paths they are used to check.

#ifndef WEDGECREDIT_TESTS_ORACLES_HPP
#define WEDGECREDIT_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// Crank-Nicolson solve of  u_t + 1/2 u_xx + xi u_x = source  on
// [lo, hi] backward from the terminal condition, Dirichlet data on both
// ends as functions of time-to-maturity. Returns u(tau_final, x) on the
// uniform grid.
struct CN1DResult {
    std::vector<double> x;
    std::vector<double> u;

    double interpolate(double xq) const {
        if (xq <= x.front()) return u.front();
        if (xq >= x.back()) return u.back();
        const double h = x[1] - x[0];
        const auto i = static_cast<std::size_t>((xq - x.front()) / h);
        const double t = (xq - x[i]) / h;
        return (1.0 - t) * u[i] + t * u[i + 1];
    }
};

inline CN1DResult crank_nicolson_1d(double lo, double hi, int n, double tau_final, int steps,
                                    double xi, double source,
                                    const std::function<double(double)>& terminal,
                                    const std::function<double(double)>& left_data,
                                    const std::function<double(double)>& right_data) {
    CN1DResult r;
    r.x.resize(n);
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) r.x[i] = lo + i * h;
    r.u.resize(n);
    for (int i = 0; i < n; ++i) {
        // half-maximum sampling of terminal discontinuities
        r.u[i] = 0.5 * (terminal(r.x[i] - 1e-9) + terminal(r.x[i] + 1e-9));
    }
    const double dt = tau_final / steps;
    const double alpha = 0.5 / (h * h);
    const double beta = xi / (2.0 * h);
    // interior operator coefficients
    const double c_lo = alpha - beta, c_mid = -2.0 * alpha, c_hi = alpha + beta;
    std::vector<double> a(n), b(n), c(n), d(n);
    // Rannacher startup: the first two steps run as implicit half-steps
    const int n_startup = steps >= 2 ? 4 : 0;
    const int total_sub = n_startup + (steps - n_startup / 2);
    for (int sub = 0; sub < total_sub; ++sub) {
        const bool startup = sub < n_startup;
        const double step_dt = startup ? 0.5 * dt : dt;
        const double theta = startup ? 1.0 : 0.5;
        const double tau_next = startup ? (sub + 1) * 0.5 * dt
                                        : (sub - n_startup / 2 + 1) * dt;
        for (int i = 1; i + 1 < n; ++i) {
            a[i] = -theta * step_dt * c_lo;
            b[i] = 1.0 - theta * step_dt * c_mid;
            c[i] = -theta * step_dt * c_hi;
            d[i] = r.u[i] +
                   (1.0 - theta) * step_dt *
                       (c_lo * r.u[i - 1] + c_mid * r.u[i] + c_hi * r.u[i + 1]) -
                   step_dt * source;
        }
        const double ul = left_data(tau_next);
        const double ur = right_data(tau_next);
        d[1] += theta * step_dt * c_lo * ul;
        d[n - 2] += theta * step_dt * c_hi * ur;
        // Thomas
        for (int i = 2; i + 1 < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        r.u[n - 2] = d[n - 2] / b[n - 2];
        for (int i = n - 3; i >= 1; --i) r.u[i] = (d[i] - c[i] * r.u[i + 1]) / b[i];
        r.u[0] = ul;
        r.u[n - 1] = ur;
    }
    return r;
}

} // namespace oracles

#endif
