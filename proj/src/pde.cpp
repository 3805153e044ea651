// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/pde.hpp"

#include <algorithm>
#include <cmath>

#include "wedgecredit/errors.hpp"
#include "wedgecredit/pricing.hpp"

namespace wedge::pde {

namespace {

constexpr double kThetaHV = 0.5 + 0.28867513459481287; // 1/2 + sqrt(3)/6

struct Tridiag {
    // coefficients of 1/2 d^2 + xi d on a non-uniform grid, interior nodes
    std::vector<double> lo, mid, hi;
    // first-derivative weights, used by the mixed term
    std::vector<double> d_lo, d_mid, d_hi;
};

Tridiag build_stencils(const std::vector<double>& x, double xi) {
    const std::size_t n = x.size();
    Tridiag t;
    t.lo.assign(n, 0.0);
    t.mid.assign(n, 0.0);
    t.hi.assign(n, 0.0);
    t.d_lo.assign(n, 0.0);
    t.d_mid.assign(n, 0.0);
    t.d_hi.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double dlo = -hp / (hm * (hm + hp));
        const double dmid = (hp - hm) / (hm * hp);
        const double dhi = hm / (hp * (hm + hp));
        const double slo = 2.0 / (hm * (hm + hp));
        const double smid = -2.0 / (hm * hp);
        const double shi = 2.0 / (hp * (hm + hp));
        t.lo[i] = 0.5 * slo + xi * dlo;
        t.mid[i] = 0.5 * smid + xi * dmid;
        t.hi[i] = 0.5 * shi + xi * dhi;
        t.d_lo[i] = dlo;
        t.d_mid[i] = dmid;
        t.d_hi[i] = dhi;
    }
    return t;
}

void thomas_solve(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                  std::vector<double>& d) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(b[i - 1]) < 1e-300) throw LinAlgFailure("hv_solve: singular tridiagonal");
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    if (std::abs(b[n - 1]) < 1e-300) throw LinAlgFailure("hv_solve: singular tridiagonal");
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

} // namespace

Grid1D build_grid1d(double M, int n, double center, double concentration) {
    if (n < 20) throw DomainError("build_grid1d: at least 20 nodes required");
    if (!(M > 0.0) || !(center > 0.0) || !(center < M))
        throw DomainError("build_grid1d: center must lie inside (0, M)");
    if (!(concentration > 0.0)) throw DomainError("build_grid1d: concentration must be positive");
    Grid1D g;
    g.nodes.resize(n);
    const double delta = concentration * M;
    const double u0 = std::asinh(-center / delta);
    const double u1 = std::asinh((M - center) / delta);
    for (int i = 0; i < n; ++i) {
        const double u = u0 + (u1 - u0) * i / (n - 1.0);
        g.nodes[i] = center + delta * std::sinh(u);
    }
    g.nodes.front() = 0.0;
    g.nodes.back() = M;
    // snap the nearest interior node onto the center
    std::size_t best = 1;
    for (std::size_t i = 1; i + 1 < g.nodes.size(); ++i)
        if (std::abs(g.nodes[i] - center) < std::abs(g.nodes[best] - center)) best = i;
    g.nodes[best] = center;
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        if (g.nodes[i] <= g.nodes[i - 1])
            throw DomainError("build_grid1d: nodes failed to stay increasing");
    return g;
}

Grid2D build_grid(double M1, double M2, int n1, int n2, double center1, double center2,
                  double concentration, double dt) {
    Grid2D g;
    g.x1 = build_grid1d(M1, n1, center1, concentration);
    g.x2 = build_grid1d(M2, n2, center2, concentration);
    g.dt = dt;
    return g;
}

double PdeSolution::interpolate(double x1, double x2) const {
    const auto& xs = grid.x1.nodes;
    const auto& ys = grid.x2.nodes;
    const auto i1 = std::clamp<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), x1) - xs.begin(), 1, xs.size() - 1);
    const auto j1 = std::clamp<std::size_t>(
        std::upper_bound(ys.begin(), ys.end(), x2) - ys.begin(), 1, ys.size() - 1);
    const double tx = (x1 - xs[i1 - 1]) / (xs[i1] - xs[i1 - 1]);
    const double ty = (x2 - ys[j1 - 1]) / (ys[j1] - ys[j1 - 1]);
    return (1 - tx) * (1 - ty) * at(i1 - 1, j1 - 1) + tx * (1 - ty) * at(i1, j1 - 1) +
           (1 - tx) * ty * at(i1 - 1, j1) + tx * ty * at(i1, j1);
}

PdeSolution hv_solve(const PdeProblem& p, const Grid2D& grid, int steps, Exec exec) {
    const std::size_t n1 = grid.x1.size();
    const std::size_t n2 = grid.x2.size();
    const double dt = grid.dt;
    const auto& xs = grid.x1.nodes;
    const auto& ys = grid.x2.nodes;
    const Tridiag s1 = build_stencils(xs, p.xi1);
    const Tridiag s2 = build_stencils(ys, p.xi2);

    auto idx = [n2](std::size_t i, std::size_t j) { return i * n2 + j; };

    std::vector<double> u(n1 * n2);
    // terminal data sampled with the half-maximum convention through a
    // four-point average straddling each node
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double e1 = 1e-9 * (1.0 + std::abs(xs[i]));
            const double e2 = 1e-9 * (1.0 + std::abs(ys[j]));
            u[idx(i, j)] = 0.25 * (p.terminal(xs[i] - e1, ys[j] - e2) +
                                   p.terminal(xs[i] - e1, ys[j] + e2) +
                                   p.terminal(xs[i] + e1, ys[j] - e2) +
                                   p.terminal(xs[i] + e1, ys[j] + e2));
        }
    }

    const int nth1 = threads_for(exec, static_cast<int>(n1));
    const int nth2 = threads_for(exec, static_cast<int>(n2));

    std::vector<double> a1u(n1 * n2), a2u(n1 * n2), a0u(n1 * n2);
    std::vector<double> y0(n1 * n2), ys2(n1 * n2), a1y(n1 * n2), a2y(n1 * n2), a0y(n1 * n2);

    auto apply_ops = [&](const std::vector<double>& v, std::vector<double>& o1,
                         std::vector<double>& o2, std::vector<double>& o0) {
#pragma omp parallel for num_threads(nth1) schedule(static)
        for (std::size_t i = 1; i < n1 - 1; ++i) {
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                o1[idx(i, j)] = s1.lo[i] * v[idx(i - 1, j)] + s1.mid[i] * v[idx(i, j)] +
                                s1.hi[i] * v[idx(i + 1, j)];
                o2[idx(i, j)] = s2.lo[j] * v[idx(i, j - 1)] + s2.mid[j] * v[idx(i, j)] +
                                s2.hi[j] * v[idx(i, j + 1)];
                // mixed derivative: tensor of first-difference weights
                double m = 0.0;
                for (int di = -1; di <= 1; ++di) {
                    const double wi = di < 0 ? s1.d_lo[i] : (di == 0 ? s1.d_mid[i] : s1.d_hi[i]);
                    if (wi == 0.0) continue;
                    double inner = 0.0;
                    for (int dj = -1; dj <= 1; ++dj) {
                        const double wj =
                            dj < 0 ? s2.d_lo[j] : (dj == 0 ? s2.d_mid[j] : s2.d_hi[j]);
                        if (wj != 0.0) inner += wj * v[idx(i + di, j + dj)];
                    }
                    m += wi * inner;
                }
                o0[idx(i, j)] = p.rho * m;
            }
        }
    };

    auto set_boundaries = [&](std::vector<double>& v, double tau) {
        for (std::size_t j = 0; j < n2; ++j) {
            v[idx(0, j)] = p.left(tau, ys[j]);
            v[idx(n1 - 1, j)] = p.right(tau, ys[j]);
        }
        for (std::size_t i = 0; i < n1; ++i) {
            v[idx(i, 0)] = p.bottom(tau, xs[i]);
            v[idx(i, n2 - 1)] = p.top(tau, xs[i]);
        }
    };

    // sweep in direction 1: solve (I - theta dt A1) out = rhs on each x2 line
    auto implicit_x1 = [&](const std::vector<double>& rhs, std::vector<double>& out) {
#pragma omp parallel for num_threads(nth2) schedule(static)
        for (std::size_t j = 1; j < n2 - 1; ++j) {
            std::vector<double> a(n1 - 2), b(n1 - 2), c(n1 - 2), d(n1 - 2);
            for (std::size_t i = 1; i < n1 - 1; ++i) {
                a[i - 1] = -kThetaHV * dt * s1.lo[i];
                b[i - 1] = 1.0 - kThetaHV * dt * s1.mid[i];
                c[i - 1] = -kThetaHV * dt * s1.hi[i];
                d[i - 1] = rhs[idx(i, j)];
            }
            d[0] += kThetaHV * dt * s1.lo[1] * out[idx(0, j)];
            d[n1 - 3] += kThetaHV * dt * s1.hi[n1 - 2] * out[idx(n1 - 1, j)];
            thomas_solve(a, b, c, d);
            for (std::size_t i = 1; i < n1 - 1; ++i) out[idx(i, j)] = d[i - 1];
        }
    };
    auto implicit_x2 = [&](const std::vector<double>& rhs, std::vector<double>& out) {
#pragma omp parallel for num_threads(nth1) schedule(static)
        for (std::size_t i = 1; i < n1 - 1; ++i) {
            std::vector<double> a(n2 - 2), b(n2 - 2), c(n2 - 2), d(n2 - 2);
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                a[j - 1] = -kThetaHV * dt * s2.lo[j];
                b[j - 1] = 1.0 - kThetaHV * dt * s2.mid[j];
                c[j - 1] = -kThetaHV * dt * s2.hi[j];
                d[j - 1] = rhs[idx(i, j)];
            }
            d[0] += kThetaHV * dt * s2.lo[1] * out[idx(i, 0)];
            d[n2 - 3] += kThetaHV * dt * s2.hi[n2 - 2] * out[idx(i, n2 - 1)];
            thomas_solve(a, b, c, d);
            for (std::size_t j = 1; j < n2 - 1; ++j) out[idx(i, j)] = d[j - 1];
        }
    };

    std::vector<double> rhs(n1 * n2), stage(n1 * n2);

    // Rannacher startup: the first two steps run as pairs of implicit
    // half-steps (Douglas, theta = 1) to damp the terminal discontinuity.
    const int n_rannacher = std::min(2, steps);
    for (int step = 0; step < n_rannacher; ++step) {
        for (int half = 0; half < 2; ++half) {
            const double hdt = 0.5 * dt;
            const double tau_next = step * dt + (half + 1) * hdt;
            apply_ops(u, a1u, a2u, a0u);
            for (std::size_t i = 1; i < n1 - 1; ++i)
                for (std::size_t j = 1; j < n2 - 1; ++j) {
                    const auto k = idx(i, j);
                    y0[k] = u[k] + hdt * (a0u[k] + a1u[k] + a2u[k] - p.source);
                }
            stage = y0;
            set_boundaries(stage, tau_next);
#pragma omp parallel for num_threads(nth2) schedule(static)
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                std::vector<double> a(n1 - 2), b(n1 - 2), c(n1 - 2), d(n1 - 2);
                for (std::size_t i = 1; i < n1 - 1; ++i) {
                    a[i - 1] = -hdt * s1.lo[i];
                    b[i - 1] = 1.0 - hdt * s1.mid[i];
                    c[i - 1] = -hdt * s1.hi[i];
                    d[i - 1] = y0[idx(i, j)] - hdt * a1u[idx(i, j)];
                }
                d[0] += hdt * s1.lo[1] * stage[idx(0, j)];
                d[n1 - 3] += hdt * s1.hi[n1 - 2] * stage[idx(n1 - 1, j)];
                thomas_solve(a, b, c, d);
                for (std::size_t i = 1; i < n1 - 1; ++i) stage[idx(i, j)] = d[i - 1];
            }
#pragma omp parallel for num_threads(nth1) schedule(static)
            for (std::size_t i = 1; i < n1 - 1; ++i) {
                std::vector<double> a(n2 - 2), b(n2 - 2), c(n2 - 2), d(n2 - 2);
                for (std::size_t j = 1; j < n2 - 1; ++j) {
                    a[j - 1] = -hdt * s2.lo[j];
                    b[j - 1] = 1.0 - hdt * s2.mid[j];
                    c[j - 1] = -hdt * s2.hi[j];
                    d[j - 1] = stage[idx(i, j)] - hdt * a2u[idx(i, j)];
                }
                d[0] += hdt * s2.lo[1] * stage[idx(i, 0)];
                d[n2 - 3] += hdt * s2.hi[n2 - 2] * stage[idx(i, n2 - 1)];
                thomas_solve(a, b, c, d);
                for (std::size_t j = 1; j < n2 - 1; ++j) stage[idx(i, j)] = d[j - 1];
            }
            u.swap(stage);
            set_boundaries(u, tau_next);
        }
    }

    for (int step = n_rannacher; step < steps; ++step) {
        const double tau_next = (step + 1) * dt;
        apply_ops(u, a1u, a2u, a0u);

        // predictor
        for (std::size_t i = 1; i < n1 - 1; ++i)
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                const auto k = idx(i, j);
                y0[k] = u[k] + dt * (a0u[k] + a1u[k] + a2u[k] - p.source);
            }
        stage = y0;
        set_boundaries(stage, tau_next);
        for (std::size_t i = 1; i < n1 - 1; ++i)
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                const auto k = idx(i, j);
                rhs[k] = y0[k] - kThetaHV * dt * a1u[k];
            }
        implicit_x1(rhs, stage);
        for (std::size_t i = 1; i < n1 - 1; ++i)
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                const auto k = idx(i, j);
                rhs[k] = stage[k] - kThetaHV * dt * a2u[k];
            }
        implicit_x2(rhs, stage);
        ys2 = stage; // Y2 with boundaries at tau_next

        // corrector
        apply_ops(ys2, a1y, a2y, a0y);
        for (std::size_t i = 1; i < n1 - 1; ++i)
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                const auto k = idx(i, j);
                const double fy = a0y[k] + a1y[k] + a2y[k];
                const double fu = a0u[k] + a1u[k] + a2u[k];
                rhs[k] = y0[k] + 0.5 * dt * (fy - fu) - kThetaHV * dt * a1y[k];
            }
        implicit_x1(rhs, stage);
        for (std::size_t i = 1; i < n1 - 1; ++i)
            for (std::size_t j = 1; j < n2 - 1; ++j) {
                const auto k = idx(i, j);
                rhs[k] = stage[k] - kThetaHV * dt * a2y[k];
            }
        implicit_x2(rhs, stage);

        u.swap(stage);
        set_boundaries(u, tau_next);
    }

    PdeSolution sol;
    sol.grid = grid;
    sol.values = std::move(u);
    return sol;
}

PdeProblem make_field_problem(FieldKind kind, const model::TwoBank& m, double coupon) {
    PdeProblem p;
    const double omega2 = m.nd.omega * m.nd.omega;
    const double coupon_bar = coupon / omega2;
    const double mu1 = m.nd.mu_eq[0];
    const double mu2 = m.nd.mu_eq[1];
    const double b1 = m.nd.mu_tilde_lt[0];
    const double K1 = m.nd.mu_tilde_eq[0];
    const double xi1 = m.nd.xi[0];
    const double xi2 = m.nd.xi[1];
    const double R1 = m.net.R[0];
    const double R2 = m.net.R[1];
    p.xi1 = xi1;
    p.xi2 = xi2;
    p.rho = m.net.corr(0, 1);
    p.source = 0.0;

    switch (kind) {
        case FieldKind::Q:
            p.terminal = [m](double x1, double x2) {
                return m.region_x(x1, x2) == clearing::Region::D12 ? 1.0 : 0.0;
            };
            p.left = [](double, double) { return 0.0; };
            p.bottom = [](double, double) { return 0.0; };
            p.top = [=](double tau, double x1) {
                return greens::chi_survival(tau, x1, 0.0, mu1, xi1);
            };
            p.right = [=](double tau, double x2) {
                return greens::chi_survival(tau, x2, 0.0, mu2, xi2);
            };
            break;
        case FieldKind::q1:
            p.terminal = [m](double x1, double x2) {
                const auto r = m.region_x(x1, x2);
                return (r == clearing::Region::D12 || r == clearing::Region::D1) ? 1.0 : 0.0;
            };
            p.left = [](double, double) { return 0.0; };
            p.bottom = [=](double tau, double x1) {
                return x1 >= b1 ? greens::chi_survival(tau, x1, b1, K1, xi1) : 0.0;
            };
            p.top = [=](double tau, double x1) {
                return greens::chi_survival(tau, x1, 0.0, mu1, xi1);
            };
            p.right = [](double, double) { return 1.0; };
            break;
        case FieldKind::C1:
            p.source = coupon_bar;
            p.terminal = [m](double x1, double x2) {
                return pricing::cds_terminal_payoff(m, {m.asset_of_x(0, x1), m.asset_of_x(1, x2)});
            };
            p.left = [=](double, double) { return 1.0 - R1; };
            p.bottom = [=](double tau, double x1) {
                return x1 > b1 ? pricing::cds_1d_core(tau, x1, b1, K1, xi1, R1, coupon_bar)
                               : 1.0 - R1;
            };
            p.top = [=](double tau, double x1) {
                return pricing::cds_1d_core(tau, x1, 0.0, mu1, xi1, R1, coupon_bar);
            };
            p.right = [=](double tau, double) { return -coupon_bar * tau; };
            break;
        case FieldKind::F1:
            p.source = coupon_bar;
            p.terminal = [m](double x1, double x2) {
                return pricing::ftd_terminal_payoff(m, {m.asset_of_x(0, x1), m.asset_of_x(1, x2)});
            };
            p.left = [=](double, double) { return 1.0 - R1; };
            p.bottom = [=](double, double) { return 1.0 - R2; };
            p.top = [=](double tau, double x1) {
                return pricing::cds_1d_core(tau, x1, 0.0, mu1, xi1, R1, coupon_bar);
            };
            p.right = [=](double tau, double x2) {
                return pricing::cds_1d_core(tau, x2, 0.0, mu2, xi2, R2, coupon_bar);
            };
            break;
    }
    return p;
}

Grid2D default_grid(const model::TwoBank& m, int n1, int n2, double dt_calendar,
                    double concentration) {
    const double omega2 = m.nd.omega * m.nd.omega;
    const double reach = 8.0 * std::sqrt(m.T_bar());
    const double M1 = m.nd.mu_tilde_eq[0] + reach;
    const double M2 = m.nd.mu_tilde_eq[1] + reach;
    return build_grid(M1, M2, n1, n2, m.nd.mu_tilde_eq[0], m.nd.mu_tilde_eq[1], concentration,
                      dt_calendar * omega2);
}

int steps_for(const model::TwoBank& m, const Grid2D& grid) {
    return std::max(1, static_cast<int>(std::lround(m.T_bar() / grid.dt)));
}

PdeSolution solve_field(FieldKind kind, const model::TwoBank& m, double coupon, const Grid2D& grid,
                        int steps, Exec exec) {
    return hv_solve(make_field_problem(kind, m, coupon), grid, steps, exec);
}

} // namespace wedge::pde
