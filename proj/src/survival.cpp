// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/survival.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "wedgecredit/errors.hpp"
#include "wedgecredit/quadrature.hpp"
#include "wedgecredit/specfun.hpp"

namespace wedge::survival {

namespace {

using std::complex;

constexpr double kTailLog = 40.0; // e^{-40} negligibility margin for time cutoffs

// Lower elapsed-time cutoff for boundary convolutions: contributions
// with theta below this are smaller than the tolerance because the
// kernel cannot reach the edge from X' in so little time.
double theta_floor(double dist, double tau) {
    const double cut = dist * dist / (2.0 * kTailLog);
    return std::min(tau, std::max(greens::kMinTheta2d, cut));
}

} // namespace

double default_x_max(const model::TwoBank& m) {
    const double mu_top = std::max(m.nd.mu_tilde_eq[0], m.nd.mu_tilde_eq[1]);
    return mu_top + 8.0 * std::sqrt(m.T_bar());
}

double joint_survival(const model::TwoBank& m, const SurvivalRequest& req) {
    const double tau = m.T_bar() - req.t_bar;
    if (tau < 0.0) throw DomainError("joint_survival: valuation time past maturity");
    if (req.X1p <= 0.0 || req.X2p <= 0.0) return 0.0;
    const double mu1 = m.nd.mu_eq[0];
    const double mu2 = m.nd.mu_eq[1];
    if (tau < greens::kMinTheta2d) {
        // terminal indicator with the half-maximum convention
        const double h1 = req.X1p > mu1 ? 1.0 : (req.X1p == mu1 ? 0.5 : 0.0);
        const double h2 = req.X2p > mu2 ? 1.0 : (req.X2p == mu2 ? 0.5 : 0.0);
        return h1 * h2;
    }
    const double M = req.x_max > 0.0 ? req.x_max : default_x_max(m);
    quadrature::QuadOptions outer{req.quad_tol, 1e-13, 400, 15};
    quadrature::QuadOptions inner{req.quad_tol, 1e-13, 200, 15};
    return quadrature::integrate2d(
        [&](double x1, double x2) {
            return greens::green_2d(tau, x1, x2, req.X1p, req.X2p, m.geom, req.budget);
        },
        mu1, M, mu2, M, outer, inner);
}

double marginal_survival(const model::TwoBank& m, const SurvivalRequest& req) {
    const double tau = m.T_bar() - req.t_bar;
    if (tau < 0.0) throw DomainError("marginal_survival: valuation time past maturity");
    if (req.X1p <= 0.0) return 0.0;
    const double mu1 = m.nd.mu_eq[0];
    const double mu2 = m.nd.mu_eq[1];
    const double mut1_lt = m.nd.mu_tilde_lt[0];
    const double mut1_eq = m.nd.mu_tilde_eq[0];
    const double xi1 = m.nd.xi[0];
    if (req.X2p <= 0.0) {
        // bottom edge carries the post-default 1D survival data
        return req.X1p >= mut1_lt ? greens::chi_survival(tau, req.X1p, mut1_lt, mut1_eq, xi1) : 0.0;
    }
    if (tau < greens::kMinTheta2d) {
        const auto region = m.region_x(req.X1p, req.X2p);
        return (region == clearing::Region::D12 || region == clearing::Region::D1) ? 1.0 : 0.0;
    }
    const double M = req.x_max > 0.0 ? req.x_max : default_x_max(m);
    quadrature::QuadOptions outer{req.quad_tol, 1e-13, 400, 15};
    quadrature::QuadOptions inner{req.quad_tol, 1e-13, 200, 15};

    const double chi_inf = greens::chi_survival(tau, req.X1p, 0.0, mu1, xi1);

    // contagion wedge: mu1= < X1 < terminal curve, 0 < X2 < mu2=
    const double dbar = quadrature::integrate2d_region(
        [&](double x1, double x2) {
            return greens::green_2d(tau, x1, x2, req.X1p, req.X2p, m.geom, req.budget);
        },
        [&](double) { return mu1; },
        [&](double x2) { return std::max(mu1, m.terminal_boundary_x(0, x2)); }, 0.0, mu2, outer,
        inner);

    // boundary convolution with the data gap Xi - chi_inf on X2 = 0
    const double th_lo = theta_floor(req.X2p, tau);
    double conv = 0.0;
    if (tau > th_lo) {
        auto inner_x1 = [&](double th) {
            const double s = tau - th; // time to maturity of the data
            return quadrature::integrate(
                [&](double x1) {
                    const double gx2 =
                        greens::green_2d_dx2(th, x1, req.X1p, req.X2p, m.geom, req.budget);
                    if (gx2 == 0.0) return 0.0;
                    const double xi_d = x1 >= mut1_lt
                                            ? greens::chi_survival(s, x1, mut1_lt, mut1_eq, xi1)
                                            : 0.0;
                    const double ci = greens::chi_survival(s, x1, 0.0, mu1, xi1);
                    return gx2 * (xi_d - ci);
                },
                0.0, M, inner);
        };
        // sqrt substitution tames the short-time kernel
        conv = 0.5 * quadrature::integrate(
                         [&](double w) { return 2.0 * w * inner_x1(w * w); }, std::sqrt(th_lo),
                         std::sqrt(tau), outer);
    }
    return chi_inf - dbar + conv;
}

// ----------------------------------------------------------------------
// Closed-form quadrant integral (series of 3F3 radial factors times
// closed-form angular integrals).
// ----------------------------------------------------------------------

namespace {

// int_0^varpi sin(nu_n phi) e^{i q phi} dphi
complex<double> angular_exp_integral(double nu_n, int parity_n, double q, double varpi) {
    if (std::abs(std::abs(q) - nu_n) < 1e-9) {
        return complex<double>(0.0, (q > 0.0 ? 1.0 : -1.0) * 0.5 * varpi);
    }
    const double sgn = parity_n % 2 == 0 ? 1.0 : -1.0; // (-1)^n
    const complex<double> e = std::polar(1.0, q * varpi);
    return nu_n * (1.0 - sgn * e) / (nu_n * nu_n - q * q);
}

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
    return v;
}

// int_0^varpi sin(nu_n phi) (g1 sin phi + g2 cos phi)^p dphi via the
// binomial expansion of the complex exponential representation.
complex<double> angular_power_core(int n, double nu_n, int p, complex<double> c, double varpi) {
    // g1 sin + g2 cos = (c e^{i phi} + conj(c) e^{-i phi})/2, c = g2 - i g1
    const complex<double> cb = std::conj(c);
    complex<double> sum = 0.0;
    for (int mref = 0; mref <= p; ++mref) {
        const double q = 2.0 * mref - p;
        sum += binom(p, mref) * std::pow(c, mref) * std::pow(cb, p - mref) *
               angular_exp_integral(nu_n, n, q, varpi);
    }
    return sum * std::pow(0.5, p);
}

// radial integral int_0^inf e^{-alpha R^2} I_a(beta R) I_b(beta R) dR,
// log of the prefactor returned separately to dodge overflow
struct RadialFactor {
    double log_pref;
    double f33; // 3F3 value at +beta^2/alpha (all-positive series)
};

RadialFactor radial_integral(double a, double b, double alpha, double beta) {
    const double s = a + b;
    RadialFactor r;
    r.log_pref = s * std::log(beta) - 0.5 * (s + 1.0) * std::log(alpha) -
                 std::log(2.0 * std::sqrt(M_PI)) + 2.0 * std::lgamma(0.5 * (s + 1.0)) +
                 std::lgamma(0.5 * (s + 2.0)) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) -
                 std::lgamma(s + 1.0);
    const double z = beta * beta / alpha;
    specfun::SeriesControl ctl;
    ctl.max_terms = 20000;
    r.f33 = specfun::hyp3f3({0.5 * (s + 1.0), 0.5 * (s + 1.0), 0.5 * (s + 2.0)},
                            {a + 1.0, b + 1.0, s + 1.0}, z, ctl);
    return r;
}

} // namespace

double angular_power_integral(int n, int p, double g1, double g2, double varpi) {
    const double nu_n = n * M_PI / varpi;
    const complex<double> c(g2, -g1);
    return angular_power_core(n, nu_n, p, c, varpi).real();
}

double quadrant_integral_quadrature(double theta_t, double X1p, double X2p,
                                    const greens::WedgeGeometry& geom,
                                    const greens::SeriesBudget& budget, double quad_tol) {
    double Rp, phip;
    geom.polar(X1p, X2p, &Rp, &phip);
    const double M = Rp + 10.0 * std::sqrt(theta_t) + 6.0 * std::abs(geom.xi1 + geom.xi2) * theta_t +
                     2.0;
    quadrature::QuadOptions opt{quad_tol, 1e-14, 400, 15};
    return quadrature::integrate2d(
        [&](double x1, double x2) {
            return greens::green_2d(theta_t, x1, x2, X1p, X2p, geom, budget);
        },
        0.0, M, 0.0, M, opt, opt);
}

QuadrantResult quadrant_integral_closed_form(const QuadrantSeriesParams& params,
                                             const greens::WedgeGeometry& geom) {
    const double th = params.theta_t;
    if (!(th > 0.0)) throw DomainError("quadrant integral: elapsed time must be positive");
    double Rp, phip;
    geom.polar(params.X1p, params.X2p, &Rp, &phip);
    const double alpha = 0.5 / th;
    const double beta = Rp / th;
    const double kappa = -0.5 * geom.xi_dot_theta * th -
                         (geom.theta1 * params.X1p + geom.theta2 * params.X2p) -
                         0.5 * Rp * Rp / th;
    // gamma(phi) = g1 sin phi + g2 cos phi with the drift mapped to the wedge frame
    const double g1 = geom.xi1;
    const double g2 = (geom.xi2 - geom.rho * geom.xi1) / geom.rho_bar;
    const complex<double> c(g2, -g1);

    QuadrantResult out;
    complex<double> total = 0.0;
    double max_term = 0.0;
    int quiet_n = 0;
    bool converged_n = false;
    bool converged_mu_all = true;
    for (int n = 1; n <= params.n_limit; ++n) {
        const double nu_n = geom.nu(n);
        const double sp = std::sin(nu_n * phip);
        complex<double> inner = 0.0;
        int quiet_mu = 0;
        bool converged_mu = false;
        for (int mu = 0; mu <= params.mu_limit; ++mu) {
            // U_mu expansion into powers of gamma(phi); power p = mu - 2k
            complex<double> ang = 0.0;
            for (int k = 0; 2 * k <= mu; ++k) {
                const int p = mu - 2 * k;
                const double coef = ((k % 2 == 0) ? 1.0 : -1.0) * binom(mu - k, k) *
                                    std::pow(2.0 / beta, p);
                // (2x)^p with x = -gamma/beta gives (-2/beta)^p gamma^p
                const double sign_p = (p % 2 == 0) ? 1.0 : -1.0;
                ang += coef * sign_p * angular_power_core(n, nu_n, p, c, geom.varpi);
            }
            const auto rad = radial_integral(nu_n, mu + 1.0, alpha, beta);
            const double mag = std::exp(kappa + rad.log_pref);
            const double musign = (mu % 2 == 0) ? 1.0 : -1.0;
            const complex<double> term = musign * (mu + 1.0) * ang * mag * rad.f33;
            inner += term;
            max_term = std::max(max_term, std::abs(term));
            if (std::abs(term) < params.tail_tol * std::max(1e-300, std::abs(inner)) && mu > 2) {
                if (++quiet_mu >= 4) {
                    converged_mu = true;
                    break;
                }
            } else {
                quiet_mu = 0;
            }
        }
        converged_mu_all = converged_mu_all && converged_mu;
        const complex<double> contrib = sp * inner;
        total += contrib;
        if (std::abs(contrib) < params.tail_tol * std::max(1e-300, std::abs(total)) && n > 2) {
            if (++quiet_n >= 4) {
                converged_n = true;
                break;
            }
        } else {
            quiet_n = 0;
        }
    }
    const double scale = 4.0 / (geom.varpi * th * beta);
    total *= scale;
    max_term *= scale;

    out.value = total.real();
    out.imag_residue = std::abs(total.imag()) / std::max(1e-300, std::abs(total.real()));
    // cancellation: each term carries ~1e-13 relative error, so the sum
    // is unusable once terms exceed ~1e6 of the result
    const bool cancel_bad = max_term > 1e6 * std::max(std::abs(out.value), 1e-12);
    const bool imag_bad = out.imag_residue > 1e-10;
    if (!converged_n || !converged_mu_all || cancel_bad || imag_bad ||
        !std::isfinite(out.value)) {
        out.fell_back_to_quadrature = true;
        out.value = quadrant_integral_quadrature(th, params.X1p, params.X2p, geom, {}, 1e-9);
        out.imag_residue = 0.0;
    }
    return out;
}

} // namespace wedge::survival
