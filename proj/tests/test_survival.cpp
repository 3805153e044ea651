// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/survival.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "wedgecredit/pde.hpp"
#include "wedgecredit/quadrature.hpp"
#include "wedgecredit/specfun.hpp"

using namespace wedge;
using namespace wedge::survival;

namespace {

model::TwoBank table2_model(double T = 1.0) {
    return model::TwoBank::make(
        network::make_two_bank(60.0, 70.0, 10.0, 15.0, 0.4, 0.45, 1.0, 1.0, 0.5, T, 300.0, 300.0));
}

} // namespace

TEST_CASE("joint survival limits") {
    const auto m = table2_model();
    SurvivalRequest req;
    // far interior, almost no time left: mass stays in the survival set
    req.t_bar = m.T_bar() - 2e-4;
    req.X1p = 5.0;
    req.X2p = 5.0;
    CHECK(joint_survival(m, req) > 0.999);
    // wedge edge absorbs immediately
    req.t_bar = 0.0;
    req.X1p = 0.0;
    req.X2p = 2.0;
    CHECK(joint_survival(m, req) == doctest::Approx(0.0));
}

TEST_CASE("marginal survival boundary limits") {
    const auto m = table2_model();
    SurvivalRequest req;
    req.t_bar = 0.0;
    req.X1p = 40.0;
    req.X2p = 2.0;
    CHECK(marginal_survival(m, req) == doctest::Approx(1.0).epsilon(1e-6));
    // large X2 reduces to the one-dimensional far-field survival
    req.X1p = 2.0;
    req.X2p = 30.0;
    const double chi = greens::chi_survival(m.T_bar(), 2.0, 0.0, m.nd.mu_eq[0], m.nd.xi[0]);
    CHECK(marginal_survival(m, req) == doctest::Approx(chi).epsilon(1e-6));
}

TEST_CASE("survival probabilities against the finite-difference solver") {
    const auto m = table2_model();
    pde::Grid2D g = pde::default_grid(m, 100, 100, 0.01);
    const int steps = pde::steps_for(m, g);
    const auto Q_fd = pde::solve_field(pde::FieldKind::Q, m, 0.0, g, steps);
    const auto q1_fd = pde::solve_field(pde::FieldKind::q1, m, 0.0, g, steps);

    SurvivalRequest req;
    req.t_bar = 0.0;
    req.quad_tol = 1e-7;

    // the quoted spot check
    req.X1p = 2.0;
    req.X2p = 2.0;
    const double q_spot = joint_survival(m, req);
    CHECK(std::abs(q_spot - Q_fd.interpolate(2.0, 2.0)) < 1e-2);

    // a grid of interior points: max gap within the published scale
    double worst_q = 0.0, worst_q1 = 0.0;
    for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
            const double x1 = 0.8 + 0.55 * a;
            const double x2 = 0.7 + 0.5 * b;
            req.X1p = x1;
            req.X2p = x2;
            const double Q = joint_survival(m, req);
            const double q1 = marginal_survival(m, req);
            worst_q = std::max(worst_q, std::abs(Q - Q_fd.interpolate(x1, x2)));
            worst_q1 = std::max(worst_q1, std::abs(q1 - q1_fd.interpolate(x1, x2)));
            // ordering and bounds hold pointwise
            CHECK(Q >= -1e-9);
            CHECK(q1 >= Q - 5e-4);
            CHECK(q1 <= 1.0 + 1e-9);
        }
    }
    MESSAGE("max |analytic-FD|: Q ", worst_q, "  q1 ", worst_q1);
    CHECK(worst_q < 2e-2);
    CHECK(worst_q1 < 2e-2);
}

TEST_CASE("survival probabilities are monotone along grid lines") {
    const auto m = table2_model();
    SurvivalRequest req;
    req.t_bar = 0.0;
    req.quad_tol = 1e-7;
    double prev = -1.0;
    for (double x1 = 0.6; x1 < 3.6; x1 += 0.6) {
        req.X1p = x1;
        req.X2p = 1.3;
        const double q = marginal_survival(m, req);
        CHECK(q >= prev - 1e-6);
        prev = q;
    }
    prev = -1.0;
    for (double x2 = 0.5; x2 < 3.5; x2 += 0.6) {
        req.X1p = 1.7;
        req.X2p = x2;
        const double q = joint_survival(m, req);
        CHECK(q >= prev - 1e-6);
        prev = q;
    }
}

// ----------------------------------------------------------------------
// Closed-form quadrant integral.
// ----------------------------------------------------------------------

TEST_CASE("angular power integral against quadrature and the printed displays") {
    quadrature::QuadOptions opt;
    opt.rel_tol = 1e-12;
    const double varpi = 2.0 * M_PI / 3.0;
    const double t1 = 1.0, t2 = 0.5; // theta-bar coefficients of the displays

    auto numeric = [&](int n, int p) {
        const double nu_n = n * M_PI / varpi;
        return quadrature::integrate(
            [&](double phi) {
                return std::sin(nu_n * phi) *
                       std::pow(t1 * std::sin(phi) + t2 * std::cos(phi), p);
            },
            0.0, varpi, opt);
    };

    // p = 1: the first printed display
    for (int n : {1, 3, 5}) {
        const double sgn = n % 2 == 0 ? 1.0 : -1.0;
        const double printed = M_PI * n * varpi /
                               (varpi * varpi - M_PI * M_PI * n * n) *
                               (sgn * (t1 * std::sin(varpi) + t2 * std::cos(varpi)) - t2);
        CHECK(angular_power_integral(n, 1, t1, t2, varpi) ==
              doctest::Approx(printed).epsilon(1e-12));
        CHECK(angular_power_integral(n, 1, t1, t2, varpi) ==
              doctest::Approx(numeric(n, 1)).epsilon(1e-10));
    }

    // p = 2: the second printed display
    for (int n : {1, 2, 5}) {
        const double w = varpi;
        const double sgn = n % 2 == 0 ? 1.0 : -1.0;
        const double printed =
            1.0 / (2.0 * std::pow(M_PI, 3) * n * n * n - 8.0 * M_PI * n * w * w) *
            (-4.0 * w * w * w * (t1 * t1 + t2 * t2) + 2.0 * M_PI * M_PI * t2 * t2 * n * n * w +
             sgn * w *
                 (M_PI * M_PI * n * n *
                      ((t1 * t1 - t2 * t2) * std::cos(2.0 * w) -
                       2.0 * t1 * t2 * std::sin(2.0 * w)) -
                  (t1 * t1 + t2 * t2) * (M_PI * M_PI * n * n - 4.0 * w * w)));
        CHECK(angular_power_integral(n, 2, t1, t2, varpi) ==
              doctest::Approx(printed).epsilon(1e-12));
        CHECK(angular_power_integral(n, 2, t1, t2, varpi) ==
              doctest::Approx(numeric(n, 2)).epsilon(1e-10));
    }

    // higher powers and other wedge angles against quadrature, including
    // the resonant combinations nu_n = |2m - p|
    for (double vp : {2.0 * M_PI / 3.0, 1.9, M_PI / 2.0}) {
        for (int n : {1, 2, 4}) {
            for (int p : {0, 1, 3, 6, 9}) {
                const double nu_n = n * M_PI / vp;
                const double direct = quadrature::integrate(
                    [&](double phi) {
                        return std::sin(nu_n * phi) *
                               std::pow(0.8 * std::sin(phi) - 0.33 * std::cos(phi), p);
                    },
                    0.0, vp, opt);
                CHECK(angular_power_integral(n, p, 0.8, -0.33, vp) ==
                      doctest::Approx(direct).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("angular power integral equals the terminating 2F1 route") {
    // partial-fraction form with terminating Gauss functions, valid away
    // from the resonant order combinations
    using specfun::hyp2f1;
    const double g1 = -0.5, g2 = -0.21;
    const std::complex<double> c(g2, -g1);
    const std::complex<double> cb = std::conj(c);
    for (double vp : {1.9, 2.3}) {
        for (int n : {1, 2, 3}) {
            for (int p : {1, 2, 5}) {
                const double nu_n = n * M_PI / vp;
                const double w = 0.5 * (nu_n - p);
                const std::complex<double> rot = std::polar(1.0, 2.0 * vp);
                const std::complex<double> sp =
                    0.5 * std::pow(cb, p) / w * hyp2f1(-p, w, w + 1.0, -c / cb);
                const std::complex<double> sm =
                    0.5 * std::pow(c, p) / w * hyp2f1(-p, w, w + 1.0, -cb / c);
                const std::complex<double> tp = 0.5 * std::pow(cb / std::polar(1.0, vp), p) / w *
                                                hyp2f1(-p, w, w + 1.0, -c * rot / cb);
                const std::complex<double> tm = 0.5 * std::pow(c * std::polar(1.0, vp), p) / w *
                                                hyp2f1(-p, w, w + 1.0, -cb / (c * rot));
                const double sgn = n % 2 == 0 ? 1.0 : -1.0;
                const std::complex<double> total =
                    std::pow(0.5, p) * 0.5 * (sp + sm - sgn * (tp + tm));
                CHECK(total.imag() == doctest::Approx(0.0).epsilon(1e-10));
                CHECK(angular_power_integral(n, p, g1, g2, vp) ==
                      doctest::Approx(total.real()).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("quadrant closed form: zero drift reduction") {
    const auto geom = greens::WedgeGeometry::make(0.5, 0.0, 0.0);
    QuadrantSeriesParams prm;
    prm.theta_t = 0.9;
    prm.X1p = 1.2;
    prm.X2p = 0.8;
    const auto res = quadrant_integral_closed_form(prm, geom);
    CHECK(!res.fell_back_to_quadrature);
    CHECK(res.imag_residue < 1e-10);
    const double direct = quadrant_integral_quadrature(0.9, 1.2, 0.8, geom, {}, 1e-9);
    CHECK(res.value == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("quadrant closed form against quadrature on random draws") {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> urho(-0.7, 0.7), ux(0.4, 2.2), uth(0.3, 1.4),
        uxi(-0.8, -0.1);
    int k = 0;
    while (k < 20) {
        const double rho = urho(rng);
        const auto geom = greens::WedgeGeometry::make(rho, uxi(rng), uxi(rng));
        QuadrantSeriesParams prm;
        prm.theta_t = uth(rng);
        prm.X1p = ux(rng);
        prm.X2p = ux(rng);
        prm.n_limit = 90;
        prm.mu_limit = 150;
        // stay inside the numerically usable region of the double series:
        // its cancellation grows like exp(beta^2/alpha)
        double Rp, phip;
        geom.polar(prm.X1p, prm.X2p, &Rp, &phip);
        if (2.0 * Rp * Rp / prm.theta_t > 18.0) continue;
        ++k;
        const auto res = quadrant_integral_closed_form(prm, geom);
        const double direct =
            quadrant_integral_quadrature(prm.theta_t, prm.X1p, prm.X2p, geom, {}, 1e-9);
        CHECK(!res.fell_back_to_quadrature); // keep the comparison honest
        CHECK(res.imag_residue < 1e-10);
        CHECK(res.value == doctest::Approx(direct).epsilon(1e-5));
    }
}

TEST_CASE("quadrant closed form matches joint survival in the full-recovery limit") {
    // R = 1 collapses every threshold onto lambda^=; mu^= = 0 and the
    // survival set is the whole quadrant
    const auto net = network::make_two_bank(60.0, 70.0, 10.0, 15.0, 1.0, 1.0, 1.0, 1.0, 0.5, 1.0,
                                            120.0, 130.0);
    const auto m = model::TwoBank::make(net);
    CHECK(m.nd.mu_eq[0] == doctest::Approx(0.0));
    CHECK(m.nd.mu_eq[1] == doctest::Approx(0.0));
    SurvivalRequest req;
    req.t_bar = 0.0;
    req.X1p = m.nd.X[0];
    req.X2p = m.nd.X[1];
    req.quad_tol = 1e-9;
    const double q_joint = joint_survival(m, req);
    QuadrantSeriesParams prm;
    prm.theta_t = m.T_bar();
    prm.X1p = m.nd.X[0];
    prm.X2p = m.nd.X[1];
    const auto closed = quadrant_integral_closed_form(prm, m.geom);
    CHECK(closed.value == doctest::Approx(q_joint).epsilon(1e-5));
}
