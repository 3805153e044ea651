// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wedgecredit/errors.hpp"
#include "wedgecredit/specfun.hpp"

namespace wedge::greens {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Largest Bessel argument the eigenmode series is allowed to handle
// with a given mode cap; beyond it the image representation takes over.
double series_z_cap(const WedgeGeometry& geom, const SeriesBudget& budget) {
    return 0.75 * geom.nu(budget.n_max);
}

// ----------------------------------------------------------------------
// Image representation (short-time fallback).
//
// For theta_t small the wedge density is the free Gaussian in the
// W-plane minus one reflection across each edge; the first neglected
// (second-generation) image bounds the error. Exact for varpi = pi/2.
// ----------------------------------------------------------------------

struct Wpt {
    double w1, w2;
};

Wpt reflect(const Wpt& w, double n1, double n2) {
    const double d = w.w1 * n1 + w.w2 * n2;
    return {w.w1 - 2.0 * d * n1, w.w2 - 2.0 * d * n2};
}

double dist2(const Wpt& a, const Wpt& b) {
    const double d1 = a.w1 - b.w1;
    const double d2 = a.w2 - b.w2;
    return d1 * d1 + d2 * d2;
}

// deriv: 0 value, 1 d/dX1, 2 d/dX2
double green_image(double th, double X1, double X2, double X1p, double X2p,
                   const WedgeGeometry& geom, int deriv) {
    Wpt w, wp;
    geom.to_w(X1, X2, &w.w1, &w.w2);
    geom.to_w(X1p, X2p, &wp.w1, &wp.w2);
    // bottom edge (X2 = 0): normal (rho, rho_bar); left edge (X1 = 0): normal (1, 0)
    const Wpt img_b = reflect(wp, geom.rho, geom.rho_bar);
    const Wpt img_l = reflect(wp, 1.0, 0.0);
    const Wpt img_bl = reflect(img_b, 1.0, 0.0);
    const Wpt img_lb = reflect(img_l, geom.rho, geom.rho_bar);

    const double d0 = dist2(w, wp);
    const double d2gen = std::min(dist2(w, img_bl), dist2(w, img_lb));

    const double drift = geom.theta1 * (X1 - X1p) + geom.theta2 * (X2 - X2p) -
                         0.5 * geom.xi_dot_theta * th;
    const double pref = std::exp(drift) / (kTwoPi * th * geom.rho_bar);
    // neglected second-generation image, relative to the leading term and
    // in absolute size
    if ((d2gen - d0) / (2.0 * th) < 25.0) {
        const double neglected = pref * std::exp(-0.5 * d2gen / th) * (1.0 + 1.0 / th);
        if (neglected > 1e-12)
            throw SeriesNotConverged(
                "green_2d: eigenseries budget exceeded and image fallback invalid");
    }

    const std::array<Wpt, 3> pts = {wp, img_b, img_l};
    const std::array<double, 3> sign = {1.0, -1.0, -1.0};
    double val = 0.0, dval1 = 0.0, dval2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double dd = dist2(w, pts[k]);
        const double g = sign[k] * std::exp(-0.5 * dd / th);
        val += g;
        if (deriv) {
            // dW/dX1 = (1, -rho/rho_bar), dW/dX2 = (0, 1/rho_bar)
            const double e1 = w.w1 - pts[k].w1;
            const double e2 = w.w2 - pts[k].w2;
            dval1 += g * (-(e1 - geom.rho * e2 / geom.rho_bar) / th);
            dval2 += g * (-(e2 / geom.rho_bar) / th);
        }
    }
    if (deriv == 0) return pref * val;
    if (deriv == 1) return pref * (geom.theta1 * val + dval1);
    return pref * (geom.theta2 * val + dval2);
}

// ----------------------------------------------------------------------
// Eigenmode sums.
// ----------------------------------------------------------------------

struct ModeSumResult {
    double sum = 0.0;
    double sum_aux = 0.0; // second accumulator (derivative series)
};

// Sums f(n) ibessel(nu_n, z) over modes with the tail cut at
// tail_tol relative to the largest scaled Bessel factor seen.
template <typename Weight>
ModeSumResult mode_sum(double z, const WedgeGeometry& geom, const SeriesBudget& budget,
                       Weight&& weight) {
    ModeSumResult r;
    double imax = 0.0;
    int quiet = 0;
    for (int n = 1; n <= budget.n_max; ++n) {
        const double nu = geom.nu(n);
        const double ib = specfun::bessel_i_scaled(nu, z);
        imax = std::max(imax, ib);
        weight(n, nu, ib, &r);
        if (nu > z && ib < budget.tail_tol * std::max(imax, 1e-300)) {
            if (++quiet >= 2) return r;
        } else {
            quiet = 0;
        }
    }
    throw SeriesNotConverged("green_2d: mode cap hit before the tail bound");
}

void check_theta(double th) {
    if (!(th > 0.0)) throw DomainError("green_2d: elapsed time must be positive");
    if (th < kMinTheta2d)
        throw DomainError("green_2d: elapsed time below the supported floor, use the FD solver");
}

} // namespace

WedgeGeometry WedgeGeometry::make(double rho, double xi1, double xi2, double max_abs_rho) {
    if (!(std::abs(rho) <= max_abs_rho))
        throw DomainError("WedgeGeometry: |rho| exceeds the supported range");
    WedgeGeometry g;
    g.rho = rho;
    g.rho_bar = std::sqrt(1.0 - rho * rho);
    g.varpi = std::acos(-rho);
    g.xi1 = xi1;
    g.xi2 = xi2;
    const double rb2 = g.rho_bar * g.rho_bar;
    g.theta1 = (xi1 - rho * xi2) / rb2;
    g.theta2 = (xi2 - rho * xi1) / rb2;
    g.xi_dot_theta = xi1 * g.theta1 + xi2 * g.theta2;
    return g;
}

double WedgeGeometry::nu(int n) const { return n * M_PI / varpi; }

void WedgeGeometry::polar(double X1, double X2, double* R, double* phi) const {
    const double w2 = (X2 - rho * X1) / rho_bar;
    *R = std::hypot(X1, w2);
    *phi = std::atan2(X1, w2); // 0 on the X1=0 edge, varpi on the X2=0 edge
}

void WedgeGeometry::to_w(double X1, double X2, double* w1, double* w2) const {
    *w1 = X1;
    *w2 = (X2 - rho * X1) / rho_bar;
}

double green_1d(double theta_t, double X1, double X1p, double barrier, double xi1) {
    if (!(theta_t > 0.0)) throw DomainError("green_1d: elapsed time must be positive");
    if (X1 < barrier || X1p < barrier) return 0.0;
    const double pref = std::exp(-0.5 * xi1 * xi1 * theta_t + xi1 * (X1 - X1p)) /
                        std::sqrt(kTwoPi * theta_t);
    const double d = X1 - X1p;
    const double m = X1 + X1p - 2.0 * barrier;
    return pref * (std::exp(-0.5 * d * d / theta_t) - std::exp(-0.5 * m * m / theta_t));
}

double chi_survival(double tau, double X1p, double barrier, double strike, double xi1) {
    if (strike < barrier) throw DomainError("chi_survival: strike below the barrier");
    if (X1p < barrier) return 0.0;
    if (tau <= 0.0) {
        if (X1p > strike) return 1.0;
        return X1p == strike ? 0.5 : 0.0;
    }
    const double rt = std::sqrt(tau);
    const double d = X1p - barrier;
    const double first = specfun::norm_cdf(-(strike - X1p - xi1 * tau) / rt);
    const double second =
        specfun::exp_times_ncdf(-2.0 * xi1 * d, -(strike + X1p - 2.0 * barrier - xi1 * tau) / rt);
    return first - second;
}

double green_2d(double theta_t, double X1, double X2, double X1p, double X2p,
                const WedgeGeometry& geom, const SeriesBudget& budget) {
    check_theta(theta_t);
    if (X1 <= 0.0 || X2 <= 0.0 || X1p <= 0.0 || X2p <= 0.0) return 0.0;
    double R, phi, Rp, phip;
    geom.polar(X1, X2, &R, &phi);
    geom.polar(X1p, X2p, &Rp, &phip);
    const double z = R * Rp / theta_t;
    if (z > series_z_cap(geom, budget)) return green_image(theta_t, X1, X2, X1p, X2p, geom, 0);

    const auto ms = mode_sum(z, geom, budget, [&](int n, double nu, double ib, ModeSumResult* r) {
        r->sum += ib * std::sin(nu * phi) * std::sin(nu * phip);
    });
    const double gap = R - Rp;
    const double drift = geom.theta1 * (X1 - X1p) + geom.theta2 * (X2 - X2p) -
                         0.5 * geom.xi_dot_theta * theta_t;
    const double pref = 2.0 / (geom.varpi * theta_t * geom.rho_bar) *
                        std::exp(drift - 0.5 * gap * gap / theta_t);
    return pref * ms.sum;
}

double green_2d_dx2(double theta_t, double X1, double X1p, double X2p, const WedgeGeometry& geom,
                    const SeriesBudget& budget) {
    check_theta(theta_t);
    if (X1 <= 0.0 || X1p <= 0.0 || X2p <= 0.0) return 0.0;
    const double R = X1 / geom.rho_bar; // edge point in polar radius
    double Rp, phip;
    geom.polar(X1p, X2p, &Rp, &phip);
    const double z = R * Rp / theta_t;
    if (z > series_z_cap(geom, budget)) return green_image(theta_t, X1, 0.0, X1p, X2p, geom, 2);

    const auto ms = mode_sum(z, geom, budget, [&](int n, double nu, double ib, ModeSumResult* r) {
        const double sgn = (n % 2 == 1) ? 1.0 : -1.0; // (-1)^{n+1}
        r->sum += sgn * nu * ib * std::sin(nu * phip);
    });
    const double gap = R - Rp;
    const double drift = geom.theta1 * (X1 - X1p) - geom.theta2 * X2p -
                         0.5 * geom.xi_dot_theta * theta_t;
    const double pref =
        2.0 / (geom.varpi * theta_t * X1) * std::exp(drift - 0.5 * gap * gap / theta_t);
    return pref * ms.sum;
}

double green_2d_dx1_at0(double theta_t, double X2, double X1p, double X2p,
                        const WedgeGeometry& geom, const SeriesBudget& budget) {
    check_theta(theta_t);
    if (X2 <= 0.0 || X1p <= 0.0 || X2p <= 0.0) return 0.0;
    const double R = X2 / geom.rho_bar;
    double Rp, phip;
    geom.polar(X1p, X2p, &Rp, &phip);
    const double z = R * Rp / theta_t;
    if (z > series_z_cap(geom, budget)) return green_image(theta_t, 0.0, X2, X1p, X2p, geom, 1);

    const auto ms = mode_sum(z, geom, budget, [&](int, double nu, double ib, ModeSumResult* r) {
        r->sum += nu * ib * std::sin(nu * phip);
    });
    const double gap = R - Rp;
    const double drift = geom.theta2 * (X2 - X2p) - geom.theta1 * X1p -
                         0.5 * geom.xi_dot_theta * theta_t;
    const double pref =
        2.0 / (geom.varpi * theta_t * X2) * std::exp(drift - 0.5 * gap * gap / theta_t);
    return pref * ms.sum;
}

double green_2d_dx1(double theta_t, double X1, double X2, double X1p, double X2p,
                    const WedgeGeometry& geom, const SeriesBudget& budget) {
    check_theta(theta_t);
    if (X1p <= 0.0 || X2p <= 0.0 || X2 <= 0.0) return 0.0;
    if (X1 <= 0.0) return green_2d_dx1_at0(theta_t, X2, X1p, X2p, geom, budget);
    double R, phi, Rp, phip;
    geom.polar(X1, X2, &R, &phi);
    geom.polar(X1p, X2p, &Rp, &phip);
    const double z = R * Rp / theta_t;
    if (z > series_z_cap(geom, budget)) return green_image(theta_t, X1, X2, X1p, X2p, geom, 1);

    // dR/dX1, dphi/dX1
    const double rb2 = geom.rho_bar * geom.rho_bar;
    const double dR1 = (X1 - geom.rho * X2) / (rb2 * R);
    const double dphi1 = X2 / (geom.rho_bar * R * R);

    const auto ms = mode_sum(z, geom, budget, [&](int, double nu, double ib, ModeSumResult* r) {
        const double sp = std::sin(nu * phip);
        const double s = std::sin(nu * phi);
        const double c = std::cos(nu * phi);
        // d/dz of e^{-z} I_nu(z) = ib_{nu+1} + (nu/z) ib - ib
        const double ib1 = specfun::bessel_i_scaled(nu + 1.0, z);
        const double dib = ib1 + (nu / z) * ib - ib;
        r->sum += ib * s * sp;
        r->sum_aux += (dib * (Rp / theta_t) * dR1 * s + ib * nu * c * dphi1) * sp;
    });
    const double gap = R - Rp;
    const double drift = geom.theta1 * (X1 - X1p) + geom.theta2 * (X2 - X2p) -
                         0.5 * geom.xi_dot_theta * theta_t;
    const double pref = 2.0 / (geom.varpi * theta_t * geom.rho_bar) *
                        std::exp(drift - 0.5 * gap * gap / theta_t);
    // log-derivative of the prefactor: theta1 - dR1 (R - Rp + ... )
    const double dlogpref = geom.theta1 - (X1 - geom.rho * X2) / (rb2 * theta_t) + (Rp / theta_t) * dR1;
    return pref * (dlogpref * ms.sum + ms.sum_aux);
}

double green_weighted_x2_integral(double theta_t, double X1, double X1p, double X2p,
                                  const WedgeGeometry& geom, const SeriesBudget& budget,
                                  double x2_max, Kernel kernel,
                                  const std::function<double(double)>& weight,
                                  const quadrature::QuadOptions& quad) {
    if (X1 < 0.0) return 0.0;
    auto eval = [&](double x2) -> double {
        double g;
        if (kernel == Kernel::Value)
            g = X1 == 0.0 ? 0.0 : green_2d(theta_t, X1, x2, X1p, X2p, geom, budget);
        else
            g = green_2d_dx1(theta_t, X1, x2, X1p, X2p, geom, budget);
        return g == 0.0 ? 0.0 : g * weight(x2);
    };
    if (kernel == Kernel::Value && X1 == 0.0) return 0.0;
    // split around the conditional peak of the free kernel
    const double mu_c = X2p + geom.rho * (X1 - X1p) + geom.xi2 * theta_t;
    const double sd_c = std::sqrt(theta_t) * geom.rho_bar;
    const std::array<double, 4> cuts = {0.0, std::clamp(mu_c - 7.0 * sd_c, 0.0, x2_max),
                                        std::clamp(mu_c + 7.0 * sd_c, 0.0, x2_max), x2_max};
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        if (cuts[k + 1] > cuts[k]) s += quadrature::integrate(eval, cuts[k], cuts[k + 1], quad);
    return s;
}

Moments green_moments(double theta_t, double X1, double X1p, double X2p,
                      const WedgeGeometry& geom, const SeriesBudget& budget, double x2_max,
                      const quadrature::QuadOptions& quad) {
    Moments m;
    if (X1 < 0.0) return m;
    auto one = [](double) { return 1.0; };
    auto lin = [](double x2) { return x2; };
    m.Y1 = green_weighted_x2_integral(theta_t, X1, X1p, X2p, geom, budget, x2_max, Kernel::Value,
                                      one, quad);
    m.Y2 = green_weighted_x2_integral(theta_t, X1, X1p, X2p, geom, budget, x2_max, Kernel::Value,
                                      lin, quad);
    m.Z1 = green_weighted_x2_integral(theta_t, X1, X1p, X2p, geom, budget, x2_max, Kernel::DX1, one,
                                      quad);
    m.Z2 = green_weighted_x2_integral(theta_t, X1, X1p, X2p, geom, budget, x2_max, Kernel::DX1, lin,
                                      quad);
    return m;
}

} // namespace wedge::greens
