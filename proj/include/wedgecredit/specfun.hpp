// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_SPECFUN_HPP
#define WEDGECREDIT_SPECFUN_HPP

#include <array>
#include <complex>

namespace wedge::specfun {

// Truncation control shared by the series evaluators.
struct SeriesControl {
    double rel_tol = 1e-13;
    int max_terms = 4000;
};

// Standard normal CDF, abs accuracy ~1e-15 over the whole line.
double norm_cdf(double x);
double norm_pdf(double x);

// Scaled complementary error function e^{x^2} erfc(x), x >= 0.
double erfcx(double x);

// e^a * Phi(x), computed without overflow when a is large positive and
// x is very negative (the pairing that appears in all the image-term
// closed forms).
double exp_times_ncdf(double a, double x);

// e^a * (Phi(x1) - Phi(x2)), stable when both arguments are large and
// of the same sign.
double exp_times_ncdf_diff(double a, double x1, double x2);

// Scaled modified Bessel function of the first kind, e^{-x} I_nu(x),
// for real order nu >= 0 and x >= 0. Ascending series for moderate x,
// Hankel expansion for large x and small order, Olver's uniform
// asymptotics plus downward order recurrence otherwise.
double bessel_i_scaled(double nu, double x, const SeriesControl& ctl = {});

// Unscaled I_nu(x). Throws OverflowError when the result exceeds the
// representable range; use bessel_i_scaled there.
double bessel_i(double nu, double x, const SeriesControl& ctl = {});

// Gauss hypergeometric 2F1(a,b;c;z) for complex z. Supports the
// terminating case (a or b a non-positive integer) for any z, and the
// convergent series for |z| < 1 otherwise. Throws NonTerminatingError
// outside that region.
std::complex<double> hyp2f1(double a, double b, double c, std::complex<double> z,
                            const SeriesControl& ctl = {});

// Generalized hypergeometric 3F3(a;b;z) for real z of either sign.
// Negative z is evaluated with compensated summation; throws
// PrecisionLossError when alternating cancellation exceeds 1e6 in
// condition number.
double hyp3f3(const std::array<double, 3>& a, const std::array<double, 3>& b, double z,
              const SeriesControl& ctl = {});

} // namespace wedge::specfun

#endif
