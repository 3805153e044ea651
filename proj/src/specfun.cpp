// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wedgecredit/errors.hpp"

namespace wedge::specfun {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kInvSqrtPi = 0.5641895835477563;
constexpr double kLogMax = 709.0;

// exp(x*x) with the rounding of x*x compensated through fma.
double exp_xsq(double x) {
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    return std::exp(hi) * (1.0 + lo);
}

} // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double erfcx(double x) {
    if (x < 0.0) throw DomainError("erfcx: negative argument");
    if (x <= 26.0) return exp_xsq(x) * std::erfc(x);
    // asymptotic tail, terms (2k-1)!!/(2x^2)^k
    const double ix2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        term *= -(2 * k - 1) * ix2;
        sum += term;
        if (std::abs(term) < 1e-18 * sum) break;
    }
    return kInvSqrtPi / x * sum;
}

double exp_times_ncdf(double a, double x) {
    if (x <= 0.0) {
        const double w = -x / kSqrt2; // >= 0
        const double hi = w * w;
        const double lo = std::fma(w, w, -hi);
        const double e = a - hi - lo;
        if (e < -746.0) return 0.0;
        return 0.5 * std::exp(e) * erfcx(w);
    }
    if (a > kLogMax) return std::numeric_limits<double>::infinity();
    return std::exp(a) * norm_cdf(x);
}

double exp_times_ncdf_diff(double a, double x1, double x2) {
    if (x1 > 0.0 && x2 > 0.0) {
        // Phi(x1)-Phi(x2) = Phi(-x2)-Phi(-x1); both pieces then stable.
        return exp_times_ncdf(a, -x2) - exp_times_ncdf(a, -x1);
    }
    return exp_times_ncdf(a, x1) - exp_times_ncdf(a, x2);
}

namespace {

// ----------------------------------------------------------------------
// Scaled Bessel I.
//
// Three regimes:
//   x <= 600          ascending series (all-positive, internally rescaled)
//   x  > 600, small nu Hankel expansion when it converges
//   otherwise         Olver uniform asymptotics at order >= 40, walked
//                     down to the requested order by the (stable)
//                     downward three-term recurrence.
// ----------------------------------------------------------------------

double bessel_series_scaled(double nu, double x) {
    // ln lead = nu ln(x/2) - x - lgamma(nu+1), sum accumulated with
    // periodic rescaling so huge partial sums cannot overflow.
    const double lead = nu * std::log(0.5 * x) - x - std::lgamma(nu + 1.0);
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    double log_scale = 0.0;
    const int kmax = 600 + static_cast<int>(x) * 2;
    for (int k = 0; k < kmax; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (term < 1e-17 * sum) break;
        if (sum > 1e280) {
            sum *= 1e-280;
            term *= 1e-280;
            log_scale += 280.0 * 2.302585092994046;
        }
    }
    const double e = lead + log_scale + std::log(sum);
    return e < -746.0 ? 0.0 : std::exp(e);
}

// Hankel large-argument expansion of e^{-x} I_nu(x). Returns false when
// the terms fail to fall below the tolerance before growing.
bool bessel_hankel_scaled(double nu, double x, double* out) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 30; ++k) {
        const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        term *= -f;
        if (std::abs(term) > prev) return false; // diverging
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-16) {
            *out = sum / std::sqrt(2.0 * M_PI * x);
            return true;
        }
    }
    return false;
}

// Olver debye polynomials u_k(t), generated once from the recursion
//   u_{k+1} = t^2(1-t^2)/2 u_k' + 1/8 int_0^t (1-5 s^2) u_k ds.
// u_k involves only powers t^k..t^{3k}; coefficients stay modest.
constexpr int kOlverOrder = 9; // u_0..u_8
const std::vector<std::vector<double>>& olver_u() {
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<double>> u(kOlverOrder);
        u[0] = {1.0};
        for (int k = 0; k + 1 < kOlverOrder; ++k) {
            const auto& c = u[k];
            const int deg = static_cast<int>(c.size()) - 1;
            std::vector<double> next(deg + 4, 0.0);
            // t^2(1-t^2)/2 * u'
            for (int p = 1; p <= deg; ++p) {
                const double d = c[p] * p;
                next[p + 1] += 0.5 * d;
                next[p + 3] -= 0.5 * d;
            }
            // 1/8 int_0^t (1 - 5 s^2) u ds
            for (int p = 0; p <= deg; ++p) {
                next[p + 1] += 0.125 * c[p] / (p + 1.0);
                next[p + 3] -= 0.625 * c[p] / (p + 3.0);
            }
            u[k + 1] = std::move(next);
        }
        return u;
    }();
    return table;
}

double polyval(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
}

// e^{-z} I_nu(z) by Olver's uniform expansion, nu large (>= ~40).
double bessel_olver_scaled(double nu, double z) {
    const double x = z / nu;
    const double s = std::hypot(1.0, x); // sqrt(1+x^2)
    const double t = 1.0 / s;
    // nu*eta - z with eta = s + ln(x/(1+s)); the -z folds into nu(s-x)
    const double e = nu * (s - x + std::log(x / (1.0 + s)));
    const auto& u = olver_u();
    double corr = 0.0;
    double p = 1.0;
    for (int k = 0; k < kOlverOrder; ++k) {
        corr += polyval(u[k], t) * p;
        p /= nu;
    }
    if (e < -746.0) return 0.0;
    return std::exp(e) / (std::sqrt(2.0 * M_PI * nu) * std::sqrt(s)) * corr;
}

} // namespace

double bessel_i_scaled(double nu, double x, const SeriesControl&) {
    if (nu < 0.0 || x < 0.0 || !std::isfinite(nu) || !std::isfinite(x))
        throw DomainError("bessel_i: requires nu >= 0, x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (x <= 600.0) return bessel_series_scaled(nu, x);
    if (nu * nu <= 0.3 * x) {
        double v;
        if (bessel_hankel_scaled(nu, x, &v)) return v;
    }
    if (nu >= 40.0) return bessel_olver_scaled(nu, x);
    // walk down from order >= 40 (downward recurrence is stable for I)
    const int steps = static_cast<int>(std::ceil(40.0 - nu));
    const double top = nu + steps;
    double hi = bessel_olver_scaled(top + 1.0, x);
    double lo = bessel_olver_scaled(top, x);
    for (int k = 0; k < steps; ++k) {
        const double mu = top - k;
        const double next = hi + (2.0 * mu / x) * lo; // I_{mu-1}
        hi = lo;
        lo = next;
    }
    return lo;
}

double bessel_i(double nu, double x, const SeriesControl& ctl) {
    const double scaled = bessel_i_scaled(nu, x, ctl);
    if (scaled > 0.0 && x + std::log(scaled) > kLogMax)
        throw OverflowError("bessel_i: result exceeds double range, use bessel_i_scaled");
    return scaled * std::exp(x);
}

std::complex<double> hyp2f1(double a, double b, double c, std::complex<double> z,
                            const SeriesControl& ctl) {
    if (z == std::complex<double>(0.0, 0.0)) return 1.0;
    const auto neg_int = [](double v) {
        return v <= 0.0 && std::abs(v - std::round(v)) < 1e-12;
    };
    int n_terms = -1;
    if (neg_int(a)) n_terms = static_cast<int>(-std::round(a));
    if (neg_int(b)) {
        const int nb = static_cast<int>(-std::round(b));
        if (n_terms < 0 || nb < n_terms) n_terms = nb;
    }
    if (n_terms < 0 && std::abs(z) >= 1.0)
        throw NonTerminatingError("hyp2f1: non-terminating series with |z| >= 1");

    std::complex<double> term = 1.0;
    std::complex<double> sum = 1.0;
    const int kmax = n_terms >= 0 ? n_terms : ctl.max_terms;
    for (int k = 0; k < kmax; ++k) {
        const double ck = c + k;
        if (std::abs(ck) < 1e-300)
            throw DomainError("hyp2f1: lower parameter hits a non-positive integer");
        term *= (a + k) * (b + k) / (ck * (k + 1.0)) * z;
        sum += term;
        if (n_terms < 0 && std::abs(term) < ctl.rel_tol * std::abs(sum) && k > 2) return sum;
    }
    if (n_terms < 0)
        throw NonConvergence("hyp2f1: series did not converge within max_terms");
    return sum;
}

double hyp3f3(const std::array<double, 3>& a, const std::array<double, 3>& b, double z,
              const SeriesControl& ctl) {
    for (double bi : b) {
        if (bi <= 0.0 && std::abs(bi - std::round(bi)) < 1e-12)
            throw DomainError("hyp3f3: lower parameter is a non-positive integer");
    }
    if (z == 0.0) return 1.0;
    double term = 1.0;
    double sum = 1.0;
    double comp = 0.0; // Kahan compensation
    double sum_abs = 1.0;
    int small_streak = 0;
    for (int k = 0; k < ctl.max_terms; ++k) {
        term *= (a[0] + k) * (a[1] + k) * (a[2] + k) /
                ((b[0] + k) * (b[1] + k) * (b[2] + k)) * z / (k + 1.0);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        sum_abs += std::abs(term);
        if (std::abs(term) < ctl.rel_tol * std::max(std::abs(sum), 1e-300)) {
            if (++small_streak >= 2) {
                if (z < 0.0 && sum_abs > 1e6 * std::max(std::abs(sum), 1e-300))
                    throw PrecisionLossError("hyp3f3: alternating cancellation too severe");
                return sum;
            }
        } else {
            small_streak = 0;
        }
    }
    throw NonConvergence("hyp3f3: series did not converge within max_terms");
}

} // namespace wedge::specfun
