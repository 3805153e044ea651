// SPDX-License-Identifier: Apache-2.0

#include "wedgecredit/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wedgecredit/errors.hpp"
#include "wedgecredit/quadrature.hpp"
#include "wedgecredit/specfun.hpp"

namespace wedge::pricing {

namespace {

using specfun::exp_times_ncdf;
using specfun::exp_times_ncdf_diff;
using specfun::norm_cdf;
using specfun::norm_pdf;

constexpr double kTinyTau = 1e-12;
constexpr double kTailLog = 40.0;

double theta_floor(double dist, double tau) {
    const double cut = dist * dist / (2.0 * kTailLog);
    return std::min(tau, std::max(greens::kMinTheta2d, cut));
}

// Nondimensional 1D context of the reference bank plus everything the
// 2D representation reuses.
struct Ctx {
    const model::TwoBank& m;
    double tau;         // scaled time to maturity
    double coupon_bar;  // coupon per unit scaled time
    double b;           // mu~_1^<
    double K;           // mu~_1^=
    double Kinf;        // mu_1^=
    double mu2;         // mu_2^=
    double xi1, xi2, rho;
    double R1, R2;

    Ctx(const model::TwoBank& mm, double t_bar, double coupon)
        : m(mm),
          tau(mm.T_bar() - t_bar),
          coupon_bar(coupon / (mm.nd.omega * mm.nd.omega)),
          b(mm.nd.mu_tilde_lt[0]),
          K(mm.nd.mu_tilde_eq[0]),
          Kinf(mm.nd.mu_eq[0]),
          mu2(mm.nd.mu_eq[1]),
          xi1(mm.nd.xi[0]),
          xi2(mm.nd.xi[1]),
          rho(mm.net.corr(0, 1)),
          R1(mm.net.R[0]),
          R2(mm.net.R[1]) {
        if (tau < 0.0) throw DomainError("pricing: valuation time past maturity");
    }

    double psi(double s, double x) const {
        return x > b ? cds_1d_core(s, x, b, K, xi1, R1, coupon_bar) : 1.0 - R1;
    }
    double c_inf(double s, double x) const {
        return cds_1d_core(s, x, 0.0, Kinf, xi1, R1, coupon_bar);
    }
    // f_{2,inf}: far-field leg of the other bank (same contract coupon)
    double f2_inf(double s, double x) const {
        return cds_1d_core(s, x, 0.0, mu2, xi2, R2, coupon_bar);
    }
    double u_gap(double s, double x) const { return c_inf(s, x) - psi(s, x); }
    double du_gap(double s, double x) const {
        double v = cds_1d_core_dx(s, x, 0.0, Kinf, xi1, R1, coupon_bar);
        if (x > b) v -= cds_1d_core_dx(s, x, b, K, xi1, R1, coupon_bar);
        return v;
    }
};

} // namespace

void ContractSpec::validate() const {
    if (coupon < 0.0) throw DomainError("ContractSpec: coupon must be nonnegative");
}

TruncatedDomain default_domain(const model::TwoBank& m, double X1p, double X2p) {
    const double reach = 8.0 * std::sqrt(m.T_bar());
    const double mu_top = std::max(m.nd.mu_tilde_eq[0], m.nd.mu_tilde_eq[1]);
    TruncatedDomain d;
    d.M1 = std::max(mu_top, X1p) + reach;
    d.M2 = std::max(mu_top, X2p) + reach;
    return d;
}

double cds_1d_core(double tau, double X1p, double barrier, double strike, double xi, double R,
                   double coupon_bar) {
    if (xi == 0.0) throw DomainError("cds_1d: zero drift not supported");
    if (X1p <= barrier) return 1.0 - R;
    if (tau <= kTinyTau) {
        if (X1p < strike) return 1.0 - R;
        return X1p == strike ? 0.5 * (1.0 - R) : 0.0;
    }
    const double rt = std::sqrt(tau);
    const double d = X1p - barrier;
    const double Kb = strike - barrier;
    const double y_p = (d + xi * tau) / rt;
    const double y_m = (-d + xi * tau) / rt;
    const double z = (d - Kb + xi * tau) / rt;
    const double v = (d + Kb - xi * tau) / rt;
    const double a = -2.0 * xi * d;

    const double I1 =
        (1.0 - R) * (norm_cdf(y_p) - norm_cdf(z) + exp_times_ncdf_diff(a, -y_m, v));
    const double ea_N_ym = exp_times_ncdf(a, y_m);
    const double I2 = (1.0 - R) * (ea_N_ym + norm_cdf(-y_p));
    const double I3 = -coupon_bar * (tau - (d + xi * tau) / xi * norm_cdf(-y_p) -
                                     (-d + xi * tau) / xi * ea_N_ym);
    return I1 + I2 + I3;
}

double cds_1d_core_dx(double tau, double X1p, double barrier, double strike, double xi, double R,
                      double coupon_bar) {
    if (xi == 0.0) throw DomainError("cds_1d: zero drift not supported");
    if (tau <= kTinyTau || X1p < barrier) return 0.0;
    const double rt = std::sqrt(tau);
    const double d = X1p - barrier;
    const double Kb = strike - barrier;
    const double y_p = (d + xi * tau) / rt;
    const double y_m = (-d + xi * tau) / rt;
    const double z = (d - Kb + xi * tau) / rt;
    const double v = (d + Kb - xi * tau) / rt;
    const double a = -2.0 * xi * d;

    const double ea_N_ym = exp_times_ncdf(a, y_m);
    const double ea_pdf_ym = norm_pdf(y_p); // e^a phi(y_m) == phi(y_p) exactly
    const double ea_pdf_v = 0.39894228040143268 * std::exp(a - 0.5 * v * v);

    const double dI1 =
        (1.0 - R) * (norm_pdf(y_p) / rt - norm_pdf(z) / rt -
                     2.0 * xi * exp_times_ncdf_diff(a, -y_m, v) + (ea_pdf_ym - ea_pdf_v) / rt);
    const double dI2 = (1.0 - R) * (-2.0 * xi * ea_N_ym - 2.0 * norm_pdf(y_p) / rt);
    const double Ap = norm_cdf(-y_p) / xi - (d + xi * tau) / (xi * rt) * norm_pdf(y_p);
    const double Bterm = (-d + xi * tau) / xi * ea_N_ym;
    const double Bp = -2.0 * xi * Bterm - ea_N_ym / xi - (-d + xi * tau) / (xi * rt) * ea_pdf_ym;
    const double dI3 = coupon_bar * (Ap + Bp);
    return dI1 + dI2 + dI3;
}

double cds_1d(const model::TwoBank& m, double t_bar, double X1p, OneDVariant variant,
              const ContractSpec& spec) {
    spec.validate();
    const Ctx c(m, t_bar, spec.coupon);
    if (variant == OneDVariant::AtBarrier)
        return cds_1d_core(c.tau, X1p, c.b, c.K, c.xi1, c.R1, c.coupon_bar);
    return cds_1d_core(c.tau, X1p, 0.0, c.Kinf, c.xi1, c.R1, c.coupon_bar);
}

double cds_terminal_payoff(const model::TwoBank& m, const std::vector<double>& A_T) {
    using clearing::Region;
    const Region reg = clearing::classify_terminal_region_assets(m.net, A_T[0], A_T[1]);
    if (reg == Region::D12 || reg == Region::D1) return 0.0;
    std::vector<double> gamma{1.0, 1.0};
    if (reg == Region::Dhat)
        gamma = clearing::solve_clearing(clearing::ClearingProblem::from_network(m.net, A_T));
    const auto r_eff = clearing::effective_recovery(m.net, A_T, gamma);
    return 1.0 - std::min(r_eff[0], m.net.R[0]);
}

double ftd_terminal_payoff(const model::TwoBank& m, const std::vector<double>& A_T) {
    using clearing::Region;
    const Region reg = clearing::classify_terminal_region_assets(m.net, A_T[0], A_T[1]);
    if (reg == Region::D12) return 0.0;
    std::vector<double> gamma{1.0, 1.0};
    if (reg == Region::Dhat)
        gamma = clearing::solve_clearing(clearing::ClearingProblem::from_network(m.net, A_T));
    const auto r_eff = clearing::effective_recovery(m.net, A_T, gamma);
    const double loss1 = 1.0 - std::min(r_eff[0], m.net.R[0]); // bank 1 defaulted
    const double loss2 = 1.0 - std::min(r_eff[1], m.net.R[1]); // bank 2 defaulted
    if (reg == Region::D1) return loss2;
    if (reg == Region::D2) return loss1;
    return std::max(loss1, loss2);
}

namespace {

// terminal data of the regularized CDS problem
double cds_regularized_terminal(const Ctx& c, double x1, double x2, double M2) {
    double v = 0.0;
    const auto A1 = c.m.asset_of_x(0, x1);
    const auto A2 = c.m.asset_of_x(1, x2);
    v += cds_terminal_payoff(c.m, {A1, A2});
    if (x1 <= c.Kinf) v -= (1.0 - c.R1) * (x2 / M2);
    if (x1 <= c.K) v -= (1.0 - c.R1) * (1.0 - x2 / M2);
    return v;
}

// terminal data of the regularized FTD problem
double ftd_regularized_terminal(const Ctx& c, double x1, double x2, double M2) {
    double v = ftd_terminal_payoff(c.m, {c.m.asset_of_x(0, x1), c.m.asset_of_x(1, x2)});
    if (x1 <= c.Kinf) v -= (1.0 - c.R1) * (x2 / M2);
    v -= (1.0 - c.R2) * (1.0 - x2 / M2);
    return v;
}

// 2D integral of payoff * G over [0,M1]x[0,M2] with cell splits on the
// known discontinuity lines.
template <typename F>
double terminal_integral(const Ctx& c, double X1p, double X2p, const TruncatedDomain& dom,
                         const PricingNumerics& num, const std::vector<double>& x1_cuts_in,
                         const std::vector<double>& x2_cuts_in, F&& payoff) {
    std::vector<double> x1_cuts = x1_cuts_in;
    std::vector<double> x2_cuts = x2_cuts_in;
    x1_cuts.insert(x1_cuts.begin(), 0.0);
    x1_cuts.push_back(dom.M1);
    x2_cuts.insert(x2_cuts.begin(), 0.0);
    x2_cuts.push_back(dom.M2);
    std::sort(x1_cuts.begin(), x1_cuts.end());
    std::sort(x2_cuts.begin(), x2_cuts.end());
    quadrature::QuadOptions outer{num.quad_tol, 1e-13, 300, 15};
    quadrature::QuadOptions inner{num.quad_tol, 1e-13, 150, 15};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x1_cuts.size(); ++i) {
        if (x1_cuts[i + 1] <= x1_cuts[i] + 1e-14) continue;
        for (std::size_t j = 0; j + 1 < x2_cuts.size(); ++j) {
            if (x2_cuts[j + 1] <= x2_cuts[j] + 1e-14) continue;
            total += quadrature::integrate2d(
                [&](double x1, double x2) {
                    const double p = payoff(x1, x2);
                    if (p == 0.0) return 0.0;
                    return p * greens::green_2d(c.tau, x1, x2, X1p, X2p, c.m.geom, num.budget);
                },
                x1_cuts[i], x1_cuts[i + 1], x2_cuts[j], x2_cuts[j + 1], outer, inner);
        }
    }
    return total;
}

// time integral of a smooth-in-theta inner function over (0, tau]:
// adaptive in sqrt(theta) above theta_a, Simpson closure below it using
// the analytic theta -> 0 limit.
template <typename Inner>
double time_integral_smooth(double tau, double inner_at_zero, Inner&& inner,
                            const quadrature::QuadOptions& opt) {
    const double theta_a = std::min(1e-3, 0.25 * tau);
    double total = 0.0;
    if (theta_a > 0.0) {
        const double f0 = inner_at_zero;
        const double fm = inner(0.5 * theta_a);
        const double f1 = inner(theta_a);
        total += theta_a / 6.0 * (f0 + 4.0 * fm + f1);
    }
    total += quadrature::integrate([&](double w) { return 2.0 * w * inner(w * w); },
                                   std::sqrt(theta_a), std::sqrt(tau), opt);
    return total;
}

// time integral of an edge-flux inner function, negligible below the
// distance-based floor.
template <typename Inner>
double time_integral_edge(double tau, double dist, Inner&& inner,
                          const quadrature::QuadOptions& opt) {
    const double th_lo = theta_floor(dist, tau);
    if (th_lo >= tau) return 0.0;
    return quadrature::integrate([&](double w) { return 2.0 * w * inner(w * w); },
                                 std::sqrt(th_lo), std::sqrt(tau), opt);
}

} // namespace

double cds_2d(const model::TwoBank& m, double t_bar, double X1p, double X2p,
              const ContractSpec& spec, const TruncatedDomain& dom, const PricingNumerics& num) {
    spec.validate();
    const Ctx c(m, t_bar, spec.coupon);
    if (c.tau <= kTinyTau)
        return cds_terminal_payoff(m, {m.asset_of_x(0, X1p), m.asset_of_x(1, X2p)});
    if (X1p <= 0.0) return 1.0 - c.R1;
    if (X2p <= 0.0) return c.psi(c.tau, X1p);
    const double M2 = dom.M2;

    // boundary blend
    const double H = (X2p / M2) * c.c_inf(c.tau, X1p) + (1.0 - X2p / M2) * c.psi(c.tau, X1p);

    // terminal integral of the regularized data
    const double x1_top = m.terminal_boundary_x(0, 0.0); // widest extent of the default region
    const double T_C = terminal_integral(
        c, X1p, X2p, dom, num, {c.Kinf, c.K, x1_top}, {c.mu2},
        [&](double x1, double x2) { return cds_regularized_terminal(c, x1, x2, M2); });

    quadrature::QuadOptions t_opt{10.0 * num.quad_tol, 1e-12, 120, 15};
    quadrature::QuadOptions x_opt{5.0 * num.quad_tol, 1e-13, 150, 15};

    // volume source: coupon strip below the barrier plus the blend mismatch
    auto w1 = [&](double s, double x1) {
        double v = -(c.xi2 / M2) * c.u_gap(s, x1) - (c.rho / M2) * c.du_gap(s, x1);
        if (x1 <= c.b) v += c.coupon_bar;
        return v;
    };
    auto vol_inner = [&](double th) {
        const double s = c.tau - th;
        double total = 0.0;
        const std::array<double, 2> seams = {c.b, std::max(c.Kinf, c.K)};
        double lo = 0.0;
        for (int seg = 0; seg < 3; ++seg) {
            const double hi = seg < 2 ? seams[seg] : dom.M1;
            if (hi > lo + 1e-14) {
                total += quadrature::integrate(
                    [&](double x1) {
                        const double a0 = w1(s, x1);
                        const double a1 = x1 <= c.b ? -c.coupon_bar / M2 : 0.0;
                        if (a0 == 0.0 && a1 == 0.0) return 0.0;
                        return greens::green_weighted_x2_integral(
                            th, x1, X1p, X2p, m.geom, num.budget, M2, greens::Kernel::Value,
                            [&](double x2) { return a0 + a1 * x2; }, x_opt);
                    },
                    lo, hi, x_opt);
            }
            lo = hi;
        }
        return total;
    };
    const double vol_at_zero = w1(c.tau, X1p) + (X1p <= c.b ? -c.coupon_bar / M2 * X2p : 0.0);
    const double S_vol = time_integral_smooth(c.tau - 1e-6, vol_at_zero, vol_inner, t_opt);

    // delta term collapsed onto the barrier line
    auto delta_inner = [&](double th) {
        const double s = c.tau - th;
        const double slope = cds_1d_core_dx(s, c.b, c.b, c.K, c.xi1, c.R1, c.coupon_bar);
        return -0.5 * slope *
               greens::green_weighted_x2_integral(th, c.b, X1p, X2p, m.geom, num.budget, M2,
                                                  greens::Kernel::Value,
                                                  [&](double x2) { return 1.0 - x2 / M2; }, x_opt);
    };
    const double S_delta =
        time_integral_edge(c.tau - 1e-6, std::abs(X1p - c.b), delta_inner, t_opt);

    return H + T_C - (S_vol + S_delta);
}

double ftd_2d(const model::TwoBank& m, double t_bar, double X1p, double X2p,
              const ContractSpec& spec, const TruncatedDomain& dom, const PricingNumerics& num) {
    spec.validate();
    const Ctx c(m, t_bar, spec.coupon);
    if (c.tau <= kTinyTau)
        return ftd_terminal_payoff(m, {m.asset_of_x(0, X1p), m.asset_of_x(1, X2p)});
    if (X2p <= 0.0) return 1.0 - c.R2;
    if (X1p <= 0.0) {
        // the blend recovers this edge only in the limit; return the data
        return 1.0 - c.R1;
    }
    const double M1 = dom.M1;
    const double M2 = dom.M2;

    const double h = (X2p / M2) * c.c_inf(c.tau, X1p) + (1.0 - X2p / M2) * (1.0 - c.R2);

    const double x1_top = m.terminal_boundary_x(0, 0.0);
    const double x2_top = m.terminal_boundary_x(1, 0.0);
    const double T_F = terminal_integral(
        c, X1p, X2p, dom, num, {c.Kinf, c.K, x1_top}, {c.mu2, x2_top},
        [&](double x1, double x2) { return ftd_regularized_terminal(c, x1, x2, M2); });

    quadrature::QuadOptions t_opt{10.0 * num.quad_tol, 1e-12, 120, 15};
    quadrature::QuadOptions x_opt{5.0 * num.quad_tol, 1e-13, 150, 15};

    auto wf1 = [&](double s, double x1) {
        return c.coupon_bar - (c.rho / M2) * cds_1d_core_dx(s, x1, 0.0, c.Kinf, c.xi1, c.R1,
                                                            c.coupon_bar) -
               (c.xi2 / M2) * (c.c_inf(s, x1) - (1.0 - c.R2));
    };
    auto vol_inner = [&](double th) {
        const double s = c.tau - th;
        double total = 0.0;
        const std::array<double, 1> seams = {c.Kinf};
        double lo = 0.0;
        for (int seg = 0; seg < 2; ++seg) {
            const double hi = seg < 1 ? seams[seg] : M1;
            if (hi > lo + 1e-14) {
                total += quadrature::integrate(
                    [&](double x1) {
                        const double a0 = wf1(s, x1);
                        return greens::green_weighted_x2_integral(
                            th, x1, X1p, X2p, m.geom, num.budget, M2, greens::Kernel::Value,
                            [&](double x2) { return a0 - c.coupon_bar / M2 * x2; }, x_opt);
                    },
                    lo, hi, x_opt);
            }
            lo = hi;
        }
        return total;
    };
    const double vol_at_zero = wf1(c.tau, X1p) - c.coupon_bar / M2 * X2p;
    const double S_vol = time_integral_smooth(c.tau - 1e-6, vol_at_zero, vol_inner, t_opt);

    // left-edge flux carrying the recovery mismatch (1 - x2/M2)(R2 - R1)
    auto k3_inner = [&](double th) {
        return 0.5 * (c.R2 - c.R1) *
               greens::green_weighted_x2_integral(th, 0.0, X1p, X2p, m.geom, num.budget, M2,
                                                  greens::Kernel::DX1,
                                                  [&](double x2) { return 1.0 - x2 / M2; }, x_opt);
    };
    const double K3 = time_integral_edge(c.tau, X1p, k3_inner, t_opt);

    // right-edge flux against the f_{2,inf} data mismatch (negligible
    // unless the evaluation point sits near the truncation edge)
    double K2 = 0.0;
    if (theta_floor(M1 - X1p, c.tau) < c.tau * (1.0 - 1e-9)) {
        auto k2_inner = [&](double th) {
            const double s = c.tau - th;
            const double f1_at_M1 = c.c_inf(s, M1);
            return -0.5 * greens::green_weighted_x2_integral(
                              th, M1, X1p, X2p, m.geom, num.budget, M2, greens::Kernel::DX1,
                              [&](double x2) {
                                  return c.f2_inf(s, x2) - (x2 / M2) * f1_at_M1 -
                                         (1.0 - x2 / M2) * (1.0 - c.R2);
                              },
                              x_opt);
        };
        K2 = time_integral_edge(c.tau, M1 - X1p, k2_inner, t_opt);
    }

    return h + T_F - S_vol + K3 + K2;
}

std::vector<double> price_surface(const model::TwoBank& m, ContractKind kind, double coupon,
                                  const std::vector<double>& x1, const std::vector<double>& x2,
                                  const PricingNumerics& num, Exec exec) {
    ContractSpec spec{kind, coupon};
    const auto dom = default_domain(m, x1.empty() ? 0.0 : x1.back(), x2.empty() ? 0.0 : x2.back());
    const std::size_t n1 = x1.size();
    const std::size_t n2 = x2.size();
    std::vector<double> out(n1 * n2);
    const int nth = threads_for(exec, static_cast<int>(n1 * n2));
#pragma omp parallel for collapse(2) num_threads(nth) schedule(dynamic)
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            out[i * n2 + j] = kind == ContractKind::CDS
                                  ? cds_2d(m, 0.0, x1[i], x2[j], spec, dom, num)
                                  : ftd_2d(m, 0.0, x1[i], x2[j], spec, dom, num);
        }
    }
    return out;
}

} // namespace wedge::pricing
