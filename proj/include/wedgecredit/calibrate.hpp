// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_CALIBRATE_HPP
#define WEDGECREDIT_CALIBRATE_HPP

#include <array>

#include "wedgecredit/pricing.hpp"

namespace wedge::calibrate {

// Market (or self-generated) quotes at a common maturity: two CDS
// quotes and one first-to-default quote, reported with the protection
// legs positive.
struct QuoteSet {
    double C1 = 0.0, C2 = 0.0, F1 = 0.0;
    double T = 1.0;
    double coupon1 = 0.0, coupon2 = 0.0;

    void validate() const;
};

struct CalibrationResult {
    double sigma1 = 0.0, sigma2 = 0.0, rho = 0.0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::array<double, 3> residuals{};
};

struct CalibrationOptions {
    std::array<double, 3> x0{0.5, 0.5, 0.0};
    double sigma_lo = 0.05, sigma_hi = 2.0;
    double rho_lo = -0.95, rho_hi = 0.95;
    double obj_tol = 1e-4;      // relative decrease considered stalled
    double obj_target = 1e-12;  // unconditional acceptance level
    double step_tol = 1e-8;
    double fd_step = 1e-5;
    int max_iter = 60;
    pricing::PricingNumerics numerics;
    Exec exec = Exec::OpenMP;
};

// Swap the two banks of a network (prices of the second bank's CDS are
// computed on the swapped network).
network::BankNetwork swap_banks(const network::BankNetwork& net);

// Model quotes (C1, C2, F1) at t = 0 under the given volatilities and
// correlation; the sign convention reports protection value positive.
std::array<double, 3> price_quotes(const network::BankNetwork& net, double sigma1, double sigma2,
                                   double rho, double coupon1, double coupon2,
                                   const pricing::PricingNumerics& num = {},
                                   Exec exec = Exec::OpenMP);

// Box-constrained Levenberg-Marquardt least squares on finite-difference
// Jacobians, equal weights on the three quote residuals.
CalibrationResult calibrate(const network::BankNetwork& net, const QuoteSet& quotes,
                            const CalibrationOptions& opt = {});

// Zero the mutual liabilities while re-adjusting external liabilities so
// asset values stay fixed.
network::BankNetwork adjustment_procedure(const network::BankNetwork& net);

} // namespace wedge::calibrate

#endif
