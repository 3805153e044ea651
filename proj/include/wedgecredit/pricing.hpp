// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_PRICING_HPP
#define WEDGECREDIT_PRICING_HPP

#include "wedgecredit/model.hpp"
#include "wedgecredit/parallel.hpp"

#include <vector>

namespace wedge::pricing {

enum class ContractKind { CDS, FTD };

// Contract written on the model's first bank; price the second bank's
// CDS by swapping the banks in the network first.
struct ContractSpec {
    ContractKind kind = ContractKind::CDS;
    double coupon = 0.0; // continuous coupon rate, calendar-time units

    void validate() const;
};

// Upper truncation of the pricing domain in X coordinates.
struct TruncatedDomain {
    double M1 = 0.0, M2 = 0.0;
};
TruncatedDomain default_domain(const model::TwoBank& m, double X1p, double X2p);

struct PricingNumerics {
    double quad_tol = 1e-7;
    greens::SeriesBudget budget;
};

// 1D CDS legs. Variant AtBarrier is the post-default-of-the-other
// problem (barrier mu~_1^<, strike mu~_1^=); FarField replaces them
// with 0 and mu_1^=.
enum class OneDVariant { AtBarrier, FarField };

// Core closed form in nondimensional terms: absorbing barrier, terminal
// strike, drift xi, recovery R, coupon per unit scaled time.
double cds_1d_core(double tau, double X1p, double barrier, double strike, double xi, double R,
                   double coupon_bar);
// d/dX1' of the same.
double cds_1d_core_dx(double tau, double X1p, double barrier, double strike, double xi, double R,
                      double coupon_bar);

double cds_1d(const model::TwoBank& m, double t_bar, double X1p, OneDVariant variant,
              const ContractSpec& spec);

// Terminal CDS payoff alpha_1 on the first bank at terminal assets A_T.
double cds_terminal_payoff(const model::TwoBank& m, const std::vector<double>& A_T);
// Terminal FTD payoff (beta_0, beta_1 or beta_2 depending on region).
double ftd_terminal_payoff(const model::TwoBank& m, const std::vector<double>& A_T);

// Semi-analytic 2D prices at scaled time t_bar and point (X1', X2').
double cds_2d(const model::TwoBank& m, double t_bar, double X1p, double X2p,
              const ContractSpec& spec, const TruncatedDomain& dom, const PricingNumerics& num = {});
double ftd_2d(const model::TwoBank& m, double t_bar, double X1p, double X2p,
              const ContractSpec& spec, const TruncatedDomain& dom, const PricingNumerics& num = {});

// Surface evaluation fanned out over points (deterministic reduction).
std::vector<double> price_surface(const model::TwoBank& m, ContractKind kind, double coupon,
                                  const std::vector<double>& x1, const std::vector<double>& x2,
                                  const PricingNumerics& num, Exec exec);

} // namespace wedge::pricing

#endif
