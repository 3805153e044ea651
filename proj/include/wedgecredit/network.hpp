// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_NETWORK_HPP
#define WEDGECREDIT_NETWORK_HPP

#include <cstddef>
#include <vector>

namespace wedge::network {

// Balance-sheet data for a set of banks with mutual obligations.
// l_mut(i,j) is the amount bank i owes bank j; the diagonal is zero.
// External liabilities grow deterministically at the risk-free rate, so
// all time-t liability values are the t=0 values scaled by e^{rt}.
struct BankNetwork {
    std::size_t n_banks = 0;
    std::vector<double> A0;     // external asset values at t=0
    std::vector<double> L0;     // external liabilities at t=0
    std::vector<double> L_mut;  // row-major n x n, entry (i,j) = L_ij
    std::vector<double> R;      // recovery rates in [0,1]
    std::vector<double> sigma;  // asset volatilities
    std::vector<double> rho;    // row-major n x n correlation matrix
    double r = 0.0;             // risk-free rate
    double T = 1.0;             // settlement maturity

    double lmut(std::size_t i, std::size_t j) const { return L_mut[i * n_banks + j]; }
    double corr(std::size_t i, std::size_t j) const { return rho[i * n_banks + j]; }

    // Interbank assets/liabilities of bank i: sum_j L_ji and sum_j L_ij.
    double interbank_assets(std::size_t i) const;
    double interbank_liabilities(std::size_t i) const;

    // Throws DomainError listing every violated invariant.
    void validate() const;
};

// Convenience constructor for the two-bank case.
BankNetwork make_two_bank(double L1, double L2, double L12, double L21, double R1, double R2,
                          double sigma1, double sigma2, double rho, double T, double A1 = 0.0,
                          double A2 = 0.0, double r = 0.0);

// All default thresholds of the network at a fixed time, plus their
// nondimensional counterparts where those have been computed.
struct BoundarySet {
    std::vector<double> lambda_lt;        // lambda_i^< (pre-maturity, recovery-scaled)
    std::vector<double> lambda_eq;        // lambda_i^= (maturity, full liabilities)
    std::vector<double> lambda_tilde_lt;  // post-default-of-the-other, N=2 only
    std::vector<double> lambda_tilde_eq;
    std::vector<double> delta_lambda_lt;  // tilde minus plain, >= 0
    std::vector<double> delta_lambda_eq;

    std::vector<double> mu_lt;        // identically zero by construction
    std::vector<double> mu_eq;
    std::vector<double> mu_tilde_lt;  // N=2 only
    std::vector<double> mu_tilde_eq;

    double omega = 0.0;        // geometric-average volatility
    std::vector<double> xi;    // nondimensional drifts, -sigma_i/(2 omega)
    std::vector<double> X;     // log coordinates of the supplied asset values
    double t_bar = 0.0;        // omega^2 t
    double T_bar = 0.0;        // omega^2 T

    // lambda_i^< <= 0 makes the log change of variables undefined; the
    // flag is carried here and raised by nondimensionalize.
    bool log_coords_valid = true;
};

// lambda_i^<(t) and lambda_i^=(t) for all banks (no-default-yet case).
BoundarySet standard_boundaries(const BankNetwork& net, double t);

// Thresholds of the survivors after bank `defaulted` has defaulted, at
// time t (general-N formulas; the N=2 case drops the second index).
struct PostDefaultBoundaries {
    std::vector<double> lambda_tilde_lt;  // indexed by bank, defaulted slot unused
    std::vector<double> lambda_tilde_eq;
    std::vector<double> delta_lambda_lt;
    std::vector<double> delta_lambda_eq;
};
PostDefaultBoundaries post_default_boundaries(const BankNetwork& net, std::size_t defaulted,
                                              double t);

// Full nondimensionalization at time t for asset values A. Throws
// DomainError when any logarithm argument is not positive. N=2 fills
// the tilde entries.
BoundarySet nondimensionalize(const BankNetwork& net, const std::vector<double>& A, double t);

// Terminal default boundary of bank i as a function of the other
// bank's terminal assets (N=2, Eq. driven by the terminal clearing
// recovery with the counterparty paying in full).
double terminal_boundary_curve(const BankNetwork& net, std::size_t i, double A_other);

} // namespace wedge::network

#endif
