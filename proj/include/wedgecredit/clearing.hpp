// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_CLEARING_HPP
#define WEDGECREDIT_CLEARING_HPP

#include <cstddef>
#include <vector>

#include "wedgecredit/network.hpp"

namespace wedge::clearing {

// Terminal clearing problem in nondimensional form: a_i = A_i(T)/Ltilde_i(T),
// l(j,i) = L_ji(T)/Ltilde_i(T). Banks with no liabilities at all carry
// a_i = +inf by convention and always clear in full.
struct ClearingProblem {
    std::size_t n = 0;
    std::vector<double> a;
    std::vector<double> l; // row-major, l[j*n+i] = l_ji

    double lji(std::size_t j, std::size_t i) const { return l[j * n + i]; }

    static ClearingProblem from_network(const network::BankNetwork& net,
                                        const std::vector<double>& A_T);
};

struct ClearingOptions {
    double tol = 1e-12;
    int max_iter = 10000;
};

// Fixed-point solve with active-set freezing: any bank whose inflow
// meets its liabilities is pinned at gamma = 1 and the remaining linear
// system is re-solved until the active set stabilizes.
std::vector<double> solve_clearing(const ClearingProblem& problem, const ClearingOptions& opt = {});

// Effective terminal payout ratios R~_j(gamma) = min[1, (A_j + inflow)/(L_j + gamma-weighted
// own interbank claims)], liabilities at time T.
std::vector<double> effective_recovery(const network::BankNetwork& net,
                                       const std::vector<double>& A_T,
                                       const std::vector<double>& gamma);

// Terminal solvency regions of the two-bank problem (classification in
// asset space, where every boundary is piecewise linear).
enum class Region { D12, D1, D2, Dhat };

Region classify_terminal_region_assets(const network::BankNetwork& net, double A1_T, double A2_T);

// Same classification from nondimensional terminal coordinates.
Region classify_terminal_region(const network::BankNetwork& net,
                                const network::BoundarySet& nd, double X1_T, double X2_T);

const char* region_name(Region r);

// Default-cause split for a defaulted bank: outright (assets below the
// plain maturity boundary) versus through contagion.
enum class DefaultCause { None, Outright, Contagion };
DefaultCause default_cause(const network::BankNetwork& net, const std::vector<double>& A_T,
                           const std::vector<double>& gamma, std::size_t i);

} // namespace wedge::clearing

#endif
