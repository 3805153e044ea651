// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_SURVIVAL_HPP
#define WEDGECREDIT_SURVIVAL_HPP

#include "wedgecredit/model.hpp"

namespace wedge::survival {

struct SurvivalRequest {
    double t_bar = 0.0;        // valuation time in scaled units
    double X1p = 0.0, X2p = 0.0;
    double quad_tol = 1e-8;
    greens::SeriesBudget budget;
    double x_max = 0.0;        // spatial truncation; 0 selects max(mu~) + 8 sqrt(T_bar)
};

double default_x_max(const model::TwoBank& m);

// Joint survival probability Q(t', X'): Green's-function mass over the
// region where both banks clear at maturity.
double joint_survival(const model::TwoBank& m, const SurvivalRequest& req);

// Marginal survival probability q1(t', X1', X2') of bank 1, computed
// from the homogeneous-upper-boundary decomposition q1 = chi_inf + qbar.
double marginal_survival(const model::TwoBank& m, const SurvivalRequest& req);

// Closed-form integral of the wedge Green's function over the whole
// positive quadrant (nonzero drift), as a double hypergeometric series.
struct QuadrantSeriesParams {
    double theta_t = 1.0;        // elapsed scaled time
    double X1p = 0.0, X2p = 0.0; // source point
    int n_limit = 60;
    int mu_limit = 40;
    double tail_tol = 1e-10;
};

struct QuadrantResult {
    double value = 0.0;
    double imag_residue = 0.0;   // relative size of the imaginary part, must be tiny
    bool fell_back_to_quadrature = false;
};

QuadrantResult quadrant_integral_closed_form(const QuadrantSeriesParams& params,
                                             const greens::WedgeGeometry& geom);

// Angular factor of the quadrant series,
//   int_0^varpi sin(nu_n phi) (g1 sin phi + g2 cos phi)^p dphi,
// in closed form (resonance-safe).
double angular_power_integral(int n, int p, double g1, double g2, double varpi);

// Direct adaptive quadrature of the same quantity (the oracle the
// closed form falls back to).
double quadrant_integral_quadrature(double theta_t, double X1p, double X2p,
                                    const greens::WedgeGeometry& geom,
                                    const greens::SeriesBudget& budget, double quad_tol);

} // namespace wedge::survival

#endif
