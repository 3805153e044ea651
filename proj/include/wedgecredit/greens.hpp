// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_GREENS_HPP
#define WEDGECREDIT_GREENS_HPP

#include "wedgecredit/quadrature.hpp"

namespace wedge::greens {

// Correlation-derived quantities of the 2D wedge problem. The map
// W(X) = (X1, (X2 - rho X1)/rho_bar) sends the positive quadrant in X
// to the wedge 0 < phi < varpi; phi is measured from the X1 = 0 edge.
struct WedgeGeometry {
    double rho = 0.0;
    double rho_bar = 1.0;     // sqrt(1 - rho^2)
    double varpi = 0.0;       // wedge angle, arccos(-rho)
    double xi1 = 0.0, xi2 = 0.0;
    double theta1 = 0.0, theta2 = 0.0;  // C^{-1} xi
    double xi_dot_theta = 0.0;

    static WedgeGeometry make(double rho, double xi1, double xi2, double max_abs_rho = 0.95);

    double nu(int n) const;  // n pi / varpi

    // polar coordinates (R, phi) of a point in the quadrant
    void polar(double X1, double X2, double* R, double* phi) const;

    // W-plane coordinates
    void to_w(double X1, double X2, double* w1, double* w2) const;
};

// Eigenmode series truncation control.
struct SeriesBudget {
    int n_max = 400;
    double tail_tol = 1e-12;
};

// Hard floor below which the 2D evaluators refuse to run (the caller
// should use the FD solver there).
inline constexpr double kMinTheta2d = 1e-4;

// 1D Green's function with an absorbing barrier (drifted image pair).
double green_1d(double theta_t, double X1, double X1p, double barrier, double xi1);

// 1D survival probability with barrier `barrier` and terminal strike
// `strike`: two-term normal-CDF closed form. tau = 0 returns the
// terminal indicator with the half-maximum convention.
double chi_survival(double tau, double X1p, double barrier, double strike, double xi1);

// 2D wedge Green's function G(theta_t, X | X').
double green_2d(double theta_t, double X1, double X2, double X1p, double X2p,
                const WedgeGeometry& geom, const SeriesBudget& budget = {});

// Boundary normal derivative G_{X2}(theta_t, X1, 0 | X').
double green_2d_dx2(double theta_t, double X1, double X1p, double X2p, const WedgeGeometry& geom,
                    const SeriesBudget& budget = {});

// Boundary derivative on the other edge, G_{X1}(theta_t, 0, X2 | X').
double green_2d_dx1_at0(double theta_t, double X2, double X1p, double X2p,
                        const WedgeGeometry& geom, const SeriesBudget& budget = {});

// Interior derivative G_{X1}(theta_t, X1, X2 | X').
double green_2d_dx1(double theta_t, double X1, double X2, double X1p, double X2p,
                    const WedgeGeometry& geom, const SeriesBudget& budget = {});

// X2-moments of G and G_{X1} at fixed X1:
//   Y1 = int G dX2, Y2 = int X2 G dX2, Z1 = int G_{X1} dX2, Z2 = int X2 G_{X1} dX2.
struct Moments {
    double Y1 = 0.0, Y2 = 0.0, Z1 = 0.0, Z2 = 0.0;
};
Moments green_moments(double theta_t, double X1, double X1p, double X2p,
                      const WedgeGeometry& geom, const SeriesBudget& budget, double x2_max,
                      const quadrature::QuadOptions& quad);

// Weighted X2-line integral of a Green's-function kernel at fixed X1,
// the workhorse behind the moments and the pricing source terms.
enum class Kernel { Value, DX1 };
double green_weighted_x2_integral(double theta_t, double X1, double X1p, double X2p,
                                  const WedgeGeometry& geom, const SeriesBudget& budget,
                                  double x2_max, Kernel kernel,
                                  const std::function<double(double)>& weight,
                                  const quadrature::QuadOptions& quad);

} // namespace wedge::greens

#endif
