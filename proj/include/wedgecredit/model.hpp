// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_MODEL_HPP
#define WEDGECREDIT_MODEL_HPP

#include <cmath>

#include "wedgecredit/clearing.hpp"
#include "wedgecredit/greens.hpp"
#include "wedgecredit/errors.hpp"
#include "wedgecredit/network.hpp"

namespace wedge::model {

// Derived nondimensional context for the two-bank pricing problem.
// All region tests are carried out in asset space, where the terminal
// boundaries are piecewise linear; the X <-> A conversions below bridge
// the two descriptions.
struct TwoBank {
    network::BankNetwork net;
    network::BoundarySet nd;   // boundaries at t=0 plus omega, xi, X', T_bar
    greens::WedgeGeometry geom;

    // terminal-time thresholds (liability values grown to T)
    network::BoundarySet bounds_T;

    static TwoBank make(const network::BankNetwork& net);

    double T_bar() const { return nd.T_bar; }

    // Terminal asset value corresponding to a terminal log coordinate.
    double asset_of_x(std::size_t i, double x) const {
        return bounds_T.lambda_lt[i] * std::exp(net.sigma[i] * x / nd.omega);
    }
    double x_of_asset(std::size_t i, double a) const {
        return nd.omega / net.sigma[i] * std::log(a / bounds_T.lambda_lt[i]);
    }

    // X-space image of the terminal default boundary of bank i as a
    // function of the other bank's coordinate.
    double terminal_boundary_x(std::size_t i, double x_other) const {
        const double a_other = asset_of_x(1 - i, x_other);
        return x_of_asset(i, network::terminal_boundary_curve(net, i, a_other));
    }

    clearing::Region region_x(double x1, double x2) const {
        return clearing::classify_terminal_region_assets(net, asset_of_x(0, x1),
                                                         asset_of_x(1, x2));
    }
};

inline TwoBank TwoBank::make(const network::BankNetwork& net) {
    if (net.n_banks != 2) throw wedge::DomainError("TwoBank: two banks required");
    TwoBank m;
    m.net = net;
    std::vector<double> A = net.A0;
    // X' is only meaningful when spot assets are given; fall back to the
    // pre-maturity boundary (X' = 0) so the rest of the context builds.
    for (std::size_t i = 0; i < 2; ++i)
        if (A[i] <= 0.0) A[i] = network::standard_boundaries(net, 0.0).lambda_lt[i];
    m.nd = network::nondimensionalize(net, A, 0.0);
    m.bounds_T = network::standard_boundaries(net, net.T);
    m.geom = greens::WedgeGeometry::make(net.corr(0, 1), m.nd.xi[0], m.nd.xi[1]);
    return m;
}

} // namespace wedge::model

#endif
