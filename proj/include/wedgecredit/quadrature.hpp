// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_QUADRATURE_HPP
#define WEDGECREDIT_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace wedge::quadrature {

// Gauss-Legendre rule on [-1,1]; nodes/weights computed once per order
// by Newton iteration on the Legendre polynomial (no constant tables).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    int order = 15;
};

// Adaptive bisection: a panel is accepted when the order-n estimate and
// the sum of its half-panel estimates agree within tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

// Iterated 2D integral over the rectangle [a1,b1] x [a2,b2]; the outer
// variable is x2.
double integrate2d(const std::function<double(double, double)>& f, double a1, double b1, double a2,
                   double b2, const QuadOptions& outer, const QuadOptions& inner);

// 2D integral over { (x1,x2) : a2 <= x2 <= b2, lo(x2) <= x1 <= hi(x2) }.
double integrate2d_region(const std::function<double(double, double)>& f,
                          const std::function<double(double)>& lo,
                          const std::function<double(double)>& hi, double a2, double b2,
                          const QuadOptions& outer, const QuadOptions& inner);

} // namespace wedge::quadrature

#endif
