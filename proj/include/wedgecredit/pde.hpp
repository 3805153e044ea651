// SPDX-License-Identifier: Apache-2.0

#ifndef WEDGECREDIT_PDE_HPP
#define WEDGECREDIT_PDE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "wedgecredit/model.hpp"
#include "wedgecredit/parallel.hpp"

namespace wedge::pde {

// Strictly increasing nodes on [0, M], sinh-clustered around a center
// node which is snapped onto the grid exactly.
struct Grid1D {
    std::vector<double> nodes;
    std::size_t size() const { return nodes.size(); }
};
Grid1D build_grid1d(double M, int n, double center, double concentration);

struct Grid2D {
    Grid1D x1, x2;
    double dt = 0.01; // scaled-time step
};
Grid2D build_grid(double M1, double M2, int n1, int n2, double center1, double center2,
                  double concentration, double dt);

// Terminal boundary value problem u_t + L u = source on the rectangle,
// stated through samplers. Boundary samplers take (tau, coordinate)
// with tau the scaled time to maturity.
struct PdeProblem {
    std::function<double(double, double)> terminal;       // (x1, x2)
    std::function<double(double, double)> left, right;    // (tau, x2)
    std::function<double(double, double)> bottom, top;    // (tau, x1)
    double source = 0.0;
    double xi1 = 0.0, xi2 = 0.0, rho = 0.0;
};

struct PdeSolution {
    Grid2D grid;
    std::vector<double> values; // row-major [i1 * n2 + i2], at the last time level
    double at(std::size_t i, std::size_t j) const { return values[i * grid.x2.size() + j]; }
    double interpolate(double x1, double x2) const;
};

// Hundsdorfer-Verwer scheme, mixed derivative explicit, directional
// sweeps implicit; `steps` constant steps of grid.dt.
PdeSolution hv_solve(const PdeProblem& problem, const Grid2D& grid, int steps,
                     Exec exec = Exec::OpenMP);

enum class FieldKind { Q, q1, C1, F1 };

PdeProblem make_field_problem(FieldKind kind, const model::TwoBank& m, double coupon);

// Grid and step count matching the model's scaled maturity for a given
// calendar time step.
Grid2D default_grid(const model::TwoBank& m, int n1, int n2, double dt_calendar,
                    double concentration = 0.15);
int steps_for(const model::TwoBank& m, const Grid2D& grid);

PdeSolution solve_field(FieldKind kind, const model::TwoBank& m, double coupon, const Grid2D& grid,
                        int steps, Exec exec = Exec::OpenMP);

} // namespace wedge::pde

#endif
