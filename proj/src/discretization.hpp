#ifndef DISP_DISCRETIZATION_HPP
#define DISP_DISCRETIZATION_HPP

#include "linalg.hpp"
#include "model.hpp"

#include <span>
#include <vector>

namespace disp {

/// Uniform grid of n interior nodes on (0, ell); h = ell / (n + 1),
/// x_i = (i + 1) h for i = 0..n-1. Boundary values are identically zero
/// under the clamped conditions and are never stored.
struct SpatialGrid {
    int n = 0;
    double h = 0.0;
    double ell = 0.0;

    double node(int i) const { return h * (i + 1); }
};

/// Throws ConfigError for n < 5 (the fourth-difference stencil needs the
/// room after ghost elimination).
SpatialGrid build_grid(const ModelParams& params, int n);

/// Centered first difference, rows (-1, 0, 1) / (2h); boundary rows use the
/// known zero boundary values.
BandedOperator assemble_d1(const SpatialGrid& grid);

/// Second difference, rows (1, -2, 1) / h^2 with Dirichlet ends.
BandedOperator assemble_d2(const SpatialGrid& grid);

/// Fourth difference, rows (1, -4, 6, -4, 1) / h^4. The clamped condition
/// u_x = 0 at the wall eliminates the ghost node via u_{-1} = u_1, giving
/// first and last rows (7, -4, 1) / h^4.
BandedOperator assemble_d4(const SpatialGrid& grid);

/// Trapezoidal weights with zero boundary values: a plain h-weighted dot
/// product on the interior nodes.
struct Quadrature {
    std::vector<double> weights;

    double inner(std::span<const double> u, std::span<const double> w) const;
    double norm(std::span<const double> u) const;
};

Quadrature build_quadrature(const SpatialGrid& grid);

/// Composite trapezoidal value of the integral of u * w.
/// Throws ConfigError on dimension mismatch.
double l2_inner(const Quadrature& q, std::span<const double> u, std::span<const double> w);

} // namespace disp

#endif
