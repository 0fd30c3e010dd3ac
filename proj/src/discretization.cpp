#include "discretization.hpp"

#include "errors.hpp"

#include <cmath>
#include <string>

namespace disp {

SpatialGrid build_grid(const ModelParams& params, int n) {
    params.validate();
    if (n < 5)
        throw ConfigError("grid needs at least 5 interior nodes, got " + std::to_string(n));
    SpatialGrid g;
    g.n = n;
    g.ell = params.ell;
    g.h = params.ell / static_cast<double>(n + 1);
    return g;
}

BandedOperator assemble_d1(const SpatialGrid& grid) {
    auto op = BandedOperator::zeros(grid.n, 1, 1);
    const double c = 1.0 / (2.0 * grid.h);
    for (int i = 0; i < grid.n; ++i) {
        if (i > 0) op.at(i, -1) = -c;
        if (i < grid.n - 1) op.at(i, 1) = c;
    }
    return op;
}

BandedOperator assemble_d2(const SpatialGrid& grid) {
    auto op = BandedOperator::zeros(grid.n, 1, 1);
    const double c = 1.0 / (grid.h * grid.h);
    for (int i = 0; i < grid.n; ++i) {
        if (i > 0) op.at(i, -1) = c;
        op.at(i, 0) = -2.0 * c;
        if (i < grid.n - 1) op.at(i, 1) = c;
    }
    return op;
}

BandedOperator assemble_d4(const SpatialGrid& grid) {
    auto op = BandedOperator::zeros(grid.n, 2, 2);
    const double h2 = grid.h * grid.h;
    const double c = 1.0 / (h2 * h2);
    const int n = grid.n;
    for (int i = 0; i < n; ++i) {
        if (i >= 2) op.at(i, -2) = c;
        if (i >= 1) op.at(i, -1) = -4.0 * c;
        op.at(i, 0) = 6.0 * c;
        if (i <= n - 2) op.at(i, 1) = -4.0 * c;
        if (i <= n - 3) op.at(i, 2) = c;
    }
    // ghost elimination at the walls: u_0 = 0 and u_{-1} = u_1
    op.at(0, 0) = 7.0 * c;
    op.at(n - 1, 0) = 7.0 * c;
    return op;
}

Quadrature build_quadrature(const SpatialGrid& grid) {
    Quadrature q;
    q.weights.assign(static_cast<size_t>(grid.n), grid.h);
    return q;
}

double Quadrature::inner(std::span<const double> u, std::span<const double> w) const {
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) acc += weights[i] * u[i] * w[i];
    return acc;
}

double Quadrature::norm(std::span<const double> u) const {
    return std::sqrt(inner(u, u));
}

double l2_inner(const Quadrature& q, std::span<const double> u, std::span<const double> w) {
    if (u.size() != q.weights.size() || w.size() != q.weights.size())
        throw ConfigError("l2_inner: dimension mismatch");
    return q.inner(u, w);
}

} // namespace disp
