#ifndef QMART_EVOLUTION2D_HPP
#define QMART_EVOLUTION2D_HPP

#include <functional>
#include <vector>

#include "qmart/grid.hpp"

namespace qmart {

struct Grid2D {
    Grid x;
    Grid y;
    int size() const { return x.n * y.n; }
    int index(int ix, int iy) const { return ix * y.n + iy; }
};

/// Real scalar field on a 2-D grid, row-major in x.
struct Field2D {
    Grid2D grid;
    std::vector<double> values;

    Field2D() = default;
    Field2D(Grid2D g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.size()), fill) {}

    double& at(int ix, int iy) { return values[grid.index(ix, iy)]; }
    double at(int ix, int iy) const { return values[grid.index(ix, iy)]; }

    static Field2D from_function(const Grid2D& g,
                                 const std::function<double(double, double)>& f);
};

double trapezoid2d(const Field2D& f);

/// Integral of weight(x,y) * field(x,y) dx dy.
double weighted_integral2d(const Field2D& field,
                           const std::function<double(double, double)>& weight);

/// Diffusive evolution dpsi/dtau = sx^2/2 psi_xx + sy^2/2 psi_yy - C psi by
/// Peaceman-Rachford ADI (second order, tridiagonal sweeps per direction).
/// The potential is split evenly between the two half-steps. Dirichlet
/// boundaries.
Field2D evolve_diffusive_2d(const Field2D& psi0, double sigma_x, double sigma_y,
                            const Field2D& c, double dt, int n_steps,
                            const std::function<void(int, double, const Field2D&)>&
                                on_step = nullptr);

} // namespace qmart

#endif
