#include "qmart/evolution2d.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qmart/banded.hpp"

namespace qmart {

Field2D Field2D::from_function(const Grid2D& g,
                               const std::function<double(double, double)>& f) {
    Field2D out(g);
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int iy = 0; iy < g.y.n; ++iy)
            out.at(ix, iy) = f(g.x.node(ix), g.y.node(iy));
    return out;
}

double trapezoid2d(const Field2D& f) {
    return weighted_integral2d(f, [](double, double) { return 1.0; });
}

double weighted_integral2d(const Field2D& field,
                           const std::function<double(double, double)>& weight) {
    const Grid2D& g = field.grid;
    auto w1 = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
    double s = 0.0;
    for (int ix = 0; ix < g.x.n; ++ix) {
        const double x = g.x.node(ix);
        const double wx = w1(ix, g.x.n);
        for (int iy = 0; iy < g.y.n; ++iy)
            s += wx * w1(iy, g.y.n) * weight(x, g.y.node(iy)) * field.at(ix, iy);
    }
    return s * g.x.h * g.y.h;
}

namespace {

// 1-D second-derivative action scaled by a, minus half the local potential.
// Returns the tridiagonal operator A such that the sweep solves
// (I - dt/2 A) u' = rhs. Potential varies along the perpendicular index, so
// matrices are rebuilt per line; cheap relative to the solve.
Banded<double> line_operator(int n, double h, double a,
                             const std::function<double(int)>& c_half) {
    Banded<double> m(n, 1);
    const double w = a / (h * h);
    for (int i = 0; i < n; ++i) {
        if (i > 0) m(i, i - 1) = w;
        m(i, i) = -2.0 * w - c_half(i);
        if (i < n - 1) m(i, i + 1) = w;
    }
    return m;
}

} // namespace

Field2D evolve_diffusive_2d(const Field2D& psi0, double sigma_x, double sigma_y,
                            const Field2D& c, double dt, int n_steps,
                            const std::function<void(int, double, const Field2D&)>& on_step) {
    const Grid2D& g = psi0.grid;
    if (!(g.x == c.grid.x) || !(g.y == c.grid.y))
        throw std::invalid_argument("evolve_diffusive_2d: grid mismatch");
    if (!(dt > 0.0) || n_steps < 1)
        throw std::invalid_argument("evolve_diffusive_2d: bad time stepping");

    const int nx = g.x.n, ny = g.y.n;
    const double ax = sigma_x * sigma_x / 2.0;
    const double ay = sigma_y * sigma_y / 2.0;

    Field2D psi = psi0;
    Field2D half(g);

    std::vector<double> line_x(nx), line_y(ny);
    for (int step = 1; step <= n_steps; ++step) {
        // x-implicit half step: (I - dt/2 Ax) psi* = (I + dt/2 Ay) psi
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const double lap_y =
                    ((iy > 0 ? psi.at(ix, iy - 1) : 0.0) - 2.0 * psi.at(ix, iy) +
                     (iy < ny - 1 ? psi.at(ix, iy + 1) : 0.0)) /
                    (g.y.h * g.y.h);
                const double ayv = ay * lap_y - 0.5 * c.at(ix, iy) * psi.at(ix, iy);
                line_x[ix] = psi.at(ix, iy) + 0.5 * dt * ayv;
            }
            Banded<double> ax_op = line_operator(
                nx, g.x.h, ax, [&](int ix) { return 0.5 * c.at(ix, iy); });
            Banded<double> lhs = Banded<double>::identity(nx, 1);
            ax_op *= -0.5 * dt;
            lhs += ax_op;
            auto sol = BandedLU<double>(std::move(lhs)).solve(line_x);
            for (int ix = 0; ix < nx; ++ix) half.at(ix, iy) = sol[ix];
        }
        // y-implicit half step: (I - dt/2 Ay) psi' = (I + dt/2 Ax) psi*
        for (int ix = 0; ix < nx; ++ix) {
            for (int iy = 0; iy < ny; ++iy) {
                const double lap_x =
                    ((ix > 0 ? half.at(ix - 1, iy) : 0.0) - 2.0 * half.at(ix, iy) +
                     (ix < nx - 1 ? half.at(ix + 1, iy) : 0.0)) /
                    (g.x.h * g.x.h);
                const double axv = ax * lap_x - 0.5 * c.at(ix, iy) * half.at(ix, iy);
                line_y[iy] = half.at(ix, iy) + 0.5 * dt * axv;
            }
            Banded<double> ay_op = line_operator(
                ny, g.y.h, ay, [&](int iy) { return 0.5 * c.at(ix, iy); });
            Banded<double> lhs = Banded<double>::identity(ny, 1);
            ay_op *= -0.5 * dt;
            lhs += ay_op;
            auto sol = BandedLU<double>(std::move(lhs)).solve(line_y);
            for (int iy = 0; iy < ny; ++iy) psi.at(ix, iy) = sol[iy];
        }
        for (double v : psi.values)
            if (!std::isfinite(v))
                throw std::runtime_error("evolve_diffusive_2d: nonfinite value at step " +
                                         std::to_string(step));
        if (on_step) on_step(step, step * dt, psi);
    }
    return psi;
}

} // namespace qmart
