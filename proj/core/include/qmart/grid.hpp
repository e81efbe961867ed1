#ifndef QMART_GRID_HPP
#define QMART_GRID_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qmart {

/// Uniform 1-D grid on [x_min, x_max] with n nodes, spacing h.
struct Grid {
    double x_min{0.0};
    double x_max{1.0};
    int n{2};
    double h{1.0};

    Grid() = default;

    Grid(double x_min_, double x_max_, int n_)
        : x_min(x_min_), x_max(x_max_), n(n_) {
        if (n < 3) throw std::invalid_argument("Grid: need n >= 3");
        if (!(x_max > x_min)) throw std::invalid_argument("Grid: need x_max > x_min");
        h = (x_max - x_min) / (n - 1);
    }

    double node(int i) const { return x_min + h * i; }

    std::vector<double> nodes() const {
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = node(i);
        return xs;
    }

    bool contains(double x) const { return x >= x_min && x <= x_max; }

    int nearest_index(double x) const {
        int i = static_cast<int>(std::lround((x - x_min) / h));
        return std::clamp(i, 0, n - 1);
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid centered_grid(double center, double half_width, int n) {
    return Grid(center - half_width, center + half_width, n);
}

/// Default truncation half-width: boundary mass below 1e-10 for every
/// shipped configuration.
inline double default_half_width(double sigma, double t_max) {
    return std::max(8.0 * sigma * std::sqrt(t_max), 6.0);
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b))
        throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

} // namespace qmart

#endif
