#include "qmart/finite_difference.hpp"

#include <stdexcept>

namespace qmart {

Banded<double> derivative_matrix(const Grid& g, int order) {
    Banded<double> m(g.n, 1);
    const double h = g.h;
    if (order == 1) {
        const double c = 1.0 / (2.0 * h);
        for (int i = 0; i < g.n; ++i) {
            if (i > 0) m(i, i - 1) = -c;
            if (i < g.n - 1) m(i, i + 1) = c;
        }
    } else if (order == 2) {
        const double c = 1.0 / (h * h);
        for (int i = 0; i < g.n; ++i) {
            if (i > 0) m(i, i - 1) = c;
            m(i, i) = -2.0 * c;
            if (i < g.n - 1) m(i, i + 1) = c;
        }
    } else {
        throw std::invalid_argument("derivative_matrix: order must be 1 or 2");
    }
    return m;
}

} // namespace qmart
