#ifndef QMART_FINITE_DIFFERENCE_HPP
#define QMART_FINITE_DIFFERENCE_HPP

#include "qmart/banded.hpp"
#include "qmart/grid.hpp"

namespace qmart {

/// Second-order central-difference matrix for d/dx (order 1) or d^2/dx^2
/// (order 2). Boundary rows use the Dirichlet convention: off-domain values
/// are treated as zero.
Banded<double> derivative_matrix(const Grid& g, int order);

} // namespace qmart

#endif
