#ifndef QMART_HAMILTONIAN_HPP
#define QMART_HAMILTONIAN_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmart/banded.hpp"
#include "qmart/grid.hpp"
#include "qmart/wavefunction.hpp"

namespace qmart {

/// Potential term C in the generator. Either a constant (units 1/time) or
/// per-node samples on a grid; tabulated potentials interpolate linearly
/// between nodes for off-grid evaluation (Monte-Carlo paths).
struct PotentialSpec {
    enum class Kind { constant, tabulated };

    Kind kind{Kind::constant};
    double c0{0.0};
    Grid grid;                    // tabulated case only
    std::vector<double> samples;  // tabulated case only

    static PotentialSpec constant(double c);
    static PotentialSpec tabulated(const Grid& g, std::vector<double> samples);

    /// Samples on the given grid (tabulated specs require a matching grid).
    std::vector<double> sample_on(const Grid& g) const;

    /// Pointwise value; tabulated case interpolates linearly.
    double value_at(double x) const;

    /// False only for a tabulated potential queried outside its grid.
    bool in_domain(double x) const;
};

enum class Coordinate { log_price, price };
enum class SymmetryTag { hermitian, pseudo_hermitian, unchecked };

/// Banded matrix representation of a generator plus symmetry metadata.
struct HamiltonianOperator {
    Grid grid;
    Banded<double> matrix;
    Coordinate coordinate{Coordinate::log_price};
    SymmetryTag symmetry{SymmetryTag::unchecked};

    std::vector<double> apply(const std::vector<double>& v) const { return matrix.apply(v); }
};

/// H = -sigma^2/2 d^2/dx^2 + C(x), symmetric real, tagged hermitian.
HamiltonianOperator build_gaussian_hamiltonian(const Grid& g, double sigma,
                                               const PotentialSpec& c);

/// MetricWeight from raw eta samples (rho = sqrt(eta)).
MetricWeight metric_from_weight(const Grid& g, std::vector<double> eta_samples);

/// K = rho^{-1} H rho by exact diagonal similarity; tagged pseudo_hermitian
/// with metric eta = rho^2. Preserves the spectrum and makes the
/// pseudo-Hermiticity identity exact in floating point.
HamiltonianOperator similarity_transform(const HamiltonianOperator& h,
                                         const MetricWeight& m);

/// Direct discretization of -sigma^2/2 d^2/dx^2 + sigma^2/2 d/dx + (C - sigma^2/8),
/// the analytic form of the transformed generator. Agrees with
/// similarity_transform(H, e^{-x} metric) to O(h^2); kept for that comparison.
HamiltonianOperator build_transformed_stencil(const Grid& g, double sigma,
                                              const PotentialSpec& c);

/// Max-norm of (K^T eta - eta K) over interior rows (boundary rows carry the
/// Dirichlet truncation and are excluded). Zero certifies pseudo-Hermiticity.
double check_pseudo_hermitian(const HamiltonianOperator& k, const MetricWeight& m);

/// H_BS = -sigma^2 S^2 / 2 d^2/dS^2 on a strictly positive price grid.
HamiltonianOperator build_bs_hamiltonian(const Grid& s_grid, double sigma);

} // namespace qmart

#endif
