#include "qmart/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "qmart/finite_difference.hpp"

namespace qmart {

PotentialSpec PotentialSpec::constant(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("PotentialSpec: nonfinite constant");
    PotentialSpec p;
    p.kind = Kind::constant;
    p.c0 = c;
    return p;
}

PotentialSpec PotentialSpec::tabulated(const Grid& g, std::vector<double> samples) {
    if (static_cast<int>(samples.size()) != g.n)
        throw std::invalid_argument("PotentialSpec: samples length != grid.n");
    for (double v : samples)
        if (!std::isfinite(v))
            throw std::invalid_argument("PotentialSpec: nonfinite sample");
    PotentialSpec p;
    p.kind = Kind::tabulated;
    p.grid = g;
    p.samples = std::move(samples);
    return p;
}

std::vector<double> PotentialSpec::sample_on(const Grid& g) const {
    if (kind == Kind::constant) return std::vector<double>(g.n, c0);
    require_same_grid(grid, g, "PotentialSpec::sample_on");
    return samples;
}

double PotentialSpec::value_at(double x) const {
    if (kind == Kind::constant) return c0;
    if (!grid.contains(x))
        throw std::out_of_range("PotentialSpec: x outside tabulated domain");
    const double s = (x - grid.x_min) / grid.h;
    int i = static_cast<int>(s);
    if (i >= grid.n - 1) i = grid.n - 2;
    const double w = s - i;
    return (1.0 - w) * samples[i] + w * samples[i + 1];
}

bool PotentialSpec::in_domain(double x) const {
    return kind == Kind::constant || grid.contains(x);
}

HamiltonianOperator build_gaussian_hamiltonian(const Grid& g, double sigma,
                                               const PotentialSpec& c) {
    if (!(sigma > 0.0)) throw std::invalid_argument("build_gaussian_hamiltonian: sigma <= 0");
    Banded<double> m = derivative_matrix(g, 2);
    m *= -sigma * sigma / 2.0;
    const std::vector<double> cs = c.sample_on(g);
    for (int i = 0; i < g.n; ++i) m(i, i) += cs[i];
    return HamiltonianOperator{g, std::move(m), Coordinate::log_price, SymmetryTag::hermitian};
}

MetricWeight metric_from_weight(const Grid& g, std::vector<double> eta_samples) {
    return MetricWeight(g, std::move(eta_samples));
}

HamiltonianOperator similarity_transform(const HamiltonianOperator& h,
                                         const MetricWeight& m) {
    if (h.symmetry != SymmetryTag::hermitian)
        throw std::invalid_argument("similarity_transform: base operator must be hermitian");
    require_same_grid(h.grid, m.grid, "similarity_transform");
    std::vector<double> inv_rho(m.rho.size());
    for (size_t i = 0; i < m.rho.size(); ++i) inv_rho[i] = 1.0 / m.rho[i];
    Banded<double> k = h.matrix;
    k.scale(inv_rho, m.rho);  // K_ij = H_ij * rho_j / rho_i
    return HamiltonianOperator{h.grid, std::move(k), h.coordinate,
                               SymmetryTag::pseudo_hermitian};
}

HamiltonianOperator build_transformed_stencil(const Grid& g, double sigma,
                                              const PotentialSpec& c) {
    Banded<double> m = derivative_matrix(g, 2);
    m *= -sigma * sigma / 2.0;
    Banded<double> d1 = derivative_matrix(g, 1);
    d1 *= sigma * sigma / 2.0;
    m += d1;
    const std::vector<double> cs = c.sample_on(g);
    const double shift = sigma * sigma / 8.0;
    for (int i = 0; i < g.n; ++i) m(i, i) += cs[i] - shift;
    return HamiltonianOperator{g, std::move(m), Coordinate::log_price,
                               SymmetryTag::pseudo_hermitian};
}

double check_pseudo_hermitian(const HamiltonianOperator& k, const MetricWeight& m) {
    require_same_grid(k.grid, m.grid, "check_pseudo_hermitian");
    const int n = k.grid.n, b = k.matrix.bandwidth();
    double defect = 0.0;
    // (K^T eta - eta K)_{ij} = K_{ji} eta_j - eta_i K_{ij}; interior rows only,
    // the Dirichlet truncation breaks the identity at the boundary.
    for (int i = b; i < n - b; ++i) {
        for (int j = std::max(b, i - b); j <= std::min(n - 1 - b, i + b); ++j) {
            const double v = k.matrix.get(j, i) * m.eta[j] - m.eta[i] * k.matrix.get(i, j);
            defect = std::max(defect, std::abs(v));
        }
    }
    return defect;
}

HamiltonianOperator build_bs_hamiltonian(const Grid& s_grid, double sigma) {
    if (!(s_grid.x_min > 0.0))
        throw std::invalid_argument("build_bs_hamiltonian: price grid must be positive");
    Banded<double> m = derivative_matrix(s_grid, 2);
    std::vector<double> row_weight(s_grid.n), ones(s_grid.n, 1.0);
    for (int i = 0; i < s_grid.n; ++i) {
        const double s = s_grid.node(i);
        row_weight[i] = -sigma * sigma * s * s / 2.0;
    }
    m.scale(row_weight, ones);
    return HamiltonianOperator{s_grid, std::move(m), Coordinate::price,
                               SymmetryTag::pseudo_hermitian};
}

} // namespace qmart
