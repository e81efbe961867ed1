#include "qmart/wavefunction.hpp"

#include <cmath>
#include <stdexcept>

namespace qmart {

WaveFunction::WaveFunction(Grid g, std::vector<cdouble> v, double t)
    : grid(g), values(std::move(v)), time(t) {
    if (static_cast<int>(values.size()) != grid.n)
        throw std::invalid_argument("WaveFunction: values length != grid.n");
    for (const auto& z : values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("WaveFunction: nonfinite amplitude");
}

WaveFunction WaveFunction::from_real(const Grid& g, const std::vector<double>& v,
                                     double t) {
    std::vector<cdouble> c(v.size());
    for (size_t i = 0; i < v.size(); ++i) c[i] = v[i];
    return WaveFunction(g, std::move(c), t);
}

WaveFunction WaveFunction::from_function(const Grid& g,
                                         const std::function<cdouble(double)>& f,
                                         double t) {
    std::vector<cdouble> c(g.n);
    for (int i = 0; i < g.n; ++i) c[i] = f(g.node(i));
    return WaveFunction(g, std::move(c), t);
}

std::vector<double> WaveFunction::real_part() const {
    std::vector<double> r(values.size());
    for (size_t i = 0; i < values.size(); ++i) r[i] = values[i].real();
    return r;
}

std::vector<double> WaveFunction::abs2() const {
    std::vector<double> r(values.size());
    for (size_t i = 0; i < values.size(); ++i) r[i] = std::norm(values[i]);
    return r;
}

MetricWeight::MetricWeight(Grid g, std::vector<double> eta_samples)
    : grid(g), eta(std::move(eta_samples)) {
    if (static_cast<int>(eta.size()) != grid.n)
        throw std::invalid_argument("MetricWeight: eta length != grid.n");
    rho.resize(eta.size());
    for (size_t i = 0; i < eta.size(); ++i) {
        if (!(eta[i] > 0.0) || !std::isfinite(eta[i]))
            throw std::invalid_argument("MetricWeight: eta must be positive and finite");
        rho[i] = std::sqrt(eta[i]);
    }
}

MetricWeight exponential_metric(const Grid& g) {
    std::vector<double> eta(g.n);
    for (int i = 0; i < g.n; ++i) eta[i] = std::exp(-g.node(i));
    return MetricWeight(g, std::move(eta));
}

namespace {
template <typename T>
T trapz(const Grid& g, const std::vector<T>& f) {
    T s{};
    for (int i = 1; i < g.n - 1; ++i) s += f[i];
    s += (f[0] + f[g.n - 1]) * 0.5;
    return s * g.h;
}
} // namespace

double trapezoid(const Grid& g, const std::vector<double>& f) { return trapz(g, f); }
cdouble trapezoid(const Grid& g, const std::vector<cdouble>& f) { return trapz(g, f); }

cdouble inner_product(const WaveFunction& phi, const WaveFunction& psi) {
    require_same_grid(phi.grid, psi.grid, "inner_product");
    std::vector<cdouble> f(phi.values.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = std::conj(phi.values[i]) * psi.values[i];
    return trapz(phi.grid, f);
}

cdouble inner_product_eta(const WaveFunction& phi, const WaveFunction& psi,
                          const MetricWeight& m) {
    require_same_grid(phi.grid, psi.grid, "inner_product_eta");
    require_same_grid(phi.grid, m.grid, "inner_product_eta");
    std::vector<cdouble> f(phi.values.size());
    for (size_t i = 0; i < f.size(); ++i)
        f[i] = std::conj(phi.values[i]) * m.eta[i] * psi.values[i];
    return trapz(phi.grid, f);
}

double norm(const WaveFunction& psi) {
    return std::sqrt(std::abs(inner_product(psi, psi)));
}

double norm_eta(const WaveFunction& psi, const MetricWeight& m) {
    return std::sqrt(std::abs(inner_product_eta(psi, psi, m)));
}

ExpectationResult expectation(const WaveFunction& psi,
                              const std::function<double(double)>& f,
                              double norm_tol) {
    std::vector<double> integrand(psi.values.size());
    std::vector<double> density = psi.abs2();
    for (size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = f(psi.grid.node(static_cast<int>(i))) * density[i];
    ExpectationResult r;
    r.value = trapezoid(psi.grid, integrand);
    r.norm = std::sqrt(trapezoid(psi.grid, density));
    r.normalized = std::abs(r.norm - 1.0) <= norm_tol;
    return r;
}

} // namespace qmart
