#ifndef QMART_WAVEFUNCTION_HPP
#define QMART_WAVEFUNCTION_HPP

#include <complex>
#include <functional>
#include <vector>

#include "qmart/grid.hpp"

namespace qmart {

using cdouble = std::complex<double>;

/// Market state: complex amplitudes sampled on a grid.
struct WaveFunction {
    Grid grid;
    std::vector<cdouble> values;
    double time{0.0};

    WaveFunction() = default;
    WaveFunction(Grid g, std::vector<cdouble> v, double t = 0.0);

    /// Real samples promoted to complex amplitudes.
    static WaveFunction from_real(const Grid& g, const std::vector<double>& v,
                                  double t = 0.0);
    static WaveFunction from_function(const Grid& g,
                                      const std::function<cdouble(double)>& f,
                                      double t = 0.0);

    std::vector<double> real_part() const;
    std::vector<double> abs2() const;
};

/// Positive metric weight eta(x) with stored square root rho(x).
struct MetricWeight {
    Grid grid;
    std::vector<double> eta;
    std::vector<double> rho;

    MetricWeight(Grid g, std::vector<double> eta_samples);
};

/// eta(x) = e^{-x}, the log-price metric; rho(x) = e^{-x/2}.
MetricWeight exponential_metric(const Grid& g);

/// Trapezoid quadrature of arbitrary samples on the grid.
double trapezoid(const Grid& g, const std::vector<double>& f);
cdouble trapezoid(const Grid& g, const std::vector<cdouble>& f);

/// <phi|psi> = integral of conj(phi)*psi dx, trapezoid rule.
cdouble inner_product(const WaveFunction& phi, const WaveFunction& psi);

/// <phi|psi>_eta = integral of conj(phi)*eta*psi dx.
cdouble inner_product_eta(const WaveFunction& phi, const WaveFunction& psi,
                          const MetricWeight& m);

double norm(const WaveFunction& psi);
double norm_eta(const WaveFunction& psi, const MetricWeight& m);

struct ExpectationResult {
    double value{};
    double norm{};      ///< flat norm of psi at evaluation time
    bool normalized{};  ///< norm within tolerance of 1
};

/// E[f] = integral of f(x)|psi(x)|^2 dx. A non-normalized state is not an
/// error; the result carries the measured norm.
ExpectationResult expectation(const WaveFunction& psi,
                              const std::function<double(double)>& f,
                              double norm_tol = 1e-6);

} // namespace qmart

#endif
