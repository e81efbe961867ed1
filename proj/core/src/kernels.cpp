#include "qmart/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qmart {

cdouble free_kernel(double x, double t, double sigma) {
    if (!(t > 0.0)) throw std::invalid_argument("free_kernel: t must be > 0");
    const double a = 2.0 * std::numbers::pi * sigma * sigma * t;
    const cdouble pref = 1.0 / std::sqrt(cdouble(0.0, a));
    return pref * std::exp(cdouble(0.0, x * x / (2.0 * sigma * sigma * t)));
}

double heat_kernel(double x, double tau, double sigma) {
    if (!(tau > 0.0)) throw std::invalid_argument("heat_kernel: tau must be > 0");
    const double v = sigma * sigma * tau;
    return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
}

double closed_form_solution(double x, double t, double sigma, double c) {
    if (!(t > 0.0)) throw std::invalid_argument("closed_form_solution: t must be > 0");
    return heat_kernel(x, t, sigma) * std::exp(-c * t);
}

WaveFunction heat_kernel_state(const Grid& g, double tau, double sigma, double center) {
    std::vector<double> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = heat_kernel(g.node(i) - center, tau, sigma);
    return WaveFunction::from_real(g, v, 0.0);
}

} // namespace qmart
