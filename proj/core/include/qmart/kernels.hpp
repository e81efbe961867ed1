#ifndef QMART_KERNELS_HPP
#define QMART_KERNELS_HPP

#include <complex>

#include "qmart/wavefunction.hpp"

namespace qmart {

/// Fundamental solution of the free Schroedinger equation:
/// (2 pi sigma^2 i t)^{-1/2} exp(i x^2 / (2 sigma^2 t)), principal branch.
cdouble free_kernel(double x, double t, double sigma);

/// (2 pi sigma^2 tau)^{-1/2} exp(-x^2 / (2 sigma^2 tau)).
double heat_kernel(double x, double tau, double sigma);

/// Solution of dpsi/dtau = sigma^2/2 psi'' - c psi from a delta at the
/// origin: heat_kernel(x, t, sigma) * exp(-c t).
double closed_form_solution(double x, double t, double sigma, double c);

/// Heat kernel sampled as a (real, density-normalized in the continuum)
/// wave function centered at `center`.
WaveFunction heat_kernel_state(const Grid& g, double tau, double sigma,
                               double center = 0.0);

} // namespace qmart

#endif
