#ifndef QMART_BOHMIAN_HPP
#define QMART_BOHMIAN_HPP

#include <cstdint>
#include <vector>

#include "qmart/wavefunction.hpp"

namespace qmart {

/// psi = R e^{i Theta}; Theta is unwrapped left-to-right. Nodes where R falls
/// below the amplitude floor carry no meaningful phase and are masked.
struct PolarField {
    Grid grid;
    std::vector<double> amplitude;   // R >= 0
    std::vector<double> phase;       // Theta, unwrapped
    std::vector<std::uint8_t> valid; // 1 where R above floor
    double time{0.0};
};

PolarField polar_decompose(const WaveFunction& psi, double floor_rel = 1e-8);

enum class QPotentialForm { hermitian, pseudo };

struct MaskedSamples {
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
};

/// Quantum potential by central differences at interior unmasked nodes.
///   hermitian: Q = -sigma^2/2 * R''/R
///   pseudo:    Q =  sigma^2/2 * R'/R - sigma^2/2 * R''/R
MaskedSamples quantum_potential(const PolarField& field, double sigma,
                                QPotentialForm form);

/// Max-norm over interior unmasked nodes (R >= rel_floor * max R) of
/// dTheta/dt + sigma^2 (Theta_x)^2 / 2 + Q, with Q per form. Time derivative
/// is central across consecutive slices; the series needs >= 3 slices.
double hje_residual(const std::vector<PolarField>& series, double sigma,
                    QPotentialForm form, double rel_floor = 1e-6);

enum class ContinuityMetric { flat, exp_weight };

/// Max-norm of d(w R^2)/dt + d/dx (w sigma^2 R^2 Theta_x) with w = 1 (flat)
/// or w = e^{-x}.
double continuity_residual(const std::vector<PolarField>& series, double sigma,
                           ContinuityMetric metric, double rel_floor = 1e-6);

struct TrajectoryEnsemble {
    int n_particles{};
    std::vector<double> times;
    std::vector<std::vector<double>> positions;  // [particle][time index]
    std::uint64_t seed{};
    int n_clamped{};  // particles that hit the grid edge at some step

    std::vector<double> variance_curve() const;
};

/// Bohmian transport: initial positions sampled from |psi0|^2 by inverse CDF
/// (per-particle random substreams), then dx/dt = sigma^2 Theta_x integrated
/// with the explicit midpoint rule, Theta_x linearly interpolated in x and t.
/// `substeps` integration steps are taken between consecutive field slices.
/// Enforces the guard dt_sub * max|v| <= h/2.
TrajectoryEnsemble bohm_trajectories(const std::vector<PolarField>& series,
                                     double sigma, int n_particles,
                                     std::uint64_t seed, int substeps = 1);

/// t^2 * population variance of the velocities: the spread of a free
/// classical ensemble started at the origin.
double free_particle_variance(const std::vector<double>& velocities, double t);

/// Kolmogorov-Smirnov distance between samples and the distribution with
/// density |psi|^2 (grid CDF by trapezoid, linear interpolation).
double ks_statistic(std::vector<double> samples, const WaveFunction& psi);

/// Least-squares slope of log(values) vs log(times) over [t_lo, t_hi].
double fit_power_law(const std::vector<double>& times,
                     const std::vector<double>& values, double t_lo, double t_hi);

} // namespace qmart

#endif
