#ifndef QMART_EVOLUTION_HPP
#define QMART_EVOLUTION_HPP

#include <optional>
#include <vector>

#include "qmart/hamiltonian.hpp"
#include "qmart/wavefunction.hpp"

namespace qmart {

enum class EvolutionMode { unitary, diffusive };

struct EvolutionConfig {
    double dt{0.01};
    int n_steps{100};
    EvolutionMode mode{EvolutionMode::diffusive};

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("EvolutionConfig: dt must be > 0");
        if (n_steps < 1) throw std::invalid_argument("EvolutionConfig: n_steps must be >= 1");
    }
};

struct StepTrace {
    int step{};
    double time{};
    double norm{};
    double eta_norm{};  // 0 when no metric supplied
};

/// Crank-Nicolson propagation.
///   unitary:   i dpsi/dt = H psi,  (I + i H dt/2) psi' = (I - i H dt/2) psi
///   diffusive: dpsi/dtau = -H psi, (I + H dt/2) psi'   = (I - H dt/2) psi
/// The optional metric feeds the eta-norm column of the trace.
WaveFunction evolve(const WaveFunction& psi0, const HamiltonianOperator& h,
                    const EvolutionConfig& cfg,
                    const MetricWeight* metric = nullptr,
                    std::vector<StepTrace>* trace = nullptr);

/// As evolve(), but additionally returns the state every `snapshot_interval`
/// steps (including the initial and final states).
std::vector<WaveFunction> evolve_with_snapshots(const WaveFunction& psi0,
                                                const HamiltonianOperator& h,
                                                const EvolutionConfig& cfg,
                                                int snapshot_interval);

} // namespace qmart

#endif
