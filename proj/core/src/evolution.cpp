#include "qmart/evolution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmart {

namespace {

bool all_finite(const std::vector<cdouble>& v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

struct Stepper {
    // unitary:   (I + i H dt/2) psi' = (I - i H dt/2) psi
    // diffusive: (I + H dt/2)   psi' = (I - H dt/2)   psi
    Stepper(const HamiltonianOperator& h, const EvolutionConfig& cfg)
        : mode_(cfg.mode) {
        const int n = h.grid.n, b = h.matrix.bandwidth();
        if (mode_ == EvolutionMode::unitary) {
            const cdouble alpha = cdouble(0.0, cfg.dt / 2.0);
            Banded<cdouble> lhs(n, b), rhs(n, b);
            for (int i = 0; i < n; ++i)
                for (int j = std::max(0, i - b); j <= std::min(n - 1, i + b); ++j) {
                    const double hij = h.matrix.get(i, j);
                    lhs(i, j) = alpha * hij;
                    rhs(i, j) = -alpha * hij;
                }
            lhs.shift_diagonal(1.0);
            rhs.shift_diagonal(1.0);
            rhs_c_.emplace(std::move(rhs));
            lu_c_.emplace(std::move(lhs));
        } else {
            Banded<double> lhs = h.matrix, rhs = h.matrix;
            lhs *= cfg.dt / 2.0;
            rhs *= -cfg.dt / 2.0;
            lhs.shift_diagonal(1.0);
            rhs.shift_diagonal(1.0);
            rhs_r_.emplace(std::move(rhs));
            lu_r_.emplace(std::move(lhs));
        }
    }

    void step(std::vector<cdouble>& psi) const {
        if (mode_ == EvolutionMode::unitary) {
            psi = lu_c_->solve(rhs_c_->apply(psi));
        } else {
            // real matrices; real and imaginary parts evolve independently
            const int n = static_cast<int>(psi.size());
            std::vector<double> re(n), im(n);
            bool has_im = false;
            for (int i = 0; i < n; ++i) {
                re[i] = psi[i].real();
                im[i] = psi[i].imag();
                has_im = has_im || im[i] != 0.0;
            }
            re = lu_r_->solve(rhs_r_->apply(re));
            if (has_im) im = lu_r_->solve(rhs_r_->apply(im));
            for (int i = 0; i < n; ++i) psi[i] = cdouble(re[i], has_im ? im[i] : 0.0);
        }
    }

    EvolutionMode mode_;
    std::optional<Banded<cdouble>> rhs_c_;
    std::optional<BandedLU<cdouble>> lu_c_;
    std::optional<Banded<double>> rhs_r_;
    std::optional<BandedLU<double>> lu_r_;
};

} // namespace

WaveFunction evolve(const WaveFunction& psi0, const HamiltonianOperator& h,
                    const EvolutionConfig& cfg, const MetricWeight* metric,
                    std::vector<StepTrace>* trace) {
    cfg.validate();
    require_same_grid(psi0.grid, h.grid, "evolve");
    if (metric) require_same_grid(psi0.grid, metric->grid, "evolve(metric)");

    Stepper stepper(h, cfg);
    WaveFunction psi = psi0;
    for (int k = 1; k <= cfg.n_steps; ++k) {
        stepper.step(psi.values);
        if (!all_finite(psi.values))
            throw std::runtime_error("evolve: nonfinite amplitude at step " + std::to_string(k));
        psi.time = psi0.time + k * cfg.dt;
        if (trace) {
            StepTrace t;
            t.step = k;
            t.time = psi.time;
            t.norm = norm(psi);
            t.eta_norm = metric ? norm_eta(psi, *metric) : 0.0;
            trace->push_back(t);
        }
    }
    return psi;
}

std::vector<WaveFunction> evolve_with_snapshots(const WaveFunction& psi0,
                                                const HamiltonianOperator& h,
                                                const EvolutionConfig& cfg,
                                                int snapshot_interval) {
    cfg.validate();
    require_same_grid(psi0.grid, h.grid, "evolve_with_snapshots");
    if (snapshot_interval < 1)
        throw std::invalid_argument("evolve_with_snapshots: interval must be >= 1");

    Stepper stepper(h, cfg);
    std::vector<WaveFunction> out;
    out.push_back(psi0);
    WaveFunction psi = psi0;
    for (int k = 1; k <= cfg.n_steps; ++k) {
        stepper.step(psi.values);
        if (!all_finite(psi.values))
            throw std::runtime_error("evolve_with_snapshots: nonfinite amplitude at step " +
                                     std::to_string(k));
        psi.time = psi0.time + k * cfg.dt;
        if (k % snapshot_interval == 0 || k == cfg.n_steps) out.push_back(psi);
    }
    return out;
}

} // namespace qmart
