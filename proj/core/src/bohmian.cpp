#include "qmart/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qmart/detail/rng.hpp"

namespace qmart {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_amplitude(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, v);
    return m;
}

/// Shift every phase in `cur` by a 2*pi multiple so it agrees with `prev` at
/// the reference node. Slices are unwrapped independently in x; without this
/// the time derivative across slices can jump by 2*pi/dt.
void align_phase_to(const PolarField& prev, PolarField& cur) {
    int ref = -1;
    double best = -1.0;
    for (int i = 0; i < cur.grid.n; ++i)
        if (cur.valid[i] && prev.valid[i] && cur.amplitude[i] > best) {
            best = cur.amplitude[i];
            ref = i;
        }
    if (ref < 0) return;
    const double k = std::round((prev.phase[ref] - cur.phase[ref]) / kTwoPi);
    if (k != 0.0)
        for (double& p : cur.phase) p += k * kTwoPi;
}

std::vector<PolarField> aligned(const std::vector<PolarField>& series) {
    std::vector<PolarField> out = series;
    for (size_t k = 1; k < out.size(); ++k) align_phase_to(out[k - 1], out[k]);
    return out;
}

/// Central-difference gradient of the phase; invalid nodes inherit the
/// nearest valid value so interpolation near the mask edge stays bounded.
std::vector<double> phase_gradient(const PolarField& f) {
    const int n = f.grid.n;
    std::vector<double> g(n, 0.0);
    std::vector<std::uint8_t> ok(n, 0);
    for (int i = 1; i < n - 1; ++i)
        if (f.valid[i - 1] && f.valid[i] && f.valid[i + 1]) {
            g[i] = (f.phase[i + 1] - f.phase[i - 1]) / (2.0 * f.grid.h);
            ok[i] = 1;
        }
    int first = -1, last = -1;
    for (int i = 0; i < n; ++i)
        if (ok[i]) {
            if (first < 0) first = i;
            last = i;
        }
    if (first < 0) return g;
    for (int i = 0; i < first; ++i) g[i] = g[first];
    for (int i = last + 1; i < n; ++i) g[i] = g[last];
    // fill interior gaps (rare: amplitude zeros) from the left
    for (int i = first + 1; i < last; ++i)
        if (!ok[i]) g[i] = g[i - 1];
    return g;
}

double lerp(const Grid& g, const std::vector<double>& v, double x) {
    const double s = std::clamp((x - g.x_min) / g.h, 0.0, static_cast<double>(g.n - 1));
    int i = static_cast<int>(s);
    if (i >= g.n - 1) i = g.n - 2;
    const double w = s - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
}

void require_series(const std::vector<PolarField>& series, const char* where) {
    if (series.size() < 3)
        throw std::invalid_argument(std::string(where) + ": need >= 3 time slices");
    for (size_t k = 1; k < series.size(); ++k) {
        require_same_grid(series[k].grid, series[0].grid, where);
        if (!(series[k].time > series[k - 1].time))
            throw std::invalid_argument(std::string(where) + ": times not increasing");
    }
}

} // namespace

PolarField polar_decompose(const WaveFunction& psi, double floor_rel) {
    PolarField f;
    f.grid = psi.grid;
    f.time = psi.time;
    const int n = psi.grid.n;
    f.amplitude.resize(n);
    f.phase.resize(n);
    f.valid.assign(n, 0);
    for (int i = 0; i < n; ++i) f.amplitude[i] = std::abs(psi.values[i]);
    const double floor = floor_rel * max_amplitude(f.amplitude);

    double offset = 0.0;
    double prev_raw = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n; ++i) {
        if (f.amplitude[i] < floor) {
            f.phase[i] = 0.0;
            continue;
        }
        const double raw = std::arg(psi.values[i]);
        if (have_prev) {
            double jump = raw - prev_raw;
            while (jump > std::numbers::pi) {
                offset -= kTwoPi;
                jump -= kTwoPi;
            }
            while (jump < -std::numbers::pi) {
                offset += kTwoPi;
                jump += kTwoPi;
            }
        }
        f.phase[i] = raw + offset;
        f.valid[i] = 1;
        prev_raw = raw;
        have_prev = true;
    }
    return f;
}

MaskedSamples quantum_potential(const PolarField& field, double sigma,
                                QPotentialForm form) {
    const int n = field.grid.n;
    const double h = field.grid.h;
    MaskedSamples out;
    out.values.assign(n, 0.0);
    out.valid.assign(n, 0);
    const double a = sigma * sigma / 2.0;
    for (int i = 1; i < n - 1; ++i) {
        if (!(field.valid[i - 1] && field.valid[i] && field.valid[i + 1])) continue;
        const double r = field.amplitude[i];
        const double d2 = (field.amplitude[i + 1] - 2.0 * r + field.amplitude[i - 1]) / (h * h);
        double q = -a * d2 / r;
        if (form == QPotentialForm::pseudo) {
            const double d1 = (field.amplitude[i + 1] - field.amplitude[i - 1]) / (2.0 * h);
            q += a * d1 / r;
        }
        out.values[i] = q;
        out.valid[i] = 1;
    }
    return out;
}

double hje_residual(const std::vector<PolarField>& series, double sigma,
                    QPotentialForm form, double rel_floor) {
    require_series(series, "hje_residual");
    const std::vector<PolarField> s = aligned(series);
    double res = 0.0;
    for (size_t k = 1; k + 1 < s.size(); ++k) {
        const PolarField& f = s[k];
        const double floor = rel_floor * max_amplitude(f.amplitude);
        const MaskedSamples q = quantum_potential(f, sigma, form);
        const double dt2 = s[k + 1].time - s[k - 1].time;
        for (int i = 1; i < f.grid.n - 1; ++i) {
            if (!q.valid[i] || f.amplitude[i] < floor) continue;
            if (!(s[k - 1].valid[i] && s[k + 1].valid[i])) continue;
            const double theta_t = (s[k + 1].phase[i] - s[k - 1].phase[i]) / dt2;
            const double theta_x = (f.phase[i + 1] - f.phase[i - 1]) / (2.0 * f.grid.h);
            const double r = theta_t + 0.5 * sigma * sigma * theta_x * theta_x + q.values[i];
            res = std::max(res, std::abs(r));
        }
    }
    return res;
}

double continuity_residual(const std::vector<PolarField>& series, double sigma,
                           ContinuityMetric metric, double rel_floor) {
    require_series(series, "continuity_residual");
    const std::vector<PolarField> s = aligned(series);
    const Grid& g = s[0].grid;
    auto weight = [&](double x) {
        return metric == ContinuityMetric::flat ? 1.0 : std::exp(-x);
    };
    // flux F = w sigma^2 R^2 Theta_x per slice
    auto flux = [&](const PolarField& f, std::vector<std::uint8_t>& ok) {
        std::vector<double> out(g.n, 0.0);
        ok.assign(g.n, 0);
        for (int i = 1; i < g.n - 1; ++i) {
            if (!(f.valid[i - 1] && f.valid[i] && f.valid[i + 1])) continue;
            const double theta_x = (f.phase[i + 1] - f.phase[i - 1]) / (2.0 * g.h);
            out[i] = weight(g.node(i)) * sigma * sigma * f.amplitude[i] * f.amplitude[i] *
                     theta_x;
            ok[i] = 1;
        }
        return out;
    };
    double res = 0.0;
    for (size_t k = 1; k + 1 < s.size(); ++k) {
        const PolarField& f = s[k];
        const double floor = rel_floor * max_amplitude(f.amplitude);
        std::vector<std::uint8_t> ok;
        const std::vector<double> fl = flux(f, ok);
        const double dt2 = s[k + 1].time - s[k - 1].time;
        for (int i = 2; i < g.n - 2; ++i) {
            if (!(ok[i - 1] && ok[i] && ok[i + 1])) continue;
            if (f.amplitude[i] < floor) continue;
            if (!(s[k - 1].valid[i] && s[k + 1].valid[i])) continue;
            const double w = weight(g.node(i));
            const double r2_t = (s[k + 1].amplitude[i] * s[k + 1].amplitude[i] -
                                 s[k - 1].amplitude[i] * s[k - 1].amplitude[i]) / dt2;
            const double flux_x = (fl[i + 1] - fl[i - 1]) / (2.0 * g.h);
            res = std::max(res, std::abs(w * r2_t + flux_x));
        }
    }
    return res;
}

TrajectoryEnsemble bohm_trajectories(const std::vector<PolarField>& series,
                                     double sigma, int n_particles,
                                     std::uint64_t seed, int substeps) {
    require_series(series, "bohm_trajectories");
    if (n_particles < 1)
        throw std::invalid_argument("bohm_trajectories: need n_particles >= 1");
    if (substeps < 1) throw std::invalid_argument("bohm_trajectories: substeps >= 1");

    const std::vector<PolarField> s = aligned(series);
    const Grid& g = s[0].grid;
    const size_t n_slices = s.size();

    // velocity field v = sigma^2 Theta_x per slice
    std::vector<std::vector<double>> vel(n_slices);
    double vmax = 0.0, dt_sub_max = 0.0;
    for (size_t k = 0; k < n_slices; ++k) {
        vel[k] = phase_gradient(s[k]);
        for (double& v : vel[k]) v *= sigma * sigma;
        for (int i = 0; i < g.n; ++i)
            if (s[k].valid[i]) vmax = std::max(vmax, std::abs(vel[k][i]));
        if (k > 0) dt_sub_max = std::max(dt_sub_max, (s[k].time - s[k - 1].time) / substeps);
    }
    if (dt_sub_max * vmax > 0.5 * g.h) {
        std::ostringstream msg;
        msg << "bohm_trajectories: step guard violated, dt_sub*max|v|="
            << dt_sub_max * vmax << " > h/2=" << 0.5 * g.h
            << "; need dt_sub <= " << (vmax > 0 ? 0.5 * g.h / vmax : 0.0);
        throw std::invalid_argument(msg.str());
    }

    // inverse CDF of |psi0|^2 by trapezoid accumulation
    std::vector<double> density(g.n), cdf(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) density[i] = s[0].amplitude[i] * s[0].amplitude[i];
    for (int i = 1; i < g.n; ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (density[i] + density[i - 1]) * g.h;
    const double total = cdf[g.n - 1];
    for (double& v : cdf) v /= total;
    auto sample_initial = [&](double u) {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        int i = static_cast<int>(it - cdf.begin());
        if (i == 0) return g.x_min;
        const double c0 = cdf[i - 1], c1 = cdf[i];
        const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
        return g.node(i - 1) + w * g.h;
    };

    auto velocity_at = [&](double x, size_t k, double frac) {
        // linear in time between slices k and k+1
        const double v0 = lerp(g, vel[k], x);
        const double v1 = lerp(g, vel[k + 1], x);
        return (1.0 - frac) * v0 + frac * v1;
    };

    TrajectoryEnsemble ens;
    ens.n_particles = n_particles;
    ens.seed = seed;
    ens.times.resize(n_slices);
    for (size_t k = 0; k < n_slices; ++k) ens.times[k] = s[k].time;
    ens.positions.assign(n_particles, std::vector<double>(n_slices));

    for (int p = 0; p < n_particles; ++p) {
        detail::SubstreamRng rng(seed, static_cast<std::uint64_t>(p));
        double x = sample_initial(rng.uniform());
        bool clamped = false;
        ens.positions[p][0] = x;
        for (size_t k = 0; k + 1 < n_slices; ++k) {
            const double dt_slice = s[k + 1].time - s[k].time;
            const double dt = dt_slice / substeps;
            for (int ss = 0; ss < substeps; ++ss) {
                const double f0 = static_cast<double>(ss) / substeps;
                const double fm = (ss + 0.5) / substeps;
                const double xm = x + 0.5 * dt * velocity_at(x, k, f0);
                x += dt * velocity_at(xm, k, fm);
                if (x < g.x_min || x > g.x_max) {
                    x = std::clamp(x, g.x_min, g.x_max);
                    clamped = true;
                }
            }
            ens.positions[p][k + 1] = x;
        }
        if (clamped) ++ens.n_clamped;
    }
    return ens;
}

std::vector<double> TrajectoryEnsemble::variance_curve() const {
    std::vector<double> out(times.size(), 0.0);
    for (size_t k = 0; k < times.size(); ++k) {
        double s = 0.0, ss = 0.0;
        for (int p = 0; p < n_particles; ++p) {
            const double x = positions[p][k];
            s += x;
            ss += x * x;
        }
        const double m = s / n_particles;
        out[k] = ss / n_particles - m * m;
    }
    return out;
}

double free_particle_variance(const std::vector<double>& velocities, double t) {
    if (velocities.empty())
        throw std::invalid_argument("free_particle_variance: empty velocity list");
    double s = 0.0, ss = 0.0;
    for (double v : velocities) {
        s += v;
        ss += v * v;
    }
    const double n = static_cast<double>(velocities.size());
    const double var_v = ss / n - (s / n) * (s / n);
    return t * t * var_v;
}

double ks_statistic(std::vector<double> samples, const WaveFunction& psi) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    const Grid& g = psi.grid;
    std::vector<double> density = psi.abs2();
    std::vector<double> cdf(g.n, 0.0);
    for (int i = 1; i < g.n; ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (density[i] + density[i - 1]) * g.h;
    const double total = cdf[g.n - 1];
    for (double& v : cdf) v /= total;

    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = lerp(g, cdf, samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

double fit_power_law(const std::vector<double>& times, const std::vector<double>& values,
                     double t_lo, double t_hi) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_power_law: length mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi || times[i] <= 0.0 || values[i] <= 0.0)
            continue;
        const double x = std::log(times[i]), y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_power_law: fewer than 2 points in window");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace qmart
