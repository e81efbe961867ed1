#include "qmart/feynman_kac.hpp"

#include <cmath>
#include <stdexcept>

#include "qmart/detail/rng.hpp"

namespace qmart {

namespace {

using detail::SubstreamRng;

struct Accumulator {
    double sum{}, sum_sq{};
    long n{};
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return sum / n; }
    double std_error() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = (sum_sq - n * m * m) / (n - 1);
        return std::sqrt(std::max(0.0, var) / n);
    }
};

// Runs the path loop; fn receives (x_terminal, exp(-int C ds)) per accepted
// path. Returns the rejected-path count.
template <typename Fn>
long run_paths(const PotentialSpec& c, const McConfig& cfg, Fn&& fn) {
    const double dt = cfg.horizon / cfg.n_steps;
    const double step_sd = cfg.sigma * std::sqrt(dt);
    long rejected = 0;
    for (long p = 0; p < cfg.n_paths; ++p) {
        SubstreamRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        double x = cfg.x0;
        double integral = 0.0;
        bool ok = true;
        for (int k = 0; k < cfg.n_steps; ++k) {
            if (!c.in_domain(x)) {
                ok = false;
                break;
            }
            integral += c.value_at(x) * dt;  // left-point rule
            x += step_sd * rng.gaussian();
        }
        if (ok && !c.in_domain(x)) ok = false;
        if (!ok) {
            ++rejected;
            continue;
        }
        fn(x, std::exp(-integral));
    }
    if (rejected > 1e-3 * cfg.n_paths)
        throw std::runtime_error("feynman_kac: rejection fraction above 1e-3");
    return rejected;
}

} // namespace

void McConfig::validate() const {
    if (n_paths < 1) throw std::invalid_argument("McConfig: n_paths must be >= 1");
    if (n_steps < 1) throw std::invalid_argument("McConfig: n_steps must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("McConfig: horizon must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("McConfig: sigma must be >= 0");
}

McResult mc_price(const std::function<double(double)>& payout,
                  const PotentialSpec& c, const McConfig& cfg) {
    cfg.validate();
    Accumulator acc;
    const long rejected =
        run_paths(c, cfg, [&](double x, double w) { acc.add(payout(x) * w); });
    return McResult{acc.mean(), acc.std_error(), acc.n, rejected};
}

McResult mc_martingale_check(const std::function<double(double)>& target,
                             const PotentialSpec& c, const McConfig& cfg) {
    cfg.validate();
    auto g = [&](double x) { return target(x) * std::exp(-x / 2.0); };
    const double g0 = g(cfg.x0);
    Accumulator acc;
    const long rejected =
        run_paths(c, cfg, [&](double x, double w) { acc.add(g(x) * w / g0); });
    return McResult{acc.mean(), acc.std_error(), acc.n, rejected};
}

McResult mc_risk_neutral_price(const std::function<double(double)>& payout,
                               const PotentialSpec& c, const McConfig& cfg) {
    cfg.validate();
    // ratio estimator: a = f(x) e^{-x/2} w, b = e^{-x/2} w over the same paths
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    long n = 0;
    const long rejected = run_paths(c, cfg, [&](double x, double w) {
        const double tilt = std::exp(-x / 2.0) * w;
        const double a = payout(x) * tilt, b = tilt;
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        ++n;
    });
    const double ma = sa / n, mb = sb / n;
    const double est = ma / mb;
    double se = 0.0;
    if (n > 1) {
        const double var_a = (saa - n * ma * ma) / (n - 1);
        const double var_b = (sbb - n * mb * mb) / (n - 1);
        const double cov = (sab - n * ma * mb) / (n - 1);
        const double var_ratio =
            (var_a / (mb * mb) + est * est * var_b / (mb * mb) - 2.0 * est * cov / (mb * mb));
        se = std::sqrt(std::max(0.0, var_ratio) / n);
    }
    return McResult{est, se, n, rejected};
}

} // namespace qmart
