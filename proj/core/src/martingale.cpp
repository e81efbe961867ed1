#include "qmart/martingale.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qmart/kernels.hpp"

namespace qmart {

double DiscountFactorModel::df(double x) const {
    const double d = 1.0 + epsilon * x * x;
    if (d < guard_floor)
        throw std::domain_error("DiscountFactorModel: denominator below guard floor");
    return 1.0 / d;
}

double DiscountFactorModel::df_d1(double x) const {
    const double d = 1.0 + epsilon * x * x;
    return -2.0 * epsilon * x / (d * d);
}

double DiscountFactorModel::df_d2(double x) const {
    const double d = 1.0 + epsilon * x * x;
    return (-2.0 * epsilon * d + 8.0 * epsilon * epsilon * x * x) / (d * d * d);
}

double DiscountFactorModel::domain_guard() const {
    if (epsilon >= 0.0) return std::numeric_limits<double>::infinity();
    // pole at |x| = 1/sqrt(-eps); allow up to 90% of it
    return 0.9 / std::sqrt(-epsilon);
}

void DiscountFactorModel::require_valid_on(const Grid& g) const {
    const double guard = domain_guard();
    const double reach = std::max(std::abs(g.x_min), std::abs(g.x_max));
    if (reach > guard) {
        std::ostringstream msg;
        msg << "DiscountFactorModel: grid reaches |x|=" << reach
            << " past the domain guard " << guard << " (epsilon=" << epsilon << ")";
        throw std::domain_error(msg.str());
    }
}

std::vector<double> df_curve(const DiscountFactorModel& model, const Grid& g) {
    model.require_valid_on(g);
    std::vector<double> out(g.n);
    for (int i = 0; i < g.n; ++i) out[i] = model.df(g.node(i));
    return out;
}

double martingale_expectation(const WaveFunction& psi_h, const MetricWeight& m,
                              const std::function<double(double)>& target) {
    require_same_grid(psi_h.grid, m.grid, "martingale_expectation");
    std::vector<double> f(psi_h.grid.n);
    for (int i = 0; i < psi_h.grid.n; ++i)
        f[i] = target(psi_h.grid.node(i)) * m.rho[i] * psi_h.values[i].real();
    return trapezoid(psi_h.grid, f);
}

double calibrate_constant_c(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("calibrate_constant_c: sigma < 0");
    return sigma * sigma / 8.0;
}

namespace {

// Horizon-T defect E_T/E_0 - 1 for constant potential c; strictly decreasing
// in c (constant potentials factor out as e^{-cT}).
double constant_c_defect(double c, double sigma, const BisectionOptions& opt) {
    const Grid g = centered_grid(0.0, opt.half_width, opt.grid_n);
    const MetricWeight m = exponential_metric(g);
    const double t0 = 1e-3;
    WaveFunction psi = heat_kernel_state(g, t0, sigma);
    const double e0 = martingale_expectation(psi, m, [](double x) { return std::exp(x); });
    auto h = build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(c));
    EvolutionConfig cfg{opt.dt, static_cast<int>(std::lround(opt.horizon / opt.dt)),
                       EvolutionMode::diffusive};
    WaveFunction psiT = evolve(psi, h, cfg);
    const double eT = martingale_expectation(psiT, m, [](double x) { return std::exp(x); });
    return eT / e0 - 1.0;
}

} // namespace

double calibrate_constant_c_numeric(double sigma, const BisectionOptions& opt) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("calibrate_constant_c_numeric: sigma must be > 0");
    double lo = 0.0, hi = sigma * sigma;  // defect(lo) > 0 > defect(hi)
    double flo = constant_c_defect(lo, sigma, opt);
    double fhi = constant_c_defect(hi, sigma, opt);
    if (!(flo > 0.0 && fhi < 0.0))
        throw std::runtime_error("calibrate_constant_c_numeric: bracket failure");
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = constant_c_defect(mid, sigma, opt);
        if (fm > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return 0.5 * (lo + hi);
}

PotentialSpec calibrate_potential(const std::function<double(double)>& target,
                                  double sigma, const Grid& g) {
    std::vector<double> gsamp(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        gsamp[i] = target(x) * std::exp(-x / 2.0);
        if (!(gsamp[i] > 0.0)) {
            std::ostringstream msg;
            msg << "calibrate_potential: weight g nonpositive at x=" << x;
            throw std::domain_error(msg.str());
        }
    }
    std::vector<double> c(g.n);
    const double a = sigma * sigma / 2.0, h2 = g.h * g.h;
    for (int i = 1; i < g.n - 1; ++i)
        c[i] = a * (gsamp[i + 1] - 2.0 * gsamp[i] + gsamp[i - 1]) / (h2 * gsamp[i]);
    c[0] = c[1];
    c[g.n - 1] = c[g.n - 2];
    return PotentialSpec::tabulated(g, std::move(c));
}

PotentialSpec calibrate_potential_df(const DiscountFactorModel& model,
                                     double sigma, const Grid& g) {
    if (model.epsilon == 0.0) return PotentialSpec::constant(sigma * sigma / 8.0);
    model.require_valid_on(g);
    std::vector<double> c(g.n);
    const double a = sigma * sigma / 2.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        const double v = model.df(x), v1 = model.df_d1(x), v2 = model.df_d2(x);
        // g = e^{x/2} DF:  g''/g = 1/4 + DF'/DF + DF''/DF
        c[i] = a * (0.25 + v1 / v + v2 / v);
    }
    return PotentialSpec::tabulated(g, std::move(c));
}

Field2D calibrate_potential_2d(double sigma_x, double sigma_y,
                               const DiscountFactorModel& model, const Grid2D& g) {
    model.require_valid_on(g.y);
    Field2D c(g);
    const double cx = sigma_x * sigma_x / 8.0;
    const double ay = sigma_y * sigma_y / 2.0;
    for (int ix = 0; ix < g.x.n; ++ix)
        for (int iy = 0; iy < g.y.n; ++iy) {
            const double y = g.y.node(iy);
            c.at(ix, iy) = cx + ay * model.df_d2(y) / model.df(y);
        }
    return c;
}

MartingaleReport run_martingale_report(const PotentialSpec& c,
                                       const std::function<double(double)>& target,
                                       double sigma, const Grid& g,
                                       const ReportOptions& opt) {
    const MetricWeight m = exponential_metric(g);
    WaveFunction psi = heat_kernel_state(g, opt.delta_t0, sigma, opt.x0);
    // conditioning at x0 carries a rho(x0)^{-1} frame factor so that the
    // initial eta-expectation equals the target at x0
    for (auto& v : psi.values) v *= std::exp(opt.x0 / 2.0);
    auto h = build_gaussian_hamiltonian(g, sigma, c);

    MartingaleReport rep;
    rep.calibrated_c = c;
    const double e0 = martingale_expectation(psi, m, target);
    rep.times.push_back(0.0);
    rep.expectation_path.push_back(e0);

    const double t_check = opt.horizon / opt.n_checkpoints;
    const int steps_per = std::max(1, static_cast<int>(std::lround(t_check / opt.dt)));
    EvolutionConfig cfg{t_check / steps_per, steps_per, EvolutionMode::diffusive};
    for (int k = 1; k <= opt.n_checkpoints; ++k) {
        psi = evolve(psi, h, cfg);
        rep.times.push_back(k * t_check);
        rep.expectation_path.push_back(martingale_expectation(psi, m, target));
    }
    for (double e : rep.expectation_path)
        rep.defect = std::max(rep.defect, std::abs(e / e0 - 1.0));
    return rep;
}

MartingaleReport run_martingale_report_2d(double sigma_x, double sigma_y,
                                          const DiscountFactorModel& model,
                                          const Grid2D& g, const Report2DOptions& opt) {
    const Field2D c = calibrate_potential_2d(sigma_x, sigma_y, model, g);
    Field2D psi = Field2D::from_function(g, [&](double x, double y) {
        return heat_kernel(x, opt.init_tau, sigma_x) * heat_kernel(y, opt.init_tau, sigma_y);
    });
    auto target_weight = [&](double x, double y) {
        // g(x,y) = DF(y) e^{x/2}: eta = e^{-x} acting on the target DF(y) e^x
        return model.df(y) * std::exp(x / 2.0);
    };

    MartingaleReport rep;
    const double e0 = weighted_integral2d(psi, target_weight);
    rep.times.push_back(0.0);
    rep.expectation_path.push_back(e0);

    const double t_check = opt.horizon / opt.n_checkpoints;
    const int steps_per = std::max(1, static_cast<int>(std::lround(t_check / opt.dt)));
    for (int k = 1; k <= opt.n_checkpoints; ++k) {
        psi = evolve_diffusive_2d(psi, sigma_x, sigma_y, c, t_check / steps_per, steps_per);
        rep.times.push_back(k * t_check);
        rep.expectation_path.push_back(weighted_integral2d(psi, target_weight));
    }
    for (double e : rep.expectation_path)
        rep.defect = std::max(rep.defect, std::abs(e / e0 - 1.0));
    return rep;
}

PriceResult price_payout(const std::function<double(double)>& payout,
                         const WaveFunction& density) {
    const Grid& g = density.grid;
    std::vector<double> f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = payout(g.node(i)) * density.values[i].real();
    PriceResult r;
    r.value = trapezoid(g, f);
    const double edge = (std::abs(f[0]) + std::abs(f[1]) + std::abs(f[g.n - 2]) +
                         std::abs(f[g.n - 1])) * g.h;
    r.boundary_fraction = r.value != 0.0 ? edge / std::abs(r.value) : edge;
    r.truncation_warning = r.boundary_fraction > 1e-8;
    return r;
}

WaveFunction risk_neutral_density(const WaveFunction& psi_h, const MetricWeight& m) {
    require_same_grid(psi_h.grid, m.grid, "risk_neutral_density");
    std::vector<double> d(psi_h.grid.n);
    for (int i = 0; i < psi_h.grid.n; ++i) d[i] = m.rho[i] * psi_h.values[i].real();
    const double z = trapezoid(psi_h.grid, d);
    if (!(z > 0.0))
        throw std::runtime_error("risk_neutral_density: nonpositive normalization");
    for (double& v : d) v /= z;
    return WaveFunction::from_real(psi_h.grid, d, psi_h.time);
}

double price_arrow_debreu(double x_target, double x0, double horizon, double sigma,
                          const PotentialSpec& c, const ArrowDebreuOptions& opt) {
    if (!(horizon > 0.0)) throw std::invalid_argument("price_arrow_debreu: T must be > 0");
    const Grid g = centered_grid(x0, opt.half_width, opt.grid_n);
    if (!g.contains(x_target))
        throw std::out_of_range("price_arrow_debreu: target outside grid");
    WaveFunction psi = heat_kernel_state(g, opt.delta_t0, sigma, x0);
    const double remaining = horizon - opt.delta_t0;
    if (remaining > 0.0) {
        auto h = build_gaussian_hamiltonian(g, sigma, c);
        const int n_steps = std::max(1, static_cast<int>(std::ceil(remaining / opt.dt)));
        EvolutionConfig cfg{remaining / n_steps, n_steps, EvolutionMode::diffusive};
        psi = evolve(psi, h, cfg);
    }
    // quadratic interpolation of the terminal density at the target (linear
    // interpolation leaves an O(h^2 f'') error visible near the peak)
    int i = g.nearest_index(x_target);
    if (i < 1) i = 1;
    if (i > g.n - 2) i = g.n - 2;
    const double u = (x_target - g.node(i)) / g.h;
    const double fm = psi.values[i - 1].real(), f0 = psi.values[i].real(),
                 fp = psi.values[i + 1].real();
    return f0 + u * (fp - fm) / 2.0 + u * u * (fp - 2.0 * f0 + fm) / 2.0;
}

double forward_no_arbitrage(double s0, double rate, double horizon,
                            const std::vector<Dividend>& dividends) {
    double f = s0 * std::exp(rate * horizon);
    for (const auto& d : dividends) {
        if (d.time >= horizon)
            throw std::invalid_argument("forward_no_arbitrage: dividend at or after maturity");
        f -= d.amount * std::exp(rate * (horizon - d.time));
    }
    return f;
}

} // namespace qmart
