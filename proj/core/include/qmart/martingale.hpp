#ifndef QMART_MARTINGALE_HPP
#define QMART_MARTINGALE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "qmart/evolution.hpp"
#include "qmart/evolution2d.hpp"
#include "qmart/hamiltonian.hpp"
#include "qmart/wavefunction.hpp"

namespace qmart {

/// DF(x) = 1 / (1 + eps x^2). Negative eps has a pole at |x| = (-eps)^{-1/2};
/// grids reaching 90% of it are rejected.
struct DiscountFactorModel {
    double epsilon{0.0};
    double guard_floor{0.1};  // minimum allowed value of 1 + eps x^2

    double df(double x) const;
    double df_d1(double x) const;
    double df_d2(double x) const;

    /// Largest |x| this model may be evaluated at (infinity for eps >= 0).
    double domain_guard() const;
    void require_valid_on(const Grid& g) const;
};

std::vector<double> df_curve(const DiscountFactorModel& model, const Grid& g);

struct MartingaleReport {
    std::vector<double> times;
    std::vector<double> expectation_path;
    double defect{0.0};  // max |E_t/E_0 - 1|
    PotentialSpec calibrated_c;
};

/// eta-weighted expectation of target M for an H-frame diffusive state:
/// integral of M(y) * rho(y) * psi(y) dy. For eta = e^{-x} and M = e^x this
/// is the integral of e^{y/2} psi(y) dy.
double martingale_expectation(const WaveFunction& psi_h, const MetricWeight& m,
                              const std::function<double(double)>& target);

/// The constant that makes e^x a martingale: sigma^2 / 8.
double calibrate_constant_c(double sigma);

struct BisectionOptions {
    double horizon{1.0};
    int grid_n{1024};
    double half_width{6.0};
    double dt{0.01};
    double tol{1e-8};
};

/// Independent numerical confirmation of calibrate_constant_c: bisection on
/// the horizon-T martingale defect of the grid evolution.
double calibrate_constant_c_numeric(double sigma, const BisectionOptions& opt = {});

/// Non-constant potential making the eta-expectation of M time-invariant:
/// C(x) = (sigma^2/2) g''(x)/g(x) with g = M * e^{-x/2}, central differences.
/// g must be strictly positive on the grid.
PotentialSpec calibrate_potential(const std::function<double(double)>& target,
                                  double sigma, const Grid& g);

/// Same calibration for M(x) = DF(x) e^x using the model's analytic
/// derivatives: g''/g = 1/4 + DF'/DF + DF''/DF. With epsilon = 0 this returns
/// exactly the constant sigma^2/8 spec.
PotentialSpec calibrate_potential_df(const DiscountFactorModel& model,
                                     double sigma, const Grid& g);

/// Two-factor potential for target DF(y) e^x with eta = e^{-x} on the price
/// coordinate: C(x,y) = sigma_x^2/8 + (sigma_y^2/2) DF''(y)/DF(y).
Field2D calibrate_potential_2d(double sigma_x, double sigma_y,
                               const DiscountFactorModel& model, const Grid2D& g);

struct ReportOptions {
    double horizon{1.0};
    int n_checkpoints{10};
    double dt{0.01};
    double x0{0.0};
    // width parameter of the regularized initial delta; chosen so the spike
    // (sd = sigma sqrt(t0)) stays resolved on default grids, sd >= h
    double delta_t0{1e-3};
};

/// Evolve the regularized delta at x0 under H = -sigma^2/2 d2 + C and record
/// the eta-expectation of the target at evenly spaced checkpoints.
MartingaleReport run_martingale_report(const PotentialSpec& c,
                                       const std::function<double(double)>& target,
                                       double sigma, const Grid& g,
                                       const ReportOptions& opt = {});

struct Report2DOptions {
    double horizon{1.0};
    int n_checkpoints{10};
    double dt{0.01};
    double init_tau{0.05};  // width of the separable Gaussian initial density
};

MartingaleReport run_martingale_report_2d(double sigma_x, double sigma_y,
                                          const DiscountFactorModel& model,
                                          const Grid2D& g,
                                          const Report2DOptions& opt = {});

struct PriceResult {
    double value{};
    double boundary_fraction{};  // |boundary contribution| / |integral|
    bool truncation_warning{};
};

/// Quadrature of a payout against a terminal density (caller supplies the
/// density in the measure it wants to price under; see risk_neutral_density).
PriceResult price_payout(const std::function<double(double)>& payout,
                         const WaveFunction& density);

/// Risk-neutral terminal density from an H-frame diffusive state: the
/// eta-chain tilt rho(y) psi(y), normalized to unit mass. Under the
/// calibrated potential this reproduces the zero-rate Black-Scholes density.
WaveFunction risk_neutral_density(const WaveFunction& psi_h, const MetricWeight& m);

struct ArrowDebreuOptions {
    // peak error of the transition density is ~ peak * h^2/(8 sigma^2 T);
    // 8192 nodes keep it below 1e-4 absolute for the default scenarios
    int grid_n{8192};
    double half_width{6.0};
    double dt{5e-4};
    double delta_t0{2e-3};  // see ReportOptions::delta_t0
};

/// Transition density p(x_target, T | x0, 0) under dpsi/dtau = sigma^2/2 psi''
/// - C psi, started from the closed-form kernel at delta_t0.
double price_arrow_debreu(double x_target, double x0, double horizon, double sigma,
                          const PotentialSpec& c, const ArrowDebreuOptions& opt = {});

struct Dividend {
    double amount{};
    double time{};
};

/// S0 e^{rT} - sum of D e^{r(T - t_d)}.
double forward_no_arbitrage(double s0, double rate, double horizon,
                            const std::vector<Dividend>& dividends = {});

} // namespace qmart

#endif
