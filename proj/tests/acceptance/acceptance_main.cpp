// Acceptance gate: one line per criterion, PASS/FAIL, nonzero exit on any
// failure. Run a single criterion by passing its number as argv[1].
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qmart/bohmian.hpp"
#include "qmart/evolution.hpp"
#include "qmart/evolution2d.hpp"
#include "qmart/feynman_kac.hpp"
#include "qmart/kernels.hpp"
#include "qmart/martingale.hpp"

using namespace qmart;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ------------------------------------------------------------- criterion 1

Outcome criterion1() {
    Outcome o;
    const double c = calibrate_constant_c(0.2);
    o.require(c == 0.2 * 0.2 / 8.0, "analytic constant not sigma^2/8");
    o.require(std::abs(c - 0.005) < 1e-15, "constant not 0.005");
    const double num = calibrate_constant_c_numeric(0.2);
    o.require(std::abs(num - 0.005) <= 1e-6,
              "bisection off by " + fmt(std::abs(num - 0.005)));
    return o;
}

// ------------------------------------------------------------- criterion 2

Outcome criterion2() {
    Outcome o;
    const double sigma = 0.2;
    const Grid g = centered_grid(0.0, 6.0, 2048);
    ReportOptions opt;  // horizon 1, 10 checkpoints
    auto target = [](double x) { return std::exp(x); };

    const auto rep = run_martingale_report(
        PotentialSpec::constant(sigma * sigma / 8.0), target, sigma, g, opt);
    o.require(rep.times.size() == 11, "checkpoint count");
    o.require(rep.defect <= 1e-4, "calibrated defect " + fmt(rep.defect));

    const auto rep0 =
        run_martingale_report(PotentialSpec::constant(0.0), target, sigma, g, opt);
    for (size_t k = 0; k < rep0.times.size(); ++k) {
        const double expected = std::exp(sigma * sigma * rep0.times[k] / 8.0);
        const double got = rep0.expectation_path[k] / rep0.expectation_path[0];
        o.require(std::abs(got - expected) <= 1e-4,
                  "C=0 path off by " + fmt(std::abs(got - expected)));
    }
    return o;
}

// ------------------------------------------------------------- criterion 3

Outcome criterion3() {
    Outcome o;
    const double sigma = 0.3;
    const auto c = PotentialSpec::constant(0.02);

    // the two discretizations agree as operators on smooth states to O(h^2)
    auto stencil_gap = [&](int n) {
        const Grid g = centered_grid(0.0, 4.0, n);
        auto k_sim = similarity_transform(build_gaussian_hamiltonian(g, sigma, c),
                                          exponential_metric(g));
        auto k_ana = build_transformed_stencil(g, sigma, c);
        std::vector<double> psi(g.n);
        for (int i = 0; i < g.n; ++i)
            psi[i] = std::exp(-g.node(i) * g.node(i) / 2.0);
        const auto a = k_sim.apply(psi), b = k_ana.apply(psi);
        double gap = 0.0;
        for (int i = 1; i < g.n - 1; ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
        return gap;
    };
    const double g1 = stencil_gap(401), g2 = stencil_gap(801);
    const double order = std::log2(g1 / g2);
    o.require(order >= 1.8, "stencil order " + fmt(order));

    const Grid g = centered_grid(0.0, 4.0, 801);
    const MetricWeight m = exponential_metric(g);
    auto k = similarity_transform(build_gaussian_hamiltonian(g, sigma, c), m);
    const double defect = check_pseudo_hermitian(k, m);
    o.require(defect <= 1e-10, "pseudo defect " + fmt(defect));
    return o;
}

// ------------------------------------------------------------- criterion 4

Outcome criterion4() {
    Outcome o;
    const double sigma = 0.2, c0 = 0.02, t0 = 0.05, horizon = 1.0;
    // L2 gap to the closed form at T=1, refining h and dt together
    auto l2_error = [&](int n, double dt) {
        const Grid g = centered_grid(0.0, 6.0, n);
        WaveFunction psi = WaveFunction::from_function(g, [&](double x) {
            return cdouble(closed_form_solution(x, t0, sigma, c0), 0.0);
        });
        auto h = build_gaussian_hamiltonian(g, sigma, PotentialSpec::constant(c0));
        const int steps = static_cast<int>(std::lround((horizon - t0) / dt));
        psi = evolve(psi, h, EvolutionConfig{dt, steps, EvolutionMode::diffusive});
        double acc = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double d =
                psi.values[i].real() - closed_form_solution(g.node(i), horizon, sigma, c0);
            acc += d * d;
        }
        return std::sqrt(acc * g.h);
    };
    const double e1 = l2_error(2401, 2e-3);
    const double e2 = l2_error(4801, 1e-3);  // h and dt both halve
    o.require(e1 <= 1e-4, "default L2 error " + fmt(e1));
    const double order = std::log2(e1 / e2);
    o.require(order >= 1.6 && order <= 2.4, "refinement order " + fmt(order));
    return o;
}

// ------------------------------------------------------------- criterion 5

WaveFunction terminal_density(double sigma, double horizon, const PotentialSpec& c,
                              const Grid& g) {
    const double t0 = 1e-3;
    WaveFunction psi = heat_kernel_state(g, t0, sigma);
    auto h = build_gaussian_hamiltonian(g, sigma, c);
    const double dt = 1e-3;
    const int steps = static_cast<int>(std::lround((horizon - t0) / dt));
    psi = evolve(psi, h, EvolutionConfig{dt, steps, EvolutionMode::diffusive});
    return risk_neutral_density(psi, exponential_metric(g));
}

Outcome criterion5() {
    Outcome o;
    const double sigma = 0.2, s0 = 100.0, strike = 100.0, horizon = 1.0;
    const double black = s0 * std::erf(0.1 / std::numbers::sqrt2);  // 7.9656
    const auto c = PotentialSpec::constant(calibrate_constant_c(sigma));
    auto payout = [&](double y) { return std::max(s0 * std::exp(y) - strike, 0.0); };

    const Grid g = centered_grid(0.0, 6.0, 2048);
    const double pde = price_payout(payout, terminal_density(sigma, horizon, c, g)).value;
    o.require(std::abs(pde - black) <= 0.005 * black,
              "PDE price " + fmt(pde) + " vs " + fmt(black));

    McConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 2024;
    cfg.sigma = sigma;
    cfg.horizon = horizon;
    const McResult mc = mc_risk_neutral_price(payout, c, cfg);
    o.require(std::abs(pde - mc.estimate) <= 3.0 * mc.std_error,
              "PDE vs MC gap " + fmt(std::abs(pde - mc.estimate)) + " > 3*" +
                  fmt(mc.std_error));
    return o;
}

// ------------------------------------------------------------- criterion 6

Outcome criterion6() {
    Outcome o;
    const double sigma = 0.2;
    const Grid g = centered_grid(0.0, 6.0, 2048);
    const DiscountFactorModel model{0.1};
    auto target = [&](double x) { return model.df(x) * std::exp(x); };

    const auto c = calibrate_potential_df(model, sigma, g);
    const auto rep = run_martingale_report(c, target, sigma, g, {});
    o.require(rep.defect <= 1e-3, "PDE defect " + fmt(rep.defect));

    McConfig cfg;
    cfg.n_paths = 40000;
    cfg.seed = 8;
    cfg.sigma = sigma;
    const McResult mc = mc_martingale_check(target, c, cfg);
    o.require(std::abs(mc.estimate - 1.0) <= 3.0 * mc.std_error,
              "MC check off by " + fmt(std::abs(mc.estimate - 1.0)));

    // epsilon = 0 must reduce bitwise to the constant-potential configuration
    const auto c0 = calibrate_potential_df(DiscountFactorModel{0.0}, sigma, g);
    const auto rep_eps0 = run_martingale_report(
        c0, [](double x) { return std::exp(x); }, sigma, g, {});
    const auto rep_const = run_martingale_report(
        PotentialSpec::constant(sigma * sigma / 8.0), [](double x) { return std::exp(x); },
        sigma, g, {});
    bool bitwise = rep_eps0.expectation_path.size() == rep_const.expectation_path.size();
    for (size_t k = 0; bitwise && k < rep_eps0.expectation_path.size(); ++k)
        bitwise = rep_eps0.expectation_path[k] == rep_const.expectation_path[k];
    o.require(bitwise, "epsilon=0 not bitwise equal to the constant run");

    const Grid2D g2{centered_grid(0.0, 6.0, 256), centered_grid(0.0, 6.0, 128)};
    const auto rep2 = run_martingale_report_2d(sigma, 0.2, model, g2, {});
    o.require(rep2.defect <= 1e-3, "two-factor defect " + fmt(rep2.defect));
    return o;
}

// ----------------------------------------------------- CLI helpers (7, 10)

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QMART_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("qmart_acceptance_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion7() {
    Outcome o;
    const fs::path d = scratch_dir("fig1");
    o.require(run_cli("figure1 --out " + d.string()) == 0, "figure1 exit code");
    std::ifstream in(d / "figure1.csv");
    std::string line;
    std::getline(in, line);
    std::vector<double> x, pos, neg;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        x.push_back(std::stod(a));
        pos.push_back(std::stod(b));
        neg.push_back(std::stod(c));
    }
    o.require(!x.empty(), "empty figure1.csv");
    bool at_zero = false, mono = true;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) at_zero = pos[i] == 1.0 && neg[i] == 1.0;
        if (i == 0) continue;
        // strict decrease in |x| for +eps, strict increase for -eps
        if (x[i] > 0.0) mono = mono && pos[i] < pos[i - 1] && neg[i] > neg[i - 1];
        if (x[i] <= 0.0) mono = mono && pos[i] > pos[i - 1] && neg[i] < neg[i - 1];
    }
    o.require(at_zero, "DF(0) != 1");
    o.require(mono, "monotonicity violated");
    fs::remove_all(d);
    return o;
}

// ------------------------------------------------------------- criterion 8

WaveFunction free_packet(const Grid& g, double s0, double sigma, double t) {
    const cdouble b(s0 * s0, 0.5 * sigma * sigma * t);
    const cdouble pref = std::pow(2.0 * std::numbers::pi * s0 * s0, -0.25) *
                         std::sqrt(cdouble(s0 * s0, 0.0) / b);
    return WaveFunction::from_function(
        g, [&](double x) { return pref * std::exp(-x * x / (4.0 * b)); }, t);
}

Outcome criterion8() {
    Outcome o;
    // equivariance of the transported ensemble
    {
        const double s0 = 0.5, sigma = 0.5, t_end = 2.0;
        Grid g(-5.0, 5.0, 1001);
        const int n_slices = 41;
        std::vector<PolarField> series;
        for (int s = 0; s < n_slices; ++s)
            series.push_back(
                polar_decompose(free_packet(g, s0, sigma, t_end * s / (n_slices - 1))));
        auto ens = bohm_trajectories(series, sigma, 10000, 424242, 16);
        std::vector<double> xT(ens.n_particles);
        for (int p = 0; p < ens.n_particles; ++p)
            xT[p] = ens.positions[p][n_slices - 1];
        const double ks = ks_statistic(xT, free_packet(g, s0, sigma, t_end));
        o.require(ks <= 0.05, "terminal KS " + fmt(ks));
    }
    // spreading variance ~ t^2 for the zero-potential ensemble
    {
        const double s0 = 0.3, sigma = 0.6, t_end = 10.0;
        Grid g(-25.0, 25.0, 2048);
        const int n_slices = 101;
        std::vector<PolarField> series;
        for (int s = 0; s < n_slices; ++s)
            series.push_back(
                polar_decompose(free_packet(g, s0, sigma, t_end * s / (n_slices - 1))));
        auto ens = bohm_trajectories(series, sigma, 1000, 99, 48);
        const double beta = fit_power_law(ens.times, ens.variance_curve(), 4.0, 10.0);
        o.require(beta >= 1.9 && beta <= 2.1, "variance exponent " + fmt(beta));
    }
    // heat-kernel quantum potential: quadratic with curvature -sigma^2/(2 (sigma^2 tau)^2)
    {
        const double sigma = 0.5, tau = 1.0;
        Grid g(-3.0, 3.0, 2401);
        auto q = quantum_potential(polar_decompose(heat_kernel_state(g, tau, sigma)),
                                   sigma, QPotentialForm::hermitian);
        const double v = sigma * sigma * tau;
        const double expected_curv = -sigma * sigma / (2.0 * v * v);
        for (double xr : {0.5, 1.0, 1.5, 2.0}) {
            const int i = g.nearest_index(xr);
            const double xi = g.node(i);
            const double curv = (q.values[i] - q.values[g.nearest_index(0.0)]) / (xi * xi);
            o.require(std::abs(curv / expected_curv - 1.0) <= 1e-3,
                      "curvature at x=" + fmt(xi) + " off by " +
                          fmt(std::abs(curv / expected_curv - 1.0)));
        }
    }
    return o;
}

// ------------------------------------------------------------- criterion 9

Outcome criterion9() {
    Outcome o;
    const double sigma = 0.4;
    auto residuals = [&](int n, double dt) {
        Grid g(-6.0, 6.0, n);
        auto h = build_gaussian_hamiltonian(
            g, sigma, PotentialSpec::constant(sigma * sigma / 8.0));
        auto k = similarity_transform(h, exponential_metric(g));
        WaveFunction psi = WaveFunction::from_function(g, [](double x) {
            return cdouble(std::pow(std::numbers::pi, -0.25) * std::exp(-x * x / 2.0), 0.0);
        });
        const int warm = static_cast<int>(std::lround(0.5 / dt));
        psi = evolve(psi, k, EvolutionConfig{dt, warm, EvolutionMode::unitary});
        std::vector<PolarField> series{polar_decompose(psi)};
        for (int s = 0; s < 2; ++s) {
            psi = evolve(psi, k, EvolutionConfig{dt, 1, EvolutionMode::unitary});
            psi.time = series.back().time + dt;
            series.push_back(polar_decompose(psi));
        }
        return std::pair{
            continuity_residual(series, sigma, ContinuityMetric::exp_weight, 1e-3),
            continuity_residual(series, sigma, ContinuityMetric::flat, 1e-3)};
    };
    auto [eta_c, flat_c] = residuals(513, 0.01);
    auto [eta_f, flat_f] = residuals(1025, 0.005);
    const double order = std::log2(eta_c / eta_f);
    o.require(order >= 1.8, "eta residual order " + fmt(order));
    o.require(flat_f > 10.0 * eta_f, "flat residual not separated");
    o.require(flat_f > 0.5 * flat_c, "flat residual vanishing under refinement");
    return o;
}

// ------------------------------------------------------------ criterion 10

Outcome criterion10() {
    Outcome o;
    const fs::path base = scratch_dir("det");
    std::ofstream(base / "cfg.json")
        << R"({"price": {"payout": "call", "ladder": [90, 110]},
               "bohm": {"n_particles": 500},
               "mc": {"seed": 17}})";
    const std::string cfg = " --config " + (base / "cfg.json").string();
    for (const std::string cmd : {"calibrate", "price", "figure1", "bohm", "check"}) {
        const fs::path a = base / (cmd + "_a"), b = base / (cmd + "_b");
        const int ra = run_cli(cmd + cfg + " --out " + a.string());
        const int rb = run_cli(cmd + cfg + " --out " + b.string());
        o.require(ra == 0 && rb == 0, cmd + " exit code");
        for (const auto& entry : fs::directory_iterator(a)) {
            const fs::path other = b / entry.path().filename();
            o.require(fs::exists(other) && slurp(entry.path()) == slurp(other),
                      cmd + ": " + entry.path().filename().string() + " differs");
        }
    }
    fs::remove_all(base);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    using Criterion = Outcome (*)();
    const Criterion criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                  criterion5, criterion6, criterion7, criterion8,
                                  criterion9, criterion10};
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 10) {
            std::fprintf(stderr, "usage: %s [1-10]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0;
    for (int k = 1; k <= 10; ++k) {
        if (only != 0 && k != only) continue;
        Outcome o;
        try {
            o = criteria[k - 1]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (o.pass) {
            std::printf("criterion %d: PASS\n", k);
        } else {
            std::printf("criterion %d: FAIL (%s)\n", k, o.detail.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
