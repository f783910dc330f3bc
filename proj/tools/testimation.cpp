// testimation: MAP wavelet denoising, simulation protocol and rate experiments.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "testimation/commands.hpp"
#include "testimation/parallel.hpp"

namespace {

std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = testimation::cli;

    if (const char* env = std::getenv("TESTIMATION_THREADS")) testimation::set_threads(std::atoi(env));

    CLI::App app{"MAP testimation wavelet denoiser and simulation harness"};
    app.require_subcommand(1);

    cli::DenoiseArgs denoise;
    double sigma = 0.0;
    auto* d = app.add_subcommand("denoise", "Denoise a CSV signal (one column y, or two columns t,y)");
    d->add_option("input", denoise.input, "Input CSV")->required();
    d->add_option("-o,--output", denoise.output, "Denoised CSV (t,f_hat)")->required();
    d->add_option("--sidecar", denoise.sidecar, "JSON diagnostics path (default: OUTPUT.json)");
    d->add_option("--filter", denoise.filter, "Wavelet filter")->capture_default_str();
    d->add_option("--j0", denoise.j0, "Primary resolution level")->capture_default_str();
    auto* sigma_opt = d->add_option("--sigma", sigma, "Known noise sd (default: MAD estimate)");
    d->add_option("--mode", denoise.mode, "levelwise or global")->capture_default_str();

    cli::SimulateArgs simulate;
    auto* s = app.add_subcommand("simulate", "Run the replicated simulation grid from a config file");
    s->add_option("config", simulate.config, "key = value config file")->required();
    s->add_option("-o,--output", simulate.output, "Report CSV (default: stdout)");

    cli::RatesArgs rates;
    std::string grid;
    std::string estimator = "map-levelwise";
    std::string zone;
    double eta_p = 0.0;
    double eta_p_count = 64.0;
    auto* r = app.add_subcommand("rates", "Empirical convergence rates over a grid of sample sizes");
    auto* grid_opt = r->add_option("--n-grid", grid,
                                   "Comma-separated powers of two (default: 256..8192, ball mode 256,1024,4096)");
    auto* reps_opt =
        r->add_option("--reps", rates.function.replications, "Replications per n (default: 50, ball mode 200)");
    r->add_option("--seed", rates.function.seed, "Base seed")->capture_default_str();
    r->add_option("-o,--output", rates.output, "Rate CSV (default: stdout)");
    r->add_option("--signal", rates.function.signal, "Test function")->capture_default_str();
    r->add_option("--m", rates.function.m, "Derivative order for the weighted risk")->capture_default_str();
    r->add_option("--rsnr", rates.function.rsnr, "Root signal-to-noise ratio")->capture_default_str();
    r->add_option("--filter", rates.function.filter, "Wavelet filter")->capture_default_str();
    r->add_option("--j0", rates.function.j0, "Primary resolution level")->capture_default_str();
    r->add_option("--estimator", estimator, "map-levelwise, map-global or universal-hard")->capture_default_str();
    r->add_flag("--ball", rates.ball_mode, "Sequence-model l_p-ball mode instead of function mode");
    r->add_option("--p", rates.ball.p, "Ball exponent p")->capture_default_str();
    auto* eta_opt = r->add_option("--eta-p", eta_p, "Fixed normalized radius eta^p");
    r->add_option("--eta-p-count", eta_p_count, "Use eta^p = COUNT / n")->capture_default_str();
    r->add_option("--zone", zone, "dense-1, dense-2, sparse-3 or supersparse-4 (default: classify)");
    r->add_option("--q", rates.ball.q, "TrGeom prior ratio q")->capture_default_str();
    r->add_option("--gamma", rates.ball.gamma, "Prior variance ratio")->capture_default_str();

    auto* c = app.add_subcommand("check", "Binomial-bound sweep and prior-condition checks");
    cli::CheckArgs check;
    c->add_option("--n-max", check.binomial_n_max, "Largest n in the binomial sweep")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::k_validation_failure;
    }

    if (*d) {
        if (*sigma_opt) denoise.sigma = sigma;
        return cli::cmd_denoise(denoise, std::cerr);
    }
    if (*s) return cli::cmd_simulate(simulate, std::cout, std::cerr);
    if (*r) {
        try {
            if (*grid_opt) {
                rates.function.n_grid = parse_grid(grid);
                rates.ball.n_grid = rates.function.n_grid;
            }
            if (*reps_opt) rates.ball.replications = rates.function.replications;
            rates.function.estimator = testimation::parse_estimator(estimator);
            rates.ball.seed = rates.function.seed;
            if (*eta_opt) {
                rates.ball.eta_p_count.reset();
                rates.ball.eta_p = eta_p;
            } else {
                rates.ball.eta_p_count = eta_p_count;
            }
            if (!zone.empty()) rates.ball.zone = testimation::parse_zone(zone);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return cli::k_validation_failure;
        }
        return cli::cmd_rates(rates, std::cout, std::cerr);
    }
    if (*c) return cli::cmd_check(check, std::cout);
    return cli::k_validation_failure;
}
