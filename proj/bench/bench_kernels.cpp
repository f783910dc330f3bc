// Serial reference vs OpenMP kernels: DWT cascade, Monte Carlo risk and the
// simulation grid. Prints wall time per variant and checks the outputs agree.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "testimation/balls.hpp"
#include "testimation/parallel.hpp"
#include "testimation/rng.hpp"
#include "testimation/simulation.hpp"
#include "testimation/wavelet.hpp"

using namespace testimation;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms, bool agree) {
    std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, agree ? "match" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", max_threads());

    const auto filter = filter_bank("coif3");
    std::vector<double> x(1 << 18);
    Engine engine(7);
    fill_standard_normal(engine, x);

    WaveletDecomposition ds;
    WaveletDecomposition dp;
    const double fs = time_ms([&] { ds = dwt_forward(x, filter, 4, Execution::serial); }, 5);
    const double fp = time_ms([&] { dp = dwt_forward(x, filter, 4, Execution::parallel); }, 5);
    report("dwt_forward n=2^18", fs, fp, ds.details == dp.details && ds.scaling == dp.scaling);

    std::vector<double> xs;
    std::vector<double> xp;
    const double is = time_ms([&] { xs = dwt_inverse(ds, filter, Execution::serial); }, 5);
    const double ip = time_ms([&] { xp = dwt_inverse(ds, filter, Execution::parallel); }, 5);
    double diff = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) diff = std::max(diff, std::abs(xs[i] - xp[i]));
    report("dwt_inverse n=2^18", is, ip, diff <= 1e-12);

    const LpBallSpec ball{1.0, 64.0 / 4096.0, 4096, 1.0};
    const auto mu = least_favorable(ball, Zone::sparse3);
    const auto prior = trunc_geom_prior(4096, 0.5, 3.0);
    RiskEstimate rs;
    RiskEstimate rp;
    const double ms = time_ms([&] { rs = monte_carlo_risk(mu, 1.0, prior, 200, 1, Execution::serial); }, 1);
    const double mp = time_ms([&] { rp = monte_carlo_risk(mu, 1.0, prior, 200, 1, Execution::parallel); }, 1);
    report("monte_carlo_risk n=4096 x200", ms, mp, rs == rp);

    ExperimentConfig cfg;
    cfg.signals = {"wave", "doppler"};
    cfg.replications = 20;
    ExperimentReport es;
    ExperimentReport ep;
    const double ss = time_ms([&] { es = run_simulation(cfg, Execution::serial); }, 1);
    const double sp = time_ms([&] { ep = run_simulation(cfg, Execution::parallel); }, 1);
    bool same = es.rows.size() == ep.rows.size();
    for (std::size_t i = 0; same && i < es.rows.size(); ++i) same = es.rows[i].median_mse == ep.rows[i].median_mse;
    report("run_simulation 2x3x3 x20", ss, sp, same);
    return 0;
}
