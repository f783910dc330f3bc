#include "testimation/testbed.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "testimation/error.hpp"
#include "testimation/rng.hpp"
#include "testimation/wavelet.hpp"

namespace testimation {

namespace {

using std::numbers::pi;

// Donoho & Johnstone (1994) jump / bump locations
constexpr std::array<double, 11> k_pos = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> k_blocks_hgt = {4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
constexpr std::array<double, 11> k_bumps_hgt = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> k_bumps_wth = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                                0.01,  0.01,  0.005, 0.008, 0.005};

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

std::vector<std::string> signal_names() { return {"wave", "peak", "bumps", "blocks", "doppler", "heavisine"}; }

double signal_value(std::string_view name, double t) {
    if (name == "wave") return 0.5 + 0.2 * std::cos(4.0 * pi * t) + 0.1 * std::cos(24.0 * pi * t);
    if (name == "peak") return std::exp(-std::abs(t - 0.5));
    if (name == "blocks") {
        double f = 0.0;
        for (std::size_t j = 0; j < k_pos.size(); ++j) f += (1.0 + sgn(t - k_pos[j])) * k_blocks_hgt[j] / 2.0;
        return f;
    }
    if (name == "bumps") {
        double f = 0.0;
        for (std::size_t j = 0; j < k_pos.size(); ++j)
            f += k_bumps_hgt[j] / std::pow(1.0 + std::abs((t - k_pos[j]) / k_bumps_wth[j]), 4.0);
        return f;
    }
    if (name == "doppler") {
        constexpr double eps = 0.05;
        return std::sqrt(t * (1.0 - t)) * std::sin(2.0 * pi * (1.0 + eps) / (t + eps));
    }
    if (name == "heavisine") return 4.0 * std::sin(4.0 * pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
    throw UnsupportedName("unsupported signal '" + std::string(name) + "'");
}

TestSignal make_signal(std::string_view name, std::size_t n) {
    if (exact_log2(n) < 0) throw InvalidInput("signal length " + std::to_string(n) + " is not a power of two");
    signal_value(name, 0.5);  // reject unknown names before allocating

    TestSignal s;
    s.name = std::string(name);
    s.t.resize(n);
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.t[i] = static_cast<double>(i + 1) / static_cast<double>(n);
        s.samples[i] = signal_value(name, s.t[i]);
    }
    return s;
}

double population_sd(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

NoisyObservation add_noise(const TestSignal& signal, double rsnr, std::uint64_t seed) {
    if (!(rsnr > 0.0)) throw InvalidParameter("rsnr must be positive");
    NoisyObservation obs;
    obs.clean = signal;
    obs.rsnr = rsnr;
    obs.seed = seed;
    obs.sigma = population_sd(signal.samples) / rsnr;
    obs.y.resize(signal.samples.size());
    Engine engine(seed);
    fill_standard_normal(engine, obs.y);
    for (std::size_t i = 0; i < obs.y.size(); ++i) obs.y[i] = signal.samples[i] + obs.sigma * obs.y[i];
    return obs;
}

double mse(std::span<const double> f_hat, std::span<const double> f) {
    if (f_hat.size() != f.size()) throw InvalidInput("mse: length mismatch");
    if (f.empty()) throw InvalidInput("mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += (f_hat[i] - f[i]) * (f_hat[i] - f[i]);
    return acc / static_cast<double>(f.size());
}

void write_signal_csv(std::ostream& os, const TestSignal& signal) {
    os << "t,f\n";
    char buf[64];
    for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", signal.t[i], signal.samples[i]);
        os << buf;
    }
}

}  // namespace testimation
