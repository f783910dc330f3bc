#pragma once

// Standard test functions sampled at t_i = i/n, Gaussian noise calibrated by
// root signal-to-noise ratio, and goodness-of-fit metrics.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace testimation {

struct TestSignal {
    std::string name;
    std::vector<double> t;
    std::vector<double> samples;
};

/// wave, peak, bumps, blocks, doppler, heavisine.
std::vector<std::string> signal_names();

/// Closed-form value of a named test function at t in [0, 1].
double signal_value(std::string_view name, double t);

/// Samples `name` on {i/n, i = 1..n}; n must be a power of two.
TestSignal make_signal(std::string_view name, std::size_t n);

struct NoisyObservation {
    TestSignal clean;
    std::vector<double> y;
    double sigma = 0.0;
    double rsnr = 0.0;
    std::uint64_t seed = 0;
};

/// sigma = population sd(samples) / rsnr; y = samples + sigma z with z drawn from `seed`.
NoisyObservation add_noise(const TestSignal& signal, double rsnr, std::uint64_t seed);

/// Divide-by-n standard deviation.
double population_sd(std::span<const double> v);

/// (1/n) sum (f_hat - f)^2.
double mse(std::span<const double> f_hat, std::span<const double> f);

/// Two-column CSV with header "t,f".
void write_signal_csv(std::ostream& os, const TestSignal& signal);

}  // namespace testimation
