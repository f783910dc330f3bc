#include "testimation/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "filter_taps.hpp"
#include "testimation/error.hpp"

namespace testimation {

namespace {

// Below this many outputs per step the OpenMP fork costs more than it saves.
constexpr std::ptrdiff_t k_parallel_cutoff = 2048;

std::size_t wrap(std::size_t i, std::size_t n) { return i % n; }

}  // namespace

WaveletFilter WaveletFilter::from_lowpass(std::string name, std::vector<double> lowpass) {
    if (lowpass.size() < 2 || lowpass.size() % 2 != 0)
        throw InvalidParameter("filter '" + name + "' must have an even number of taps");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double h : lowpass) {
        sum += h;
        sum_sq += h * h;
    }
    if (std::abs(sum - std::sqrt(2.0)) > 1e-10 || std::abs(sum_sq - 1.0) > 1e-10)
        throw InvalidParameter("filter '" + name + "' violates sum h = sqrt(2), sum h^2 = 1");

    WaveletFilter f;
    f.name_ = std::move(name);
    f.lowpass_ = std::move(lowpass);
    const std::size_t L = f.lowpass_.size();
    f.highpass_.resize(L);
    for (std::size_t k = 0; k < L; ++k) f.highpass_[k] = (k % 2 == 0 ? 1.0 : -1.0) * f.lowpass_[L - 1 - k];
    return f;
}

WaveletFilter filter_bank(std::string_view name) {
    for (const auto& entry : detail::k_filter_table)
        if (entry.name == name)
            return WaveletFilter::from_lowpass(std::string(name),
                                               std::vector<double>(entry.lowpass.begin(), entry.lowpass.end()));
    throw UnsupportedName("unsupported filter '" + std::string(name) + "'");
}

std::vector<std::string> filter_names() {
    std::vector<std::string> names;
    for (const auto& entry : detail::k_filter_table) names.emplace_back(entry.name);
    return names;
}

int exact_log2(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) return -1;
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

std::size_t WaveletDecomposition::size() const { return scaling.size() + detail_count(); }

std::size_t WaveletDecomposition::detail_count() const {
    std::size_t total = 0;
    for (const auto& d : details) total += d.size();
    return total;
}

double WaveletDecomposition::energy() const {
    double e = 0.0;
    for (double v : scaling) e += v * v;
    for (const auto& d : details)
        for (double v : d) e += v * v;
    return e;
}

void WaveletDecomposition::validate() const {
    if (j0 < 1 || J <= j0) throw InvalidInput("decomposition levels must satisfy 1 <= j0 < J");
    if (scaling.size() != (std::size_t{1} << j0))
        throw InvalidInput("scaling level must hold 2^j0 = " + std::to_string(std::size_t{1} << j0) + " coefficients");
    if (details.size() != static_cast<std::size_t>(J - j0))
        throw InvalidInput("expected " + std::to_string(J - j0) + " detail levels, got " +
                           std::to_string(details.size()));
    for (int j = j0; j < J; ++j)
        if (level(j).size() != (std::size_t{1} << j))
            throw InvalidInput("detail level " + std::to_string(j) + " must hold 2^" + std::to_string(j) +
                               " coefficients");
}

WaveletDecomposition WaveletDecomposition::zeros(int j0, int J) {
    WaveletDecomposition d;
    d.j0 = j0;
    d.J = J;
    d.scaling.assign(std::size_t{1} << j0, 0.0);
    for (int j = j0; j < J; ++j) d.details.emplace_back(std::size_t{1} << j, 0.0);
    return d;
}

namespace kernels {

void analysis_step(std::span<const double> input, std::span<const double> lowpass, std::span<const double> highpass,
                   std::span<double> approx, std::span<double> detail) {
    const std::size_t n = input.size();
    const std::size_t L = lowpass.size();
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
#pragma omp parallel for if (half >= k_parallel_cutoff) schedule(static)
    for (std::ptrdiff_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        const std::size_t base = 2 * static_cast<std::size_t>(k);
        for (std::size_t m = 0; m < L; ++m) {
            const double x = input[wrap(base + m, n)];
            a += lowpass[m] * x;
            d += highpass[m] * x;
        }
        approx[static_cast<std::size_t>(k)] = a;
        detail[static_cast<std::size_t>(k)] = d;
    }
}

void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<const double> lowpass,
                    std::span<const double> highpass, std::span<double> output) {
    const std::size_t n = output.size();
    const std::size_t L = lowpass.size();
    const auto count = static_cast<std::ptrdiff_t>(n);
    // Gather form: each output sample collects the taps whose shifted support hits it.
#pragma omp parallel for if (count >= 2 * k_parallel_cutoff) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double acc = 0.0;
        for (std::size_t m = i % 2; m < L; m += 2) {
            const std::size_t k = ((i + n * L - m) % n) / 2;
            acc += lowpass[m] * approx[k] + highpass[m] * detail[k];
        }
        output[i] = acc;
    }
}

namespace serial {

void analysis_step(std::span<const double> input, std::span<const double> lowpass, std::span<const double> highpass,
                   std::span<double> approx, std::span<double> detail) {
    const std::size_t n = input.size();
    for (std::size_t k = 0; k < n / 2; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < lowpass.size(); ++m) {
            const double x = input[wrap(2 * k + m, n)];
            a += lowpass[m] * x;
            d += highpass[m] * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<const double> lowpass,
                    std::span<const double> highpass, std::span<double> output) {
    const std::size_t n = output.size();
    std::fill(output.begin(), output.end(), 0.0);
    for (std::size_t k = 0; k < n / 2; ++k)
        for (std::size_t m = 0; m < lowpass.size(); ++m)
            output[wrap(2 * k + m, n)] += lowpass[m] * approx[k] + highpass[m] * detail[k];
}

}  // namespace serial

}  // namespace kernels

WaveletDecomposition dwt_forward(std::span<const double> signal, const WaveletFilter& filter, int j0, Execution exec) {
    const int J = exact_log2(signal.size());
    if (J < 0) throw InvalidInput("signal length " + std::to_string(signal.size()) + " is not a power of two");
    if (j0 < 1) throw InvalidParameter("primary resolution level j0 must be >= 1");
    if (j0 >= J)
        throw InvalidParameter("j0 = " + std::to_string(j0) + " leaves no detail levels for n = " +
                               std::to_string(signal.size()));

    WaveletDecomposition out = WaveletDecomposition::zeros(j0, J);
    std::vector<double> current(signal.begin(), signal.end());
    std::vector<double> next;
    for (int j = J - 1; j >= j0; --j) {
        next.assign(current.size() / 2, 0.0);
        auto detail = out.level(j);
        if (exec == Execution::parallel)
            kernels::analysis_step(current, filter.lowpass(), filter.highpass(), next, detail);
        else
            kernels::serial::analysis_step(current, filter.lowpass(), filter.highpass(), next, detail);
        current.swap(next);
    }
    out.scaling = std::move(current);
    return out;
}

std::vector<double> dwt_inverse(const WaveletDecomposition& decomp, const WaveletFilter& filter, Execution exec) {
    decomp.validate();
    std::vector<double> current = decomp.scaling;
    std::vector<double> next;
    for (int j = decomp.j0; j < decomp.J; ++j) {
        next.assign(current.size() * 2, 0.0);
        if (exec == Execution::parallel)
            kernels::synthesis_step(current, decomp.level(j), filter.lowpass(), filter.highpass(), next);
        else
            kernels::serial::synthesis_step(current, decomp.level(j), filter.lowpass(), filter.highpass(), next);
        current.swap(next);
    }
    return current;
}

}  // namespace testimation
