#pragma once

// Orthonormal periodized discrete wavelet transform.
//
// Coefficients use the unit-norm basis convention, so white noise of standard
// deviation sigma on the samples stays white with standard deviation sigma
// on every coefficient.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "testimation/parallel.hpp"

namespace testimation {

class WaveletFilter {
public:
    /// Builds the quadrature-mirror pair from scaling taps and validates
    /// sum h = sqrt(2) and sum h^2 = 1 to 1e-10.
    static WaveletFilter from_lowpass(std::string name, std::vector<double> lowpass);

    const std::string& name() const { return name_; }
    std::span<const double> lowpass() const { return lowpass_; }
    /// highpass[k] = (-1)^k lowpass[L - 1 - k]
    std::span<const double> highpass() const { return highpass_; }
    std::size_t length() const { return lowpass_.size(); }

private:
    WaveletFilter() = default;

    std::string name_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
};

/// haar, db2..db10, coif1..coif5. Throws UnsupportedName otherwise.
WaveletFilter filter_bank(std::string_view name);
std::vector<std::string> filter_names();

/// Scaling coefficients phi_{j0,k} (indexed as level j0 - 1) and detail
/// coefficients for levels j0..J-1, level j holding 2^j entries.
struct WaveletDecomposition {
    int j0 = 0;
    int J = 0;
    std::vector<double> scaling;
    std::vector<std::vector<double>> details;  ///< details[j - j0]

    std::span<const double> level(int j) const { return details.at(static_cast<std::size_t>(j - j0)); }
    std::span<double> level(int j) { return details.at(static_cast<std::size_t>(j - j0)); }

    std::size_t size() const;
    std::size_t detail_count() const;
    double energy() const;

    /// Throws InvalidInput unless every level has the size implied by (j0, J).
    void validate() const;

    /// Same shape, all coefficients zero.
    static WaveletDecomposition zeros(int j0, int J);
};

/// log2(n) when n is a power of two, -1 otherwise.
int exact_log2(std::size_t n);

WaveletDecomposition dwt_forward(std::span<const double> signal, const WaveletFilter& filter, int j0,
                                 Execution exec = Execution::parallel);

std::vector<double> dwt_inverse(const WaveletDecomposition& decomp, const WaveletFilter& filter,
                                Execution exec = Execution::parallel);

namespace kernels {

/// One periodized analysis step: approx[k] = sum_m h[m] x[(2k + m) mod N],
/// detail[k] = sum_m g[m] x[(2k + m) mod N].
void analysis_step(std::span<const double> input, std::span<const double> lowpass, std::span<const double> highpass,
                   std::span<double> approx, std::span<double> detail);

/// Adjoint of analysis_step, overwriting `output`.
void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<const double> lowpass,
                    std::span<const double> highpass, std::span<double> output);

namespace serial {
void analysis_step(std::span<const double> input, std::span<const double> lowpass, std::span<const double> highpass,
                   std::span<double> approx, std::span<double> detail);
void synthesis_step(std::span<const double> approx, std::span<const double> detail, std::span<const double> lowpass,
                    std::span<const double> highpass, std::span<double> output);
}  // namespace serial

}  // namespace kernels

}  // namespace testimation
