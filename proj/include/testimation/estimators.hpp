#pragma once

// Wavelet-domain MAP denoisers: empirical-Bayes fitting of (q, gamma) per
// level, the level-wise and global estimators, a universal hard-threshold
// baseline and the derivative-weighted coefficient risk.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "testimation/wavelet.hpp"

namespace testimation {

/// Fitted TrGeom(1 - q) / gamma hyperparameters for one block of coefficients.
struct LevelFit {
    int j = -1;  ///< resolution level; -1 when the block pools all detail levels
    std::size_t size = 0;
    double q_hat = 0.5;
    double gamma_hat = 0.0;  ///< 0 marks a level with no evidence of signal
    std::size_t kappa_hat = 0;
    double profile_loglik = 0.0;
};

/// Outcome of the final thresholding step on one block.
struct LevelSelection {
    int j = -1;
    std::size_t kappa = 0;
    double threshold = std::numeric_limits<double>::infinity();
};

struct DenoiseResult {
    std::vector<double> f_hat;
    WaveletDecomposition decomposition_hat;
    std::vector<LevelFit> level_fits;
    std::vector<LevelSelection> selections;
    double sigma_hat = 0.0;
    double surviving_fraction = 0.0;
    /// sigma_hat == 0: nothing can be tested and the input is returned unchanged.
    bool degenerate_noise = false;
};

enum class EstimatorKind { map_levelwise, map_global, universal_hard };

std::string_view to_string(EstimatorKind k);
/// "map-levelwise", "map-global", "universal-hard".
EstimatorKind parse_estimator(std::string_view s);

/// Bounds applied to a non-zero fitted gamma before it enters the penalty.
inline constexpr double k_gamma_min = 1e-3;
inline constexpr double k_gamma_max = 1e3;
/// Bounds keeping q_hat inside (0, 1); only bind when kappa_hat = 0 or the block is huge.
inline constexpr double k_q_min = 1e-6;
inline constexpr double k_q_max = 1.0 - 1e-6;

/// An estimated sigma at or below this multiple of max|signal| is transform
/// round-off and is treated as zero noise.
inline constexpr double k_roundoff_noise = 1e-12;

/// median(|d|) / 0.6745 for coefficients whose noise sd equals the sample sd.
double estimate_sigma_mad(std::span<const double> finest_details);

/// max{0, S_kappa / (kappa sigma^2) - 1}, S_kappa the sum of the kappa largest squares; 0 at kappa = 0.
double fitted_gamma(std::span<const double> coeffs, double sigma, std::size_t kappa);
/// kappa / (kappa + 1).
double fitted_q(std::size_t kappa);

/// Augmented log-likelihood at kappa with gamma and q profiled out (non-truncated
/// geometric prior, additive constant dropped). Independent O(n log n) evaluator.
double level_profile(std::span<const double> coeffs, double sigma, std::size_t kappa);

/// Maximizes the profile over kappa = 0..n and reports the fitted (q, gamma).
LevelFit fit_level(std::span<const double> coeffs, double sigma);

DenoiseResult denoise_levelwise(std::span<const double> signal, const WaveletFilter& filter, int j0,
                                std::optional<double> sigma = std::nullopt);

DenoiseResult denoise_global(std::span<const double> signal, const WaveletFilter& filter, int j0,
                             std::optional<double> sigma = std::nullopt);

/// Hard threshold at sigma_hat sqrt(2 log n) on all detail levels.
DenoiseResult denoise_universal_hard(std::span<const double> signal, const WaveletFilter& filter, int j0,
                                     std::optional<double> sigma = std::nullopt);

DenoiseResult denoise(EstimatorKind kind, std::span<const double> signal, const WaveletFilter& filter, int j0,
                      std::optional<double> sigma = std::nullopt);

/// sum_j 2^{2mj} sum_k (theta_hat_jk - theta_jk)^2, the scaling block weighted at level j0 - 1.
double weighted_level_risk(const WaveletDecomposition& decomp_hat, const WaveletDecomposition& decomp_true,
                           double m);

}  // namespace testimation
