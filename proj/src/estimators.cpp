#include "testimation/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "testimation/error.hpp"
#include "testimation/map_core.hpp"

namespace testimation {

namespace {

// Non-truncated geometric prior at q = kappa/(kappa+1): log(1-q) + kappa log q.
double log_geometric_at_fitted_q(std::size_t kappa) {
    if (kappa == 0) return 0.0;
    const double k = static_cast<double>(kappa);
    return -std::log1p(k) + k * std::log(k / (k + 1.0));
}

double gamma_from_sum(double top_sum, std::size_t kappa, double sigma) {
    if (kappa == 0) return 0.0;
    return std::max(0.0, top_sum / (static_cast<double>(kappa) * sigma * sigma) - 1.0);
}

double profile_from_sum(double top_sum, std::size_t kappa, std::size_t n, double sigma) {
    if (kappa == 0) return 0.0;
    const double g = gamma_from_sum(top_sum, kappa, sigma);
    return log_geometric_at_fitted_q(kappa) - log_binomial(n, kappa) -
           0.5 * static_cast<double>(kappa) * std::log1p(g) + g * top_sum / (2.0 * sigma * sigma * (1.0 + g));
}

std::vector<double> sorted_squares_desc(std::span<const double> coeffs) {
    std::vector<double> sq(coeffs.size());
    std::transform(coeffs.begin(), coeffs.end(), sq.begin(), [](double v) { return v * v; });
    std::sort(sq.begin(), sq.end(), std::greater<>());
    return sq;
}

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameter("sigma must be positive and finite, got " + std::to_string(sigma));
}

double surviving_fraction(const WaveletDecomposition& d) {
    std::size_t kept = 0;
    for (const auto& level : d.details)
        kept += static_cast<std::size_t>(std::count_if(level.begin(), level.end(), [](double v) { return v != 0.0; }));
    const std::size_t total = d.detail_count();
    return total == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(total);
}

// Fits (q, gamma) on `coeffs` and overwrites them with the MAP hard-threshold estimate.
LevelSelection map_threshold(std::span<double> coeffs, double sigma, LevelFit& fit) {
    fit = fit_level(coeffs, sigma);
    LevelSelection sel;
    if (fit.gamma_hat == 0.0) {
        std::fill(coeffs.begin(), coeffs.end(), 0.0);
        return sel;
    }
    const PriorSpec prior = trunc_geom_prior(coeffs.size(), fit.q_hat, fit.gamma_hat);
    MapEstimate est = select_kappa(coeffs, sigma, prior);
    std::copy(est.mu_hat.begin(), est.mu_hat.end(), coeffs.begin());
    sel.kappa = est.kappa_hat;
    sel.threshold = est.threshold;
    return sel;
}

struct Prepared {
    WaveletDecomposition decomp;
    double sigma = 0.0;
};

Prepared prepare(std::span<const double> signal, const WaveletFilter& filter, int j0, std::optional<double> sigma) {
    Prepared p{dwt_forward(signal, filter, j0), 0.0};
    if (sigma) {
        check_sigma(*sigma);
        p.sigma = *sigma;
    } else {
        p.sigma = estimate_sigma_mad(p.decomp.level(p.decomp.J - 1));
        // A noiseless input leaves only transform round-off in the finest level.
        double peak = 0.0;
        for (double v : signal) peak = std::max(peak, std::abs(v));
        if (p.sigma <= k_roundoff_noise * peak) p.sigma = 0.0;
    }
    return p;
}

DenoiseResult degenerate_result(std::span<const double> signal, WaveletDecomposition decomp) {
    DenoiseResult res;
    res.f_hat.assign(signal.begin(), signal.end());
    res.surviving_fraction = surviving_fraction(decomp);
    res.decomposition_hat = std::move(decomp);
    res.degenerate_noise = true;
    return res;
}

DenoiseResult finish(DenoiseResult res, const WaveletFilter& filter) {
    res.f_hat = dwt_inverse(res.decomposition_hat, filter);
    res.surviving_fraction = surviving_fraction(res.decomposition_hat);
    return res;
}

}  // namespace

std::string_view to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::map_levelwise: return "map-levelwise";
        case EstimatorKind::map_global: return "map-global";
        case EstimatorKind::universal_hard: return "universal-hard";
    }
    return "unknown";
}

EstimatorKind parse_estimator(std::string_view s) {
    for (auto k : {EstimatorKind::map_levelwise, EstimatorKind::map_global, EstimatorKind::universal_hard})
        if (to_string(k) == s) return k;
    throw UnsupportedName("unknown estimator '" + std::string(s) + "'");
}

double estimate_sigma_mad(std::span<const double> finest_details) {
    if (finest_details.empty()) throw InvalidInput("estimate_sigma_mad: empty input");
    std::vector<double> a(finest_details.size());
    std::transform(finest_details.begin(), finest_details.end(), a.begin(), [](double v) { return std::abs(v); });
    const std::size_t mid = a.size() / 2;
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
    double median = a[mid];
    if (a.size() % 2 == 0) {
        const double lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    return median / 0.6745;
}

double fitted_gamma(std::span<const double> coeffs, double sigma, std::size_t kappa) {
    check_sigma(sigma);
    if (kappa > coeffs.size()) throw std::out_of_range("fitted_gamma: kappa exceeds the level size");
    const auto sq = sorted_squares_desc(coeffs);
    double s = 0.0;
    for (std::size_t k = 0; k < kappa; ++k) s += sq[k];
    return gamma_from_sum(s, kappa, sigma);
}

double fitted_q(std::size_t kappa) {
    const double k = static_cast<double>(kappa);
    return k / (k + 1.0);
}

double level_profile(std::span<const double> coeffs, double sigma, std::size_t kappa) {
    check_sigma(sigma);
    if (kappa > coeffs.size()) throw std::out_of_range("level_profile: kappa exceeds the level size");
    const auto sq = sorted_squares_desc(coeffs);
    double s = 0.0;
    for (std::size_t k = 0; k < kappa; ++k) s += sq[k];
    return profile_from_sum(s, kappa, coeffs.size(), sigma);
}

LevelFit fit_level(std::span<const double> coeffs, double sigma) {
    check_sigma(sigma);
    if (coeffs.empty()) throw InvalidInput("fit_level: empty coefficient block");
    const std::size_t n = coeffs.size();
    const auto sq = sorted_squares_desc(coeffs);

    LevelFit fit;
    fit.size = n;
    fit.kappa_hat = 0;
    fit.profile_loglik = profile_from_sum(0.0, 0, n, sigma);
    double top_sum = 0.0;
    double best_sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        top_sum += sq[k - 1];
        const double value = profile_from_sum(top_sum, k, n, sigma);
        if (value > fit.profile_loglik) {
            fit.profile_loglik = value;
            fit.kappa_hat = k;
            best_sum = top_sum;
        }
    }
    fit.q_hat = std::clamp(fitted_q(fit.kappa_hat), k_q_min, k_q_max);
    const double g = gamma_from_sum(best_sum, fit.kappa_hat, sigma);
    fit.gamma_hat = g > 0.0 ? std::clamp(g, k_gamma_min, k_gamma_max) : 0.0;
    return fit;
}

DenoiseResult denoise_levelwise(std::span<const double> signal, const WaveletFilter& filter, int j0,
                                std::optional<double> sigma) {
    Prepared p = prepare(signal, filter, j0, sigma);
    if (!(p.sigma > 0.0)) return degenerate_result(signal, std::move(p.decomp));

    DenoiseResult res;
    res.sigma_hat = p.sigma;
    res.decomposition_hat = std::move(p.decomp);
    for (int j = res.decomposition_hat.j0; j < res.decomposition_hat.J; ++j) {
        LevelFit fit;
        LevelSelection sel = map_threshold(res.decomposition_hat.level(j), res.sigma_hat, fit);
        fit.j = j;
        sel.j = j;
        res.level_fits.push_back(fit);
        res.selections.push_back(sel);
    }
    return finish(std::move(res), filter);
}

DenoiseResult denoise_global(std::span<const double> signal, const WaveletFilter& filter, int j0,
                             std::optional<double> sigma) {
    Prepared p = prepare(signal, filter, j0, sigma);
    if (!(p.sigma > 0.0)) return degenerate_result(signal, std::move(p.decomp));

    DenoiseResult res;
    res.sigma_hat = p.sigma;
    res.decomposition_hat = std::move(p.decomp);
    auto& d = res.decomposition_hat;

    std::vector<double> pooled;
    pooled.reserve(d.detail_count());
    for (const auto& level : d.details) pooled.insert(pooled.end(), level.begin(), level.end());

    LevelFit fit;
    LevelSelection sel = map_threshold(pooled, res.sigma_hat, fit);
    res.level_fits.push_back(fit);
    res.selections.push_back(sel);

    auto it = pooled.begin();
    for (auto& level : d.details) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(level.size()), level.begin());
        it += static_cast<std::ptrdiff_t>(level.size());
    }
    return finish(std::move(res), filter);
}

DenoiseResult denoise_universal_hard(std::span<const double> signal, const WaveletFilter& filter, int j0,
                                     std::optional<double> sigma) {
    Prepared p = prepare(signal, filter, j0, sigma);
    if (!(p.sigma > 0.0)) return degenerate_result(signal, std::move(p.decomp));

    DenoiseResult res;
    res.sigma_hat = p.sigma;
    res.decomposition_hat = std::move(p.decomp);
    const double lambda = p.sigma * std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
    for (int j = res.decomposition_hat.j0; j < res.decomposition_hat.J; ++j) {
        LevelSelection sel{j, 0, lambda};
        for (double& v : res.decomposition_hat.level(j)) {
            if (std::abs(v) > lambda)
                ++sel.kappa;
            else
                v = 0.0;
        }
        res.selections.push_back(sel);
    }
    return finish(std::move(res), filter);
}

DenoiseResult denoise(EstimatorKind kind, std::span<const double> signal, const WaveletFilter& filter, int j0,
                      std::optional<double> sigma) {
    switch (kind) {
        case EstimatorKind::map_levelwise: return denoise_levelwise(signal, filter, j0, sigma);
        case EstimatorKind::map_global: return denoise_global(signal, filter, j0, sigma);
        case EstimatorKind::universal_hard: return denoise_universal_hard(signal, filter, j0, sigma);
    }
    throw InvalidParameter("unknown estimator kind");
}

double weighted_level_risk(const WaveletDecomposition& decomp_hat, const WaveletDecomposition& decomp_true, double m) {
    if (!(m >= 0.0)) throw InvalidParameter("derivative order m must be non-negative");
    decomp_hat.validate();
    decomp_true.validate();
    if (decomp_hat.j0 != decomp_true.j0 || decomp_hat.J != decomp_true.J)
        throw InvalidInput("weighted_level_risk: decompositions have different shapes");

    auto sq_error = [](std::span<const double> a, std::span<const double> b) {
        double e = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) e += (a[k] - b[k]) * (a[k] - b[k]);
        return e;
    };
    auto weight = [m](int j) { return std::exp2(2.0 * m * static_cast<double>(j)); };

    double risk = weight(decomp_hat.j0 - 1) * sq_error(decomp_hat.scaling, decomp_true.scaling);
    for (int j = decomp_hat.j0; j < decomp_hat.J; ++j)
        risk += weight(j) * sq_error(decomp_hat.level(j), decomp_true.level(j));
    return risk;
}

}  // namespace testimation
