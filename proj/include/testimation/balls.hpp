#pragma once

// Strong l_p-balls, their dense / sparse / super-sparse risk zones, the
// least-favorable mean configurations and Monte Carlo risk of the MAP
// estimator over them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "testimation/map_core.hpp"
#include "testimation/parallel.hpp"

namespace testimation {

enum class Zone { dense1, dense2, sparse3, supersparse4 };

std::string_view to_string(Zone z);
/// Parses "dense-1", "dense-2", "sparse-3", "supersparse-4".
Zone parse_zone(std::string_view s);

/// ||mu||_p <= C_n with C_n = n^{1/p} sigma eta (sigma eta for p = inf).
struct LpBallSpec {
    double p = 2.0;  ///< in (0, inf]; use std::numeric_limits<double>::infinity() for l_inf
    double eta = 1.0;
    std::size_t n = 1;
    double sigma = 1.0;

    double radius() const;
    /// eta^p, the quantity the zone boundaries are stated in.
    double eta_p() const;
    bool contains(std::span<const double> mu, double rel_tol = 1e-12) const;
    void validate() const;
};

/// l_p (quasi-)norm, p in (0, inf].
double lp_norm(std::span<const double> mu, double p);

/// exp(-9/2), the zone boundary when no lower bound on gamma is known.
double default_alpha();
/// exp{-8 (gamma_minus + 3/4)^2}.
double alpha_for_gamma(double gamma_minus);

Zone zone_classify(const LpBallSpec& ball, double alpha);

/// Order of the minimax risk in the given zone (no sharp constants).
double minimax_rate(const LpBallSpec& ball, Zone zone);
double minimax_rate(const LpBallSpec& ball, double alpha);

/// Dense zones: the constant vector eta sigma. Sparse zone: floor(n eta^p / (2 log eta^{-p})^{p/2})
/// spikes of height sigma sqrt(2 log eta^{-p}). Super-sparse zone: the single spike (C_n, 0, ..., 0).
std::vector<double> least_favorable(const LpBallSpec& ball, Zone zone);

struct RiskEstimate {
    double mean_sq_error = 0.0;
    double std_error = 0.0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;

    bool operator==(const RiskEstimate&) const = default;
};

/// Averages ||mu_hat - mu||^2 of select_kappa over `reps` noise draws. Replication r
/// draws from derive_seed(seed, {r}), so the result does not depend on scheduling.
RiskEstimate monte_carlo_risk(std::span<const double> mu, double sigma, const PriorSpec& prior, std::size_t reps,
                              std::uint64_t seed, Execution exec = Execution::parallel);

}  // namespace testimation
