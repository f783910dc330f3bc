#pragma once

// MAP "testimation" for the Gaussian sequence model y_i = mu_i + sigma z_i.
//
// A prior pi(kappa) on the number of non-zero means, a uniform prior over the
// supports of a given size and N(0, gamma sigma^2) for the non-zero entries
// lead to a posterior whose mode is a hard-thresholding rule. select_kappa
// finds it in O(n log n) by minimizing the residual sum of squares plus the
// complexity penalty over kappa = 0..n.

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace testimation {

/// Prior on the number of non-zero entries plus the variance ratio
/// gamma = tau^2 / sigma^2. Probabilities are kept in log domain so that
/// pi(kappa) > 0 holds even where the linear value underflows.
class PriorSpec {
public:
    /// Normalizes arbitrary finite log-weights for kappa = 0..n (n = size - 1).
    static PriorSpec from_log_weights(std::vector<double> log_weights, double gamma);

    std::size_t n() const { return log_pi_.size() - 1; }
    double gamma() const { return gamma_; }
    double log_pi(std::size_t kappa) const { return log_pi_.at(kappa); }
    std::span<const double> log_pi() const { return log_pi_; }

private:
    PriorSpec(std::vector<double> log_pi, double gamma) : log_pi_(std::move(log_pi)), gamma_(gamma) {}

    std::vector<double> log_pi_;
    double gamma_;
};

/// Truncated geometric prior TrGeom(1 - q): pi(kappa) = (1 - q) q^kappa / (1 - q^{n+1}).
PriorSpec trunc_geom_prior(std::size_t n, double q, double gamma);

/// Prior induced by Bin(n, p) non-zero indicators.
PriorSpec binomial_prior(std::size_t n, double p, double gamma);

/// Observations and their noise level.
class NoisySequence {
public:
    NoisySequence(std::vector<double> y, double sigma);

    std::span<const double> y() const { return y_; }
    double sigma() const { return sigma_; }
    std::size_t size() const { return y_.size(); }

private:
    std::vector<double> y_;
    double sigma_;
};

struct MapEstimate {
    std::size_t kappa_hat = 0;
    /// |y|_(kappa_hat); +inf when nothing is kept.
    double threshold = std::numeric_limits<double>::infinity();
    std::vector<double> mu_hat;
    /// Residual-plus-penalty for every kappa = 0..n.
    std::vector<double> objective;
};

/// log C(n, k) via log-gamma.
double log_binomial(std::size_t n, std::size_t k);

/// Bayes factor of H0: mu_i = 0, sqrt(1 + gamma) exp{-y^2 / (2 sigma^2 (1 + 1/gamma))}.
double bayes_factor(double y, double sigma, double gamma);
double log_bayes_factor(double y, double sigma, double gamma);

/// 2 sigma^2 (1 + 1/gamma) [log C(n, kappa) - log pi(kappa) + (kappa/2) log(1 + gamma)].
/// Throws std::out_of_range for kappa > n.
double complexity_penalty(std::size_t kappa, const PriorSpec& prior, double sigma);

/// Posterior mode of the support size and the induced hard-threshold estimate.
/// Ties in |y| are broken by lower index, ties in the objective by smaller kappa.
MapEstimate select_kappa(const NoisySequence& seq, const PriorSpec& prior);

/// Convenience overload that avoids copying y into a NoisySequence.
MapEstimate select_kappa(std::span<const double> y, double sigma, const PriorSpec& prior);

/// Unnormalized log posterior of an indicator vector:
/// -log C(n, kappa) + log pi(kappa) - sum_{x_i = 1} log B_i. Brute-force oracle only.
double posterior_log_score(std::span<const int> x, const NoisySequence& seq, const PriorSpec& prior);

struct LogBinomBounds {
    double lower;  ///< kappa log(n / kappa)
    double upper;  ///< kappa log(n e / kappa)
    double exact;  ///< log C(n, kappa)
};

/// Requires n >= 2 and 1 <= kappa <= n - 1.
LogBinomBounds log_binom_bounds(std::size_t n, std::size_t kappa);

struct PriorConditionReport {
    bool empty_mass;   ///< pi(0) >= n^{-c1 n^{-beta}}
    bool sparse_mass;  ///< pi(kappa) >= (kappa/n)^{c2 kappa}, kappa = 1..floor(alpha n)
    bool full_mass;    ///< pi(n) >= e^{-c0 n}

    bool all() const { return empty_mass && sparse_mass && full_mass; }
};

/// Evaluates the three adaptivity conditions on the prior in log domain.
PriorConditionReport check_prior_conditions(const PriorSpec& prior, double beta, double c0, double c1,
                                            double c2, double alpha);

}  // namespace testimation
