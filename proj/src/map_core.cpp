#include "testimation/map_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "testimation/error.hpp"

namespace testimation {

namespace {

double log_sum_exp(std::span<const double> v) {
    const double top = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - top);
    return top + std::log(acc);
}

void check_sigma_gamma(double sigma, double gamma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameter("sigma must be positive and finite, got " + std::to_string(sigma));
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InvalidParameter("gamma must be positive and finite, got " + std::to_string(gamma));
}

// Indices ordered by |y| descending, equal magnitudes by ascending index.
std::vector<std::size_t> magnitude_order(std::span<const double> y) {
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(y[a]) > std::abs(y[b]); });
    return order;
}

}  // namespace

PriorSpec PriorSpec::from_log_weights(std::vector<double> log_weights, double gamma) {
    if (log_weights.size() < 2) throw InvalidParameter("prior needs n >= 1 (at least two weights)");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InvalidParameter("gamma must be positive and finite, got " + std::to_string(gamma));
    for (double w : log_weights)
        if (!std::isfinite(w)) throw InvalidParameter("prior log-weights must be finite (pi(kappa) > 0)");
    const double norm = log_sum_exp(log_weights);
    for (double& w : log_weights) w -= norm;
    return PriorSpec(std::move(log_weights), gamma);
}

PriorSpec trunc_geom_prior(std::size_t n, double q, double gamma) {
    if (n < 1) throw InvalidParameter("truncated geometric prior needs n >= 1");
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q must lie in (0, 1), got " + std::to_string(q));
    const double log_q = std::log(q);
    // log(1 - q^{n+1}) evaluated without cancellation
    const double log_tail = std::log1p(-std::exp(static_cast<double>(n + 1) * log_q));
    const double log_head = std::log1p(-q);
    std::vector<double> lp(n + 1);
    for (std::size_t k = 0; k <= n; ++k) lp[k] = static_cast<double>(k) * log_q + log_head - log_tail;
    return PriorSpec::from_log_weights(std::move(lp), gamma);
}

PriorSpec binomial_prior(std::size_t n, double p, double gamma) {
    if (n < 1) throw InvalidParameter("binomial prior needs n >= 1");
    if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("p must lie in (0, 1), got " + std::to_string(p));
    std::vector<double> lp(n + 1);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        lp[k] = log_binomial(n, k) + kd * std::log(p) + (nd - kd) * std::log1p(-p);
    }
    return PriorSpec::from_log_weights(std::move(lp), gamma);
}

NoisySequence::NoisySequence(std::vector<double> y, double sigma) : y_(std::move(y)), sigma_(sigma) {
    if (y_.empty()) throw InvalidInput("noisy sequence must be non-empty");
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_))
        throw InvalidParameter("sigma must be positive and finite, got " + std::to_string(sigma_));
    for (double v : y_)
        if (!std::isfinite(v)) throw InvalidInput("noisy sequence contains a non-finite entry");
}

double log_binomial(std::size_t n, std::size_t k) {
    if (k > n) throw std::out_of_range("log_binomial: k > n");
    if (k == 0 || k == n) return 0.0;
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double log_bayes_factor(double y, double sigma, double gamma) {
    check_sigma_gamma(sigma, gamma);
    return 0.5 * std::log1p(gamma) - y * y / (2.0 * sigma * sigma * (1.0 + 1.0 / gamma));
}

double bayes_factor(double y, double sigma, double gamma) { return std::exp(log_bayes_factor(y, sigma, gamma)); }

double complexity_penalty(std::size_t kappa, const PriorSpec& prior, double sigma) {
    if (kappa > prior.n())
        throw std::out_of_range("complexity_penalty: kappa " + std::to_string(kappa) + " exceeds n " +
                                std::to_string(prior.n()));
    const double gamma = prior.gamma();
    check_sigma_gamma(sigma, gamma);
    const double scale = 2.0 * sigma * sigma * (1.0 + 1.0 / gamma);
    return scale * (log_binomial(prior.n(), kappa) - prior.log_pi(kappa) +
                    0.5 * static_cast<double>(kappa) * std::log1p(gamma));
}

MapEstimate select_kappa(std::span<const double> y, double sigma, const PriorSpec& prior) {
    const std::size_t n = y.size();
    if (n != prior.n())
        throw InvalidInput("dimension mismatch: sequence has " + std::to_string(n) + " entries, prior covers n = " +
                           std::to_string(prior.n()));
    check_sigma_gamma(sigma, prior.gamma());

    const auto order = magnitude_order(y);

    // suffix[k] = sum_{i > k} y_(i)^2, accumulated from the smallest magnitudes up
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + y[order[k]] * y[order[k]];

    MapEstimate est;
    est.objective.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) est.objective[k] = suffix[k] + complexity_penalty(k, prior, sigma);

    est.kappa_hat = 0;
    for (std::size_t k = 1; k <= n; ++k)
        if (est.objective[k] < est.objective[est.kappa_hat]) est.kappa_hat = k;

    est.mu_hat.assign(n, 0.0);
    for (std::size_t k = 0; k < est.kappa_hat; ++k) est.mu_hat[order[k]] = y[order[k]];
    if (est.kappa_hat > 0) est.threshold = std::abs(y[order[est.kappa_hat - 1]]);
    return est;
}

MapEstimate select_kappa(const NoisySequence& seq, const PriorSpec& prior) {
    return select_kappa(seq.y(), seq.sigma(), prior);
}

double posterior_log_score(std::span<const int> x, const NoisySequence& seq, const PriorSpec& prior) {
    if (x.size() != seq.size()) throw InvalidInput("indicator vector length does not match the sequence");
    if (seq.size() != prior.n()) throw InvalidInput("sequence length does not match the prior dimension");
    std::size_t kappa = 0;
    double log_bf = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0 && x[i] != 1) throw InvalidInput("indicator vector must be binary");
        if (x[i] == 1) {
            ++kappa;
            log_bf += log_bayes_factor(seq.y()[i], seq.sigma(), prior.gamma());
        }
    }
    return -log_binomial(prior.n(), kappa) + prior.log_pi(kappa) - log_bf;
}

LogBinomBounds log_binom_bounds(std::size_t n, std::size_t kappa) {
    if (n < 2 || kappa < 1 || kappa > n - 1)
        throw InvalidInput("log_binom_bounds requires n >= 2 and 1 <= kappa <= n - 1");
    const double ratio = static_cast<double>(n) / static_cast<double>(kappa);
    const double kd = static_cast<double>(kappa);
    return {kd * std::log(ratio), kd * (std::log(ratio) + 1.0), log_binomial(n, kappa)};
}

PriorConditionReport check_prior_conditions(const PriorSpec& prior, double beta, double c0, double c1, double c2,
                                            double alpha) {
    const std::size_t n = prior.n();
    const double nd = static_cast<double>(n);

    PriorConditionReport r{};
    r.empty_mass = prior.log_pi(0) >= -c1 * std::pow(nd, -beta) * std::log(nd);
    r.full_mass = prior.log_pi(n) >= -c0 * nd;

    r.sparse_mass = true;
    const auto k_max = static_cast<std::size_t>(std::floor(alpha * nd));
    for (std::size_t k = 1; k <= std::min(k_max, n); ++k) {
        const double kd = static_cast<double>(k);
        if (prior.log_pi(k) < c2 * kd * std::log(kd / nd)) {
            r.sparse_mass = false;
            break;
        }
    }
    return r;
}

}  // namespace testimation
