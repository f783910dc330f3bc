#include "testimation/balls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "testimation/error.hpp"
#include "testimation/rng.hpp"

namespace testimation {

std::string_view to_string(Zone z) {
    switch (z) {
        case Zone::dense1: return "dense-1";
        case Zone::dense2: return "dense-2";
        case Zone::sparse3: return "sparse-3";
        case Zone::supersparse4: return "supersparse-4";
    }
    return "unknown";
}

Zone parse_zone(std::string_view s) {
    for (Zone z : {Zone::dense1, Zone::dense2, Zone::sparse3, Zone::supersparse4})
        if (to_string(z) == s) return z;
    throw InvalidParameter("unknown zone '" + std::string(s) + "'");
}

void LpBallSpec::validate() const {
    if (!(p > 0.0)) throw InvalidParameter("p must be positive");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("eta must be positive and finite");
    if (n < 1) throw InvalidParameter("ball dimension must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be positive and finite");
}

double LpBallSpec::radius() const {
    if (std::isinf(p)) return sigma * eta;
    return std::pow(static_cast<double>(n), 1.0 / p) * sigma * eta;
}

double LpBallSpec::eta_p() const { return std::pow(eta, p); }

double lp_norm(std::span<const double> mu, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : mu) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (double v : mu) acc += std::pow(std::abs(v), p);
    return std::pow(acc, 1.0 / p);
}

bool LpBallSpec::contains(std::span<const double> mu, double rel_tol) const {
    if (mu.size() != n) return false;
    return lp_norm(mu, p) <= radius() * (1.0 + rel_tol);
}

double default_alpha() { return std::exp(-4.5); }

double alpha_for_gamma(double gamma_minus) {
    const double c = 8.0 * (gamma_minus + 0.75) * (gamma_minus + 0.75);
    return std::exp(-c);
}

Zone zone_classify(const LpBallSpec& ball, double alpha) {
    ball.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
    const double ep = ball.eta_p();
    if (ep > alpha) return Zone::dense1;
    if (ball.p >= 2.0) return Zone::dense2;
    const double nd = static_cast<double>(ball.n);
    const double sparse_floor = std::pow(2.0 * std::log(nd), ball.p / 2.0) / nd;
    return ep >= sparse_floor ? Zone::sparse3 : Zone::supersparse4;
}

double minimax_rate(const LpBallSpec& ball, Zone zone) {
    ball.validate();
    const double nd = static_cast<double>(ball.n);
    const double s2 = ball.sigma * ball.sigma;
    switch (zone) {
        case Zone::dense1: return nd * s2;
        case Zone::dense2: return s2 * nd * ball.eta * ball.eta;
        case Zone::sparse3: {
            const double ep = ball.eta_p();
            return s2 * nd * ep * std::pow(2.0 * std::log(1.0 / ep), 1.0 - ball.p / 2.0);
        }
        case Zone::supersparse4: return s2 * std::pow(nd, 2.0 / ball.p) * ball.eta * ball.eta;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double minimax_rate(const LpBallSpec& ball, double alpha) { return minimax_rate(ball, zone_classify(ball, alpha)); }

std::vector<double> least_favorable(const LpBallSpec& ball, Zone zone) {
    ball.validate();
    std::vector<double> mu(ball.n, 0.0);
    switch (zone) {
        case Zone::dense1:
        case Zone::dense2:
            mu.assign(ball.n, ball.eta * ball.sigma);
            break;
        case Zone::sparse3: {
            if (std::isinf(ball.p) || ball.p >= 2.0) throw InvalidParameter("sparse zone requires p < 2");
            const double ep = ball.eta_p();
            if (!(ep < 1.0)) throw InvalidParameter("sparse zone requires eta^p < 1");
            const double log_term = 2.0 * std::log(1.0 / ep);
            const double count = static_cast<double>(ball.n) * ep / std::pow(log_term, ball.p / 2.0);
            const auto k = static_cast<std::size_t>(std::max(1.0, std::floor(count)));
            const double height = std::min(ball.sigma * std::sqrt(log_term),
                                           ball.radius() / std::pow(static_cast<double>(k), 1.0 / ball.p));
            for (std::size_t i = 0; i < std::min(k, ball.n); ++i) mu[i] = height;
            break;
        }
        case Zone::supersparse4:
            mu[0] = ball.radius();
            break;
    }
    return mu;
}

RiskEstimate monte_carlo_risk(std::span<const double> mu, double sigma, const PriorSpec& prior, std::size_t reps,
                              std::uint64_t seed, Execution exec) {
    if (reps < 1) throw InvalidParameter("monte_carlo_risk needs at least one replication");
    if (mu.size() != prior.n()) throw InvalidInput("mean vector length does not match the prior dimension");
    if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");

    const std::size_t n = mu.size();
    std::vector<double> loss(reps, 0.0);

    auto one_replication = [&](std::size_t r) {
        Engine engine(derive_seed(seed, {r}));
        std::vector<double> y(n);
        fill_standard_normal(engine, y);
        for (std::size_t i = 0; i < n; ++i) y[i] = mu[i] + sigma * y[i];
        const MapEstimate est = select_kappa(y, sigma, prior);
        double l = 0.0;
        for (std::size_t i = 0; i < n; ++i) l += (est.mu_hat[i] - mu[i]) * (est.mu_hat[i] - mu[i]);
        loss[r] = l;
    };

    if (exec == Execution::parallel) {
        const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t r = 0; r < count; ++r) one_replication(static_cast<std::size_t>(r));
    } else {
        for (std::size_t r = 0; r < reps; ++r) one_replication(r);
    }

    // Reduce in replication order so both paths agree bit for bit.
    double sum = 0.0;
    for (double l : loss) sum += l;
    const double mean = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (double l : loss) ss += (l - mean) * (l - mean);
    const double se =
        reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) / std::sqrt(static_cast<double>(reps)) : 0.0;
    return {mean, se, reps, seed};
}

}  // namespace testimation
