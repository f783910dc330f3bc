#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "testimation/error.hpp"
#include "testimation/map_core.hpp"

using namespace testimation;
using Catch::Approx;

namespace {

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

// log C(n, k) as a sum of logs, independent of lgamma.
double log_choose_naive(std::size_t n, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
    return s;
}

// O(n^2) objective: pick the k largest |y| by repeated scans, sum the rest.
std::vector<double> naive_objective(const std::vector<double>& y, double sigma, double q, double gamma) {
    const std::size_t n = y.size();
    const double log_norm = std::log((1.0 - q) / (1.0 - std::pow(q, static_cast<double>(n + 1))));
    std::vector<double> obj(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        std::vector<bool> taken(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t best = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i] && (best == n || std::abs(y[i]) > std::abs(y[best]))) best = i;
            taken[best] = true;
        }
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) rss += y[i] * y[i];
        const double log_pi = static_cast<double>(k) * std::log(q) + log_norm;
        obj[k] = rss + 2.0 * sigma * sigma * (1.0 + 1.0 / gamma) *
                           (log_choose_naive(n, k) - log_pi + 0.5 * static_cast<double>(k) * std::log(1.0 + gamma));
    }
    return obj;
}

}  // namespace

TEST_CASE("truncated geometric prior", "[prior]") {
    SECTION("n = 1") {
        const auto p = trunc_geom_prior(1, 0.5, 1.0);
        CHECK(std::exp(p.log_pi(0)) == Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(std::exp(p.log_pi(1)) == Approx(1.0 / 3.0).epsilon(1e-14));
    }
    SECTION("n = 3 gives (8,4,2,1)/15") {
        const auto p = trunc_geom_prior(3, 0.5, 1.0);
        const double expected[] = {8.0 / 15, 4.0 / 15, 2.0 / 15, 1.0 / 15};
        for (std::size_t k = 0; k <= 3; ++k) CHECK(std::exp(p.log_pi(k)) == Approx(expected[k]).epsilon(1e-14));
    }
    SECTION("normalized and finite for large n") {
        const auto p = trunc_geom_prior(1 << 20, 0.9, 2.0);
        double total = 0.0;
        for (double lp : p.log_pi()) {
            REQUIRE(std::isfinite(lp));
            total += std::exp(lp);
        }
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
    SECTION("n = 1024, q = 0.3 satisfies the adaptivity conditions with c = 2") {
        const auto r = check_prior_conditions(trunc_geom_prior(1024, 0.3, 1.0), 0.0, 2.0, 2.0, 2.0, std::exp(-4.5));
        CHECK(r.empty_mass);
        CHECK(r.sparse_mass);
        CHECK(r.full_mass);
    }
    SECTION("invalid parameters") {
        CHECK_THROWS_AS(trunc_geom_prior(10, 0.0, 1.0), InvalidParameter);
        CHECK_THROWS_AS(trunc_geom_prior(10, 1.0, 1.0), InvalidParameter);
        CHECK_THROWS_AS(trunc_geom_prior(0, 0.5, 1.0), InvalidParameter);
        CHECK_THROWS_AS(trunc_geom_prior(10, 0.5, 0.0), InvalidParameter);
    }
}

TEST_CASE("prior built from log weights stays positive past underflow", "[prior]") {
    const std::size_t n = 1000;
    std::vector<double> w(n + 1, -2.0 * n - std::log(static_cast<double>(n)));
    w[0] = 0.0;
    const auto p = PriorSpec::from_log_weights(w, 1.0);
    CHECK(std::exp(p.log_pi(n)) == 0.0);  // underflows linearly
    CHECK(std::isfinite(p.log_pi(n)));
    CHECK_THROWS_AS(PriorSpec::from_log_weights({0.0, -INFINITY}, 1.0), InvalidParameter);
}

TEST_CASE("bayes factor", "[bayes]") {
    CHECK(bayes_factor(0.0, 1.0, 3.0) == Approx(2.0).epsilon(1e-15));
    CHECK(bayes_factor(0.0, 5.0, 0.21) == Approx(1.1).epsilon(1e-15));
    // sqrt(2) e^{-1}
    CHECK(bayes_factor(2.0, 1.0, 1.0) == Approx(0.520260095022889).epsilon(1e-13));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 1000; ++i) {
        double a = u(gen);
        double b = u(gen);
        if (std::abs(a) > std::abs(b)) std::swap(a, b);
        if (std::abs(a) == std::abs(b)) continue;
        CHECK(bayes_factor(a, 1.3, 2.0) > bayes_factor(b, 1.3, 2.0));
    }
    CHECK_THROWS_AS(bayes_factor(1.0, 0.0, 1.0), InvalidParameter);
}

TEST_CASE("complexity penalty", "[penalty]") {
    SECTION("kappa = 0 reduces to the prior mass at zero") {
        const auto p = trunc_geom_prior(50, 0.4, 2.0);
        CHECK(complexity_penalty(0, p, 1.5) == Approx(2.0 * 2.25 * 1.5 * -p.log_pi(0)).epsilon(1e-14));
    }
    SECTION("n = 2, kappa = 1, uniform prior, gamma = 3") {
        const auto p = PriorSpec::from_log_weights({0.0, 0.0, 0.0}, 3.0);
        // 2 (4/3) [log 2 + log 3 + 0.5 log 4]
        CHECK(complexity_penalty(1, p, 1.0) == Approx(6.626417732768001).epsilon(1e-13));
    }
    SECTION("kappa = n with pi(n) = e^{-n} is linear in n") {
        const std::size_t n = 6;
        const double gamma = 2.0;
        std::vector<double> w(n + 1, std::log((1.0 - std::exp(-6.0)) / 6.0));
        w[n] = -6.0;
        const auto p = PriorSpec::from_log_weights(w, gamma);
        const double expected = 2.0 * (1.0 + 1.0 / gamma) * (6.0 + 3.0 * std::log(1.0 + gamma));
        CHECK(complexity_penalty(n, p, 1.0) == Approx(expected).epsilon(1e-12));
    }
    SECTION("out of range") {
        CHECK_THROWS_AS(complexity_penalty(4, trunc_geom_prior(3, 0.5, 1.0), 1.0), std::out_of_range);
    }
}

TEST_CASE("select_kappa", "[select]") {
    SECTION("zero observations keep nothing") {
        const auto est = select_kappa(NoisySequence(std::vector<double>(64, 0.0), 1.0), trunc_geom_prior(64, 0.5, 3.0));
        CHECK(est.kappa_hat == 0);
        CHECK(std::isinf(est.threshold));
        CHECK(std::all_of(est.mu_hat.begin(), est.mu_hat.end(), [](double v) { return v == 0.0; }));
    }
    SECTION("n = 8, seed 42 matches the naive objective") {
        const auto y = normal_draws(8, 42);
        const auto est = select_kappa(NoisySequence(y, 1.0), trunc_geom_prior(8, 0.5, 3.0));
        const auto naive = naive_objective(y, 1.0, 0.5, 3.0);
        const auto best =
            static_cast<std::size_t>(std::min_element(naive.begin(), naive.end()) - naive.begin());
        CHECK(est.kappa_hat == best);
        for (std::size_t k = 0; k <= 8; ++k) CHECK(est.objective[k] == Approx(naive[k]).epsilon(1e-9));
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(select_kappa(NoisySequence({1.0, 2.0}, 1.0), trunc_geom_prior(3, 0.5, 1.0)), InvalidInput);
    }
    SECTION("ties in |y| resolve to the lower index") {
        const std::vector<double> y{1.0, -9.0, 9.0, 0.5};
        // prior mass concentrated on kappa = 1 forces a cut between the tied entries
        const auto prior = PriorSpec::from_log_weights({-1000.0, 0.0, -1000.0, -1000.0, -1000.0}, 1.0);
        const auto est = select_kappa(NoisySequence(y, 1.0), prior);
        REQUIRE(est.kappa_hat == 1);
        CHECK(est.mu_hat == std::vector<double>{0.0, -9.0, 0.0, 0.0});
        CHECK(est.threshold == 9.0);
    }
}

TEST_CASE("select_kappa invariants on random instances", "[select][property]") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> log_n(0, 12);
    std::uniform_real_distribution<double> qdist(0.05, 0.95);
    std::uniform_real_distribution<double> gdist(0.5, 5.0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = std::size_t{1} << log_n(gen);
        const double q = qdist(gen);
        const double gamma = gdist(gen);
        auto y = normal_draws(n, gen());
        // plant a sparse signal in a random subset
        for (std::size_t i = 0; i < n; i += 7) y[i] += 4.0;
        const auto prior = trunc_geom_prior(n, q, gamma);
        const auto est = select_kappa(NoisySequence(y, 1.0), prior);

        // hard-threshold structure: kept entries are the kappa_hat largest |y|
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return std::abs(y[a]) > std::abs(y[b]); });
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE((est.mu_hat[i] == 0.0 || est.mu_hat[i] == y[i]));
            nonzero += est.mu_hat[i] != 0.0;
        }
        REQUIRE(nonzero == est.kappa_hat);
        for (std::size_t k = 0; k < est.kappa_hat; ++k) REQUIRE(est.mu_hat[order[k]] == y[order[k]]);

        // objective consistency and argmin
        double rss = 0.0;
        for (double v : y) rss += v * v;
        for (std::size_t k = 0; k <= n; ++k) {
            if (k > 0) rss -= y[order[k - 1]] * y[order[k - 1]];
            const double expected = std::max(rss, 0.0) + complexity_penalty(k, prior, 1.0);
            REQUIRE(est.objective[k] == Approx(expected).epsilon(1e-9).margin(1e-9));
            REQUIRE(est.objective[est.kappa_hat] <= est.objective[k]);
        }

        // permutation equivariance
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> yp(n);
        for (std::size_t i = 0; i < n; ++i) yp[i] = y[perm[i]];
        const auto ep = select_kappa(NoisySequence(yp, 1.0), prior);
        REQUIRE(ep.kappa_hat == est.kappa_hat);
        REQUIRE(ep.threshold == est.threshold);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(ep.mu_hat[i] == est.mu_hat[perm[i]]);

        // scale equivariance
        for (double c : {0.1, 10.0, 1000.0}) {
            std::vector<double> yc(n);
            for (std::size_t i = 0; i < n; ++i) yc[i] = c * y[i];
            const auto ec = select_kappa(NoisySequence(yc, c), prior);
            REQUIRE(ec.kappa_hat == est.kappa_hat);
            for (std::size_t i = 0; i < n; ++i) REQUIRE(ec.mu_hat[i] == Approx(c * est.mu_hat[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("posterior_log_score", "[posterior]") {
    const auto y = normal_draws(10, 11, 2.0);
    const NoisySequence seq(y, 1.0);
    const auto prior = trunc_geom_prior(10, 0.5, 2.0);

    SECTION("empty indicator") {
        const std::vector<int> x(10, 0);
        CHECK(posterior_log_score(x, seq, prior) == Approx(prior.log_pi(0)).epsilon(1e-14));
    }
    SECTION("best vector of each size picks the largest magnitudes") {
        std::vector<std::size_t> order(10);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(y[a]) > std::abs(y[b]); });
        std::vector<double> best(11, -INFINITY);
        std::vector<unsigned> arg(11, 0);
        for (unsigned mask = 0; mask < (1u << 10); ++mask) {
            std::vector<int> x(10);
            for (int i = 0; i < 10; ++i) x[i] = (mask >> i) & 1u;
            const auto k = static_cast<std::size_t>(std::popcount(mask));
            const double s = posterior_log_score(x, seq, prior);
            if (s > best[k]) {
                best[k] = s;
                arg[k] = mask;
            }
        }
        for (std::size_t k = 0; k <= 10; ++k) {
            unsigned expected = 0;
            for (std::size_t c = 0; c < k; ++c) expected |= 1u << order[c];
            CHECK(arg[k] == expected);
        }
    }
    SECTION("non-binary indicator") {
        std::vector<int> x(10, 0);
        x[3] = 2;
        CHECK_THROWS_AS(posterior_log_score(x, seq, prior), InvalidInput);
    }
}

TEST_CASE("global posterior mode equals select_kappa for n = 12", "[posterior][oracle]") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 5; ++trial) {
        auto y = normal_draws(12, gen(), 1.0);
        y[2] += 5.0;
        y[7] -= 3.5;
        const NoisySequence seq(y, 1.0);
        const auto prior = trunc_geom_prior(12, 0.4, 2.5);
        double best = -INFINITY;
        unsigned arg = 0;
        for (unsigned mask = 0; mask < (1u << 12); ++mask) {
            std::vector<int> x(12);
            for (int i = 0; i < 12; ++i) x[i] = (mask >> i) & 1u;
            const double s = posterior_log_score(x, seq, prior);
            if (s > best) {
                best = s;
                arg = mask;
            }
        }
        const auto est = select_kappa(seq, prior);
        unsigned support = 0;
        for (int i = 0; i < 12; ++i)
            if (est.mu_hat[i] != 0.0) support |= 1u << i;
        CHECK(support == arg);
        CHECK(est.kappa_hat == static_cast<std::size_t>(std::popcount(arg)));
    }
}

TEST_CASE("log binomial bounds", "[binomial]") {
    SECTION("n = 4, kappa = 2") {
        const auto b = log_binom_bounds(4, 2);
        CHECK(b.lower == Approx(1.3862943611198906).epsilon(1e-14));
        CHECK(b.exact == Approx(1.791759469228055).epsilon(1e-14));
        CHECK(b.upper == Approx(3.3862943611198904).epsilon(1e-14));
    }
    SECTION("n = 2, kappa = 1 hits the lower bound") {
        const auto b = log_binom_bounds(2, 1);
        CHECK(b.exact == Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(b.lower == Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(b.upper == Approx(std::log(2.0) + 1.0).epsilon(1e-14));
    }
    SECTION("sweep n <= 400") {
        for (std::size_t n = 2; n <= 400; ++n)
            for (std::size_t k = 1; k < n; ++k) {
                const auto b = log_binom_bounds(n, k);
                REQUIRE(b.exact - b.lower >= -1e-9);
                REQUIRE(b.upper - b.exact > 0.0);
                if (static_cast<double>(k) <= static_cast<double>(n) / std::exp(1.0))
                    REQUIRE(2.0 * b.lower - b.exact >= -1e-9);
            }
    }
    SECTION("out of range") {
        CHECK_THROWS_AS(log_binom_bounds(1, 1), InvalidInput);
        CHECK_THROWS_AS(log_binom_bounds(5, 0), InvalidInput);
        CHECK_THROWS_AS(log_binom_bounds(5, 5), InvalidInput);
    }
}

TEST_CASE("prior conditions", "[prior]") {
    SECTION("TrGeom(0.5), n = 1024, c = 3") {
        CHECK(check_prior_conditions(trunc_geom_prior(1024, 0.5, 3.0), 0.0, 3.0, 3.0, 3.0, std::exp(-4.5)).all());
    }
    SECTION("binomial prior cannot satisfy both end conditions") {
        const auto r = check_prior_conditions(binomial_prior(256, 0.5, 1.0), 0.0, 1.0, 1.0, 1.0, std::exp(-4.5));
        CHECK_FALSE(r.all());
        CHECK_FALSE(r.empty_mass);
    }
    SECTION("near point mass at zero fails the full-support condition") {
        const std::size_t n = 2000;
        std::vector<double> w(n + 1, -2.0 * static_cast<double>(n) - std::log(static_cast<double>(n)));
        w[0] = 0.0;
        const auto r = check_prior_conditions(PriorSpec::from_log_weights(w, 1.0), 0.0, 1.0, 1.0, 1.0, 0.01);
        CHECK_FALSE(r.full_mass);
        CHECK(r.empty_mass);
    }
}
