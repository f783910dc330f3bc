#pragma once

// Monte Carlo harness: the replicated simulation grid (signal x RSNR x
// estimator) with median-MSE reporting, and empirical rate experiments over
// a grid of sample sizes.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "testimation/balls.hpp"
#include "testimation/error.hpp"
#include "testimation/estimators.hpp"
#include "testimation/parallel.hpp"

namespace testimation {

inline constexpr int k_report_schema_version = 1;

struct ExperimentConfig {
    std::vector<std::string> signals{"wave", "peak", "bumps", "blocks", "doppler", "heavisine"};
    std::vector<double> rsnr_levels{3.0, 5.0, 7.0};
    std::size_t n = 1024;
    std::size_t replications = 100;
    std::string filter = "coif3";
    int j0 = 4;
    std::vector<EstimatorKind> estimators{EstimatorKind::map_levelwise, EstimatorKind::map_global,
                                          EstimatorKind::universal_hard};
    std::uint64_t seed = 0;
};

/// Validation failure carrying one diagnostic per offending field.
class ConfigError : public InvalidInput {
public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// Grammar: one `key = value` per line, `#` starts a comment, lists are
/// comma-separated. Keys: signals, rsnr, n, replications, filter, j0,
/// estimators, seed. Missing keys keep their defaults.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& config);

struct ReportRow {
    std::string signal;
    double rsnr = 0.0;
    std::string estimator;
    double median_mse = 0.0;
    double relative_median_mse = 0.0;
    double mean_surviving_pct = 0.0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
};

/// Replication r of cell (signal s, rsnr level l) draws its noise from
/// derive_seed(seed, {s, l, r}); every estimator sees the same noisy sample.
ExperimentReport run_simulation(const ExperimentConfig& config, Execution exec = Execution::parallel);

/// Header: schema_version,signal,rsnr,estimator,median_mse,relative_median_mse,mean_surviving_pct,replications,seed
void write_report_csv(std::ostream& os, const ExperimentReport& report);

/// Least-squares slope of log(values) against log(n).
double loglog_slope(const std::vector<std::size_t>& n, const std::vector<double>& values);

struct FunctionRateConfig {
    std::string signal = "wave";
    std::vector<std::size_t> n_grid{256, 512, 1024, 2048, 4096, 8192};
    double m = 0.0;
    std::size_t replications = 50;
    std::uint64_t seed = 0;
    double rsnr = 5.0;
    std::string filter = "coif3";
    int j0 = 4;
    EstimatorKind estimator = EstimatorKind::map_levelwise;
};

struct FunctionRatePoint {
    std::size_t n = 0;
    double median_risk = 0.0;
};

struct FunctionRateReport {
    FunctionRateConfig config;
    std::vector<FunctionRatePoint> points;
    double slope = 0.0;
};

/// Per replication the risk is weighted_level_risk(hat, truth, m) / n, which is
/// the sample MSE at m = 0. Replication r at size n uses derive_seed(seed, {n, r}).
FunctionRateReport run_function_rates(const FunctionRateConfig& config, Execution exec = Execution::parallel);

struct BallRateConfig {
    double p = 1.0;
    /// eta^p = eta_p_count / n when set, otherwise eta^p = eta_p.
    std::optional<double> eta_p_count = 64.0;
    double eta_p = 0.01;
    std::optional<Zone> zone;  ///< classify with `alpha` when absent
    double alpha = default_alpha();
    double q = 0.5;
    double gamma = 3.0;
    double sigma = 1.0;
    std::vector<std::size_t> n_grid{256, 1024, 4096};
    std::size_t replications = 200;
    std::uint64_t seed = 0;
};

struct BallRatePoint {
    std::size_t n = 0;
    Zone zone = Zone::dense1;
    double eta_p = 0.0;
    RiskEstimate risk;
    double minimax_rate = 0.0;
    double ratio = 0.0;
};

struct BallRateReport {
    BallRateConfig config;
    std::vector<BallRatePoint> points;
    double slope = 0.0;
};

BallRateReport run_ball_rates(const BallRateConfig& config, Execution exec = Execution::parallel);

/// Header: schema_version,signal,estimator,m,n,median_risk,replications,seed,slope
void write_rate_csv(std::ostream& os, const FunctionRateReport& report);
/// Header: schema_version,zone,p,n,eta_p,risk,std_error,minimax_rate,ratio,replications,seed,slope
void write_rate_csv(std::ostream& os, const BallRateReport& report);

}  // namespace testimation
