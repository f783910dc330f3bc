#include "testimation/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "testimation/map_core.hpp"
#include "testimation/rng.hpp"
#include "testimation/testbed.hpp"
#include "testimation/wavelet.hpp"

namespace testimation {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string_view::npos ? s.size() : comma;
        auto item = trim(s.substr(start, end - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Runs body(job) for job in [0, count), in parallel or in order.
template <typename Body>
void for_each_job(std::size_t count, Execution exec, Body&& body) {
    if (exec == Execution::parallel) {
        const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < total; ++i) body(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < count; ++i) body(i);
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : InvalidInput([&] {
          std::string msg = "invalid configuration";
          for (const auto& d : diagnostics) msg += "\n  " + d;
          return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::vector<std::string> errors;
    std::string line;
    int lineno = 0;
    auto bad = [&](const std::string& key, const std::string& what) {
        errors.push_back("line " + std::to_string(lineno) + ": field '" + key + "': " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));

        if (key == "signals") {
            cfg.signals = split_list(value);
        } else if (key == "rsnr") {
            cfg.rsnr_levels.clear();
            for (const auto& item : split_list(value)) {
                if (auto v = parse_number<double>(item))
                    cfg.rsnr_levels.push_back(*v);
                else
                    bad(key, "'" + item + "' is not a number");
            }
        } else if (key == "n" || key == "replications") {
            auto v = parse_number<std::size_t>(value);
            if (!v)
                bad(key, "'" + value + "' is not a non-negative integer");
            else
                (key == "n" ? cfg.n : cfg.replications) = *v;
        } else if (key == "j0") {
            if (auto v = parse_number<int>(value))
                cfg.j0 = *v;
            else
                bad(key, "'" + value + "' is not an integer");
        } else if (key == "seed") {
            if (auto v = parse_number<std::uint64_t>(value))
                cfg.seed = *v;
            else
                bad(key, "'" + value + "' is not a non-negative integer");
        } else if (key == "filter") {
            cfg.filter = value;
        } else if (key == "estimators") {
            cfg.estimators.clear();
            for (const auto& item : split_list(value)) {
                try {
                    cfg.estimators.push_back(parse_estimator(item));
                } catch (const UnsupportedName&) {
                    bad(key, "unknown estimator '" + item + "'");
                }
            }
        } else {
            errors.push_back("line " + std::to_string(lineno) + ": unknown field '" + key + "'");
        }
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    return parse_config(in);
}

void validate(const ExperimentConfig& config) {
    std::vector<std::string> errors;
    const auto known_signals = signal_names();
    if (config.signals.empty()) errors.emplace_back("field 'signals': list is empty");
    for (const auto& s : config.signals)
        if (std::find(known_signals.begin(), known_signals.end(), s) == known_signals.end())
            errors.push_back("field 'signals': unknown signal '" + s + "'");
    if (config.rsnr_levels.empty()) errors.emplace_back("field 'rsnr': list is empty");
    for (double r : config.rsnr_levels)
        if (!(r > 0.0) || !std::isfinite(r)) errors.push_back("field 'rsnr': " + fmt(r) + " is not positive");
    const int J = exact_log2(config.n);
    if (J < 0) errors.push_back("field 'n': " + std::to_string(config.n) + " is not a power of two");
    if (config.replications < 1) errors.emplace_back("field 'replications': must be >= 1");
    const auto filters = filter_names();
    if (std::find(filters.begin(), filters.end(), config.filter) == filters.end())
        errors.push_back("field 'filter': unknown filter '" + config.filter + "'");
    if (config.j0 < 1 || (J >= 0 && config.j0 >= J))
        errors.push_back("field 'j0': must satisfy 1 <= j0 < log2(n)");
    if (config.estimators.empty()) errors.emplace_back("field 'estimators': list is empty");
    if (!errors.empty()) throw ConfigError(std::move(errors));
}

ExperimentReport run_simulation(const ExperimentConfig& config, Execution exec) {
    validate(config);
    const WaveletFilter filter = filter_bank(config.filter);
    const std::size_t n_sig = config.signals.size();
    const std::size_t n_rsnr = config.rsnr_levels.size();
    const std::size_t n_est = config.estimators.size();
    const std::size_t reps = config.replications;

    std::vector<TestSignal> clean;
    for (const auto& name : config.signals) clean.push_back(make_signal(name, config.n));

    // results[((cell * n_est) + e) * reps + r]
    const std::size_t cells = n_sig * n_rsnr;
    std::vector<double> mse_out(cells * n_est * reps);
    std::vector<double> surv_out(cells * n_est * reps);

    for_each_job(cells * reps, exec, [&](std::size_t job) {
        const std::size_t cell = job / reps;
        const std::size_t r = job % reps;
        const std::size_t s = cell / n_rsnr;
        const std::size_t l = cell % n_rsnr;
        const auto obs = add_noise(clean[s], config.rsnr_levels[l], derive_seed(config.seed, {s, l, r}));
        for (std::size_t e = 0; e < n_est; ++e) {
            const auto res = denoise(config.estimators[e], obs.y, filter, config.j0);
            const std::size_t idx = (cell * n_est + e) * reps + r;
            mse_out[idx] = mse(res.f_hat, clean[s].samples);
            surv_out[idx] = 100.0 * res.surviving_fraction;
        }
    });

    ExperimentReport report;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const std::size_t first_row = report.rows.size();
        for (std::size_t e = 0; e < n_est; ++e) {
            const auto begin = static_cast<std::ptrdiff_t>((cell * n_est + e) * reps);
            const auto end = begin + static_cast<std::ptrdiff_t>(reps);
            ReportRow row;
            row.signal = config.signals[cell / n_rsnr];
            row.rsnr = config.rsnr_levels[cell % n_rsnr];
            row.estimator = std::string(to_string(config.estimators[e]));
            row.median_mse = median_of({mse_out.begin() + begin, mse_out.begin() + end});
            row.mean_surviving_pct = mean_of({surv_out.begin() + begin, surv_out.begin() + end});
            row.replications = reps;
            row.seed = config.seed;
            report.rows.push_back(std::move(row));
        }
        double best = report.rows[first_row].median_mse;
        for (std::size_t i = first_row; i < report.rows.size(); ++i) best = std::min(best, report.rows[i].median_mse);
        for (std::size_t i = first_row; i < report.rows.size(); ++i) {
            auto& row = report.rows[i];
            row.relative_median_mse = row.median_mse > 0.0 ? best / row.median_mse : 1.0;
        }
    }
    return report;
}

void write_report_csv(std::ostream& os, const ExperimentReport& report) {
    os << "schema_version,signal,rsnr,estimator,median_mse,relative_median_mse,mean_surviving_pct,replications,seed\n";
    for (const auto& r : report.rows) {
        os << k_report_schema_version << ',' << r.signal << ',' << fmt(r.rsnr) << ',' << r.estimator << ','
           << fmt(r.median_mse) << ',' << fmt(r.relative_median_mse) << ',' << fmt(r.mean_surviving_pct) << ','
           << r.replications << ',' << r.seed << '\n';
    }
}

double loglog_slope(const std::vector<std::size_t>& n, const std::vector<double>& values) {
    if (n.size() != values.size() || n.size() < 2) throw InvalidInput("loglog_slope needs two or more points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        mx += std::log(static_cast<double>(n[i]));
        my += std::log(values[i]);
    }
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double dx = std::log(static_cast<double>(n[i])) - mx;
        sxy += dx * (std::log(values[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

FunctionRateReport run_function_rates(const FunctionRateConfig& config, Execution exec) {
    if (config.n_grid.size() < 3) throw InvalidInput("rate grid needs at least three sample sizes");
    if (config.replications < 1) throw InvalidParameter("replications must be >= 1");
    for (std::size_t n : config.n_grid)
        if (exact_log2(n) < 0) throw InvalidInput("grid size " + std::to_string(n) + " is not a power of two");
    const WaveletFilter filter = filter_bank(config.filter);

    FunctionRateReport report;
    report.config = config;
    std::vector<double> medians;
    for (std::size_t n : config.n_grid) {
        const TestSignal clean = make_signal(config.signal, n);
        const WaveletDecomposition truth = dwt_forward(clean.samples, filter, config.j0);
        std::vector<double> risk(config.replications);
        for_each_job(config.replications, exec, [&](std::size_t r) {
            const auto obs = add_noise(clean, config.rsnr, derive_seed(config.seed, {n, r}));
            const auto res = denoise(config.estimator, obs.y, filter, config.j0);
            risk[r] = weighted_level_risk(res.decomposition_hat, truth, config.m) / static_cast<double>(n);
        });
        report.points.push_back({n, median_of(risk)});
        medians.push_back(report.points.back().median_risk);
    }
    report.slope = loglog_slope(config.n_grid, medians);
    return report;
}

BallRateReport run_ball_rates(const BallRateConfig& config, Execution exec) {
    if (config.n_grid.size() < 3) throw InvalidInput("rate grid needs at least three sample sizes");
    BallRateReport report;
    report.config = config;
    std::vector<double> risks;
    for (std::size_t n : config.n_grid) {
        BallRatePoint pt;
        pt.n = n;
        pt.eta_p = config.eta_p_count ? *config.eta_p_count / static_cast<double>(n) : config.eta_p;
        LpBallSpec ball{config.p, std::pow(pt.eta_p, 1.0 / config.p), n, config.sigma};
        pt.zone = config.zone ? *config.zone : zone_classify(ball, config.alpha);
        const auto mu = least_favorable(ball, pt.zone);
        const auto prior = trunc_geom_prior(n, config.q, config.gamma);
        pt.risk = monte_carlo_risk(mu, config.sigma, prior, config.replications, derive_seed(config.seed, {n}), exec);
        pt.minimax_rate = minimax_rate(ball, pt.zone);
        pt.ratio = pt.risk.mean_sq_error / pt.minimax_rate;
        risks.push_back(pt.risk.mean_sq_error);
        report.points.push_back(pt);
    }
    report.slope = loglog_slope(config.n_grid, risks);
    return report;
}

void write_rate_csv(std::ostream& os, const FunctionRateReport& report) {
    os << "schema_version,signal,estimator,m,n,median_risk,replications,seed,slope\n";
    for (const auto& p : report.points)
        os << k_report_schema_version << ',' << report.config.signal << ',' << to_string(report.config.estimator)
           << ',' << fmt(report.config.m) << ',' << p.n << ',' << fmt(p.median_risk) << ','
           << report.config.replications << ',' << report.config.seed << ',' << fmt(report.slope) << '\n';
}

void write_rate_csv(std::ostream& os, const BallRateReport& report) {
    os << "schema_version,zone,p,n,eta_p,risk,std_error,minimax_rate,ratio,replications,seed,slope\n";
    for (const auto& p : report.points)
        os << k_report_schema_version << ',' << to_string(p.zone) << ',' << fmt(report.config.p) << ',' << p.n << ','
           << fmt(p.eta_p) << ',' << fmt(p.risk.mean_sq_error) << ',' << fmt(p.risk.std_error) << ','
           << fmt(p.minimax_rate) << ',' << fmt(p.ratio) << ',' << p.risk.replications << ','
           << report.config.seed << ',' << fmt(report.slope) << '\n';
}

}  // namespace testimation
