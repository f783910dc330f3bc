#include "testimation/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "testimation/error.hpp"
#include "testimation/estimators.hpp"
#include "testimation/map_core.hpp"
#include "testimation/wavelet.hpp"

namespace testimation::cli {

namespace {

std::optional<double> to_double(std::string field) {
    const auto b = field.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::nullopt;
    field = field.substr(b, field.find_last_not_of(" \t\r") - b + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

nlohmann::ordered_json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

// Shared error-to-exit-code mapping for every subcommand.
template <typename Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        log << "error: " << e.what() << '\n';
        return k_io_failure;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return k_validation_failure;
    } catch (const std::out_of_range& e) {
        log << "error: " << e.what() << '\n';
        return k_validation_failure;
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

}  // namespace

SignalColumns read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read input file '" + path + "'");

    SignalColumns cols;
    std::vector<double> t;
    std::string line;
    std::size_t width = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        std::vector<double> values;
        bool numeric = true;
        for (const auto& f : fields) {
            auto v = to_double(f);
            if (!v) {
                numeric = false;
                break;
            }
            values.push_back(*v);
        }
        if (!numeric) {
            if (width == 0 && cols.y.empty()) continue;  // header
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": non-numeric value");
        }
        if (values.size() != 1 && values.size() != 2)
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected one or two columns");
        if (width == 0) width = values.size();
        if (values.size() != width) throw InvalidInput(path + ":" + std::to_string(lineno) + ": ragged row");
        if (width == 2) t.push_back(values[0]);
        cols.y.push_back(values.back());
    }
    if (cols.y.empty()) throw InvalidInput(path + ": no samples");
    if (width == 2) cols.t = std::move(t);
    return cols;
}

int cmd_denoise(const DenoiseArgs& args, std::ostream& log) {
    return guarded(log, [&] {
        const SignalColumns input = read_signal_csv(args.input);
        const std::size_t n = input.y.size();
        if (exact_log2(n) < 0)
            throw InvalidInput("input length " + std::to_string(n) + " is not a power of two");
        if (args.mode != "levelwise" && args.mode != "global")
            throw InvalidParameter("mode must be 'levelwise' or 'global', got '" + args.mode + "'");
        const WaveletFilter filter = filter_bank(args.filter);
        const auto kind = args.mode == "global" ? EstimatorKind::map_global : EstimatorKind::map_levelwise;
        const DenoiseResult res = denoise(kind, input.y, filter, args.j0, args.sigma);
        if (res.degenerate_noise)
            log << "warning: estimated noise level is zero (degenerate noise); input returned unchanged\n";

        {
            auto out = open_output(args.output);
            out << "t,f_hat\n";
            char buf[64];
            for (std::size_t i = 0; i < n; ++i) {
                const double t = input.t ? (*input.t)[i] : static_cast<double>(i + 1) / static_cast<double>(n);
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, res.f_hat[i]);
                out << buf;
            }
        }

        nlohmann::ordered_json side;
        side["schema_version"] = k_report_schema_version;
        side["input"] = std::filesystem::path(args.input).filename().string();
        side["n"] = n;
        side["filter"] = args.filter;
        side["j0"] = args.j0;
        side["mode"] = args.mode;
        side["sigma_supplied"] = args.sigma.has_value();
        side["sigma_hat"] = res.sigma_hat;
        side["degenerate_noise"] = res.degenerate_noise;
        side["surviving_fraction"] = res.surviving_fraction;
        auto levels = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < res.level_fits.size(); ++i) {
            const auto& fit = res.level_fits[i];
            const auto& sel = res.selections[i];
            nlohmann::ordered_json lv;
            lv["j"] = fit.j;
            lv["size"] = fit.size;
            lv["fit_kappa"] = fit.kappa_hat;
            lv["q_hat"] = fit.q_hat;
            lv["gamma_hat"] = fit.gamma_hat;
            lv["profile_loglik"] = fit.profile_loglik;
            lv["kappa_hat"] = sel.kappa;
            lv["threshold"] = finite_or_null(sel.threshold);
            levels.push_back(std::move(lv));
        }
        side["levels"] = std::move(levels);

        const std::string sidecar = args.sidecar.empty() ? args.output + ".json" : args.sidecar;
        auto js = open_output(sidecar);
        js << side.dump(2) << '\n';
        return int{k_ok};
    });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& log) {
    return guarded(log, [&] {
        ExperimentConfig cfg;
        try {
            cfg = load_config(args.config);
        } catch (const ConfigError& e) {
            for (const auto& d : e.diagnostics()) log << "config: " << d << '\n';
            return int{k_validation_failure};
        }
        const ExperimentReport report = run_simulation(cfg);
        if (args.output.empty()) {
            write_report_csv(out, report);
        } else {
            auto file = open_output(args.output);
            write_report_csv(file, report);
        }
        return int{k_ok};
    });
}

int cmd_rates(const RatesArgs& args, std::ostream& out, std::ostream& log) {
    return guarded(log, [&] {
        std::ostringstream buf;
        if (args.ball_mode)
            write_rate_csv(buf, run_ball_rates(args.ball));
        else
            write_rate_csv(buf, run_function_rates(args.function));
        if (args.output.empty()) {
            out << buf.str();
        } else {
            auto file = open_output(args.output);
            file << buf.str();
        }
        return int{k_ok};
    });
}

int cmd_check(const CheckArgs& args, std::ostream& out) {
    bool all_ok = true;
    auto line = [&](bool ok, const std::string& what) {
        all_ok = all_ok && ok;
        out << (ok ? "PASS " : "FAIL ") << what << '\n';
    };

    constexpr double slack = -1e-9;
    std::size_t checked = 0;
    double worst_lower = INFINITY;
    double worst_upper = INFINITY;
    double worst_refined = INFINITY;
    for (std::size_t n = 2; n <= args.binomial_n_max; ++n) {
        for (std::size_t k = 1; k < n; ++k) {
            const auto b = log_binom_bounds(n, k);
            worst_lower = std::min(worst_lower, b.exact - b.lower);
            worst_upper = std::min(worst_upper, b.upper - b.exact);
            if (static_cast<double>(k) <= static_cast<double>(n) / std::exp(1.0))
                worst_refined = std::min(worst_refined, 2.0 * b.lower - b.exact);
            ++checked;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "binomial bounds n<=%zu (%zu pairs): min(exact-lower)=%.3g min(upper-exact)=%.3g",
                  args.binomial_n_max, checked, worst_lower, worst_upper);
    line(worst_lower >= slack && worst_upper >= slack, buf);
    std::snprintf(buf, sizeof buf, "refined bound kappa<=n/e: min(2 kappa log(n/kappa) - exact)=%.3g", worst_refined);
    line(worst_refined >= slack, buf);

    for (std::size_t n : {256u, 1024u, 4096u}) {
        for (double q : {0.3, 0.5}) {
            const auto rep = check_prior_conditions(trunc_geom_prior(n, q, 3.0), 0.0, 3.0, 3.0, 3.0, default_alpha());
            std::snprintf(buf, sizeof buf, "TrGeom(q=%.1f) n=%zu conditions (beta=0, c=3): %d %d %d", q, n,
                          rep.empty_mass, rep.sparse_mass, rep.full_mass);
            line(rep.all(), buf);
        }
    }
    const auto bin = check_prior_conditions(binomial_prior(256, 0.5, 3.0), 0.0, 1.0, 1.0, 1.0, default_alpha());
    std::snprintf(buf, sizeof buf, "Bin(256, 0.5) fails some condition (c0=c1=1): %d %d %d", bin.empty_mass,
                  bin.sparse_mass, bin.full_mass);
    line(!bin.all(), buf);
    return all_ok ? int{k_ok} : int{k_validation_failure};
}

}  // namespace testimation::cli
