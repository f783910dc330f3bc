#pragma once

// Subcommand implementations behind the `testimation` executable. Each
// returns a process exit code: 0 success, 1 I/O failure, 2 validation failure.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "testimation/simulation.hpp"

namespace testimation::cli {

enum ExitCode : int { k_ok = 0, k_io_failure = 1, k_validation_failure = 2 };

struct SignalColumns {
    std::optional<std::vector<double>> t;
    std::vector<double> y;
};

/// Reads a one-column (y) or two-column (t,y) CSV; a non-numeric first line is a header.
SignalColumns read_signal_csv(const std::string& path);

struct DenoiseArgs {
    std::string input;
    std::string output;
    std::string sidecar;  ///< defaults to output + ".json"
    std::string filter = "coif3";
    int j0 = 4;
    std::optional<double> sigma;
    std::string mode = "levelwise";  ///< levelwise | global
};

int cmd_denoise(const DenoiseArgs& args, std::ostream& log);

struct SimulateArgs {
    std::string config;
    std::string output;  ///< empty writes to `out`
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& log);

struct RatesArgs {
    bool ball_mode = false;
    FunctionRateConfig function;
    BallRateConfig ball;
    std::string output;  ///< empty writes to `out`
};

int cmd_rates(const RatesArgs& args, std::ostream& out, std::ostream& log);

struct CheckArgs {
    std::size_t binomial_n_max = 2000;
};

/// Binomial coefficient bound sweep and prior-condition checks; one line per check.
int cmd_check(const CheckArgs& args, std::ostream& out);

}  // namespace testimation::cli
