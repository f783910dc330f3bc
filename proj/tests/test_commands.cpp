#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "testimation/commands.hpp"

using namespace testimation;
using namespace testimation::cli;
namespace fs = std::filesystem;

namespace {

const fs::path k_data = TESTIMATION_TEST_DATA;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "testimation_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("reading signal files", "[cli]") {
    const auto p = scratch("two_col.csv");
    {
        std::ofstream out(p);
        out << "t,y\n0.25,1\n0.5,2\n0.75,3\n1,4\n";
    }
    const auto cols = read_signal_csv(p.string());
    REQUIRE(cols.t.has_value());
    CHECK(cols.y == std::vector<double>{1, 2, 3, 4});
    {
        std::ofstream out(p);
        out << "1\n2\nx\n";
    }
    CHECK_THROWS_AS(read_signal_csv(p.string()), InvalidInput);
    CHECK_THROWS_AS(read_signal_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("denoise subcommand", "[cli]") {
    std::ostringstream log;
    SECTION("constant input is a degenerate-noise edge") {
        const auto in = scratch("ones.csv");
        {
            std::ofstream out(in);
            for (int i = 0; i < 1024; ++i) out << "1\n";
        }
        DenoiseArgs args;
        args.input = in.string();
        args.output = scratch("ones_out.csv").string();
        REQUIRE(cmd_denoise(args, log) == k_ok);
        CHECK(log.str().find("degenerate") != std::string::npos);
        const auto back = read_signal_csv(args.output);
        CHECK(back.y == std::vector<double>(1024, 1.0));
        const auto side = nlohmann::json::parse(slurp(args.output + ".json"));
        CHECK(side["degenerate_noise"] == true);
        CHECK(side["sigma_hat"] == 0.0);
    }
    SECTION("missing file names the path") {
        DenoiseArgs args;
        args.input = "/nonexistent/noisy.csv";
        args.output = scratch("never.csv").string();
        CHECK(cmd_denoise(args, log) == k_io_failure);
        CHECK(log.str().find("/nonexistent/noisy.csv") != std::string::npos);
    }
    SECTION("non power of two length") {
        DenoiseArgs args;
        args.input = (k_data / "length_1000.csv").string();
        args.output = scratch("bad.csv").string();
        CHECK(cmd_denoise(args, log) == k_validation_failure);
        CHECK(log.str().find("power of two") != std::string::npos);
    }
    SECTION("unknown mode or filter") {
        DenoiseArgs args;
        args.input = (k_data / "doppler_noisy_1024.csv").string();
        args.output = scratch("mode.csv").string();
        args.mode = "blockwise";
        CHECK(cmd_denoise(args, log) == k_validation_failure);
        args.mode = "global";
        args.filter = "sym4";
        CHECK(cmd_denoise(args, log) == k_validation_failure);
    }
    SECTION("golden sidecar for the noisy Doppler fixture") {
        DenoiseArgs args;
        args.input = (k_data / "doppler_noisy_1024.csv").string();
        args.output = scratch("doppler_out.csv").string();
        args.sidecar = scratch("doppler_out.json").string();
        REQUIRE(cmd_denoise(args, log) == k_ok);
        CHECK(slurp(args.sidecar) == slurp(k_data / "doppler_noisy_1024.golden.json"));
        const auto side = nlohmann::json::parse(slurp(args.sidecar));
        CHECK(side["levels"].size() == 6);
        CHECK(side["n"] == 1024);
    }
}

TEST_CASE("simulate subcommand", "[cli]") {
    std::ostringstream out;
    std::ostringstream log;
    const auto cfg = scratch("sim.cfg");
    {
        std::ofstream o(cfg);
        o << "signals = peak\nrsnr = 5\nn = 256\nreplications = 2\n";
    }
    SimulateArgs args{cfg.string(), ""};
    REQUIRE(cmd_simulate(args, out, log) == k_ok);
    const auto first = out.str();
    out.str("");
    REQUIRE(cmd_simulate(args, out, log) == k_ok);
    CHECK(out.str() == first);
    {
        std::ofstream o(cfg);
        o << "n = 100\n";
    }
    CHECK(cmd_simulate(args, out, log) == k_validation_failure);
    CHECK(log.str().find("'n'") != std::string::npos);
    CHECK(cmd_simulate({"/nonexistent.cfg", ""}, out, log) == k_io_failure);
}

TEST_CASE("rates subcommand", "[cli]") {
    std::ostringstream out;
    std::ostringstream log;
    RatesArgs args;
    args.function.n_grid = {256, 512};
    CHECK(cmd_rates(args, out, log) == k_validation_failure);
    args.function.n_grid = {256, 512, 1024};
    args.function.replications = 2;
    CHECK(cmd_rates(args, out, log) == k_ok);
    CHECK(out.str().rfind("schema_version,signal,estimator,m,n,median_risk,replications,seed,slope\n", 0) == 0);
}

TEST_CASE("check subcommand", "[cli]") {
    std::ostringstream out;
    CHECK(cmd_check({300}, out) == k_ok);
    CHECK(out.str().find("FAIL") == std::string::npos);
}
