#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "qmeter/collision.hpp"
#include "qmeter/commands.hpp"
#include "qmeter/observables.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("qmeter_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Run cli(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt";
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + QMETER_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string golden(const char* name) { return slurp(fs::path(QMETER_GOLDEN_DIR) / name); }

constexpr const char* kRatesArgs = "rates --omega 0.5 --omega-m 5 --theta 0.1 --steps 40";
constexpr const char* kCurveArgs = "mi-curve --omega 0.5 --omega-m 0.1 --theta 3 --steps 60";
constexpr const char* kSweepArgs = "sweep --omega 0.1 --steps 120 --theta-grid 0.3 3 4 --omega-m-grid 0.5 6 3";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
    CHECK(cli("--help").status == 0);
    CHECK(cli("rates --help").status == 0);
    CHECK(cli("").status == 2);
    CHECK(cli("frobnicate").status == 2);
    CHECK(cli("rates --omega 0.5 --omega-m 1 --theta 1").status == 2);  // no --steps
    CHECK(cli("rates --omega 0.5 --omega-m 1 --theta 1 --steps 5 --format xml").status == 2);
    CHECK(cli("rates --omega 0.5 --omega-m 1 --theta 7 --steps 5").status == 2);
    CHECK(cli("rates --omega 0.5 --omega-m 1 --theta 1 --steps 5 --volume-exponent 3").status == 2);
    CHECK(cli("sweep --delta 1.5").status == 2);
    CHECK(cli("sweep --workers none").status == 2);
    CHECK(cli("sweep --theta-grid 1 0 3").status == 2);
    const Run missing = cli("rates --config /nonexistent/qmeter.json");
    CHECK(missing.status == 2);
    CHECK(missing.err.find("/nonexistent/qmeter.json") != std::string::npos);
}

TEST_CASE("rates table") {
    const Run r = cli("rates --omega 0.5 --omega-m 0 --theta 3.141592653589793 --steps 4");
    REQUIRE(r.status == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# qmeter=", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "step,Gamma_M,Gamma_R,Gamma,kappa_abs,V");
    std::getline(lines, line);
    CHECK(line == "0,0,0,0,1,1");
    std::getline(lines, line);
    CHECK(line.rfind("1,", 0) == 0);
    CHECK(line.find(",0.5,") != std::string::npos);
}

TEST_CASE("golden outputs") {
    CHECK(cli(kRatesArgs).out == golden("rates.csv"));
    CHECK(cli(kCurveArgs).out == golden("mi_curve.csv"));
    CHECK(cli(std::string(kSweepArgs) + " --format json").out == golden("sweep.json"));
}

TEST_CASE("repeated runs and worker counts are byte-identical") {
    const std::string first = cli(kSweepArgs).out;
    CHECK_FALSE(first.empty());
    CHECK(cli(kSweepArgs).out == first);
    CHECK(cli(std::string(kSweepArgs) + " --workers 4").out == first);
    CHECK(cli(std::string(kSweepArgs) + " --workers auto").out == first);
    CHECK(cli(kCurveArgs).out == cli(kCurveArgs).out);
}

TEST_CASE("curve output equals the library curve") {
    const Run r = cli("mi-curve --omega 0.5 --omega-m 0.1 --theta 3 --steps 200 --format json");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto params = qmeter::ModelParams::with_populations(0.5, 0.1, 3.0);
    const auto curve = qmeter::mutual_information_curve(qmeter::run_trajectory(params, 200), params);
    REQUIRE(j["rows"].size() == curve.size());
    for (std::size_t m = 0; m < curve.size(); ++m) {
        CHECK(j["rows"][m][0] == m);
        CHECK(j["rows"][m][1].get<double>() == curve[m]);
    }
    CHECK(j["rows"][0][1].get<double>() == 0.0);
    CHECK(j["metadata"].contains("S_system"));
}

TEST_CASE("missing m_star is an empty field") {
    const Run r = cli("sweep --omega 0 --steps 50 --theta-grid 1 1 1 --omega-m-grid 1 1 1");
    REQUIRE(r.status == 0);
    CHECK(r.out.find("\n1,1,0,,0\n") != std::string::npos);
}

TEST_CASE("config file with flag overrides") {
    const fs::path cfg = scratch() / "config.json";
    std::ofstream(cfg) << R"({"omega_coupling": 0.5, "omega_meter": 0, "theta": 3.141592653589793,
                             "n_steps": 3, "output_format": "json"})";
    const Run from_file = cli("rates --config \"" + cfg.string() + "\"");
    REQUIRE(from_file.status == 0);
    CHECK(nlohmann::json::parse(from_file.out)["rows"].size() == 4);
    const Run overridden = cli("rates --config \"" + cfg.string() + "\" --steps 6 --format csv");
    REQUIRE(overridden.status == 0);
    CHECK(overridden.out.rfind("# qmeter=", 0) == 0);
    CHECK(overridden.out.find("\n6,") != std::string::npos);

    std::ofstream(cfg) << R"({"omega_coupling": 0.5, "thetta": 1})";
    const Run bad = cli("rates --config \"" + cfg.string() + "\"");
    CHECK(bad.status == 2);
    CHECK(bad.err.find("thetta") != std::string::npos);
}

TEST_CASE("output file") {
    const fs::path path = scratch() / "rates.csv";
    const Run r = cli(std::string(kRatesArgs) + " --output \"" + path.string() + "\"");
    REQUIRE(r.status == 0);
    CHECK(r.out.empty());
    CHECK(slurp(path) == golden("rates.csv"));
    CHECK(cli(std::string(kRatesArgs) + " --output /nonexistent/dir/x.csv").status == 2);
}

TEST_CASE("oracle check") {
    const Run pass = cli("oracle-check --omega 0.5 --omega-m 0.1 --theta 1 --steps 4");
    CHECK(pass.status == 0);
    CHECK(pass.out.find("FAIL") == std::string::npos);
    const Run zero = cli("oracle-check --omega 0 --omega-m 0.1 --theta 1 --steps 3");
    CHECK(zero.status == 0);
    const Run flipped = cli("oracle-check --omega 0.5 --omega-m 0.1 --theta 1 --steps 4 --debug-flip-env-sign");
    CHECK(flipped.status == 1);
    CHECK(flipped.out.find("kappa_env,") != std::string::npos);
    CHECK(flipped.out.find("FAIL") != std::string::npos);
    const Run refused = cli("oracle-check --omega 0.5 --omega-m 0.1 --theta 1 --steps 7");
    CHECK(refused.status == 2);
    CHECK(refused.err.find("7") != std::string::npos);
}

}  // TEST_SUITE
