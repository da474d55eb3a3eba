// commands.hpp: table builders behind the qmeter subcommands, the (theta, omega_M)
// sweep driver, and the JSON config file reader.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmeter/fock_oracle.hpp"
#include "qmeter/model.hpp"
#include "qmeter/table.hpp"

namespace qmeter {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr double kOracleTolerance = 1e-8;

// Inclusive, linearly spaced grid.
struct LinearRange {
    double min{0.0};
    double max{0.0};
    std::size_t count{1};

    void validate(const char* name) const;
    std::vector<double> values() const;
};

struct SweepConfig {
    LinearRange theta_grid{0.1, 3.0, 10};
    LinearRange omega_meter_grid{0.1, 6.0, 10};
    double omega_coupling{0.1};
    double tau{1.0};
    std::size_t n_steps{500};
    double delta{0.1};
    int volume_exponent{2};
    double alpha_sq{0.5};
    OutputFormat output_format{OutputFormat::csv};
    std::size_t workers{1};  // 0 = one per hardware thread

    void validate() const;
};

struct SweepPoint {
    double theta{0.0};
    double omega_meter{0.0};
    double nm_ratio{0.0};
    std::optional<std::size_t> m_star;
    double redundancy{0.0};
};

// Row-major over (theta, omega_meter); independent of the worker count.
std::vector<SweepPoint> run_sweep(const SweepConfig& config);

// Per-step l, Gamma_M, Gamma_R, Gamma, |kappa|, V.
Table rates_table(const ModelParams& params, std::size_t n_steps, int volume_exponent);

// m, I(S : F_m) after n_steps collisions; S(rho_S) and kappa_M go to the metadata line.
Table mi_curve_table(const ModelParams& params, std::size_t n_steps);

Table sweep_table(const SweepConfig& config, const std::vector<SweepPoint>& points);

Table oracle_table(const ModelParams& params, std::size_t n_steps, const fock::OracleReport& report,
                   double tolerance = kOracleTolerance);

// Every key a config file may carry; absent keys stay empty so CLI flags can fill them.
struct ConfigFile {
    std::optional<double> omega_coupling;
    std::optional<double> omega_meter;
    std::optional<double> theta;
    std::optional<double> tau;
    std::optional<std::size_t> n_steps;
    std::optional<double> alpha_sq;
    std::optional<double> delta;
    std::optional<int> volume_exponent;
    std::optional<OutputFormat> output_format;
    std::optional<std::size_t> workers;  // 0 = auto
    std::optional<LinearRange> theta_grid;
    std::optional<LinearRange> omega_meter_grid;
};

// Throws InvalidArgument naming the line/column of syntax errors or the offending field.
ConfigFile parse_config(std::string_view text);

// "auto" -> 0, otherwise a positive integer.
std::size_t parse_workers(const std::string& text);

}  // namespace qmeter
