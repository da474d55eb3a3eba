// qmeter: command-line front end: decay-rate tables, mutual-information curves,
// (theta, omega_M) sweeps and the truncated-Fock oracle check.
//
// Exit codes: 0 success, 1 numeric/consistency failure, 2 usage or config error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmeter/commands.hpp"
#include "qmeter/errors.hpp"
#include "qmeter/fock_oracle.hpp"

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct UsageError : qmeter::InvalidArgument {
    using qmeter::InvalidArgument::InvalidArgument;
};

struct Flags {
    double omega{};
    double omega_m{};
    double theta{};
    double tau{1.0};
    std::size_t steps{};
    double alpha_sq{0.5};
    double delta{0.1};
    int volume_exponent{2};
    std::string format{"csv"};
    std::string output;
    std::string workers{"1"};
    std::string config;
    std::vector<double> theta_grid;
    std::vector<double> omega_m_grid;
    bool flip_env_sign{false};

    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        const auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_shared_flags(CLI::App* cmd, Flags& f) {
    f.opts["omega"] = cmd->add_option("--omega", f.omega, "qubit-meter coupling Omega (units 1/tau)");
    f.opts["omega-m"] = cmd->add_option("--omega-m", f.omega_m, "meter frequency omega_M (units 1/tau)");
    f.opts["theta"] = cmd->add_option("--theta", f.theta, "meter-ancilla mixing angle theta in [0, 2pi)");
    f.opts["tau"] = cmd->add_option("--tau", f.tau, "collision duration (default 1)");
    f.opts["steps"] = cmd->add_option("--steps", f.steps, "number of collisions");
    f.opts["alpha-sq"] = cmd->add_option("--alpha-sq", f.alpha_sq, "initial |alpha|^2 on |down> (default 0.5)");
    f.opts["delta"] = cmd->add_option("--delta", f.delta, "information deficit (default 0.1)");
    f.opts["volume-exponent"] =
        cmd->add_option("--volume-exponent", f.volume_exponent, "V = |kappa|^e with e in {1, 2} (default 2)");
    f.opts["format"] = cmd->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    f.opts["output"] = cmd->add_option("--output", f.output, "output path (default stdout)");
    f.opts["workers"] = cmd->add_option("--workers", f.workers, "worker threads: N or auto");
    f.opts["config"] = cmd->add_option("--config", f.config, "JSON config file; flags override it");
}

// Flag value if given, else the config file value, else the fallback (or a usage error).
template <typename T>
T pick(const Flags& f, const std::string& flag, const T& flag_value, const std::optional<T>& file_value,
       std::optional<T> fallback = std::nullopt) {
    if (f.given(flag)) {
        return flag_value;
    }
    if (file_value) {
        return *file_value;
    }
    if (fallback) {
        return *fallback;
    }
    throw UsageError("missing required --" + flag + " (or its config file field)");
}

qmeter::ConfigFile load_config(const Flags& f) {
    if (f.config.empty()) {
        return {};
    }
    std::ifstream in(f.config);
    if (!in) {
        throw UsageError("cannot read config file '" + f.config + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return qmeter::parse_config(buf.str());
}

qmeter::ModelParams point_params(const Flags& f, const qmeter::ConfigFile& c) {
    return qmeter::ModelParams::with_populations(pick(f, "omega", f.omega, c.omega_coupling),
                                                 pick(f, "omega-m", f.omega_m, c.omega_meter),
                                                 pick(f, "theta", f.theta, c.theta),
                                                 pick(f, "alpha-sq", f.alpha_sq, c.alpha_sq, {0.5}),
                                                 pick(f, "tau", f.tau, c.tau, {1.0}));
}

qmeter::OutputFormat output_format(const Flags& f, const qmeter::ConfigFile& c) {
    if (f.given("format")) {
        return qmeter::parse_output_format(f.format);
    }
    return c.output_format.value_or(qmeter::OutputFormat::csv);
}

qmeter::LinearRange grid_from_flag(const std::vector<double>& v, const char* name) {
    if (v.size() != 3 || v[2] < 1 || v[2] != static_cast<double>(static_cast<std::size_t>(v[2]))) {
        throw UsageError(std::string("--") + name + " expects MIN MAX COUNT with integer COUNT >= 1");
    }
    qmeter::LinearRange r{v[0], v[1], static_cast<std::size_t>(v[2])};
    r.validate(name);
    return r;
}

void emit(const Flags& f, const qmeter::Table& table, qmeter::OutputFormat format) {
    if (f.output.empty()) {
        qmeter::write_table(std::cout, table, format);
        std::cout.flush();
        return;
    }
    std::ofstream out(f.output, std::ios::binary);
    if (!out) {
        throw UsageError("cannot open output file '" + f.output + "'");
    }
    qmeter::write_table(out, table, format);
}

int run_rates(const Flags& f) {
    const auto c = load_config(f);
    const auto params = point_params(f, c);
    const std::size_t steps = pick(f, "steps", f.steps, c.n_steps);
    const int exponent = pick(f, "volume-exponent", f.volume_exponent, c.volume_exponent, {2});
    emit(f, qmeter::rates_table(params, steps, exponent), output_format(f, c));
    return 0;
}

int run_mi_curve(const Flags& f) {
    const auto c = load_config(f);
    const auto params = point_params(f, c);
    const std::size_t steps = pick(f, "steps", f.steps, c.n_steps);
    emit(f, qmeter::mi_curve_table(params, steps), output_format(f, c));
    return 0;
}

int run_sweep(const Flags& f) {
    const auto c = load_config(f);
    qmeter::SweepConfig cfg;
    cfg.omega_coupling = pick(f, "omega", f.omega, c.omega_coupling, {cfg.omega_coupling});
    cfg.tau = pick(f, "tau", f.tau, c.tau, {cfg.tau});
    cfg.n_steps = pick(f, "steps", f.steps, c.n_steps, {cfg.n_steps});
    cfg.delta = pick(f, "delta", f.delta, c.delta, {cfg.delta});
    cfg.alpha_sq = pick(f, "alpha-sq", f.alpha_sq, c.alpha_sq, {cfg.alpha_sq});
    cfg.volume_exponent = pick(f, "volume-exponent", f.volume_exponent, c.volume_exponent, {cfg.volume_exponent});
    cfg.output_format = output_format(f, c);
    cfg.workers = f.given("workers") ? qmeter::parse_workers(f.workers) : c.workers.value_or(cfg.workers);
    if (f.given("theta-grid")) {
        cfg.theta_grid = grid_from_flag(f.theta_grid, "theta-grid");
    } else if (c.theta_grid) {
        cfg.theta_grid = *c.theta_grid;
    }
    if (f.given("omega-m-grid")) {
        cfg.omega_meter_grid = grid_from_flag(f.omega_m_grid, "omega-m-grid");
    } else if (c.omega_meter_grid) {
        cfg.omega_meter_grid = *c.omega_meter_grid;
    }
    const auto points = qmeter::run_sweep(cfg);
    emit(f, qmeter::sweep_table(cfg, points), cfg.output_format);
    return 0;
}

int run_oracle_check(const Flags& f) {
    const auto c = load_config(f);
    const auto params = point_params(f, c);
    const std::size_t steps = pick(f, "steps", f.steps, c.n_steps);
    if (steps > qmeter::fock::kMaxOracleSteps) {
        throw UsageError("oracle-check refuses --steps " + std::to_string(steps) + ": the dense oracle is limited to " +
                         std::to_string(qmeter::fock::kMaxOracleSteps) + " collisions");
    }
    qmeter::fock::OracleCheckOptions options;
    options.flip_env_exponent = f.flip_env_sign;
    const auto report = qmeter::fock::compare_with_analytic(params, steps, options);
    emit(f, qmeter::oracle_table(params, steps, report), output_format(f, c));
    return report.passed(qmeter::kOracleTolerance) ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmeter: qubit read by a leaky harmonic meter, collision-model observables"};
    app.require_subcommand(1);

    Flags rates_flags;
    Flags mi_flags;
    Flags sweep_flags;
    Flags oracle_flags;

    auto* rates = app.add_subcommand("rates", "per-step decay rates Gamma_M, Gamma_R, |kappa| and volume V");
    add_shared_flags(rates, rates_flags);
    auto* mi = app.add_subcommand("mi-curve", "mutual information I(S:F_m) for m = 0..steps");
    add_shared_flags(mi, mi_flags);
    auto* sweep = app.add_subcommand("sweep", "non-Markovianity and redundancy over a (theta, omega_M) grid");
    add_shared_flags(sweep, sweep_flags);
    sweep_flags.opts["theta-grid"] =
        sweep->add_option("--theta-grid", sweep_flags.theta_grid, "MIN MAX COUNT (inclusive, linear)")
            ->expected(3);
    sweep_flags.opts["omega-m-grid"] =
        sweep->add_option("--omega-m-grid", sweep_flags.omega_m_grid, "MIN MAX COUNT (inclusive, linear)")
            ->expected(3);
    auto* oracle = app.add_subcommand("oracle-check", "compare closed forms against the truncated-Fock oracle");
    add_shared_flags(oracle, oracle_flags);
    oracle->add_flag("--debug-flip-env-sign", oracle_flags.flip_env_sign,
                     "compare against exp(+2 sum |gamma|^2) for the reservoir factor (expected to fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (rates->parsed()) {
            return run_rates(rates_flags);
        }
        if (mi->parsed()) {
            return run_mi_curve(mi_flags);
        }
        if (sweep->parsed()) {
            return run_sweep(sweep_flags);
        }
        return run_oracle_check(oracle_flags);
    } catch (const qmeter::InvalidArgument& e) {
        std::cerr << "qmeter: " << e.what() << '\n';
        return kExitUsage;
    } catch (const qmeter::ResourceLimitError& e) {
        std::cerr << "qmeter: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "qmeter: " << e.what() << '\n';
        return kExitNumeric;
    }
}
