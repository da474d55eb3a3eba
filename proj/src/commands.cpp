#include "qmeter/commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "qmeter/collision.hpp"
#include "qmeter/errors.hpp"
#include "qmeter/nonmarkov.hpp"
#include "qmeter/observables.hpp"

namespace qmeter {

namespace {

std::string range_text(const LinearRange& r) {
    return format_number(r.min) + ":" + format_number(r.max) + ":" + std::to_string(r.count);
}

std::vector<std::pair<std::string, std::string>> point_metadata(const char* command, const ModelParams& p,
                                                                std::size_t n_steps) {
    return {{"qmeter", kVersion},
            {"command", command},
            {"omega", format_number(p.omega_coupling)},
            {"omega_m", format_number(p.omega_meter)},
            {"theta", format_number(p.theta)},
            {"tau", format_number(p.tau)},
            {"alpha_sq", format_number(p.pop_down())},
            {"steps", std::to_string(n_steps)}};
}

SweepPoint evaluate_point(const SweepConfig& config, double theta, double omega_meter) {
    const ModelParams params =
        ModelParams::with_populations(config.omega_coupling, omega_meter, theta, config.alpha_sq, config.tau);
    const CollisionTrajectory traj = run_trajectory(params, config.n_steps);
    const VolumeSeries series = bloch_volume_series(traj, config.volume_exponent);
    const Redundancy red = redundancy(traj, params, config.delta);

    SweepPoint point;
    point.theta = theta;
    point.omega_meter = omega_meter;
    point.nm_ratio = nonmarkovianity_ratio(series, config.n_steps);
    point.m_star = red.min_fragment;
    point.redundancy = red.value;
    return point;
}

// JSON field readers with the field path in every diagnostic.
double read_number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) {
        throw InvalidArgument("config field '" + field + "': expected a number, got " + j.dump());
    }
    return j.get<double>();
}

std::size_t read_count(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_unsigned()) {
        throw InvalidArgument("config field '" + field + "': expected a non-negative integer, got " + j.dump());
    }
    return j.get<std::size_t>();
}

LinearRange read_range(const nlohmann::json& j, const std::string& field) {
    if (!j.is_object()) {
        throw InvalidArgument("config field '" + field + "': expected {\"min\", \"max\", \"count\"}");
    }
    LinearRange r;
    for (const auto& [key, value] : j.items()) {
        if (key == "min") {
            r.min = read_number(value, field + ".min");
        } else if (key == "max") {
            r.max = read_number(value, field + ".max");
        } else if (key == "count") {
            r.count = read_count(value, field + ".count");
        } else {
            throw InvalidArgument("config field '" + field + "." + key + "': unknown key");
        }
    }
    if (!j.contains("min") || !j.contains("max") || !j.contains("count")) {
        throw InvalidArgument("config field '" + field + "': needs min, max and count");
    }
    r.validate(field.c_str());
    return r;
}

}  // namespace

void LinearRange::validate(const char* name) const {
    if (count < 1) {
        throw InvalidArgument(std::string(name) + ": grid count must be >= 1");
    }
    if (!std::isfinite(min) || !std::isfinite(max) || min > max) {
        throw InvalidArgument(std::string(name) + ": grid bounds must be finite with min <= max");
    }
}

std::vector<double> LinearRange::values() const {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = min;
        return out;
    }
    const double step = (max - min) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i + 1 < count; ++i) {
        out[i] = min + static_cast<double>(i) * step;
    }
    out.back() = max;
    return out;
}

void SweepConfig::validate() const {
    theta_grid.validate("theta_grid");
    omega_meter_grid.validate("omega_meter_grid");
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("delta must lie in (0, 1)");
    }
    if (volume_exponent != 1 && volume_exponent != 2) {
        throw InvalidArgument("volume_exponent must be 1 or 2");
    }
    if (n_steps > kDefaultMaxSteps) {
        throw InvalidArgument("n_steps exceeds the maximum " + std::to_string(kDefaultMaxSteps));
    }
    // Parameter-level checks (theta range, tau, populations) on the grid corners.
    for (double theta : {theta_grid.min, theta_grid.max}) {
        for (double omega : {omega_meter_grid.min, omega_meter_grid.max}) {
            ModelParams::with_populations(omega_coupling, omega, theta, alpha_sq, tau);
        }
    }
}

std::vector<SweepPoint> run_sweep(const SweepConfig& config) {
    config.validate();
    const std::vector<double> thetas = config.theta_grid.values();
    const std::vector<double> omegas = config.omega_meter_grid.values();
    const std::size_t total = thetas.size() * omegas.size();
    std::vector<SweepPoint> points(total);

    std::size_t workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
    workers = std::min(workers, std::max<std::size_t>(total, 1));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                points[i] = evaluate_point(config, thetas[i / omegas.size()], omegas[i % omegas.size()]);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = total;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(work);
        }
        work();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return points;
}

Table rates_table(const ModelParams& params, std::size_t n_steps, int volume_exponent) {
    const CollisionTrajectory traj = run_trajectory(params, n_steps);
    const VolumeSeries series = bloch_volume_series(traj, volume_exponent);
    Table t;
    t.metadata = point_metadata("rates", params, n_steps);
    t.metadata.emplace_back("volume_exponent", std::to_string(volume_exponent));
    t.columns = {"step", "Gamma_M", "Gamma_R", "Gamma", "kappa_abs", "V"};
    for (const RateSample& r : rate_series(traj)) {
        const double kappa_abs = std::exp(-r.gamma_meter) * std::exp(-r.gamma_env);
        t.rows.push_back({Cell{std::uint64_t{r.step}}, r.gamma_meter, r.gamma_env, r.gamma_total, kappa_abs,
                          series.values[r.step]});
    }
    return t;
}

Table mi_curve_table(const ModelParams& params, std::size_t n_steps) {
    const CollisionTrajectory traj = run_trajectory(params, n_steps);
    const std::vector<double> curve = mutual_information_curve(traj, params);
    Table t;
    t.metadata = point_metadata("mi-curve", params, n_steps);
    t.metadata.emplace_back("S_system", format_number(entropy_system(traj, params)));
    t.metadata.emplace_back("kappa_meter", format_number(kappa_meter(traj)));
    t.columns = {"m", "I"};
    for (std::size_t m = 0; m < curve.size(); ++m) {
        t.rows.push_back({Cell{std::uint64_t{m}}, curve[m]});
    }
    return t;
}

Table sweep_table(const SweepConfig& config, const std::vector<SweepPoint>& points) {
    Table t;
    t.metadata = {{"qmeter", kVersion},
                  {"command", "sweep"},
                  {"omega", format_number(config.omega_coupling)},
                  {"tau", format_number(config.tau)},
                  {"alpha_sq", format_number(config.alpha_sq)},
                  {"steps", std::to_string(config.n_steps)},
                  {"delta", format_number(config.delta)},
                  {"volume_exponent", std::to_string(config.volume_exponent)},
                  {"theta_grid", range_text(config.theta_grid)},
                  {"omega_m_grid", range_text(config.omega_meter_grid)}};
    t.columns = {"theta", "omega_m", "nm_ratio", "m_star", "redundancy"};
    for (const SweepPoint& p : points) {
        Cell m_star = p.m_star ? Cell{std::uint64_t{*p.m_star}} : Cell{};
        t.rows.push_back({p.theta, p.omega_meter, p.nm_ratio, std::move(m_star), p.redundancy});
    }
    return t;
}

Table oracle_table(const ModelParams& params, std::size_t n_steps, const fock::OracleReport& report,
                   double tolerance) {
    Table t;
    t.metadata = point_metadata("oracle-check", params, n_steps);
    t.metadata.emplace_back("tolerance", format_number(tolerance));
    std::string dims;
    for (std::size_t i = 0; i < report.dims.size(); ++i) {
        dims += (i ? "x" : "") + std::to_string(report.dims[i]);
    }
    t.metadata.emplace_back("dims", dims);
    t.columns = {"observable", "max_abs_deviation", "status"};
    for (const fock::OracleRow& row : report.rows) {
        const bool ok = row.max_abs_deviation <= tolerance;
        t.rows.push_back({row.observable, row.max_abs_deviation, std::string(ok ? "pass" : "FAIL")});
    }
    return t;
}

ConfigFile parse_config(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    if (!j.is_object()) {
        throw InvalidArgument("config: top level must be a JSON object");
    }
    ConfigFile c;
    for (const auto& [key, value] : j.items()) {
        if (key == "omega_coupling") {
            c.omega_coupling = read_number(value, key);
        } else if (key == "omega_meter") {
            c.omega_meter = read_number(value, key);
        } else if (key == "theta") {
            c.theta = read_number(value, key);
        } else if (key == "tau") {
            c.tau = read_number(value, key);
        } else if (key == "n_steps") {
            c.n_steps = read_count(value, key);
        } else if (key == "alpha_sq") {
            c.alpha_sq = read_number(value, key);
        } else if (key == "delta") {
            c.delta = read_number(value, key);
        } else if (key == "volume_exponent") {
            const std::size_t e = read_count(value, key);
            if (e != 1 && e != 2) {
                throw InvalidArgument("config field 'volume_exponent': must be 1 or 2");
            }
            c.volume_exponent = static_cast<int>(e);
        } else if (key == "output_format") {
            if (!value.is_string()) {
                throw InvalidArgument("config field 'output_format': expected \"csv\" or \"json\"");
            }
            c.output_format = parse_output_format(value.get<std::string>());
        } else if (key == "parallelism") {
            if (value.is_string()) {
                c.workers = parse_workers(value.get<std::string>());
            } else {
                c.workers = read_count(value, key);
                if (*c.workers == 0) {
                    throw InvalidArgument("config field 'parallelism': worker count must be >= 1 or \"auto\"");
                }
            }
        } else if (key == "theta_grid") {
            c.theta_grid = read_range(value, key);
        } else if (key == "omega_meter_grid") {
            c.omega_meter_grid = read_range(value, key);
        } else {
            throw InvalidArgument("config field '" + key + "': unknown field");
        }
    }
    return c;
}

std::size_t parse_workers(const std::string& text) {
    if (text == "auto") {
        return 0;
    }
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || n == 0 || text.empty() || text[0] == '-') {
        throw InvalidArgument("workers must be a positive integer or 'auto', got '" + text + "'");
    }
    return static_cast<std::size_t>(n);
}

}  // namespace qmeter
