// Acceptance runner: one PASS/FAIL line per criterion.
//
//     qmeter_acceptance                 all criteria
//     qmeter_acceptance --criterion 3   just one
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmeter/collision.hpp"
#include "qmeter/commands.hpp"
#include "qmeter/fock_oracle.hpp"
#include "qmeter/nonmarkov.hpp"
#include "qmeter/observables.hpp"

using qmeter::ModelParams;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass{true};
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAILED]");
        pass = pass && ok;
    }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

int sign_changes(const std::vector<double>& x) {
    int changes = 0;
    int previous = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double d = x[i] - x[i - 1];
        const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (s != 0) {
            changes += (previous != 0 && s != previous) ? 1 : 0;
            previous = s;
        }
    }
    return changes;
}

// 1. Closed forms against the truncated-Fock oracle on a 3x3x3 grid, l <= 5.
Verdict oracle_equivalence() {
    Verdict v;
    const auto start = Clock::now();
    const std::vector<std::string> compared = {"kappa_meter", "kappa_env",  "kappa_total",       "rho_S_trace_distance",
                                               "S_system",    "S_fragment", "S_joint",           "mutual_information",
                                               "truncation_leakage", "spectral_residual"};
    double worst = 0.0;
    std::string worst_at;
    int failures = 0;
    for (double omega : {0.1, 0.3, 0.5}) {
        for (double omega_m : {0.0, 0.1, 5.0}) {
            for (double theta : {0.5, 1.5, std::numbers::pi}) {
                const auto params = ModelParams::with_populations(omega, omega_m, theta);
                const auto report = qmeter::fock::compare_with_analytic(params, 5);
                for (const auto& row : report.rows) {
                    if (std::find(compared.begin(), compared.end(), row.observable) == compared.end()) {
                        continue;
                    }
                    if (!(row.max_abs_deviation <= 1e-8)) {
                        ++failures;
                    }
                    if (!(row.max_abs_deviation <= worst)) {
                        worst = row.max_abs_deviation;
                        worst_at = row.observable + " at (Omega " + num(omega) + ", omega_M " + num(omega_m) +
                                   ", theta " + num(theta) + ")";
                    }
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    v.require(failures == 0, "27 points, max |analytic - oracle| = " + num(worst) + " (" + worst_at + ") <= 1e-8");
    v.require(elapsed <= 60.0, "runtime " + num(elapsed) + " s <= 60 s");
    return v;
}

// 2. Oscillating meter rate and monotone reservoir rate.
Verdict rate_oscillations() {
    Verdict v;
    const auto start = Clock::now();
    double worst_env_step = 0.0;
    for (double theta : {0.1, 0.5}) {
        const auto series = qmeter::rate_series(qmeter::run_trajectory(ModelParams::with_populations(0.5, 5.0, theta), 1000));
        std::vector<double> meter;
        for (const auto& r : series) {
            meter.push_back(r.gamma_meter);
        }
        const int changes = sign_changes(meter);
        v.require(changes >= 10, "theta " + num(theta) + ": " + std::to_string(changes) + " sign changes of dGamma_M >= 10");
    }
    for (double omega_m : {0.0, 0.1, 1.0, 5.0}) {
        for (double theta : {0.1, 0.5, 1.5, 3.0}) {
            const auto series =
                qmeter::rate_series(qmeter::run_trajectory(ModelParams::with_populations(0.5, omega_m, theta), 1000));
            for (std::size_t l = 1; l < series.size(); ++l) {
                worst_env_step = std::min(worst_env_step, series[l].gamma_env - series[l - 1].gamma_env);
            }
        }
    }
    v.require(worst_env_step >= -1e-15, "min dGamma_R = " + num(worst_env_step) + " >= -1e-15 over 16 parameter sets");
    const double elapsed = seconds_since(start);
    v.require(elapsed <= 1.0, "runtime " + num(elapsed) + " s <= 1 s");
    return v;
}

// 3. Mutual-information curves after 1000 collisions.
Verdict information_curves() {
    Verdict v;
    constexpr std::size_t ell = 1000;
    constexpr double delta = 0.1;
    double slowest = 0.0;
    auto curve_for = [&](double omega_m, double theta, std::vector<double>& curve) {
        const auto start = Clock::now();
        const auto params = ModelParams::with_populations(0.5, omega_m, theta);
        const auto traj = qmeter::run_trajectory(params, ell);
        curve = qmeter::mutual_information_curve(traj, params);
        const double s = qmeter::entropy_system(traj, params);
        const auto m_star = qmeter::min_fragment(traj, params, delta);
        slowest = std::max(slowest, seconds_since(start));
        return std::make_pair(s, m_star);
    };

    std::vector<double> curve;
    const auto [s_plateau, m_plateau] = curve_for(0.1, 3.0, curve);
    if (m_plateau) {
        bool inside = true;
        for (std::size_t m = *m_plateau; m <= static_cast<std::size_t>(0.9 * ell); ++m) {
            inside = inside && curve[m] >= (1.0 - delta) * s_plateau && curve[m] <= 2.0 * s_plateau;
        }
        v.require(static_cast<double>(*m_plateau) / ell <= 0.05,
                  "theta 3: m* = " + std::to_string(*m_plateau) + ", m*/l <= 0.05");
        v.require(inside, "theta 3: I within [(1-delta)S, 2S] on [m*, 0.9 l]");
    } else {
        v.require(false, "theta 3: m* exists");
    }

    curve_for(0.1, 0.5, curve);
    v.require(curve[ell] <= 2.0 - 0.05, "theta 0.5: I(l, l) = " + num(curve[ell]) + " <= 1.95");

    const auto [s_stiff, m_stiff] = curve_for(5.0, 0.5, curve);
    v.require(!m_stiff.has_value(), std::string("omega_M 5, theta 0.5: m* absent (got ") +
                                        (m_stiff ? "m* = " + std::to_string(*m_stiff) : "none") + ", S = " +
                                        num(s_stiff) + ")");
    v.require(slowest <= 1.0, "slowest curve " + num(slowest) + " s <= 1 s");
    return v;
}

// 4. Redundancy versus non-Markovianity on a 20 x 20 grid.
Verdict sweep_anticorrelation() {
    Verdict v;
    qmeter::SweepConfig cfg;
    cfg.theta_grid = {std::numbers::pi / 20.0, std::numbers::pi, 20};
    cfg.omega_meter_grid = {0.3, 6.0, 20};
    cfg.omega_coupling = 0.1;
    cfg.n_steps = 500;
    cfg.delta = 0.1;
    cfg.workers = 4;
    const auto start = Clock::now();
    const auto points = qmeter::run_sweep(cfg);
    const double elapsed = seconds_since(start);

    const auto best = std::max_element(points.begin(), points.end(),
                                       [](const auto& a, const auto& b) { return a.redundancy < b.redundancy; });
    const double r_max = best->redundancy;
    int non_markovian = 0;
    int violating = 0;
    double worst_r = 0.0;
    for (const auto& p : points) {
        if (p.nm_ratio > 0.05) {
            ++non_markovian;
            if (p.redundancy > 0.05 * r_max) {
                ++violating;
                worst_r = std::max(worst_r, p.redundancy);
            }
        }
    }
    v.require(violating == 0, std::to_string(violating) + " of " + std::to_string(non_markovian) +
                                  " cells with nm_ratio > 0.05 have R > 5% of R_max = " + num(r_max) +
                                  " (largest such R " + num(worst_r) + ")");
    v.require(best->nm_ratio <= 1e-6, "max-R cell (theta " + num(best->theta) + ", omega_M " + num(best->omega_meter) +
                                          ") has nm_ratio " + num(best->nm_ratio) + " <= 1e-6");
    v.require(elapsed <= 120.0, "runtime " + num(elapsed) + " s <= 120 s");
    return v;
}

// 5. Randomized property checks.
Verdict property_suites() {
    Verdict v;
    std::mt19937_64 rng(0x51ed2701ULL);
    std::uniform_real_distribution<double> coupling(0.0, 0.6);
    std::uniform_real_distribution<double> frequency(0.0, 6.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> population(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> length(1, 400);

    int draws = 0;
    int rejected = 0;
    std::array<int, 7> failed{};
    double worst_telescope = 0.0;
    while (draws < 200) {
        const auto params = ModelParams::with_populations(coupling(rng), frequency(rng), angle(rng), population(rng));
        const std::size_t ell = length(rng);
        const auto traj = qmeter::run_trajectory(params, ell);
        // Keep V = exp(-2 Gamma) representable so the volume series is strictly positive.
        if (qmeter::dephasing_rates(traj).gamma_total > 300.0 ||
            std::any_of(traj.meter_history().begin(), traj.meter_history().end(),
                        [](qmeter::cplx z) { return 2.0 * std::norm(z) > 300.0; })) {
            ++rejected;
            continue;
        }
        ++draws;

        const double p = params.pop_up();
        bool spectra_ok = true;
        bool entropies_ok = true;
        auto check_pair = [&](const qmeter::SpectrumPair& s) {
            spectra_ok = spectra_ok && std::abs(s.lambda_plus + s.lambda_minus - 1.0) <= 1e-15 &&
                         s.lambda_minus >= 0.0 && s.lambda_minus <= 0.5;
        };
        check_pair(qmeter::mixture_eigenvalues(p, qmeter::kappa_total(traj) * qmeter::kappa_total(traj)));
        const auto curve = qmeter::mutual_information_curve(traj, params);
        const double s_sys = qmeter::entropy_system(traj, params);
        entropies_ok = entropies_ok && s_sys >= 0.0 && s_sys <= 1.0;
        bool monotone = true;
        bool frozen = true;
        const auto next = qmeter::collide(traj, params);
        for (std::size_t m = 0; m <= ell; ++m) {
            const double k_frag = qmeter::kappa_env_range(traj, 1, m);
            check_pair(qmeter::mixture_eigenvalues(p, k_frag * k_frag));
            const double s_f = qmeter::entropy_fragment(traj, params, m);
            const double s_sf = qmeter::entropy_joint(traj, params, m);
            entropies_ok = entropies_ok && s_f >= 0.0 && s_f <= 1.0 && s_sf >= 0.0 && s_sf <= 1.0 && curve[m] >= 0.0 &&
                           curve[m] <= 2.0;
            if (m > 0) {
                monotone = monotone && curve[m] >= curve[m - 1] - 1e-12;
            }
            frozen = frozen && std::abs(qmeter::entropy_fragment(next, params, m) - s_f) <= 1e-12;
        }

        const auto series = qmeter::bloch_volume_series(traj);
        const auto split = qmeter::nonmarkovianity_split(series, ell);
        const double telescope = std::abs((split.n_minus - split.n_plus) - (series.values[0] - series.values[ell]));
        worst_telescope = std::max(worst_telescope, telescope);

        const bool by_volume = qmeter::nonmarkovianity_ratio(series, ell) > 0.0;
        const bool by_rate = qmeter::has_rate_backflow(traj);
        const bool by_kappa = qmeter::has_coherence_revival(traj);
        const bool by_linear = qmeter::nonmarkovianity_ratio(qmeter::bloch_volume_series(traj, 1), ell) > 0.0;

        failed[0] += spectra_ok ? 0 : 1;
        failed[1] += entropies_ok ? 0 : 1;
        failed[2] += monotone ? 0 : 1;
        failed[3] += frozen ? 0 : 1;
        failed[4] += telescope <= 1e-12 ? 0 : 1;
        failed[5] += (by_volume == by_rate && by_rate == by_kappa) ? 0 : 1;
        failed[6] += by_volume == by_linear ? 0 : 1;
    }
    const char* names[] = {"lambda+ + lambda- = 1",      "entropies in range", "I monotone in m",
                           "fragment entropy frozen",    "telescoping",        "classification agreement",
                           "exponent invariance"};
    for (std::size_t i = 0; i < failed.size(); ++i) {
        v.require(failed[i] == 0, std::string(names[i]) + " (" + std::to_string(failed[i]) + " failing draws)");
    }
    v.detail << "; " << draws << " draws, " << rejected << " rejected for V underflow, max telescoping error "
             << num(worst_telescope);
    return v;
}

std::optional<std::string> capture(const std::string& args) {
    const std::string cmd = std::string("\"") + QMETER_CLI + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return std::nullopt;
    }
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        out.append(buf.data(), n);
    }
    if (pclose(pipe) != 0) {
        return std::nullopt;
    }
    return out;
}

// O(l^2) recomputation: every entropy from directly summed amplitudes, no prefix sums.
std::vector<double> naive_curve(const qmeter::CollisionTrajectory& traj, const ModelParams& params) {
    const std::size_t ell = traj.step_count();
    const double p = params.pop_up();
    const double meter_sq = std::norm(traj.meter_amp());
    double all = 0.0;
    for (std::size_t j = 1; j <= ell; ++j) {
        all += std::norm(traj.ancilla_amp(j));
    }
    const double s_sys = qmeter::binary_entropy(qmeter::mixture_eigenvalues_decay(p, 4.0 * meter_sq + 4.0 * all));
    std::vector<double> curve(ell + 1);
    for (std::size_t m = 0; m <= ell; ++m) {
        double inside = 0.0;
        double outside = 0.0;
        for (std::size_t j = 1; j <= ell; ++j) {
            (j <= m ? inside : outside) += std::norm(traj.ancilla_amp(j));
        }
        const double s_f = qmeter::binary_entropy(qmeter::mixture_eigenvalues_decay(p, 4.0 * inside));
        const double s_sf = qmeter::binary_entropy(qmeter::mixture_eigenvalues_decay(p, 4.0 * meter_sq + 4.0 * outside));
        curve[m] = std::max(0.0, s_sys + s_f - s_sf);
    }
    return curve;
}

// 6. Speed of the curve, agreement with the naive path, and CLI determinism.
Verdict performance_determinism() {
    Verdict v;
    const auto params = ModelParams::with_populations(0.5, 0.1, 3.0);
    const auto big = qmeter::run_trajectory(params, 10000);
    std::vector<double> times;
    for (int i = 0; i < 5; ++i) {
        const auto start = Clock::now();
        const auto curve = qmeter::mutual_information_curve(big, params);
        times.push_back(seconds_since(start));
        if (curve.size() != 10001) {
            v.require(false, "curve length");
        }
    }
    std::sort(times.begin(), times.end());
    v.require(times[2] <= 0.1, "curve at l = 10^4: median " + num(times[2] * 1e3) + " ms <= 100 ms");

    double worst = 0.0;
    for (const auto& p : {params, ModelParams::with_populations(0.1, 5.0, 0.5, 0.3), ModelParams::with_populations(0.4, 1.0, 1.2)}) {
        const auto traj = qmeter::run_trajectory(p, 2000);
        const auto fast = qmeter::mutual_information_curve(traj, p);
        const auto slow = naive_curve(traj, p);
        for (std::size_t m = 0; m < fast.size(); ++m) {
            worst = std::max(worst, std::abs(fast[m] - slow[m]));
        }
    }
    v.require(worst <= 1e-12, "l = 2000: max |fast - naive| = " + num(worst) + " <= 1e-12");

    const std::string sweep = "sweep --omega 0.1 --steps 300 --theta-grid 0.2 3.1 6 --omega-m-grid 0.3 6 6";
    const std::vector<std::string> commands = {"rates --omega 0.5 --omega-m 5 --theta 0.1 --steps 1000",
                                               "mi-curve --omega 0.5 --omega-m 0.1 --theta 3 --steps 1000 --format json",
                                               "oracle-check --omega 0.3 --omega-m 0.1 --theta 1.5 --steps 3", sweep};
    bool repeat_ok = true;
    for (const auto& c : commands) {
        const auto a = capture(c);
        const auto b = capture(c);
        repeat_ok = repeat_ok && a && b && *a == *b && !a->empty();
    }
    v.require(repeat_ok, "repeated CLI runs byte-identical");
    const auto w1 = capture(sweep + " --workers 1");
    bool workers_ok = w1.has_value();
    for (const char* w : {"2", "4", "8", "auto"}) {
        const auto out = capture(sweep + " --workers " + w);
        workers_ok = workers_ok && out && *out == *w1;
    }
    v.require(workers_ok, "sweep byte-identical for workers 1, 2, 4, 8, auto");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::optional<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"meter-rate oscillations", rate_oscillations},
        {"mutual-information curves", information_curves},
        {"redundancy vs non-Markovianity sweep", sweep_anticorrelation},
        {"property suites", property_suites},
        {"performance and determinism", performance_determinism},
    };
    if (only && (*only < 1 || *only > static_cast<int>(criteria.size()))) {
        std::fprintf(stderr, "no criterion %d\n", *only);
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i + 1) != *only) {
            continue;
        }
        const Verdict v = criteria[i].second();
        std::printf("criterion %zu %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                    v.detail.str().c_str());
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
