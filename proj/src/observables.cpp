#include "qmeter/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmeter/errors.hpp"

namespace qmeter {

namespace {

// Clamp x into [lo, hi], failing loudly when it is further out than rounding explains.
double clamp_checked(double x, double lo, double hi, const char* what) {
    if (!(x >= lo - kRoundingTolerance && x <= hi + kRoundingTolerance)) {
        throw ConsistencyError(std::string(what) + " = " + std::to_string(x) + " outside [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return std::clamp(x, lo, hi);
}

// Spectrum of the mixture given 1 - |<u|v>|^2.
SpectrumPair mixture_from_distinguishability(double p, double one_minus_overlap) {
    p = clamp_checked(p, 0.0, 1.0, "population");
    one_minus_overlap = clamp_checked(one_minus_overlap, 0.0, 1.0, "1 - overlap^2");
    const double x = 4.0 * p * (1.0 - p) * one_minus_overlap;
    const double radicand = clamp_checked(1.0 - x, 0.0, 1.0, "eigenvalue radicand");
    // (1 - sqrt(1 - x)) / 2 rewritten to avoid cancellation for small x.
    const double lambda_minus = std::min(0.5, 0.5 * std::min(x, 1.0) / (1.0 + std::sqrt(radicand)));
    return SpectrumPair{1.0 - lambda_minus, lambda_minus};
}

double env_decay(const CollisionTrajectory& traj, std::size_t j_lo, std::size_t j_hi) {
    const auto& g = traj.gamma_sq_prefix();
    return 2.0 * (g[j_hi] - g[j_lo - 1]);
}

void check_fragment(const CollisionTrajectory& traj, std::size_t m, const char* who) {
    if (m > traj.step_count()) {
        throw RangeError(std::string(who) + ": fragment size " + std::to_string(m) +
                         " exceeds collided ancillae " + std::to_string(traj.step_count()));
    }
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("information deficit delta must lie in (0, 1), got " +
                              std::to_string(delta));
    }
}

struct EntropyTerms {
    double system;
    double meter_decay;  // -ln |kappa_M|^2
    double total_env;    // G_l
};

EntropyTerms entropy_terms(const CollisionTrajectory& traj, const ModelParams& params) {
    const double meter_decay = 4.0 * std::norm(traj.meter_amp());
    const double total_env = traj.gamma_sq_prefix().back();
    const double system =
        binary_entropy(mixture_eigenvalues_decay(params.pop_up(), meter_decay + 4.0 * total_env));
    return {system, meter_decay, total_env};
}

double mutual_information_at(const CollisionTrajectory& traj, const ModelParams& params,
                             const EntropyTerms& t, std::size_t m) {
    const double g_m = traj.gamma_sq_prefix()[m];
    const double p = params.pop_up();
    const double fragment = binary_entropy(mixture_eigenvalues_decay(p, 4.0 * g_m));
    const double joint =
        binary_entropy(mixture_eigenvalues_decay(p, t.meter_decay + 4.0 * (t.total_env - g_m)));
    return clamp_checked(t.system + fragment - joint, 0.0, 2.0, "mutual information");
}

}  // namespace

double QubitDensity::trace_distance(const QubitDensity& other) const {
    const double d0 = pop_down - other.pop_down;
    const double d1 = pop_up - other.pop_up;
    const double c = std::abs(coherence - other.coherence);
    const double mean = 0.5 * (d0 + d1);
    const double radius = std::hypot(0.5 * (d0 - d1), c);
    return 0.5 * (std::abs(mean + radius) + std::abs(mean - radius));
}

double kappa_meter(const CollisionTrajectory& traj) {
    return std::exp(-2.0 * std::norm(traj.meter_amp()));
}

double kappa_env_range(const CollisionTrajectory& traj, std::size_t j_lo, std::size_t j_hi) {
    if (j_lo == 0 || j_hi > traj.step_count() || j_lo > j_hi + 1) {
        throw RangeError("kappa_env_range: [" + std::to_string(j_lo) + ", " + std::to_string(j_hi) +
                         "] is not a range inside 1.." + std::to_string(traj.step_count()));
    }
    return std::exp(-env_decay(traj, j_lo, j_hi));
}

double kappa_total(const CollisionTrajectory& traj) {
    return kappa_meter(traj) * kappa_env_range(traj, 1, traj.step_count());
}

RateSample dephasing_rates(const CollisionTrajectory& traj) {
    RateSample r;
    r.step = traj.step_count();
    r.gamma_meter = 2.0 * std::norm(traj.meter_amp());
    r.gamma_env = 2.0 * traj.gamma_sq_prefix().back();
    r.gamma_total = r.gamma_meter + r.gamma_env;
    return r;
}

std::vector<RateSample> rate_series(const CollisionTrajectory& traj) {
    std::vector<RateSample> out;
    out.reserve(traj.step_count() + 1);
    const auto& g = traj.gamma_sq_prefix();
    for (std::size_t l = 0; l <= traj.step_count(); ++l) {
        RateSample r;
        r.step = l;
        r.gamma_meter = 2.0 * std::norm(traj.meter_history()[l]);
        r.gamma_env = 2.0 * g[l];
        r.gamma_total = r.gamma_meter + r.gamma_env;
        out.push_back(r);
    }
    return out;
}

QubitDensity qubit_state(const CollisionTrajectory& traj, const ModelParams& params) {
    QubitDensity rho;
    rho.pop_down = params.pop_down();
    rho.pop_up = params.pop_up();
    rho.coherence = params.alpha0 * std::conj(params.beta0) * kappa_total(traj);
    return rho;
}

SpectrumPair mixture_eigenvalues(double p, double overlap_sq) {
    overlap_sq = clamp_checked(overlap_sq, 0.0, 1.0, "overlap^2");
    return mixture_from_distinguishability(p, 1.0 - overlap_sq);
}

SpectrumPair mixture_eigenvalues_decay(double p, double decay) {
    if (!(decay >= 0.0)) {
        throw ConsistencyError("overlap decay exponent must be >= 0, got " + std::to_string(decay));
    }
    return mixture_from_distinguishability(p, -std::expm1(-decay));
}

double binary_entropy(const SpectrumPair& spec) {
    auto term = [](double lambda) { return lambda > 0.0 ? -lambda * std::log2(lambda) : 0.0; };
    return clamp_checked(term(spec.lambda_plus) + term(spec.lambda_minus), 0.0, 1.0, "entropy");
}

double entropy_system(const CollisionTrajectory& traj, const ModelParams& params) {
    return entropy_terms(traj, params).system;
}

double entropy_fragment(const CollisionTrajectory& traj, const ModelParams& params, std::size_t m) {
    check_fragment(traj, m, "entropy_fragment");
    return binary_entropy(mixture_eigenvalues_decay(params.pop_up(), 4.0 * traj.gamma_sq_prefix()[m]));
}

double entropy_joint(const CollisionTrajectory& traj, const ModelParams& params, std::size_t m) {
    check_fragment(traj, m, "entropy_joint");
    const double decay = 4.0 * std::norm(traj.meter_amp()) + 2.0 * env_decay(traj, m + 1, traj.step_count());
    return binary_entropy(mixture_eigenvalues_decay(params.pop_up(), decay));
}

double mutual_information(const CollisionTrajectory& traj, const ModelParams& params, std::size_t m) {
    check_fragment(traj, m, "mutual_information");
    return mutual_information_at(traj, params, entropy_terms(traj, params), m);
}

std::vector<double> mutual_information_curve(const CollisionTrajectory& traj,
                                             const ModelParams& params) {
    const EntropyTerms t = entropy_terms(traj, params);
    std::vector<double> curve(traj.step_count() + 1);
    for (std::size_t m = 0; m < curve.size(); ++m) {
        curve[m] = mutual_information_at(traj, params, t, m);
    }
    return curve;
}

std::optional<std::size_t> min_fragment(const CollisionTrajectory& traj, const ModelParams& params,
                                        double delta) {
    check_delta(delta);
    const EntropyTerms t = entropy_terms(traj, params);
    if (t.system <= 0.0) {
        return std::nullopt;
    }
    const double target = (1.0 - delta) * t.system;
    for (std::size_t m = 0; m <= traj.step_count(); ++m) {
        if (mutual_information_at(traj, params, t, m) >= target) {
            return m;
        }
    }
    return std::nullopt;
}

Redundancy redundancy(const CollisionTrajectory& traj, const ModelParams& params, double delta) {
    check_delta(delta);
    Redundancy r;
    if (entropy_system(traj, params) <= 0.0) {
        r.degenerate = true;
        return r;
    }
    r.min_fragment = min_fragment(traj, params, delta);
    if (r.min_fragment) {
        r.value = static_cast<double>(traj.step_count()) / static_cast<double>(*r.min_fragment);
    }
    return r;
}

}  // namespace qmeter
