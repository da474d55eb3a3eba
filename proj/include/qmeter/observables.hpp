// observables.hpp: decoherence factors, dephasing rates, entropies, mutual information
// and redundancy computed in closed form from a CollisionTrajectory.
//
// Every reduced state that appears here is a two-branch mixture
//     p |u><u| + (1 - p) |v><v|,   |<u|v>|^2 = s,
// whose spectrum is (1 +- sqrt(1 - 4 p (1 - p) (1 - s))) / 2. Overlaps of the opposite
// coherent amplitudes +a and -a are exp(-2|a|^2), so all overlaps are tracked through
// their decay exponents and the prefix sums G_m of |ancilla_j|^2. Fragments are the
// first m ancillae in collision order. Entropies are in bits.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qmeter/collision.hpp"
#include "qmeter/model.hpp"

namespace qmeter {

// Rounding slack allowed before a range violation becomes a ConsistencyError.
inline constexpr double kRoundingTolerance = 1e-12;

// Qubit reduced state in the (|down>, |up>) basis.
struct QubitDensity {
    double pop_up{0.0};
    double pop_down{1.0};
    cplx coherence{};  // <down| rho |up> = alpha beta* kappa

    double trace_distance(const QubitDensity& other) const;
};

struct SpectrumPair {
    double lambda_plus{1.0};
    double lambda_minus{0.0};
};

struct RateSample {
    std::size_t step{0};
    double gamma_meter{0.0};
    double gamma_env{0.0};
    double gamma_total{0.0};
};

// exp(-2 |meter_l|^2): overlap of the two meter branches.
double kappa_meter(const CollisionTrajectory& traj);

// prod_{j = j_lo..j_hi} <+a_j|-a_j> = exp(-2 (G_{j_hi} - G_{j_lo - 1})), 1-based and inclusive.
// j_lo = j_hi + 1 is the empty range. Throws RangeError otherwise out of 1..step_count().
double kappa_env_range(const CollisionTrajectory& traj, std::size_t j_lo, std::size_t j_hi);

// kappa_meter * kappa_env_range(1..l); real and positive, since both branch overlaps are.
double kappa_total(const CollisionTrajectory& traj);

// Gamma_M = 2|meter_l|^2, Gamma_R = 2 G_l, never through log(kappa).
RateSample dephasing_rates(const CollisionTrajectory& traj);

// Rates at every step 0..step_count().
std::vector<RateSample> rate_series(const CollisionTrajectory& traj);

// Off-diagonal element alpha beta* kappa; kappa is real positive, so the coherence keeps
// the phase of alpha beta* at every step.
QubitDensity qubit_state(const CollisionTrajectory& traj, const ModelParams& params);

SpectrumPair mixture_eigenvalues(double p, double overlap_sq);

// Same spectrum with overlap_sq = exp(-decay); keeps precision when decay is tiny.
SpectrumPair mixture_eigenvalues_decay(double p, double decay);

double binary_entropy(const SpectrumPair& spec);

double entropy_system(const CollisionTrajectory& traj, const ModelParams& params);

// Entropy of the first m ancillae; fixed once l >= m.
double entropy_fragment(const CollisionTrajectory& traj, const ModelParams& params, std::size_t m);

// S(rho_{S F_m}) evaluated as S(rho_{M F_m^perp}) through global purity.
double entropy_joint(const CollisionTrajectory& traj, const ModelParams& params, std::size_t m);

double mutual_information(const CollisionTrajectory& traj, const ModelParams& params, std::size_t m);

// I(S : F_m) for m = 0..l in O(l).
std::vector<double> mutual_information_curve(const CollisionTrajectory& traj,
                                             const ModelParams& params);

// Smallest m with I(S : F_m) >= (1 - delta) S(rho_S); empty when none exists or S(rho_S) = 0.
std::optional<std::size_t> min_fragment(const CollisionTrajectory& traj, const ModelParams& params,
                                        double delta);

struct Redundancy {
    double value{0.0};                       // l / m*, or 0 without m*
    std::optional<std::size_t> min_fragment;  // m*
    bool degenerate{false};                  // S(rho_S) = 0: nothing to proliferate
};

Redundancy redundancy(const CollisionTrajectory& traj, const ModelParams& params, double delta);

}  // namespace qmeter
