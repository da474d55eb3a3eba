// collision.hpp: closed-form collision recursion for the meter and reservoir ancillae.
//
// Each collision k applies a qubit-conditioned meter displacement by +alpha_k (|up>)
// or -alpha_k (|down>), then a beam splitter between the meter and a fresh vacuum
// ancilla. On coherent inputs this maps the up-branch meter amplitude as
//
//     meter_l   = (meter_{l-1} + alpha_l) cos(theta/2)
//     ancilla_l = i (meter_{l-1} + alpha_l) sin(theta/2)
//
// The down branch carries the negated amplitudes and is never stored.

#pragma once

#include <cstddef>
#include <vector>

#include "qmeter/model.hpp"

namespace qmeter {

inline constexpr std::size_t kDefaultMaxSteps = 10'000'000;

// Below this |omega_meter * tau| the time average of exp(-i w t) uses its Taylor series.
inline constexpr double kPhaseSeriesThreshold = 1e-6;

// (1/tau) * integral over [(k-1) tau, k tau] of exp(-i w t) dt.
cplx mean_phase_factor(std::size_t k, double omega_meter, double tau);

// alpha_k = -i * Omega * tau * f_k
cplx displacement_kick(std::size_t k, const ModelParams& params);

class CollisionTrajectory {
public:
    CollisionTrajectory();

    std::size_t step_count() const noexcept { return ancilla_amps_.size(); }

    // Up-branch meter amplitude after the latest collision.
    cplx meter_amp() const noexcept { return meter_history_.back(); }

    // Up-branch meter amplitude after collision `step` (0 <= step <= step_count()).
    cplx meter_amp_at(std::size_t step) const;

    // Up-branch amplitude of ancilla j, 1-based.
    cplx ancilla_amp(std::size_t j) const;

    const std::vector<cplx>& ancilla_amps() const noexcept { return ancilla_amps_; }
    const std::vector<cplx>& meter_history() const noexcept { return meter_history_; }

    // G_m = sum_{j<=m} |ancilla_j|^2, m = 0..step_count().
    const std::vector<double>& gamma_sq_prefix() const noexcept { return gamma_sq_prefix_; }

    // Copy of the trajectory truncated to its first `step` collisions.
    CollisionTrajectory prefix(std::size_t step) const;

    friend bool operator==(const CollisionTrajectory&, const CollisionTrajectory&) = default;

private:
    friend CollisionTrajectory collide(CollisionTrajectory traj, const ModelParams& params);

    std::vector<cplx> meter_history_;
    std::vector<cplx> ancilla_amps_;
    std::vector<double> gamma_sq_prefix_;
};

// Advance by one collision. Pass an rvalue to extend in place in amortized O(1).
CollisionTrajectory collide(CollisionTrajectory traj, const ModelParams& params);

// Throws ResourceLimitError when n_steps > max_steps.
CollisionTrajectory run_trajectory(const ModelParams& params, std::size_t n_steps,
                                   std::size_t max_steps = kDefaultMaxSteps);

}  // namespace qmeter
