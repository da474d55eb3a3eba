#include "qmeter/collision.hpp"

#include <cmath>
#include <string>

#include "qmeter/errors.hpp"

namespace qmeter {

cplx mean_phase_factor(std::size_t k, double omega_meter, double tau) {
    // Closed form: exp(-i w (k - 1/2) tau) * sin(w tau / 2) / (w tau / 2).
    const double half = 0.5 * omega_meter * tau;
    double envelope;
    if (std::abs(omega_meter * tau) < kPhaseSeriesThreshold) {
        const double h2 = half * half;
        envelope = 1.0 - h2 / 6.0 + h2 * h2 / 120.0;
    } else {
        envelope = std::sin(half) / half;
    }
    const double phase = omega_meter * tau * (static_cast<double>(k) - 0.5);
    return std::polar(envelope, -phase);
}

cplx displacement_kick(std::size_t k, const ModelParams& params) {
    return cplx{0.0, -params.omega_coupling * params.tau} *
           mean_phase_factor(k, params.omega_meter, params.tau);
}

CollisionTrajectory::CollisionTrajectory() : meter_history_{cplx{}}, gamma_sq_prefix_{0.0} {}

cplx CollisionTrajectory::meter_amp_at(std::size_t step) const {
    if (step > step_count()) {
        throw RangeError("meter_amp_at: step " + std::to_string(step) + " beyond trajectory length " +
                         std::to_string(step_count()));
    }
    return meter_history_[step];
}

cplx CollisionTrajectory::ancilla_amp(std::size_t j) const {
    if (j == 0 || j > step_count()) {
        throw RangeError("ancilla_amp: index " + std::to_string(j) + " outside 1.." +
                         std::to_string(step_count()));
    }
    return ancilla_amps_[j - 1];
}

CollisionTrajectory CollisionTrajectory::prefix(std::size_t step) const {
    if (step > step_count()) {
        throw RangeError("prefix: step " + std::to_string(step) + " beyond trajectory length " +
                         std::to_string(step_count()));
    }
    CollisionTrajectory out;
    out.meter_history_.assign(meter_history_.begin(), meter_history_.begin() + step + 1);
    out.ancilla_amps_.assign(ancilla_amps_.begin(), ancilla_amps_.begin() + step);
    out.gamma_sq_prefix_.assign(gamma_sq_prefix_.begin(), gamma_sq_prefix_.begin() + step + 1);
    return out;
}

CollisionTrajectory collide(CollisionTrajectory traj, const ModelParams& params) {
    const std::size_t k = traj.step_count() + 1;
    const cplx displaced = traj.meter_amp() + displacement_kick(k, params);
    const double c = std::cos(0.5 * params.theta);
    const double s = std::sin(0.5 * params.theta);
    const cplx ancilla = cplx{0.0, s} * displaced;

    traj.meter_history_.push_back(displaced * c);
    traj.ancilla_amps_.push_back(ancilla);
    traj.gamma_sq_prefix_.push_back(traj.gamma_sq_prefix_.back() + std::norm(ancilla));
    return traj;
}

CollisionTrajectory run_trajectory(const ModelParams& params, std::size_t n_steps,
                                   std::size_t max_steps) {
    if (n_steps > max_steps) {
        throw ResourceLimitError("run_trajectory: " + std::to_string(n_steps) +
                                 " steps exceeds the configured maximum " + std::to_string(max_steps));
    }
    params.validate();
    CollisionTrajectory traj;
    for (std::size_t i = 0; i < n_steps; ++i) {
        traj = collide(std::move(traj), params);
    }
    return traj;
}

}  // namespace qmeter
