// model.hpp: physical parameters of the qubit / meter / reservoir collision model.
//
// Frequencies are in units of 1/tau. The qubit starts in alpha0|down> + beta0|up>,
// the meter and every reservoir ancilla start in the vacuum.

#pragma once

#include <complex>
#include <numbers>

namespace qmeter {

using cplx = std::complex<double>;

struct ModelParams {
    double omega_coupling{0.0};  // qubit-meter coupling
    double omega_meter{0.0};     // meter frequency
    double theta{0.0};           // meter-ancilla mixing angle, [0, 2pi)
    double tau{1.0};             // collision duration
    cplx alpha0{std::numbers::sqrt2 / 2, 0.0};  // amplitude on |down>
    cplx beta0{std::numbers::sqrt2 / 2, 0.0};   // amplitude on |up>

    // Throws InvalidArgument when an invariant is violated.
    void validate() const;

    double pop_down() const noexcept { return std::norm(alpha0); }
    double pop_up() const noexcept { return std::norm(beta0); }

    // Real, non-negative amplitudes with |alpha0|^2 = alpha_sq.
    static ModelParams with_populations(double omega_coupling, double omega_meter, double theta,
                                        double alpha_sq = 0.5, double tau = 1.0);

    // Mixing angle from a meter damping rate: theta = 2 sqrt(gamma tau).
    static ModelParams from_damping(double omega_coupling, double omega_meter, double damping_rate,
                                    double tau = 1.0, double alpha_sq = 0.5);
};

}  // namespace qmeter
