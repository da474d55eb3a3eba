#include "qmeter/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qmeter/errors.hpp"

namespace qmeter {

void ModelParams::validate() const {
    if (!std::isfinite(omega_coupling) || omega_coupling < 0.0) {
        throw InvalidArgument("omega_coupling must be finite and >= 0");
    }
    if (!std::isfinite(omega_meter)) {
        throw InvalidArgument("omega_meter must be finite");
    }
    if (!std::isfinite(theta) || theta < 0.0 || theta >= 2.0 * std::numbers::pi) {
        throw InvalidArgument("theta must lie in [0, 2pi)");
    }
    if (!std::isfinite(tau) || tau <= 0.0) {
        throw InvalidArgument("tau must be finite and > 0");
    }
    const double norm = std::norm(alpha0) + std::norm(beta0);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12) {
        throw InvalidArgument("initial qubit state must be normalized (|alpha|^2 + |beta|^2 = " +
                              std::to_string(norm) + ")");
    }
}

ModelParams ModelParams::with_populations(double omega_coupling, double omega_meter, double theta,
                                          double alpha_sq, double tau) {
    if (!(alpha_sq >= 0.0 && alpha_sq <= 1.0)) {
        throw InvalidArgument("alpha_sq must lie in [0, 1]");
    }
    ModelParams p;
    p.omega_coupling = omega_coupling;
    p.omega_meter = omega_meter;
    p.theta = theta;
    p.tau = tau;
    p.alpha0 = cplx{std::sqrt(alpha_sq), 0.0};
    p.beta0 = cplx{std::sqrt(1.0 - alpha_sq), 0.0};
    p.validate();
    return p;
}

ModelParams ModelParams::from_damping(double omega_coupling, double omega_meter, double damping_rate,
                                      double tau, double alpha_sq) {
    if (!(damping_rate >= 0.0) || !(tau > 0.0)) {
        throw InvalidArgument("damping rate must be >= 0 and tau > 0");
    }
    return with_populations(omega_coupling, omega_meter, 2.0 * std::sqrt(damping_rate * tau), alpha_sq,
                            tau);
}

}  // namespace qmeter
