#include "qmeter/nonmarkov.hpp"

#include <cmath>
#include <string>

#include "qmeter/errors.hpp"
#include "qmeter/observables.hpp"

namespace qmeter {

VolumeSeries bloch_volume_series(const CollisionTrajectory& traj, int exponent) {
    if (exponent != 1 && exponent != 2) {
        throw InvalidArgument("volume exponent must be 1 or 2, got " + std::to_string(exponent));
    }
    VolumeSeries series;
    series.exponent = exponent;
    series.values.reserve(traj.step_count() + 1);
    for (const RateSample& r : rate_series(traj)) {
        series.values.push_back(std::exp(-exponent * r.gamma_total));
    }
    series.normalization = series.values.front();
    return series;
}

NonMarkovSplit nonmarkovianity_split(const VolumeSeries& series, std::size_t ell_max) {
    if (series.values.empty() || ell_max >= series.values.size()) {
        throw RangeError("nonmarkovianity_split: ell_max " + std::to_string(ell_max) +
                         " outside a series of " + std::to_string(series.values.size()) + " points");
    }
    NonMarkovSplit split;
    for (std::size_t l = 1; l <= ell_max; ++l) {
        const double dv = series.values[l] - series.values[l - 1];
        if (dv > 0.0) {
            split.n_plus += dv;
        } else {
            split.n_minus -= dv;
        }
    }
    return split;
}

double nonmarkovianity_ratio(const VolumeSeries& series, std::size_t ell_max) {
    const NonMarkovSplit split = nonmarkovianity_split(series, ell_max);
    if (split.n_plus == 0.0) {
        return 0.0;
    }
    if (split.n_minus == 0.0) {
        throw DegenerateDynamicsError("accessible volume grows without ever shrinking");
    }
    return split.n_plus / split.n_minus;
}

bool has_rate_backflow(const CollisionTrajectory& traj) {
    const auto rates = rate_series(traj);
    for (std::size_t l = 1; l < rates.size(); ++l) {
        if (rates[l].gamma_total < rates[l - 1].gamma_total) {
            return true;
        }
    }
    return false;
}

bool has_coherence_revival(const CollisionTrajectory& traj) {
    const auto& g = traj.gamma_sq_prefix();
    double previous = 1.0;
    for (std::size_t l = 1; l <= traj.step_count(); ++l) {
        const double kappa =
            std::exp(-2.0 * std::norm(traj.meter_history()[l])) * std::exp(-2.0 * g[l]);
        if (kappa > previous) {
            return true;
        }
        previous = kappa;
    }
    return false;
}

}  // namespace qmeter
