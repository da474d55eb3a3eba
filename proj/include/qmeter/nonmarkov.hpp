// nonmarkov.hpp: accessible-volume non-Markovianity of the qubit dephasing map.
//
// A pure-dephasing channel contracts the two equatorial Bloch axes by |kappa| and leaves
// the polar axis alone, so the image of the Bloch ball has volume |kappa|^2 relative to
// the ball. The exponent is configurable (1 or 2); only the size of the measure depends
// on it, never whether it vanishes. Time derivatives are forward differences over
// collision steps.

#pragma once

#include <cstddef>
#include <vector>

#include "qmeter/collision.hpp"

namespace qmeter {

struct VolumeSeries {
    std::vector<double> values;  // V(l), l = 0..n; values underflow to 0 once |kappa|^e < DBL_MIN
    double normalization{1.0};   // V(0)
    int exponent{2};
};

struct NonMarkovSplit {
    double n_plus{0.0};   // sum of volume increases
    double n_minus{0.0};  // sum of volume decreases
};

// V(l) = |kappa(l)|^exponent with exponent in {1, 2}.
VolumeSeries bloch_volume_series(const CollisionTrajectory& traj, int exponent = 2);

// Sums over forward differences V(l) - V(l-1), l = 1..ell_max.
NonMarkovSplit nonmarkovianity_split(const VolumeSeries& series, std::size_t ell_max);

// N+ / N-, or 0 when N+ = 0. Throws DegenerateDynamicsError when N- = 0 < N+.
double nonmarkovianity_ratio(const VolumeSeries& series, std::size_t ell_max);

// Some step with Gamma(l) < Gamma(l-1).
bool has_rate_backflow(const CollisionTrajectory& traj);

// Some step with |kappa(l)| > |kappa(l-1)|, from the branch overlap products.
bool has_coherence_revival(const CollisionTrajectory& traj);

}  // namespace qmeter
