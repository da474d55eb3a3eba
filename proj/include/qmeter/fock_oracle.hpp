// fock_oracle.hpp: brute-force reference dynamics in a truncated number-state basis.
//
// The full qubit (x) ancillae (x) meter pure state is stored densely and evolved with the
// collision unitaries themselves: a qubit-conditioned meter displacement obtained by
// exponentiating the displacement generator, followed by the beam splitter
// exp(i theta/2 (a^dag b + a b^dag)) between the meter (a) and a fresh vacuum ancilla (b).
// Nothing here relies on coherent-state algebra; the closed-form observables are checked
// against partial traces and diagonalizations of this state.
//
// Mode layout (row-major, last index fastest):
//     mode 0            qubit, index 0 = |down>, 1 = |up>
//     modes 1..l        ancillae in collision order
//     mode l + 1        meter
// Every bosonic mode has its own cutoff; a mode of dimension d holds n = 0..d-1.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmeter/model.hpp"

namespace qmeter::fock {

inline constexpr std::size_t kMaxOracleSteps = 6;
inline constexpr std::size_t kCutoffFloor = 8;
inline constexpr double kCoherentTailTolerance = 1e-12;
inline constexpr double kLeakageTolerance = 1e-10;

struct FockVector {
    std::vector<std::size_t> dims;  // dims[0] == 2 (qubit), then ancillae, meter last
    std::vector<cplx> amplitudes;
    double leakage{0.0};  // norm lost to truncation so far

    std::size_t dimension() const noexcept { return amplitudes.size(); }
    std::size_t ancilla_count() const noexcept { return dims.size() - 2; }
    std::size_t meter_mode() const noexcept { return dims.size() - 1; }
    // Largest number-state index kept in any bosonic mode.
    std::size_t cutoff() const;
    double norm() const;
};

struct DensityMatrix {
    std::vector<std::size_t> modes;
    Eigen::MatrixXcd matrix;

    Eigen::VectorXd eigenvalues() const;
    double entropy() const;  // bits
};

// Spectrum of a reduced state. Small sides are diagonalized exactly; when both sides of
// the cut are large only the leading eigenvalues are resolved and discarded_weight is
// the trace they leave unexplained.
struct Spectrum {
    std::vector<double> eigenvalues;
    double discarded_weight{0.0};

    double entropy() const;  // bits
};

struct CutoffPolicy {
    std::optional<std::size_t> uniform;  // same cutoff C for every bosonic mode
    std::size_t floor{kCutoffFloor};
    double tail_tolerance{kCoherentTailTolerance};
};

struct EvolveOptions {
    CutoffPolicy cutoff{};
    std::size_t max_dimension{std::size_t{1} << 26};
    double leakage_tolerance{kLeakageTolerance};
};

// Smallest C >= floor with sum_{n > C} Poisson(|amplitude|^2; n) < tail_tolerance.
std::size_t coherent_cutoff(double amplitude, std::size_t floor = kCutoffFloor,
                            double tail_tolerance = kCoherentTailTolerance);

// f_k by Gauss-Legendre quadrature of the step average of exp(-i w t).
cplx quadrature_phase_factor(std::size_t k, double omega_meter, double tau);

// Initial qubit state times meter vacuum, no ancillae yet.
FockVector initial_state(const ModelParams& params, std::size_t meter_dim);

// Append a vacuum ancilla of dimension `dim` right before the meter.
FockVector add_ancilla(FockVector state, std::size_t dim);

// Meter displaced by +alpha on |up> and -alpha on |down>.
FockVector apply_conditional_displacement(FockVector state, cplx alpha,
                                          double leakage_tolerance = kLeakageTolerance);

// exp(i theta/2 (a^dag b + a b^dag)) on the meter and ancilla `ancilla_index` (1-based).
FockVector apply_beam_splitter(FockVector state, double theta, std::size_t ancilla_index,
                               double leakage_tolerance = kLeakageTolerance);

// Step-by-step evolution with cutoffs fixed up front for a planned number of steps.
class FockEvolver {
public:
    FockEvolver(const ModelParams& params, std::size_t planned_steps, const EvolveOptions& options = {});

    void step();
    std::size_t steps_done() const noexcept { return state_.ancilla_count(); }
    const FockVector& state() const noexcept { return state_; }
    const std::vector<std::size_t>& planned_dims() const noexcept { return planned_dims_; }

private:
    ModelParams params_;
    EvolveOptions options_;
    std::vector<std::size_t> planned_dims_;
    FockVector state_;
};

// The full pure state after n_steps collisions (n_steps <= kMaxOracleSteps).
FockVector fock_evolve(const ModelParams& params, std::size_t n_steps, const EvolveOptions& options = {});

// Dense reduced density matrix on the listed modes (any order, no repeats).
DensityMatrix reduce(const FockVector& state, const std::vector<std::size_t>& modes);

// Spectrum of the reduced state on the contiguous modes [first, last).
Spectrum range_spectrum(const FockVector& state, std::size_t first, std::size_t last);

// Reduced state of one bosonic mode conditioned on the qubit pointer state (0 = down,
// 1 = up), normalized; empty when that branch carries no weight.
std::optional<Eigen::MatrixXcd> branch_mode_state(const FockVector& state, int qubit_value,
                                                  std::size_t mode);

// <Phi_up | Phi_down> of the normalized conditional bosonic states.
std::optional<cplx> branch_overlap(const FockVector& state);

// Maximum |analytic - oracle| per observable over l = 0..n_steps and every m <= l.
struct OracleRow {
    std::string observable;
    double max_abs_deviation{0.0};
};

struct OracleReport {
    std::vector<OracleRow> rows;
    double max_leakage{0.0};
    std::vector<std::size_t> dims;  // mode dimensions of the final state

    bool passed(double tolerance) const;
};

struct OracleCheckOptions {
    EvolveOptions evolve{};
    // Diagnostic: compare against exp(+2 G) instead of exp(-2 G) for the reservoir factor.
    bool flip_env_exponent{false};
};

OracleReport compare_with_analytic(const ModelParams& params, std::size_t n_steps,
                                   const OracleCheckOptions& options = {});

}  // namespace qmeter::fock
