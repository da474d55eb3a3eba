#include "qmeter/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "qmeter/collision.hpp"
#include "qmeter/errors.hpp"
#include "qmeter/observables.hpp"

namespace qmeter::fock {

namespace {

using Eigen::MatrixXcd;
using ConstMap = Eigen::Map<const MatrixXcd>;

// Sides of a cut at most this large are diagonalized densely.
constexpr std::size_t kDenseSide = 48;
constexpr Eigen::Index kSubspaceBlock = 8;
constexpr int kSubspaceMaxPasses = 8;
constexpr double kSubspaceTolerance = 1e-13;
constexpr std::size_t kGramChunkRows = 1024;
constexpr std::size_t kMaxReducedDim = 4096;

std::size_t product(const std::vector<std::size_t>& dims, std::size_t first, std::size_t last) {
    return std::accumulate(dims.begin() + static_cast<std::ptrdiff_t>(first),
                           dims.begin() + static_cast<std::ptrdiff_t>(last), std::size_t{1},
                           std::multiplies<>());
}

double squared_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& z : v) {
        s += std::norm(z);
    }
    return s;
}

double entropy_bits(const std::vector<double>& eigenvalues) {
    double s = 0.0;
    for (double lambda : eigenvalues) {
        if (lambda > 0.0) {
            s -= lambda * std::log2(lambda);
        }
    }
    return s;
}

void record_leakage(FockVector& state, double before, double after, double tolerance, const char* op) {
    const double lost = std::max(0.0, before - after);
    if (lost > tolerance) {
        throw TruncationError(std::string(op) + ": truncation leaked " + std::to_string(lost) +
                              " of the norm (tolerance " + std::to_string(tolerance) + ")");
    }
    state.leakage += lost;
}

// A contiguous run of modes [first, last) splits the tensor into (P, K, S).
struct Cut {
    const cplx* data;
    std::size_t outer;  // P
    std::size_t kept;   // K
    std::size_t inner;  // S

    // Block p viewed as an S x K column-major matrix, i.e. the transpose of psi(p, ., .).
    ConstMap block(std::size_t p) const {
        return ConstMap(data + p * kept * inner, static_cast<Eigen::Index>(inner),
                        static_cast<Eigen::Index>(kept));
    }
};

Cut make_cut(const cplx* data, const std::vector<std::size_t>& dims, std::size_t first, std::size_t last) {
    if (first >= last || last > dims.size()) {
        throw RangeError("mode range [" + std::to_string(first) + ", " + std::to_string(last) +
                         ") is empty or outside " + std::to_string(dims.size()) + " modes");
    }
    return Cut{data, product(dims, 0, first), product(dims, first, last), product(dims, last, dims.size())};
}

// Reduced density matrix on the kept modes of a cut.
MatrixXcd kept_density(const Cut& cut) {
    const auto k = static_cast<Eigen::Index>(cut.kept);
    MatrixXcd gram = MatrixXcd::Zero(k, k);
    if (cut.inner >= kGramChunkRows) {
        for (std::size_t p = 0; p < cut.outer; ++p) {
            const ConstMap b = cut.block(p);
            gram.noalias() += b.adjoint() * b;
        }
        return gram.conjugate();
    }
    // Thin blocks: stack several of them so each product is large enough to pay off.
    const std::size_t per_chunk = kGramChunkRows / cut.inner;
    const auto s = static_cast<Eigen::Index>(cut.inner);
    MatrixXcd stacked(static_cast<Eigen::Index>(per_chunk) * s, k);
    for (std::size_t p0 = 0; p0 < cut.outer; p0 += per_chunk) {
        const std::size_t count = std::min(per_chunk, cut.outer - p0);
        for (std::size_t i = 0; i < count; ++i) {
            stacked.middleRows(static_cast<Eigen::Index>(i) * s, s) = cut.block(p0 + i);
        }
        const auto rows = static_cast<Eigen::Index>(count) * s;
        gram.noalias() += stacked.topRows(rows).adjoint() * stacked.topRows(rows);
    }
    // sum_p B_p^dag B_p with B_p = psi(p,.,.)^T is the complex conjugate of rho.
    return gram.conjugate();
}

std::vector<double> hermitian_eigenvalues(const MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConsistencyError("eigenvalue decomposition failed");
    }
    std::vector<double> out(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(out.rbegin(), out.rend());
    return out;
}

MatrixXcd orthonormal_columns(const MatrixXcd& y) {
    Eigen::HouseholderQR<MatrixXcd> qr(y);
    return qr.householderQ() * MatrixXcd::Identity(y.rows(), y.cols());
}

// Leading spectrum of R = sum_p B_p^dag B_p by block subspace iteration with Rayleigh-Ritz
// after every pass; stops once the Ritz values account for all but kSubspaceTolerance of
// the trace.
std::vector<double> leading_spectrum(const Cut& cut, double trace) {
    const auto k = static_cast<Eigen::Index>(cut.kept);
    const Eigen::Index width = std::min<Eigen::Index>(kSubspaceBlock, k);
    auto apply = [&](const MatrixXcd& y) {
        MatrixXcd out = MatrixXcd::Zero(k, y.cols());
        for (std::size_t p = 0; p < cut.outer; ++p) {
            const ConstMap b = cut.block(p);
            const MatrixXcd by = b * y;
            out.noalias() += b.adjoint() * by;
        }
        return out;
    };

    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss;
    MatrixXcd q(k, width);
    for (Eigen::Index j = 0; j < width; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
            const double re = gauss(rng);
            q(i, j) = cplx{re, gauss(rng)};
        }
    }
    q = orthonormal_columns(q);
    std::vector<double> ritz;
    for (int it = 0; it < kSubspaceMaxPasses; ++it) {
        const MatrixXcd rq = apply(q);
        MatrixXcd h = q.adjoint() * rq;
        h = 0.5 * (h + h.adjoint()).eval();
        ritz = hermitian_eigenvalues(h);
        double captured = 0.0;
        for (double lambda : ritz) {
            captured += std::max(lambda, 0.0);
        }
        if (trace - captured <= kSubspaceTolerance) {
            break;
        }
        q = orthonormal_columns(rq);
    }
    return ritz;
}

// exp(i H) for Hermitian H through its eigendecomposition.
MatrixXcd exp_i_hermitian(const MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw ConsistencyError("generator diagonalization failed");
    }
    const Eigen::VectorXcd phases =
        solver.eigenvalues().unaryExpr([](double x) { return std::polar(1.0, x); });
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// Top-left d x d block of exp(alpha a^dag - alpha* a) built in a padded number basis.
MatrixXcd displacement_matrix(cplx alpha, std::size_t d) {
    const auto ext = static_cast<Eigen::Index>(2 * d + 16);
    MatrixXcd h = MatrixXcd::Zero(ext, ext);  // -i (alpha a^dag - alpha* a)
    for (Eigen::Index n = 0; n + 1 < ext; ++n) {
        const double s = std::sqrt(static_cast<double>(n + 1));
        h(n + 1, n) = cplx{0.0, -1.0} * alpha * s;
        h(n, n + 1) = cplx{0.0, 1.0} * std::conj(alpha) * s;
    }
    const auto dd = static_cast<Eigen::Index>(d);
    return exp_i_hermitian(h).topLeftCorner(dd, dd);
}

// One fixed-photon-number block of the beam splitter, restricted to the truncated modes.
struct BeamBlock {
    std::vector<std::size_t> meter_n;
    std::vector<std::size_t> ancilla_n;
    MatrixXcd unitary;
};

std::vector<BeamBlock> beam_splitter_blocks(double theta, std::size_t meter_dim, std::size_t ancilla_dim) {
    std::vector<BeamBlock> blocks;
    const std::size_t n_max = meter_dim + ancilla_dim - 2;
    for (std::size_t total = 0; total <= n_max; ++total) {
        // Exact block basis |total - i>_meter |i>_ancilla, i = 0..total.
        const auto size = static_cast<Eigen::Index>(total + 1);
        MatrixXcd g = MatrixXcd::Zero(size, size);
        for (Eigen::Index i = 0; i + 1 < size; ++i) {
            const double v = std::sqrt(static_cast<double>(total - static_cast<std::size_t>(i)) *
                                       static_cast<double>(i + 1));
            g(i, i + 1) = v;
            g(i + 1, i) = v;
        }
        const MatrixXcd u = exp_i_hermitian(0.5 * theta * g);

        BeamBlock block;
        std::vector<Eigen::Index> keep;
        for (std::size_t i = 0; i <= total; ++i) {
            if (i < ancilla_dim && total - i < meter_dim) {
                keep.push_back(static_cast<Eigen::Index>(i));
                block.ancilla_n.push_back(i);
                block.meter_n.push_back(total - i);
            }
        }
        const auto kk = static_cast<Eigen::Index>(keep.size());
        block.unitary.resize(kk, kk);
        for (Eigen::Index r = 0; r < kk; ++r) {
            for (Eigen::Index c = 0; c < kk; ++c) {
                block.unitary(r, c) = u(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
            }
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

double poisson_tail(double mean, std::size_t cutoff) {
    if (mean <= 0.0) {
        return 0.0;
    }
    double n = static_cast<double>(cutoff + 1);
    double term = std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
    double tail = 0.0;
    while (term > 0.0) {
        tail += term;
        n += 1.0;
        term *= mean / n;
        if (term < tail * 1e-17) {
            break;
        }
    }
    return tail;
}

}  // namespace

std::size_t FockVector::cutoff() const {
    std::size_t c = 0;
    for (std::size_t i = 1; i < dims.size(); ++i) {
        c = std::max(c, dims[i] - 1);
    }
    return c;
}

double FockVector::norm() const { return std::sqrt(squared_norm(amplitudes)); }

Eigen::VectorXd DensityMatrix::eigenvalues() const {
    const auto values = hermitian_eigenvalues(matrix);
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

double DensityMatrix::entropy() const { return entropy_bits(hermitian_eigenvalues(matrix)); }

double Spectrum::entropy() const { return entropy_bits(eigenvalues); }

std::size_t coherent_cutoff(double amplitude, std::size_t floor, double tail_tolerance) {
    const double mean = amplitude * amplitude;
    std::size_t c = floor;
    while (poisson_tail(mean, c) >= tail_tolerance) {
        ++c;
    }
    return c;
}

cplx quadrature_phase_factor(std::size_t k, double omega_meter, double tau) {
    using boost::math::quadrature::gauss;
    const double start = static_cast<double>(k - 1) * tau;
    // Panels of at most one radian of phase each keep the 20-point rule exact to rounding.
    const auto panels = static_cast<std::size_t>(std::ceil(std::abs(omega_meter) * tau)) + 1;
    const double width = tau / static_cast<double>(panels);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        const double a = start + static_cast<double>(i) * width;
        re += gauss<double, 20>::integrate([&](double t) { return std::cos(omega_meter * t); }, a, a + width);
        im -= gauss<double, 20>::integrate([&](double t) { return std::sin(omega_meter * t); }, a, a + width);
    }
    return cplx{re, im} / tau;
}

FockVector initial_state(const ModelParams& params, std::size_t meter_dim) {
    if (meter_dim == 0) {
        throw InvalidArgument("meter dimension must be positive");
    }
    FockVector s;
    s.dims = {2, meter_dim};
    s.amplitudes.assign(2 * meter_dim, cplx{});
    s.amplitudes[0] = params.alpha0;
    s.amplitudes[meter_dim] = params.beta0;
    return s;
}

FockVector add_ancilla(FockVector state, std::size_t dim) {
    if (dim == 0) {
        throw InvalidArgument("ancilla dimension must be positive");
    }
    const std::size_t meter_dim = state.dims.back();
    const std::size_t outer = state.dimension() / meter_dim;
    std::vector<cplx> grown(state.dimension() * dim, cplx{});
    for (std::size_t o = 0; o < outer; ++o) {
        std::copy_n(state.amplitudes.begin() + static_cast<std::ptrdiff_t>(o * meter_dim), meter_dim,
                    grown.begin() + static_cast<std::ptrdiff_t>(o * dim * meter_dim));
    }
    state.amplitudes = std::move(grown);
    state.dims.insert(state.dims.end() - 1, dim);
    return state;
}

FockVector apply_conditional_displacement(FockVector state, cplx alpha, double leakage_tolerance) {
    if (alpha == cplx{}) {
        return state;
    }
    const auto d = static_cast<Eigen::Index>(state.dims.back());
    const MatrixXcd up = displacement_matrix(alpha, state.dims.back());
    const MatrixXcd down = displacement_matrix(-alpha, state.dims.back());
    const double before = squared_norm(state.amplitudes);

    const std::size_t half = state.dimension() / 2;
    const auto cols = static_cast<Eigen::Index>(half) / d;
    std::vector<cplx> out(state.dimension());
    for (int q = 0; q < 2; ++q) {
        const ConstMap in(state.amplitudes.data() + q * half, d, cols);
        Eigen::Map<MatrixXcd> res(out.data() + q * half, d, cols);
        res.noalias() = (q == 1 ? up : down) * in;
    }
    state.amplitudes = std::move(out);
    record_leakage(state, before, squared_norm(state.amplitudes), leakage_tolerance,
                   "apply_conditional_displacement");
    return state;
}

FockVector apply_beam_splitter(FockVector state, double theta, std::size_t ancilla_index,
                               double leakage_tolerance) {
    if (ancilla_index == 0 || ancilla_index > state.ancilla_count()) {
        throw RangeError("apply_beam_splitter: no ancilla " + std::to_string(ancilla_index));
    }
    const std::size_t meter_dim = state.dims.back();
    const std::size_t ancilla_dim = state.dims[ancilla_index];
    const std::size_t outer = product(state.dims, 0, ancilla_index);
    const std::size_t mid = product(state.dims, ancilla_index + 1, state.dims.size() - 1);
    const auto blocks = beam_splitter_blocks(theta, meter_dim, ancilla_dim);
    const double before = squared_norm(state.amplitudes);

    auto index = [&](std::size_t p, std::size_t na, std::size_t q, std::size_t nm) {
        return ((p * ancilla_dim + na) * mid + q) * meter_dim + nm;
    };
    std::vector<cplx> out(state.dimension(), cplx{});
    Eigen::VectorXcd x;
    for (std::size_t p = 0; p < outer; ++p) {
        for (std::size_t q = 0; q < mid; ++q) {
            for (const BeamBlock& b : blocks) {
                const auto n = static_cast<Eigen::Index>(b.meter_n.size());
                x.resize(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const auto ui = static_cast<std::size_t>(i);
                    x(i) = state.amplitudes[index(p, b.ancilla_n[ui], q, b.meter_n[ui])];
                }
                const Eigen::VectorXcd y = b.unitary * x;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const auto ui = static_cast<std::size_t>(i);
                    out[index(p, b.ancilla_n[ui], q, b.meter_n[ui])] = y(i);
                }
            }
        }
    }
    state.amplitudes = std::move(out);
    record_leakage(state, before, squared_norm(state.amplitudes), leakage_tolerance, "apply_beam_splitter");
    return state;
}

FockEvolver::FockEvolver(const ModelParams& params, std::size_t planned_steps, const EvolveOptions& options)
    : params_(params), options_(options) {
    params_.validate();
    if (planned_steps > kMaxOracleSteps) {
        throw ResourceLimitError("oracle evolution is limited to " + std::to_string(kMaxOracleSteps) +
                                 " collisions, got " + std::to_string(planned_steps));
    }
    // Triangle-inequality bounds on every coherent amplitude the run can produce.
    const double c = std::abs(std::cos(0.5 * params_.theta));
    const double s = std::abs(std::sin(0.5 * params_.theta));
    double meter_bound = 0.0;
    double meter_peak = 0.0;
    std::vector<double> ancilla_bound;
    for (std::size_t k = 1; k <= planned_steps; ++k) {
        const double kick =
            params_.omega_coupling * params_.tau *
            std::abs(quadrature_phase_factor(k, params_.omega_meter, params_.tau));
        const double displaced = meter_bound + kick;
        meter_peak = std::max(meter_peak, displaced);
        ancilla_bound.push_back(displaced * s);
        meter_bound = displaced * c;
    }
    auto dim_for = [&](double amplitude) {
        if (options_.cutoff.uniform) {
            return *options_.cutoff.uniform + 1;
        }
        return coherent_cutoff(amplitude, options_.cutoff.floor, options_.cutoff.tail_tolerance) + 1;
    };
    planned_dims_.push_back(2);
    for (double b : ancilla_bound) {
        planned_dims_.push_back(dim_for(b));
    }
    planned_dims_.push_back(dim_for(meter_peak));

    const std::size_t total = product(planned_dims_, 0, planned_dims_.size());
    if (total > options_.max_dimension) {
        throw ResourceLimitError("oracle state would need " + std::to_string(total) +
                                 " amplitudes, above the limit " + std::to_string(options_.max_dimension));
    }
    state_ = initial_state(params_, planned_dims_.back());
}

void FockEvolver::step() {
    const std::size_t k = steps_done() + 1;
    if (k + 1 >= planned_dims_.size()) {
        throw ResourceLimitError("FockEvolver: all planned collisions already applied");
    }
    const cplx kick = cplx{0.0, -params_.omega_coupling * params_.tau} *
                      quadrature_phase_factor(k, params_.omega_meter, params_.tau);
    state_ = apply_conditional_displacement(std::move(state_), kick, options_.leakage_tolerance);
    state_ = add_ancilla(std::move(state_), planned_dims_[k]);
    state_ = apply_beam_splitter(std::move(state_), params_.theta, k, options_.leakage_tolerance);
}

FockVector fock_evolve(const ModelParams& params, std::size_t n_steps, const EvolveOptions& options) {
    FockEvolver evolver(params, n_steps, options);
    for (std::size_t k = 0; k < n_steps; ++k) {
        evolver.step();
    }
    return evolver.state();
}

DensityMatrix reduce(const FockVector& state, const std::vector<std::size_t>& modes) {
    if (modes.empty()) {
        throw InvalidArgument("reduce: empty subsystem selector");
    }
    const std::size_t n_modes = state.dims.size();
    std::vector<int> role(n_modes, -1);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] >= n_modes || role[modes[i]] != -1) {
            throw InvalidArgument("reduce: mode " + std::to_string(modes[i]) + " invalid or repeated");
        }
        role[modes[i]] = static_cast<int>(i);
    }
    // Strides of each mode inside the kept and traced multi-indices.
    std::vector<std::size_t> kept_stride(n_modes, 0);
    std::vector<std::size_t> traced_stride(n_modes, 0);
    std::size_t kept_dim = 1;
    for (std::size_t i = modes.size(); i-- > 0;) {
        kept_stride[modes[i]] = kept_dim;
        kept_dim *= state.dims[modes[i]];
    }
    if (kept_dim > kMaxReducedDim) {
        throw ResourceLimitError("reduce: reduced dimension " + std::to_string(kept_dim) + " too large");
    }
    std::size_t traced_dim = 1;
    for (std::size_t m = n_modes; m-- > 0;) {
        if (role[m] == -1) {
            traced_stride[m] = traced_dim;
            traced_dim *= state.dims[m];
        }
    }

    MatrixXcd x = MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(traced_dim));
    std::vector<std::size_t> digit(n_modes, 0);
    std::size_t ki = 0;
    std::size_t ti = 0;
    for (std::size_t lin = 0; lin < state.dimension(); ++lin) {
        x(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(ti)) = state.amplitudes[lin];
        // Odometer increment, last mode fastest.
        for (std::size_t m = n_modes; m-- > 0;) {
            const std::size_t step = role[m] == -1 ? traced_stride[m] : kept_stride[m];
            std::size_t& idx = role[m] == -1 ? ti : ki;
            if (++digit[m] < state.dims[m]) {
                idx += step;
                break;
            }
            idx -= step * (state.dims[m] - 1);
            digit[m] = 0;
        }
    }
    DensityMatrix rho;
    rho.modes = modes;
    rho.matrix = x * x.adjoint();
    return rho;
}

Spectrum range_spectrum(const FockVector& state, std::size_t first, std::size_t last) {
    const Cut cut = make_cut(state.amplitudes.data(), state.dims, first, last);
    const double trace = squared_norm(state.amplitudes);
    Spectrum out;
    const std::size_t complement = cut.outer * cut.inner;
    if (cut.kept <= kDenseSide) {
        out.eigenvalues = hermitian_eigenvalues(kept_density(cut));
    } else if (complement <= kDenseSide) {
        // The complement's state, block (p, p') = B_p B_p'^dag.
        const auto s = static_cast<Eigen::Index>(cut.inner);
        MatrixXcd rho(static_cast<Eigen::Index>(complement), static_cast<Eigen::Index>(complement));
        for (std::size_t p = 0; p < cut.outer; ++p) {
            for (std::size_t q = 0; q <= p; ++q) {
                const MatrixXcd g = cut.block(p) * cut.block(q).adjoint();
                const auto ip = static_cast<Eigen::Index>(p) * s;
                const auto iq = static_cast<Eigen::Index>(q) * s;
                rho.block(ip, iq, s, s) = g;
                rho.block(iq, ip, s, s) = g.adjoint();
            }
        }
        out.eigenvalues = hermitian_eigenvalues(rho);
    } else {
        out.eigenvalues = leading_spectrum(cut, trace);
    }
    double captured = 0.0;
    for (double& lambda : out.eigenvalues) {
        lambda = std::max(lambda, 0.0);
        captured += lambda;
    }
    out.discarded_weight = std::max(0.0, trace - captured);
    return out;
}

std::optional<Eigen::MatrixXcd> branch_mode_state(const FockVector& state, int qubit_value, std::size_t mode) {
    if (qubit_value != 0 && qubit_value != 1) {
        throw InvalidArgument("branch_mode_state: qubit value must be 0 or 1");
    }
    if (mode == 0 || mode >= state.dims.size()) {
        throw RangeError("branch_mode_state: mode " + std::to_string(mode) + " is not bosonic");
    }
    const std::size_t half = state.dimension() / 2;
    const std::vector<std::size_t> branch_dims(state.dims.begin() + 1, state.dims.end());
    const Cut cut = make_cut(state.amplitudes.data() + qubit_value * half, branch_dims, mode - 1, mode);
    MatrixXcd rho = kept_density(cut);
    const double tr = rho.trace().real();
    if (tr <= 0.0) {
        return std::nullopt;
    }
    return rho / tr;
}

std::optional<cplx> branch_overlap(const FockVector& state) {
    const std::size_t half = state.dimension() / 2;
    cplx inner{};
    double n_down = 0.0;
    double n_up = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        const cplx down = state.amplitudes[i];
        const cplx up = state.amplitudes[half + i];
        inner += std::conj(up) * down;
        n_down += std::norm(down);
        n_up += std::norm(up);
    }
    if (n_down <= 0.0 || n_up <= 0.0) {
        return std::nullopt;
    }
    return inner / std::sqrt(n_down * n_up);
}

bool OracleReport::passed(double tolerance) const {
    return std::all_of(rows.begin(), rows.end(),
                       [&](const OracleRow& r) { return r.max_abs_deviation <= tolerance; });
}

OracleReport compare_with_analytic(const ModelParams& params, std::size_t n_steps,
                                   const OracleCheckOptions& options) {
    FockEvolver evolver(params, n_steps, options.evolve);
    CollisionTrajectory traj;

    enum Row { KappaMeter, KappaEnv, KappaTotal, RhoS, SSystem, SFragment, SJoint, MutualInfo, Leakage, Residual };
    OracleReport report;
    report.rows = {{"kappa_meter", 0.0},        {"kappa_env", 0.0},    {"kappa_total", 0.0},
                   {"rho_S_trace_distance", 0.0}, {"S_system", 0.0},     {"S_fragment", 0.0},
                   {"S_joint", 0.0},            {"mutual_information", 0.0}, {"truncation_leakage", 0.0},
                   {"spectral_residual", 0.0}};
    auto track = [&](Row r, double deviation) {
        double& slot = report.rows[static_cast<std::size_t>(r)].max_abs_deviation;
        // NaN must surface as a failure, so compare through !(<=).
        if (!(deviation <= slot)) {
            slot = deviation;
        }
    };

    // Hilbert-Schmidt overlap of the branch-conditional states of one mode; |<u|v>| when pure.
    auto mode_overlap = [](const FockVector& s, std::size_t mode) -> std::optional<double> {
        const auto up = branch_mode_state(s, 1, mode);
        const auto down = branch_mode_state(s, 0, mode);
        if (!up || !down) {
            return std::nullopt;
        }
        return std::sqrt(std::max(0.0, (*up * *down).trace().real()));
    };

    for (std::size_t l = 0;; ++l) {
        const FockVector& state = evolver.state();
        const std::size_t meter = state.meter_mode();
        const double leak = state.leakage;
        report.max_leakage = std::max(report.max_leakage, leak);
        track(Leakage, leak);

        // Qubit state and entropy.
        const Cut qubit_cut = make_cut(state.amplitudes.data(), state.dims, 0, 1);
        const MatrixXcd rho_s = kept_density(qubit_cut);
        QubitDensity oracle_rho;
        oracle_rho.pop_down = rho_s(0, 0).real();
        oracle_rho.pop_up = rho_s(1, 1).real();
        oracle_rho.coherence = rho_s(0, 1);
        const QubitDensity analytic_rho = qubit_state(traj, params);
        track(RhoS, analytic_rho.trace_distance(oracle_rho));
        const double s_system_oracle = entropy_bits(hermitian_eigenvalues(rho_s));
        const double s_system = entropy_system(traj, params);
        track(SSystem, std::abs(s_system - s_system_oracle));

        // Decoherence factors.
        const double g_total = traj.gamma_sq_prefix().back();
        const double kappa_env_analytic =
            options.flip_env_exponent ? std::exp(2.0 * g_total) : kappa_env_range(traj, 1, l);
        if (const auto km = mode_overlap(state, meter)) {
            track(KappaMeter, std::abs(kappa_meter(traj) - *km));
            double env = 1.0;
            bool complete = true;
            for (std::size_t j = 1; j <= l; ++j) {
                const auto kj = mode_overlap(state, j);
                complete = complete && kj.has_value();
                env *= kj.value_or(1.0);
            }
            if (complete) {
                track(KappaEnv, std::abs(kappa_env_analytic - env));
            }
        }
        if (const auto overlap = branch_overlap(state)) {
            track(KappaTotal, std::abs(cplx{kappa_meter(traj) * kappa_env_analytic, 0.0} - *overlap));
        }

        // Fragment, joint and mutual-information entropies for every prefix fragment.
        for (std::size_t m = 0; m <= l; ++m) {
            double s_fragment_oracle = 0.0;
            if (m > 0) {
                const Spectrum f = range_spectrum(state, 1, m + 1);
                track(Residual, f.discarded_weight);
                s_fragment_oracle = f.entropy();
            }
            const Spectrum joint = range_spectrum(state, 0, m + 1);
            track(Residual, joint.discarded_weight);
            const double s_joint_oracle = joint.entropy();

            track(SFragment, std::abs(entropy_fragment(traj, params, m) - s_fragment_oracle));
            track(SJoint, std::abs(entropy_joint(traj, params, m) - s_joint_oracle));
            const double mi_oracle = s_system_oracle + s_fragment_oracle - s_joint_oracle;
            track(MutualInfo, std::abs(mutual_information(traj, params, m) - mi_oracle));
        }

        if (l == n_steps) {
            break;
        }
        evolver.step();
        traj = collide(std::move(traj), params);
    }
    report.dims = evolver.state().dims;
    return report;
}

}  // namespace qmeter::fock
