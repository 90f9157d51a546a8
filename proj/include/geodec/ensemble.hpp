#pragma once

#include "geodec/geomphase.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

namespace geodec {

/// Mean and standard error of a complex series over n trajectories. The
/// standard error pools real and imaginary parts:
/// sqrt((var(Re) + var(Im)) / n).
struct EnsembleStats {
    std::size_t n = 0;
    std::vector<Complex> mean;
    std::vector<double> stderr;
    std::uint64_t master_seed = 0;
};

struct EnsembleOptions {
    std::size_t n_traj = 10000;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
    double max_exclusion_fraction = 1e-3;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [begin, end) on `threads` workers. Each call writes
/// only its own slot, so scheduling never affects the results.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
    if (end <= begin) return;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(end - begin)));
    if (threads == 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= end) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(end);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Per-slot compensated first and second moments of a flattened complex sample.
class MomentAccumulator {
public:
    explicit MomentAccumulator(std::size_t width) : re_(width), im_(width), re2_(width), im2_(width) {}

    void add(const std::vector<Complex>& sample) {
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double re = sample[i].real();
            const double im = sample[i].imag();
            re_[i].add(re);
            im_[i].add(im);
            re2_[i].add(re * re);
            im2_[i].add(im * im);
        }
        ++count_;
    }

    std::size_t count() const noexcept { return count_; }

    std::vector<Complex> mean() const {
        std::vector<Complex> out(re_.size());
        const double n = static_cast<double>(count_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = {re_[i].value() / n, im_[i].value() / n};
        return out;
    }

    std::vector<double> stderr() const {
        std::vector<double> out(re_.size(), 0.0);
        if (count_ < 2) return out;
        const double n = static_cast<double>(count_);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double mre = re_[i].value() / n;
            const double mim = im_[i].value() / n;
            const double var_re = std::max(0.0, (re2_[i].value() - n * mre * mre) / (n - 1.0));
            const double var_im = std::max(0.0, (im2_[i].value() - n * mim * mim) / (n - 1.0));
            out[i] = std::sqrt((var_re + var_im) / n);
        }
        return out;
    }

private:
    std::vector<CompensatedSum<double>> re_, im_, re2_, im2_;
    std::size_t count_ = 0;
};

struct FoldResult {
    MomentAccumulator moments;
    std::vector<std::size_t> excluded;
};

/// Draws samples sample(i) -> optional flattened vector for i < n in blocks,
/// in parallel within a block, and folds them in index order. A nullopt
/// sample counts as an excluded trajectory.
template <typename SampleFn>
FoldResult ensemble_fold(std::size_t n, std::size_t width, unsigned threads, SampleFn&& sample) {
    FoldResult result{MomentAccumulator(width), {}};
    const std::size_t block = std::clamp<std::size_t>(std::size_t{4'000'000} / std::max<std::size_t>(width, 1), 1, 1024);
    std::vector<std::optional<std::vector<Complex>>> slots(block);
    for (std::size_t start = 0; start < n; start += block) {
        const std::size_t stop = std::min(n, start + block);
        parallel_for(start, stop, threads, [&](std::size_t i) { slots[i - start] = sample(i); });
        for (std::size_t i = start; i < stop; ++i) {
            auto& s = slots[i - start];
            if (s)
                result.moments.add(*s);
            else
                result.excluded.push_back(i);
            s.reset();
        }
    }
    return result;
}

inline EnsembleStats slice_stats(const std::vector<Complex>& mean, const std::vector<double>& err, std::size_t offset,
                                 std::size_t len, std::size_t n, std::uint64_t seed) {
    EnsembleStats s;
    s.n = n;
    s.master_seed = seed;
    s.mean.assign(mean.begin() + static_cast<std::ptrdiff_t>(offset), mean.begin() + static_cast<std::ptrdiff_t>(offset + len));
    s.stderr.assign(err.begin() + static_cast<std::ptrdiff_t>(offset), err.begin() + static_cast<std::ptrdiff_t>(offset + len));
    return s;
}

inline void check_exclusions(std::size_t excluded, std::size_t n_traj, double max_fraction) {
    if (static_cast<double>(excluded) > max_fraction * static_cast<double>(n_traj))
        throw ExcessiveExclusions(std::to_string(excluded) + " of " + std::to_string(n_traj) +
                                  " trajectories hit a phase singularity or branch jump (limit " +
                                  std::to_string(max_fraction * 100.0) + "%)");
}

}  // namespace detail

/// Ensemble averages of the per-trajectory phases (average of phases, not
/// phase of averaged overlaps).
struct PhaseEnsemble {
    TimeGrid grid;
    EnsembleStats beta_tot;
    EnsembleStats beta_dyn;
    EnsembleStats beta;
    std::vector<std::size_t> excluded;  // trajectory indices
};

/// Phases of trajectory `index` of an ensemble; nullopt when the trajectory
/// passes through a phase singularity or an ambiguous branch step.
inline std::optional<PhaseSeries> trajectory_phases(const ModelSpec& model, std::uint64_t master_seed, std::size_t index) {
    const NoisePath noise = sample_noise_path(model.bath, model.grid, master_seed, index);
    const TrajectoryPair pair = propagate_pair(model, noise);
    try {
        return geometric_phase(pair, model);
    } catch (const PhaseSingularity&) {
        return std::nullopt;
    } catch (const BranchJump&) {
        return std::nullopt;
    }
}

inline PhaseEnsemble average_phase_series(const ModelSpec& model, const EnsembleOptions& opts) {
    if (opts.n_traj < 2) throw ConfigError("average_phase_series: n_traj must be >= 2");
    const std::size_t len = model.grid.size();
    auto sample = [&](std::size_t i) -> std::optional<std::vector<Complex>> {
        auto phases = trajectory_phases(model, opts.master_seed, i);
        if (!phases) return std::nullopt;
        std::vector<Complex> flat;
        flat.reserve(3 * len);
        flat.insert(flat.end(), phases->beta_tot.begin(), phases->beta_tot.end());
        flat.insert(flat.end(), phases->beta_dyn.begin(), phases->beta_dyn.end());
        flat.insert(flat.end(), phases->beta.begin(), phases->beta.end());
        return flat;
    };
    auto fold = detail::ensemble_fold(opts.n_traj, 3 * len, detail::resolve_threads(opts.threads), sample);
    detail::check_exclusions(fold.excluded.size(), opts.n_traj, opts.max_exclusion_fraction);
    if (fold.moments.count() < 2) throw ExcessiveExclusions("fewer than two usable trajectories");

    const auto mean = fold.moments.mean();
    const auto err = fold.moments.stderr();
    const std::size_t used = fold.moments.count();
    PhaseEnsemble out;
    out.grid = model.grid;
    out.beta_tot = detail::slice_stats(mean, err, 0, len, used, opts.master_seed);
    out.beta_dyn = detail::slice_stats(mean, err, len, len, used, opts.master_seed);
    out.beta = detail::slice_stats(mean, err, 2 * len, len, used, opts.master_seed);
    out.excluded = std::move(fold.excluded);
    return out;
}

/// Ensemble-mean phases from the zero-noise pair (see propagate_mean_pair).
inline PhaseSeries mean_phase_series(const ModelSpec& model) {
    return geometric_phase(propagate_mean_pair(model), model);
}

/// Time series of d x d operators on a grid.
struct DensitySeries {
    TimeGrid grid;
    std::vector<Operator> rho;
    // Per-element complex-magnitude standard errors (Monte Carlo estimates only).
    std::vector<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>> stderr;
};

/// rho(t) = M[|psi_{z*}(t)><psi_z(t)|], estimated from n trajectories and
/// symmetrized to be exactly Hermitian.
inline DensitySeries reduced_density(const ModelSpec& model, const EnsembleOptions& opts) {
    if (opts.n_traj < 2) throw ConfigError("reduced_density: n_traj must be >= 2");
    const std::size_t len = model.grid.size();
    const auto d = static_cast<std::size_t>(model.dim);
    auto sample = [&](std::size_t i) -> std::optional<std::vector<Complex>> {
        const NoisePath noise = sample_noise_path(model.bath, model.grid, opts.master_seed, i);
        const TrajectoryPair pair = propagate_pair(model, noise);
        std::vector<Complex> flat(len * d * d);
        for (std::size_t k = 0; k < len; ++k) {
            const State& psi = pair.psi[k];
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b)
                    flat[(k * d + a) * d + b] = psi[static_cast<Eigen::Index>(a)] * std::conj(psi[static_cast<Eigen::Index>(b)]);
        }
        return flat;
    };
    auto fold = detail::ensemble_fold(opts.n_traj, len * d * d, detail::resolve_threads(opts.threads), sample);
    const auto mean = fold.moments.mean();
    const auto err = fold.moments.stderr();

    DensitySeries out;
    out.grid = model.grid;
    out.rho.resize(len);
    out.stderr.resize(len);
    const auto di = static_cast<Eigen::Index>(d);
    for (std::size_t k = 0; k < len; ++k) {
        Operator r(di, di);
        out.stderr[k].resize(di, di);
        for (Eigen::Index a = 0; a < di; ++a)
            for (Eigen::Index b = 0; b < di; ++b) {
                const std::size_t idx = (k * d + static_cast<std::size_t>(a)) * d + static_cast<std::size_t>(b);
                r(a, b) = mean[idx];
                out.stderr[k](a, b) = err[idx];
            }
        out.rho[k] = 0.5 * (r + r.adjoint());
    }
    return out;
}

inline constexpr double kTraceTolerance = 1e-10;

/// rho~(t) = M[|psi(t)><psi~(t)|] from its closed deterministic evolution
/// d rho~/dt = -i [H_s(t), rho~] - [L^dagger O(t), rho~] (classical RK4 on the
/// grid, stages on the half-step points).
inline DensitySeries evolve_rho_tilde(const ModelSpec& model) {
    if (model.obar_coeffs.empty()) throw ConfigError("evolve_rho_tilde: model O-bar coefficients not populated");
    const TimeGrid& grid = model.grid;
    const double h = grid.dt;
    const State psi0 = model.initial_state();

    DensitySeries out;
    out.grid = grid;
    out.rho.resize(grid.size());
    out.rho[0] = psi0 * psi0.adjoint();

    auto rhs = [&](std::size_t j, const Operator& r) -> Operator {
        const Operator& heff = model.effective_hamiltonian(j);
        return -kI * (heff * r - r * heff);
    };
    Operator r = out.rho[0];
    const Complex trace0 = r.trace();
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const std::size_t j = 2 * k;
        const Operator k1 = rhs(j, r);
        const Operator k2 = rhs(j + 1, r + (0.5 * h) * k1);
        const Operator k3 = rhs(j + 1, r + (0.5 * h) * k2);
        const Operator k4 = rhs(j + 2, r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(std::abs(r.sum())) || r.norm() > kStateBlowUp)
            throw BlowUp("evolve_rho_tilde diverged", grid.time(k + 1));
        if (std::abs(r.trace() - trace0) > kTraceTolerance)
            throw IntegrationFailure("evolve_rho_tilde: trace drifted beyond 1e-10", grid.time(k + 1));
        out.rho[k + 1] = r;
    }
    return out;
}

}  // namespace geodec
