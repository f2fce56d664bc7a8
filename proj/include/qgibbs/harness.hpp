#pragma once

#include "qgibbs/dynamics.hpp"
#include "qgibbs/gibbs.hpp"
#include "qgibbs/report.hpp"

#include <vector>

// Named, reproducible experiments turning the model's invariance and chaos
// statements into pass/fail statistical tests. Every experiment is a pure
// function of (params, config, seed); ensemble members draw from per-member
// counter-based streams and results are reduced in member order, so reports
// are byte-identical across runs and thread counts.

namespace qgibbs {

struct Thresholds {
    double z_max = 5.0;            // 5-sigma with Bonferroni slack over mode count
    double flatten_frac = 0.01;    // regularity: last-decade tail increment bound
    double ratio_lo = 8.0;         // conservation: RK4 drift ratio window around 16
    double ratio_hi = 32.0;
    double min_order = 1.6;        // residual: minimal empirical order in dt
    double neutrality_max = 1e-10; // advective neutrality, relative
    double bias_max = 1e-6;        // integrator-bias flag on pseudoenergy drift
};

struct InvarianceConfig {
    long members = 20000;
    double t_final = 1.0;
    double dt = 1e-3;
    double variance_scale = 1.0;  // != 1 turns the run into a wrong-variance control
    long control_members = 2000;  // coarse-dt negative control ensemble
    double control_dt = 0.1;
    Thresholds thr;
};

struct ConservationConfig {
    double t_final = 1.0;
    double dt = 4e-3;  // runs {2 dt, dt, dt/2}
    int stride = 4;
    Thresholds thr;
};

struct ChaosConfig {
    long samples = 100000;
    std::vector<int> truncations = {2, 3, 4, 5};  // progressive H^M_phi levels
    Thresholds thr;
};

struct RegularityConfig {
    std::vector<double> deltas = {0.0, 0.5, 1.0, 1.5};
    std::vector<long> m_list = {100, 1000, 10000, 100000, 1000000};
    Thresholds thr;
};

struct ResidualConfig {
    double t_final = 0.5;
    double dt = 4e-3;  // coarsest level; halved (levels-1) times
    int levels = 3;
    Thresholds thr;
};

Report invariance_experiment(const GibbsParams& p, const InvarianceConfig& cfg,
                             std::uint64_t seed, int threads);
Report conservation_experiment(const GibbsParams& p, const ConservationConfig& cfg,
                               std::uint64_t seed);
Report chaos_experiment(const GibbsParams& p, const ChaosConfig& cfg, std::uint64_t seed,
                        int threads);
Report regularity_experiment(const RegularityConfig& cfg);
Report residual_experiment(const GibbsParams& p, const ResidualConfig& cfg, std::uint64_t seed);

/// Deterministic member-parallel map: fn(i) for i in [0, n), chunked over
/// `threads` std::threads; fn must only write to its own slot.
void parallel_members(long n, int threads, const std::function<void(long)>& fn);

/// Smooth random real test function with coefficient decay (1+|l|^2)^{-2}.
SpectralField random_smooth_field(int cutoff, rng::Key key);

/// Random symmetric real kernel with zero diagonal and anti-diagonal (the
/// class on which the Wick formulas are exact; see kernel.hpp).
Kernel2 random_symmetric_kernel(int cutoff, rng::Key key);

/// The test function sin(y): synthesis coefficient 2 pi at (0,1).
SpectralField sin_y_field(int cutoff);

}  // namespace qgibbs
