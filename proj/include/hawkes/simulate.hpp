#pragma once

#include "hawkes/events.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hawkes {

/// Exponential-kernel Hawkes parameters: intensity
///   lambda_i(t) = mu_i + sum_j sum_{s in Z_j, s<t} alpha_ij exp(-beta_ij (t-s)),
/// clamped at zero when negative amplitudes drive it below zero.
struct HawkesParams {
    Eigen::VectorXd mu;     // background rates, >= 0
    Eigen::MatrixXd alpha;  // kernel amplitudes (may be negative)
    Eigen::MatrixXd beta;   // decay rates, > 0

    int dim() const { return static_cast<int>(mu.size()); }
    void validate() const; // shape/positivity/stationarity; throws
};

/// Piecewise-constant parameter regimes laid end to end.
struct Scenario {
    struct Segment {
        double duration;
        HawkesParams params;
    };
    std::vector<Segment> segments;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Kernel-integral (branching-ratio) matrix h_ij = alpha_ij / beta_ij.
Eigen::MatrixXd kernel_integral(const HawkesParams& params);

/// Largest eigenvalue modulus of a square (not necessarily symmetric) matrix.
double spectral_radius(const Eigen::MatrixXd& H);

/// Ogata thinning with O(1)-per-event recursive intensity updates.
/// Deterministic given (params, T, seed). Requires spectral radius < 1.
EventStream simulate(const HawkesParams& params, double T, std::uint64_t seed);

struct ScenarioResult {
    EventStream stream;
    std::vector<double> change_times; // segment boundaries, excluding 0 and T
};

/// Simulates each segment independently (excitation memory resets at each
/// boundary) with per-segment seeds derived from the scenario seed.
ScenarioResult simulate_scenario(const Scenario& scenario);

/// Synthetic-benchmark parameter generator: mu_i = 0.3,
/// beta_ij = 0.5 + U(0,1), diagonal amplitudes 1/8, off-diagonal amplitudes
/// N(0, 1/64) symmetrized; redrawn until the kernel integral is stable.
HawkesParams random_params(int dim, std::uint64_t seed, int max_draws = 1000);

/// Regime-switching scenario in the same family: beta and mu are drawn once,
/// the off-diagonal amplitudes are redrawn for every segment.
Scenario random_switching_scenario(int dim, int n_segments, double segment_len,
                                   std::uint64_t seed);

} // namespace hawkes
