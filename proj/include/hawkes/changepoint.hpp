#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hawkes {

struct CpConfig {
    double c = 0.1;        // interior fraction: splits scanned on [c, 1-c]
    double alpha = 0.05;   // significance level
    int mc_samples = 10000; // Monte-Carlo replicates for the quantile
    int grid = 1000;       // Brownian-bridge time grid
    int min_segment = 10;  // smallest segment the recursion still tests
    int max_depth = 6;

    void validate() const;
};

struct SegmentStats {
    double V1, V2;   // within-segment Frechet variances
    double V1C, V2C; // contaminated versions (complementary segment's mean)
};

struct TnProfile {
    int k_lo = 0;                // first split index scanned
    std::vector<double> ntn;     // n*T_n(k/n) for k = k_lo .. k_lo + size - 1
    double sigma2 = 0.0;
    bool degenerate = false;     // sigma2 ~ 0: identical data, profile all zero
};

struct SingleDetection {
    bool found = false;
    int k = -1;          // first index of the right-hand segment
    double stat = 0.0;   // sup_k n*T_n
    double threshold = 0.0;
    std::string reason;  // set when not found
};

struct SegmentRecord {
    int lo = 0, hi = 0; // global window range [lo, hi)
    int depth = 0;
    bool tested = false;
    bool rejected = false;
    bool depth_capped = false; // rejected but recursion stopped by max_depth
    int k_global = -1;
    double sup_stat = 0.0;
    double sigma2 = 0.0;
    std::string reason;
    TnProfile profile;
    std::vector<int> children; // indices into CpReport::segments
};

struct CpReport {
    std::vector<int> change_indices; // sorted; each is the first window of a new regime
    double threshold = 0.0;
    std::vector<SegmentRecord> segments; // segments[0] is the root
};

// The Log-Euclidean chart makes every statistic Euclidean on the matrix
// logarithms, so the core operates on log matrices; the SPD-input overloads
// take the logs first. Pipelines pass the logs cached in CausalSnapshot.

SegmentStats segment_stats_logs(std::span<const Eigen::MatrixXd> logs, int k);
SegmentStats segment_frechet_stats(std::span<const Eigen::MatrixXd> spd, int k);

/// Variance of the squared distances to the full-sample Frechet mean.
double sigma2_logs(std::span<const Eigen::MatrixXd> logs);
double sigma2_hat(std::span<const Eigen::MatrixXd> spd);

/// n*T_n(k/n) over the interior splits, where
/// T_n(u) = [u(1-u)/sigma2] [ (V1-V2)^2 + (V1C-V1+V2C-V2)^2 ].
TnProfile tn_profile_logs(std::span<const Eigen::MatrixXd> logs, const CpConfig& config);
TnProfile tn_profile(std::span<const Eigen::MatrixXd> spd, const CpConfig& config);

/// Monte-Carlo (1-alpha) quantile of sup_{u in [c,1-c]} B(u)^2 / (u(1-u))
/// for a Brownian bridge B. Deterministic given the seed.
double bb_sup_quantile(const CpConfig& config, std::uint64_t seed);

SingleDetection detect_single_logs(std::span<const Eigen::MatrixXd> logs,
                                   const CpConfig& config, double threshold);
SingleDetection detect_single(std::span<const Eigen::MatrixXd> spd,
                              const CpConfig& config, std::uint64_t seed);

/// Binary segmentation: the quantile is computed once and reused at every
/// recursion level (the limit law does not depend on n).
CpReport detect_multiple_logs(std::span<const Eigen::MatrixXd> logs,
                              const CpConfig& config, std::uint64_t seed);
CpReport detect_multiple(std::span<const Eigen::MatrixXd> spd, const CpConfig& config,
                         std::uint64_t seed);

} // namespace hawkes
